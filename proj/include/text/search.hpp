#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "text/config.hpp"
#include "text/page.hpp"
#include "text/spotting.hpp"
#include "text/worker_pool.hpp"

namespace text {

/// One page's worth of search output.
struct PageResult {
  int page_id = -1;
  std::vector<Candidate> candidates;
  /// Wall time spent scoring this page.
  double seconds = 0.0;
};

using EmitFn = std::function<void(const PageResult&)>;

enum class SearchStatus { Running, Completed, Cancelled, Failed };

/// Page visiting order for a query: its own page first, then ascending id.
std::vector<int> search_order(int n_pages, int first_page);

/// Handle to a running corpus search.
class SearchHandle {
 public:
  struct State;

  SearchHandle() = default;
  SearchHandle(std::shared_ptr<State> state, std::shared_ptr<WorkerPool> owned_pool);
  SearchHandle(SearchHandle&&) noexcept = default;
  SearchHandle& operator=(SearchHandle&&) noexcept;
  ~SearchHandle();

  /// No emission starts after cancel() returns. Safe to call from inside
  /// the emit callback.
  void cancel();
  /// Blocks until every page task has finished or been skipped.
  SearchStatus await_done();
  bool done() const;
  /// First failure message once await_done() reports Failed.
  std::string error() const;
  int pages_emitted() const;
  int pages_total() const;
  bool valid() const { return state_ != nullptr; }

 private:
  friend SearchHandle search_corpus(std::shared_ptr<const QueryModel>, std::vector<PagePtr>, int,
                                    EngineConfig, EmitFn, int);

  std::shared_ptr<State> state_;
  std::shared_ptr<WorkerPool> owned_pool_;
};

/// Score `pages[order[i]]` for every i on `pool`. Results are delivered to
/// `emit` strictly in `order`, one batch per page, from whichever worker
/// completes the next batch in line; the union of emissions does not depend
/// on the worker count.
SearchHandle search_corpus(std::shared_ptr<const QueryModel> q, std::vector<PagePtr> pages,
                           std::vector<int> order, EngineConfig cfg, EmitFn emit, WorkerPool& pool);

/// Convenience overload owning a pool of `workers` threads; visits the
/// query's own page (`first_page`) first.
SearchHandle search_corpus(std::shared_ptr<const QueryModel> q, std::vector<PagePtr> pages,
                           int first_page, EngineConfig cfg, EmitFn emit, int workers);

}  // namespace text
