#include "text/search.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <mutex>
#include <optional>
#include <thread>

namespace text {

struct SearchHandle::State {
  std::shared_ptr<const QueryModel> query;
  std::vector<PagePtr> pages;
  std::vector<int> order;
  EngineConfig cfg;
  EmitFn emit;

  std::mutex mu;
  std::condition_variable cv;
  std::vector<std::optional<PageResult>> results;
  std::atomic<int> next_emit{0};
  std::atomic<int> finished{0};
  std::atomic<bool> cancelled{false};
  std::atomic<bool> failed{false};
  std::atomic<std::thread::id> emitting{};
  std::string error;

  int total() const { return static_cast<int>(order.size()); }

  void run_task(int slot) {
    std::optional<PageResult> result;
    if (!cancelled.load()) {
      try {
        const auto t0 = std::chrono::steady_clock::now();
        const Page& page = *pages.at(static_cast<std::size_t>(order[slot]));
        PageResult r;
        r.page_id = page.id();
        r.candidates = score_page(*query, page, cfg);
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result = std::move(r);
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        if (error.empty()) error = e.what();
        failed = true;
        cancelled = true;
      }
    }

    std::lock_guard lock(mu);
    results[slot] = std::move(result);
    // Flush the longest ready prefix so emission order follows `order`.
    while (!cancelled.load() && next_emit.load() < total() && results[next_emit.load()]) {
      emitting = std::this_thread::get_id();
      try {
        emit(*results[next_emit.load()]);
      } catch (const std::exception& e) {
        if (error.empty()) error = std::string("emit: ") + e.what();
        failed = true;
        cancelled = true;
      }
      emitting = std::thread::id{};
      results[next_emit.load()].reset();
      ++next_emit;
    }
    ++finished;
    cv.notify_all();
  }
};

std::vector<int> search_order(int n_pages, int first_page) {
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(std::max(0, n_pages)));
  if (first_page >= 0 && first_page < n_pages) order.push_back(first_page);
  for (int i = 0; i < n_pages; ++i) {
    if (i != first_page) order.push_back(i);
  }
  return order;
}

SearchHandle::SearchHandle(std::shared_ptr<State> state, std::shared_ptr<WorkerPool> owned_pool)
    : state_(std::move(state)), owned_pool_(std::move(owned_pool)) {}

SearchHandle& SearchHandle::operator=(SearchHandle&&) noexcept = default;
SearchHandle::~SearchHandle() = default;

void SearchHandle::cancel() {
  if (!state_) return;
  state_->cancelled = true;
  if (state_->emitting.load() == std::this_thread::get_id()) return;
  // Wait out an emission that may be in progress on another thread.
  std::lock_guard lock(state_->mu);
}

SearchStatus SearchHandle::await_done() {
  if (!state_) return SearchStatus::Completed;
  std::unique_lock lock(state_->mu);
  state_->cv.wait(lock, [this] { return state_->finished.load() == state_->total(); });
  if (state_->failed) return SearchStatus::Failed;
  if (state_->next_emit.load() < state_->total()) return SearchStatus::Cancelled;
  return SearchStatus::Completed;
}

bool SearchHandle::done() const {
  return !state_ || state_->finished.load() == state_->total();
}

std::string SearchHandle::error() const {
  if (!state_) return {};
  std::lock_guard lock(state_->mu);
  return state_->error;
}

int SearchHandle::pages_emitted() const { return state_ ? state_->next_emit.load() : 0; }
int SearchHandle::pages_total() const { return state_ ? state_->total() : 0; }

SearchHandle search_corpus(std::shared_ptr<const QueryModel> q, std::vector<PagePtr> pages,
                           std::vector<int> order, EngineConfig cfg, EmitFn emit, WorkerPool& pool) {
  q->validate();
  auto state = std::make_shared<SearchHandle::State>();
  state->query = std::move(q);
  state->pages = std::move(pages);
  state->order = std::move(order);
  state->cfg = std::move(cfg);
  state->emit = std::move(emit);
  state->results.resize(state->order.size());
  for (int slot = 0; slot < state->total(); ++slot) {
    pool.submit([state, slot] { state->run_task(slot); });
  }
  return SearchHandle(state, nullptr);
}

SearchHandle search_corpus(std::shared_ptr<const QueryModel> q, std::vector<PagePtr> pages,
                           int first_page, EngineConfig cfg, EmitFn emit, int workers) {
  auto pool = std::make_shared<WorkerPool>(workers);
  std::vector<int> order = search_order(static_cast<int>(pages.size()), first_page);
  SearchHandle h = search_corpus(std::move(q), std::move(pages), std::move(order), std::move(cfg),
                                 std::move(emit), *pool);
  return SearchHandle(std::move(h.state_), std::move(pool));
}

}  // namespace text
