#include "text/bench.hpp"

#include <algorithm>
#include <chrono>

#include "text/error.hpp"
#include "text/search.hpp"

namespace text {

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

BenchRun bench_search(const Project& project, const QueryModel& model, int first_page, int workers,
                      int runs) {
  using clock = std::chrono::steady_clock;
  BenchRun out;
  out.workers = std::max(1, workers);
  out.runs = std::max(1, runs);

  const auto t_prep = clock::now();
  for (const PagePtr& p : project.pages) p->layers(project.config);
  out.prepare_seconds = std::chrono::duration<double>(clock::now() - t_prep).count();

  const int n = static_cast<int>(project.pages.size());
  const std::vector<int> order = search_order(n, first_page);
  auto shared = std::make_shared<const QueryModel>(model);
  std::map<int, std::vector<double>> page_times;
  std::vector<double> totals;
  WorkerPool pool(out.workers);
  for (int r = 0; r < out.runs; ++r) {
    std::map<int, std::vector<Candidate>> found;
    const auto t0 = clock::now();
    SearchHandle h = search_corpus(
        shared, project.pages, order, project.config,
        [&](const PageResult& pr) {
          page_times[pr.page_id].push_back(pr.seconds);
          found[pr.page_id] = pr.candidates;
        },
        pool);
    if (h.await_done() != SearchStatus::Completed) {
      throw Error(ErrorCode::InvalidParams, "benchmark search failed: " + h.error());
    }
    totals.push_back(std::chrono::duration<double>(clock::now() - t0).count());
    if (r == 0) out.candidates = std::move(found);
  }
  for (int p : order) out.pages.push_back({p, median(page_times[p])});
  out.median_total_seconds = median(totals);
  return out;
}

BenchReport bench(const Project& project, const QueryModel& model, int first_page, int workers, int runs) {
  BenchReport r;
  r.run = bench_search(project, model, first_page, workers, runs);
  if (r.run.workers > 1) {
    r.baseline = bench_search(project, model, first_page, 1, runs);
    r.identical = r.baseline->candidates == r.run.candidates;
    if (r.run.median_total_seconds > 0.0) {
      r.speedup = r.baseline->median_total_seconds / r.run.median_total_seconds;
    }
  }
  return r;
}

namespace {

nlohmann::json run_json(const BenchRun& run) {
  nlohmann::json pages = nlohmann::json::array();
  std::size_t n_cands = 0;
  for (const PageTiming& t : run.pages) pages.push_back({{"page", t.page_id}, {"median_seconds", t.median_seconds}});
  for (const auto& [page, cands] : run.candidates) n_cands += cands.size();
  return {{"workers", run.workers},
          {"runs", run.runs},
          {"prepare_seconds", run.prepare_seconds},
          {"median_total_seconds", run.median_total_seconds},
          {"candidates", n_cands},
          {"pages", std::move(pages)}};
}

}  // namespace

nlohmann::json to_json(const BenchReport& r) {
  nlohmann::json j = {{"run", run_json(r.run)}};
  if (r.baseline) {
    j["baseline"] = run_json(*r.baseline);
    j["speedup"] = r.speedup;
    j["identical"] = r.identical;
  }
  return j;
}

}  // namespace text
