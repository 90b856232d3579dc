#pragma once

#include <map>
#include <optional>
#include <vector>

#include <json.hpp>

#include "text/project.hpp"
#include "text/spotting.hpp"

namespace text {

struct PageTiming {
  int page_id = -1;
  double median_seconds = 0.0;
};

struct BenchRun {
  int workers = 1;
  int runs = 0;
  /// Seconds spent building page layers before timing started.
  double prepare_seconds = 0.0;
  /// In search order.
  std::vector<PageTiming> pages;
  double median_total_seconds = 0.0;
  /// Candidates per page from the first run.
  std::map<int, std::vector<Candidate>> candidates;
};

struct BenchReport {
  BenchRun run;
  std::optional<BenchRun> baseline;
  /// baseline total / run total
  double speedup = 1.0;
  /// Whether the baseline produced exactly the same candidates.
  bool identical = true;
};

/// Time `runs` full searches of the corpus with `workers` threads, page
/// layers prepared up front. Per-page and total times are medians.
BenchRun bench_search(const Project& project, const QueryModel& model, int first_page, int workers,
                      int runs = 5);

/// bench_search with `workers`, plus a 1-worker baseline when workers > 1.
BenchReport bench(const Project& project, const QueryModel& model, int first_page, int workers, int runs = 5);

double median(std::vector<double> values);

nlohmann::json to_json(const BenchReport& r);

}  // namespace text
