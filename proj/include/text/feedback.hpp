#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "text/project.hpp"
#include "text/search.hpp"
#include "text/spotting.hpp"

namespace text {

/// Which exemplar sets a verdict changed. Empty iff the verdict repeated the
/// match's current state.
struct ModelDelta {
  int positives_added = 0;
  int positives_removed = 0;
  int negatives_added = 0;
  int negatives_removed = 0;
  double threshold_before = 0.0;
  double threshold_after = 0.0;
  /// Confirmed and rejected scores overlap; the user may be inconsistent.
  bool inverted = false;

  bool empty() const {
    return positives_added == 0 && positives_removed == 0 && negatives_added == 0 &&
           negatives_removed == 0;
  }
};

struct FeedbackResult {
  MatchState state = MatchState::Pending;
  ModelDelta delta;
  double new_threshold = 0.0;
};

struct ThresholdDecision {
  double value = 0.55;
  bool inverted = false;
};

inline constexpr double kThresholdMin = 0.3;
inline constexpr double kThresholdMax = 0.9;
inline constexpr double kThresholdMargin = 0.05;

/// Threshold from the scores matches had when the user judged them.
///   none: base
///   only confirms: min(base, lowest confirmed - 0.05)
///   only rejects: max(base, highest rejected + 0.05)
///   both: midpoint of highest rejected and lowest confirmed
/// always clamped to [0.3, 0.9].
ThresholdDecision adaptive_threshold(const std::vector<double>& confirmed_scores,
                                     const std::vector<double>& rejected_scores, double base = 0.55);
ThresholdDecision query_threshold(const Project& project, std::string_view query_id);

/// Record a verdict on a match. Confirm gives the match the query's
/// transcription and category; reject clears them and blacklists the box.
/// A repeated verdict changes nothing and appends no event.
/// Throws Error{UnknownMatch}.
FeedbackResult apply_feedback(Project& project, std::string_view match_id, Verdict verdict,
                              std::int64_t timestamp_ms);

/// Current model of a query: its own template plus confirmed exemplars as
/// positives, rejected exemplars as negatives, adaptive threshold.
/// Throws Error{UnknownQuery}.
QueryModel build_query_model(const Project& project, std::string_view query_id);

/// True when `box` overlaps a rejected match of the query by at least the
/// blacklist IoU.
bool blacklisted(const Project& project, std::string_view query_id, int page_id, const BoundingBox& box);

struct IngestResult {
  /// Pending matches created or re-scored, in candidate order.
  std::vector<std::string> upserted;
  /// Pending matches dropped because the page no longer produces them.
  std::vector<std::string> removed;

  bool empty() const { return upserted.empty() && removed.empty(); }
};

/// Merge one page's candidates into the query's pending matches. Candidates
/// overlapping a judged match or the query's own box are suppressed;
/// confirmed and rejected matches are never touched.
IngestResult ingest_candidates(Project& project, std::string_view query_id, int page_id,
                               const std::vector<Candidate>& candidates);

/// Re-search every page with the current model and merge. Bumps the
/// project version once. Runs on `pool` when given, inline otherwise.
/// Throws Error{UnknownQuery}.
IngestResult rescore_pending(Project& project, std::string_view query_id, WorkerPool* pool = nullptr);

/// Reset every match to pending and re-apply the feedback log in order.
/// Throws Error{UnknownMatch} when the log names a match that no longer exists.
void replay_feedback(Project& project);

/// Matches the user should see for a query (or for all queries when
/// `query_id` is empty): pending and confirmed, sorted by page, y, x.
std::vector<const Match*> visible_matches(const Project& project, std::string_view query_id = {});

}  // namespace text
