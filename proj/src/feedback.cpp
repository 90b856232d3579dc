#include "text/feedback.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "text/error.hpp"

namespace text {

namespace {

struct JudgedScores {
  std::vector<double> confirmed;
  std::vector<double> rejected;
};

JudgedScores judged_scores(const Project& project, std::string_view query_id) {
  JudgedScores s;
  for (const Match& m : project.matches) {
    if (m.query_id != query_id) continue;
    if (m.state == MatchState::Confirmed) s.confirmed.push_back(m.score);
    if (m.state == MatchState::Rejected) s.rejected.push_back(m.score);
  }
  return s;
}

void set_state(Match& m, const QueryWord& q, Verdict verdict) {
  if (verdict == Verdict::Confirm) {
    m.state = MatchState::Confirmed;
    m.transcription = q.transcription;
    m.category = q.category;
  } else {
    m.state = MatchState::Rejected;
    m.transcription.clear();
    m.category = Category::None;
  }
}

bool suppressed(const Project& project, const QueryWord& q, int page_id, const BoundingBox& box) {
  const double limit = project.config.blacklist_iou;
  if (q.page_id == page_id && iou(q.snapped_box, box) >= limit) return true;
  for (const Match& m : project.matches) {
    if (m.query_id != q.query_id || m.page_id != page_id || m.state == MatchState::Pending) continue;
    if (iou(m.box, box) >= limit) return true;
  }
  return false;
}

bool box_before(int pa, const BoundingBox& a, int pb, const BoundingBox& b) {
  if (pa != pb) return pa < pb;
  if (a.y != b.y) return a.y < b.y;
  if (a.x != b.x) return a.x < b.x;
  if (a.h != b.h) return a.h < b.h;
  return a.w < b.w;
}

}  // namespace

ThresholdDecision adaptive_threshold(const std::vector<double>& confirmed_scores,
                                     const std::vector<double>& rejected_scores, double base) {
  ThresholdDecision d;
  d.value = base;
  const bool has_c = !confirmed_scores.empty();
  const bool has_r = !rejected_scores.empty();
  if (has_c && has_r) {
    const double lo_c = *std::min_element(confirmed_scores.begin(), confirmed_scores.end());
    const double hi_r = *std::max_element(rejected_scores.begin(), rejected_scores.end());
    d.value = 0.5 * (lo_c + hi_r);
    d.inverted = hi_r >= lo_c;
  } else if (has_c) {
    const double lo_c = *std::min_element(confirmed_scores.begin(), confirmed_scores.end());
    d.value = std::min(base, lo_c - kThresholdMargin);
  } else if (has_r) {
    const double hi_r = *std::max_element(rejected_scores.begin(), rejected_scores.end());
    d.value = std::max(base, hi_r + kThresholdMargin);
  }
  d.value = std::clamp(d.value, kThresholdMin, kThresholdMax);
  return d;
}

ThresholdDecision query_threshold(const Project& project, std::string_view query_id) {
  const JudgedScores s = judged_scores(project, query_id);
  return adaptive_threshold(s.confirmed, s.rejected, project.config.default_threshold);
}

FeedbackResult apply_feedback(Project& project, std::string_view match_id, Verdict verdict,
                              std::int64_t timestamp_ms) {
  Match* m = project.find_match(match_id);
  if (!m) throw Error(ErrorCode::UnknownMatch, "no match " + std::string(match_id));
  const QueryWord& q = project.query(m->query_id);

  FeedbackResult r;
  const ThresholdDecision before = query_threshold(project, q.query_id);
  r.delta.threshold_before = before.value;

  const MatchState target = verdict == Verdict::Confirm ? MatchState::Confirmed : MatchState::Rejected;
  if (m->state != target) {
    if (m->state == MatchState::Confirmed) r.delta.positives_removed = 1;
    if (m->state == MatchState::Rejected) r.delta.negatives_removed = 1;
    if (target == MatchState::Confirmed) r.delta.positives_added = 1;
    if (target == MatchState::Rejected) r.delta.negatives_added = 1;
    set_state(*m, q, verdict);

    FeedbackEvent e;
    e.seq = project.feedback_log.empty() ? 1 : project.feedback_log.back().seq + 1;
    e.match_id = m->match_id;
    e.verdict = verdict;
    e.timestamp_ms = timestamp_ms;
    project.feedback_log.push_back(std::move(e));
    project.bump();
  }

  const ThresholdDecision after = query_threshold(project, q.query_id);
  r.state = m->state;
  r.delta.threshold_after = after.value;
  r.delta.inverted = after.inverted;
  r.new_threshold = after.value;
  return r;
}

QueryModel build_query_model(const Project& project, std::string_view query_id) {
  const QueryWord& q = project.query(query_id);
  const EngineConfig& cfg = project.config;
  QueryModel model;
  model.query_id = q.query_id;
  model.scales = cfg.scales;
  model.positives.push_back(extract_template(project.page(q.page_id), q.snapped_box, cfg));

  std::vector<const Match*> judged;
  for (const Match& m : project.matches) {
    if (m.query_id == query_id && m.state != MatchState::Pending) judged.push_back(&m);
  }
  std::sort(judged.begin(), judged.end(),
            [](const Match* a, const Match* b) { return a->match_id < b->match_id; });
  for (const Match* m : judged) {
    try {
      WordTemplate t = extract_template(project.page(m->page_id), m->box, cfg);
      (m->state == MatchState::Confirmed ? model.positives : model.negatives).push_back(std::move(t));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyTemplate) throw;
    }
  }
  model.threshold = query_threshold(project, query_id).value;
  return model;
}

bool blacklisted(const Project& project, std::string_view query_id, int page_id, const BoundingBox& box) {
  for (const Match& m : project.matches) {
    if (m.query_id == query_id && m.page_id == page_id && m.state == MatchState::Rejected &&
        iou(m.box, box) >= project.config.blacklist_iou) {
      return true;
    }
  }
  return false;
}

IngestResult ingest_candidates(Project& project, std::string_view query_id, int page_id,
                               const std::vector<Candidate>& candidates) {
  const QueryWord& q = project.query(query_id);
  IngestResult r;
  std::set<std::string> fresh;
  std::map<std::string, double> scores;
  for (const Candidate& c : candidates) {
    if (c.page_id != page_id || suppressed(project, q, page_id, c.box)) continue;
    std::string id = make_match_id(q.query_id, page_id, c.box);
    if (!fresh.insert(id).second) continue;
    scores[id] = c.score;
    r.upserted.push_back(std::move(id));
  }

  std::vector<Match> kept;
  kept.reserve(project.matches.size() + r.upserted.size());
  for (Match& m : project.matches) {
    const bool ours = m.query_id == query_id && m.page_id == page_id && m.state == MatchState::Pending;
    if (ours && !fresh.count(m.match_id)) {
      r.removed.push_back(m.match_id);
      continue;
    }
    if (ours) {
      m.score = scores[m.match_id];
      fresh.erase(m.match_id);
    }
    kept.push_back(std::move(m));
  }
  for (const Candidate& c : candidates) {
    if (c.page_id != page_id) continue;
    std::string id = make_match_id(q.query_id, page_id, c.box);
    if (!fresh.erase(id)) continue;
    Match m;
    m.match_id = std::move(id);
    m.query_id = q.query_id;
    m.page_id = page_id;
    m.box = c.box;
    m.score = c.score;
    kept.push_back(std::move(m));
  }
  project.matches = std::move(kept);
  return r;
}

IngestResult rescore_pending(Project& project, std::string_view query_id, WorkerPool* pool) {
  const QueryWord& q = project.query(query_id);
  const QueryModel model = build_query_model(project, query_id);
  const int n = static_cast<int>(project.pages.size());
  const std::vector<int> order = search_order(n, q.page_id);

  std::vector<std::vector<Candidate>> per_page(static_cast<std::size_t>(n));
  if (pool) {
    auto shared = std::make_shared<const QueryModel>(model);
    SearchHandle h = search_corpus(
        shared, project.pages, order, project.config,
        [&](const PageResult& pr) { per_page[static_cast<std::size_t>(pr.page_id)] = pr.candidates; }, *pool);
    if (h.await_done() != SearchStatus::Completed) {
      throw Error(ErrorCode::InvalidParams, "rescore failed: " + h.error());
    }
  } else {
    for (int p : order) {
      per_page[static_cast<std::size_t>(p)] = score_page(model, project.page(p), project.config);
    }
  }

  IngestResult total;
  for (int p : order) {
    IngestResult r = ingest_candidates(project, query_id, p, per_page[static_cast<std::size_t>(p)]);
    total.upserted.insert(total.upserted.end(), r.upserted.begin(), r.upserted.end());
    total.removed.insert(total.removed.end(), r.removed.begin(), r.removed.end());
  }
  project.bump();
  return total;
}

void replay_feedback(Project& project) {
  for (Match& m : project.matches) {
    m.state = MatchState::Pending;
    m.transcription.clear();
    m.category = Category::None;
  }
  for (const FeedbackEvent& e : project.feedback_log) {
    Match* m = project.find_match(e.match_id);
    if (!m) throw Error(ErrorCode::UnknownMatch, "feedback log names missing match " + e.match_id);
    set_state(*m, project.query(m->query_id), e.verdict);
  }
}

std::vector<const Match*> visible_matches(const Project& project, std::string_view query_id) {
  std::vector<const Match*> out;
  for (const Match& m : project.matches) {
    if (m.state == MatchState::Rejected) continue;
    if (!query_id.empty() && m.query_id != query_id) continue;
    out.push_back(&m);
  }
  std::sort(out.begin(), out.end(), [](const Match* a, const Match* b) {
    if (box_before(a->page_id, a->box, b->page_id, b->box)) return true;
    if (box_before(b->page_id, b->box, a->page_id, a->box)) return false;
    return a->match_id < b->match_id;
  });
  return out;
}

}  // namespace text
