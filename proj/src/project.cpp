#include "text/project.hpp"

#include <algorithm>

#include "text/error.hpp"

namespace text {

std::string_view to_string(Category c) {
  switch (c) {
    case Category::None: return "none";
    case Category::Name: return "name";
    case Category::Place: return "place";
  }
  return "none";
}

std::string_view to_string(MatchState s) {
  switch (s) {
    case MatchState::Pending: return "pending";
    case MatchState::Confirmed: return "confirmed";
    case MatchState::Rejected: return "rejected";
  }
  return "pending";
}

std::string_view to_string(Verdict v) { return v == Verdict::Confirm ? "confirm" : "reject"; }

Category parse_category(std::string_view s) {
  if (s == "none") return Category::None;
  if (s == "name") return Category::Name;
  if (s == "place") return Category::Place;
  throw Error(ErrorCode::SchemaError, "unknown category '" + std::string(s) + "'");
}

MatchState parse_match_state(std::string_view s) {
  if (s == "pending") return MatchState::Pending;
  if (s == "confirmed") return MatchState::Confirmed;
  if (s == "rejected") return MatchState::Rejected;
  throw Error(ErrorCode::SchemaError, "unknown match state '" + std::string(s) + "'");
}

Verdict parse_verdict(std::string_view s) {
  if (s == "confirm") return Verdict::Confirm;
  if (s == "reject") return Verdict::Reject;
  throw Error(ErrorCode::SchemaError, "unknown verdict '" + std::string(s) + "'");
}

const Page& Project::page(int page_id) const {
  if (page_id < 0 || page_id >= static_cast<int>(pages.size())) {
    throw Error(ErrorCode::UnknownPage, "no page " + std::to_string(page_id));
  }
  return *pages[static_cast<std::size_t>(page_id)];
}

const QueryWord& Project::query(std::string_view query_id) const {
  auto it = std::find_if(queries.begin(), queries.end(),
                         [&](const QueryWord& q) { return q.query_id == query_id; });
  if (it == queries.end()) throw Error(ErrorCode::UnknownQuery, "no query " + std::string(query_id));
  return *it;
}

QueryWord& Project::query(std::string_view query_id) {
  return const_cast<QueryWord&>(std::as_const(*this).query(query_id));
}

const Match* Project::find_match(std::string_view match_id) const {
  auto it = std::find_if(matches.begin(), matches.end(),
                         [&](const Match& m) { return m.match_id == match_id; });
  return it == matches.end() ? nullptr : &*it;
}

Match* Project::find_match(std::string_view match_id) {
  return const_cast<Match*>(std::as_const(*this).find_match(match_id));
}

bool same_project(const Project& a, const Project& b) {
  if (a.pages.size() != b.pages.size()) return false;
  for (std::size_t i = 0; i < a.pages.size(); ++i) {
    if (!(*a.pages[i] == *b.pages[i])) return false;
  }
  return a.id == b.id && a.queries == b.queries &&
         a.matches == b.matches && a.feedback_log == b.feedback_log && a.config == b.config &&
         a.version == b.version;
}

std::string make_match_id(std::string_view query_id, int page_id, const BoundingBox& box) {
  return std::string(query_id) + "-p" + std::to_string(page_id) + "-x" + std::to_string(box.x) +
         "-y" + std::to_string(box.y) + "-w" + std::to_string(box.w) + "-h" + std::to_string(box.h);
}

void to_json(nlohmann::json& j, const BoundingBox& b) {
  j = {{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}};
}

void from_json(const nlohmann::json& j, BoundingBox& b) {
  b.x = j.at("x").get<int>();
  b.y = j.at("y").get<int>();
  b.w = j.at("w").get<int>();
  b.h = j.at("h").get<int>();
}

void to_json(nlohmann::json& j, const QueryWord& q) {
  j = {{"query_id", q.query_id},
       {"page", q.page_id},
       {"user_box", q.user_box},
       {"snapped_box", q.snapped_box},
       {"snapped", q.snapped},
       {"transcription", q.transcription},
       {"category", to_string(q.category)},
       {"search", {{"generation", q.search.generation}, {"pages_done", q.search.pages_done}}}};
}

void from_json(const nlohmann::json& j, QueryWord& q) {
  q.query_id = j.at("query_id").get<std::string>();
  q.page_id = j.at("page").get<int>();
  q.user_box = j.at("user_box").get<BoundingBox>();
  q.snapped_box = j.at("snapped_box").get<BoundingBox>();
  q.snapped = j.value("snapped", true);
  q.transcription = j.at("transcription").get<std::string>();
  q.category = parse_category(j.value("category", std::string("none")));
  if (j.contains("search")) {
    q.search.generation = j["search"].value("generation", 0);
    q.search.pages_done = j["search"].value("pages_done", std::vector<int>{});
  }
}

void to_json(nlohmann::json& j, const Match& m) {
  j = {{"match_id", m.match_id},
       {"query_id", m.query_id},
       {"page", m.page_id},
       {"box", m.box},
       {"score", m.score},
       {"state", to_string(m.state)},
       {"transcription", m.transcription},
       {"category", to_string(m.category)}};
}

void from_json(const nlohmann::json& j, Match& m) {
  m.match_id = j.at("match_id").get<std::string>();
  m.query_id = j.at("query_id").get<std::string>();
  m.page_id = j.at("page").get<int>();
  m.box = j.at("box").get<BoundingBox>();
  m.score = j.at("score").get<double>();
  m.state = parse_match_state(j.at("state").get<std::string>());
  m.transcription = j.value("transcription", std::string());
  m.category = parse_category(j.value("category", std::string("none")));
}

void to_json(nlohmann::json& j, const FeedbackEvent& e) {
  j = {{"seq", e.seq},
       {"match_id", e.match_id},
       {"verdict", to_string(e.verdict)},
       {"timestamp", e.timestamp_ms}};
}

void from_json(const nlohmann::json& j, FeedbackEvent& e) {
  e.seq = j.at("seq").get<std::int64_t>();
  e.match_id = j.at("match_id").get<std::string>();
  e.verdict = parse_verdict(j.at("verdict").get<std::string>());
  e.timestamp_ms = j.at("timestamp").get<std::int64_t>();
}

}  // namespace text
