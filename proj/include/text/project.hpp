#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "text/config.hpp"
#include "text/geometry.hpp"
#include "text/page.hpp"

namespace text {

enum class Category { None, Name, Place };
enum class MatchState { Pending, Confirmed, Rejected };
enum class Verdict { Confirm, Reject };

std::string_view to_string(Category c);
std::string_view to_string(MatchState s);
std::string_view to_string(Verdict v);
/// Throw Error{SchemaError} on unknown spellings.
Category parse_category(std::string_view s);
MatchState parse_match_state(std::string_view s);
Verdict parse_verdict(std::string_view s);

/// Which pages the current model generation of a query has searched.
struct SearchProgress {
  int generation = 0;
  std::vector<int> pages_done;

  bool operator==(const SearchProgress&) const = default;
};

/// A word the user marked and transcribed once.
struct QueryWord {
  std::string query_id;
  int page_id = -1;
  BoundingBox user_box;
  BoundingBox snapped_box;
  bool snapped = false;
  std::string transcription;
  Category category = Category::None;
  SearchProgress search;

  bool operator==(const QueryWord&) const = default;
};

/// One found occurrence of a query word.
struct Match {
  std::string match_id;
  std::string query_id;
  int page_id = -1;
  BoundingBox box;
  double score = 0.0;
  MatchState state = MatchState::Pending;
  /// Non-empty iff state == Confirmed.
  std::string transcription;
  Category category = Category::None;

  bool operator==(const Match&) const = default;
};

struct FeedbackEvent {
  std::int64_t seq = 0;
  std::string match_id;
  Verdict verdict = Verdict::Confirm;
  /// Milliseconds since the Unix epoch.
  std::int64_t timestamp_ms = 0;

  bool operator==(const FeedbackEvent&) const = default;
};

/// The persistent unit: a corpus plus everything the user did with it.
struct Project {
  std::string id;
  /// Directory page paths are resolved against; not part of equality.
  std::filesystem::path root;
  /// Page file paths relative to `root`, parallel to `pages`.
  std::vector<std::string> page_paths;
  std::vector<PagePtr> pages;
  std::vector<QueryWord> queries;
  std::vector<Match> matches;
  std::vector<FeedbackEvent> feedback_log;
  EngineConfig config;
  std::uint64_t version = 0;

  const Page& page(int page_id) const;
  const QueryWord& query(std::string_view query_id) const;
  QueryWord& query(std::string_view query_id);
  const Match* find_match(std::string_view match_id) const;
  Match* find_match(std::string_view match_id);

  void bump() { ++version; }
};

/// Field-for-field equality, pages compared by identity and pixels. Where
/// the page files live (root, page_paths) is not compared.
bool same_project(const Project& a, const Project& b);

/// Deterministic identifier of a match from its query, page and box.
std::string make_match_id(std::string_view query_id, int page_id, const BoundingBox& box);

void to_json(nlohmann::json& j, const BoundingBox& b);
void from_json(const nlohmann::json& j, BoundingBox& b);
void to_json(nlohmann::json& j, const QueryWord& q);
void from_json(const nlohmann::json& j, QueryWord& q);
void to_json(nlohmann::json& j, const Match& m);
void from_json(const nlohmann::json& j, Match& m);
void to_json(nlohmann::json& j, const FeedbackEvent& e);
void from_json(const nlohmann::json& j, FeedbackEvent& e);

}  // namespace text
