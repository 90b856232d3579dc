#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "text/project.hpp"
#include "text/snapbox.hpp"

namespace text {

struct CreatedQuery {
  QueryWord query;
  WordTemplate tmpl;
};

/// Snap the user's rectangle, cut the template and register a new query
/// word with id "q<n>". Throws Error{UnknownPage}, Error{OutOfPage},
/// Error{InvalidParams}, Error{EmptyTemplate}, Error{EmptyTranscription}.
CreatedQuery create_query(Project& project, int page_id, const BoundingBox& user_box,
                          std::string transcription, Category category);

/// A transcribed word placed on a page: a query word or a confirmed match.
struct PlacedWord {
  std::string id;
  std::string query_id;
  int page_id = -1;
  BoundingBox box;
  std::string transcription;
  Category category = Category::None;
  /// true for the marked query word itself.
  bool is_query = false;
};

/// Every transcribed word on one page (all pages when page_id < 0), sorted
/// by page, y, x.
std::vector<PlacedWord> placed_words(const Project& project, int page_id = -1);

/// Group boxes into text lines: two boxes share a line iff their vertical
/// overlap is at least `min_overlap` of the smaller height, closed
/// transitively. Lines are ordered by mean y, members by x.
std::vector<std::vector<std::size_t>> cluster_lines(const std::vector<BoundingBox>& boxes,
                                                    double min_overlap = 0.5);

/// Transcribed words of a page, space-separated, one text line per line.
/// Throws Error{UnknownPage}.
std::string page_transcription(const Project& project, int page_id);

struct QueryProgress {
  std::string query_id;
  std::string transcription;
  int pages_searched = 0;
  int total_pages = 0;
  int pending = 0;
  int confirmed = 0;
  int rejected = 0;

  double fraction() const {
    return total_pages == 0 ? 1.0 : static_cast<double>(pages_searched) / total_pages;
  }
};

struct ProgressReport {
  std::vector<QueryProgress> queries;
  int confirmed_matches = 0;
  int transcribed_words = 0;
  int total_pages = 0;
};

ProgressReport progress(const Project& project);

}  // namespace text
