#include "text/workbench.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>

#include "text/error.hpp"

namespace text {

namespace {

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

}  // namespace

CreatedQuery create_query(Project& project, int page_id, const BoundingBox& user_box,
                          std::string transcription, Category category) {
  if (blank(transcription)) throw Error(ErrorCode::EmptyTranscription, "a query word needs a transcription");
  const Page& page = project.page(page_id);
  const SnapResult snap = snap_box(page, user_box, project.config);
  WordTemplate tmpl = extract_template(page, snap.box, project.config);

  std::set<std::string> taken;
  for (const QueryWord& q : project.queries) taken.insert(q.query_id);
  int n = static_cast<int>(project.queries.size()) + 1;
  while (taken.count("q" + std::to_string(n))) ++n;

  QueryWord q;
  q.query_id = "q" + std::to_string(n);
  q.page_id = page_id;
  q.user_box = user_box;
  q.snapped_box = snap.box;
  q.snapped = snap.snapped;
  q.transcription = std::move(transcription);
  q.category = category;
  project.queries.push_back(q);
  project.bump();
  return {std::move(q), std::move(tmpl)};
}

std::vector<PlacedWord> placed_words(const Project& project, int page_id) {
  std::vector<PlacedWord> words;
  for (const QueryWord& q : project.queries) {
    if (page_id >= 0 && q.page_id != page_id) continue;
    words.push_back({q.query_id, q.query_id, q.page_id, q.snapped_box, q.transcription, q.category, true});
  }
  for (const Match& m : project.matches) {
    if (m.state != MatchState::Confirmed) continue;
    if (page_id >= 0 && m.page_id != page_id) continue;
    words.push_back({m.match_id, m.query_id, m.page_id, m.box, m.transcription, m.category, false});
  }
  std::sort(words.begin(), words.end(), [](const PlacedWord& a, const PlacedWord& b) {
    if (a.page_id != b.page_id) return a.page_id < b.page_id;
    if (a.box.y != b.box.y) return a.box.y < b.box.y;
    if (a.box.x != b.box.x) return a.box.x < b.box.x;
    if (a.box.h != b.box.h) return a.box.h < b.box.h;
    if (a.box.w != b.box.w) return a.box.w < b.box.w;
    return a.id < b.id;
  });
  return words;
}

std::vector<std::vector<std::size_t>> cluster_lines(const std::vector<BoundingBox>& boxes,
                                                    double min_overlap) {
  const std::size_t n = boxes.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const int overlap = std::min(boxes[i].bottom(), boxes[j].bottom()) - std::max(boxes[i].y, boxes[j].y);
      const int smaller = std::min(boxes[i].h, boxes[j].h);
      if (smaller > 0 && overlap >= min_overlap * smaller) {
        parent[find_root(parent, i)] = find_root(parent, j);
      }
    }
  }

  std::vector<std::vector<std::size_t>> lines;
  std::vector<std::size_t> line_of(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find_root(parent, i);
    if (line_of[r] == n) {
      line_of[r] = lines.size();
      lines.emplace_back();
    }
    lines[line_of[r]].push_back(i);
  }
  auto mean_y = [&](const std::vector<std::size_t>& line) {
    double s = 0.0;
    for (std::size_t i : line) s += boxes[i].y + 0.5 * boxes[i].h;
    return s / static_cast<double>(line.size());
  };
  for (auto& line : lines) {
    std::sort(line.begin(), line.end(), [&](std::size_t a, std::size_t b) {
      if (boxes[a].x != boxes[b].x) return boxes[a].x < boxes[b].x;
      return a < b;
    });
  }
  std::stable_sort(lines.begin(), lines.end(), [&](const auto& a, const auto& b) {
    const double ya = mean_y(a), yb = mean_y(b);
    if (ya != yb) return ya < yb;
    return boxes[a.front()].x < boxes[b.front()].x;
  });
  return lines;
}

std::string page_transcription(const Project& project, int page_id) {
  project.page(page_id);
  const std::vector<PlacedWord> words = placed_words(project, page_id);
  std::vector<BoundingBox> boxes;
  for (const PlacedWord& w : words) boxes.push_back(w.box);
  std::string text;
  for (const auto& line : cluster_lines(boxes, project.config.line_overlap)) {
    for (std::size_t k = 0; k < line.size(); ++k) {
      if (k) text += ' ';
      text += words[line[k]].transcription;
    }
    text += '\n';
  }
  return text;
}

ProgressReport progress(const Project& project) {
  ProgressReport r;
  r.total_pages = static_cast<int>(project.pages.size());
  for (const QueryWord& q : project.queries) {
    QueryProgress qp;
    qp.query_id = q.query_id;
    qp.transcription = q.transcription;
    qp.total_pages = r.total_pages;
    qp.pages_searched = static_cast<int>(std::set<int>(q.search.pages_done.begin(), q.search.pages_done.end()).size());
    for (const Match& m : project.matches) {
      if (m.query_id != q.query_id) continue;
      if (m.state == MatchState::Pending) ++qp.pending;
      if (m.state == MatchState::Confirmed) ++qp.confirmed;
      if (m.state == MatchState::Rejected) ++qp.rejected;
    }
    r.confirmed_matches += qp.confirmed;
    r.queries.push_back(std::move(qp));
  }
  r.transcribed_words = r.confirmed_matches + static_cast<int>(project.queries.size());
  return r;
}

}  // namespace text
