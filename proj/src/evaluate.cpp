#include "text/evaluate.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "text/error.hpp"
#include "text/project.hpp"

namespace text {

namespace {

bool gt_before(const ScoredBox& a, const ScoredBox& b) {
  if (a.page_id != b.page_id) return a.page_id < b.page_id;
  if (a.box.y != b.box.y) return a.box.y < b.box.y;
  if (a.box.x != b.box.x) return a.box.x < b.box.x;
  if (a.box.h != b.box.h) return a.box.h < b.box.h;
  return a.box.w < b.box.w;
}

ScoredBox parse_box_entry(const nlohmann::json& e, int page_id, bool need_score) {
  ScoredBox b;
  b.page_id = page_id;
  b.box = e.at("box").get<BoundingBox>();
  if (!b.box.valid()) throw Error(ErrorCode::SchemaError, "box with non-positive size");
  if (need_score) b.score = e.at("score").get<double>();
  b.word = e.value("transcription", std::string());
  return b;
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
}

}  // namespace

bool prediction_before(const ScoredBox& a, const ScoredBox& b) {
  if (a.score != b.score) return a.score > b.score;
  return gt_before(a, b);
}

WordEval evaluate_word(std::vector<ScoredBox> predictions, std::vector<ScoredBox> ground_truth,
                       double iou_min) {
  std::sort(predictions.begin(), predictions.end(), prediction_before);
  std::sort(ground_truth.begin(), ground_truth.end(), gt_before);

  WordEval r;
  r.n_gt = static_cast<int>(ground_truth.size());
  r.n_pred = static_cast<int>(predictions.size());
  std::vector<bool> used(ground_truth.size(), false);
  double ap_sum = 0.0;
  for (std::size_t rank = 0; rank < predictions.size(); ++rank) {
    const ScoredBox& p = predictions[rank];
    int best = -1;
    double best_iou = iou_min;
    for (std::size_t g = 0; g < ground_truth.size(); ++g) {
      if (used[g] || ground_truth[g].page_id != p.page_id) continue;
      const double v = iou(p.box, ground_truth[g].box);
      if (v >= best_iou && (best < 0 || v > best_iou)) {
        best = static_cast<int>(g);
        best_iou = v;
      }
    }
    if (best >= 0) {
      used[static_cast<std::size_t>(best)] = true;
      ++r.tp;
      ap_sum += static_cast<double>(r.tp) / static_cast<double>(rank + 1);
    } else {
      ++r.fp;
    }
  }
  r.fn = r.n_gt - r.tp;
  r.precision = r.n_pred == 0 ? 1.0 : static_cast<double>(r.tp) / r.n_pred;
  if (r.n_gt == 0) {
    r.recall = 1.0;
    r.average_precision = r.n_pred == 0 ? 1.0 : 0.0;
  } else {
    r.recall = static_cast<double>(r.tp) / r.n_gt;
    r.average_precision = ap_sum / r.n_gt;
  }
  return r;
}

EvalResult evaluate(const std::vector<ScoredBox>& predictions, const std::vector<ScoredBox>& ground_truth,
                    double iou_min) {
  std::map<std::string, std::pair<std::vector<ScoredBox>, std::vector<ScoredBox>>> groups;
  for (const ScoredBox& p : predictions) groups[p.word].first.push_back(p);
  for (const ScoredBox& g : ground_truth) groups[g.word].second.push_back(g);

  EvalResult r;
  r.iou_min = iou_min;
  double sum = 0.0;
  for (auto& [word, pg] : groups) {
    WordEval w = evaluate_word(std::move(pg.first), std::move(pg.second), iou_min);
    w.word = word;
    r.tp += w.tp;
    r.fp += w.fp;
    r.fn += w.fn;
    sum += w.average_precision;
    r.words.push_back(std::move(w));
  }
  r.mean_average_precision = r.words.empty() ? 0.0 : sum / static_cast<double>(r.words.size());
  return r;
}

std::vector<ScoredBox> predictions_from_json(const nlohmann::json& j) {
  const nlohmann::json* arr = &j;
  if (j.is_object() && j.contains("matches")) arr = &j["matches"];
  if (!arr->is_array()) throw Error(ErrorCode::SchemaError, "predictions must be an array");
  std::vector<ScoredBox> out;
  try {
    for (const auto& e : *arr) out.push_back(parse_box_entry(e, e.at("page").get<int>(), true));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("predictions: ") + e.what());
  }
  return out;
}

std::vector<ScoredBox> ground_truth_from_json(const nlohmann::json& j) {
  std::vector<ScoredBox> out;
  try {
    for (const auto& page : j.at("pages")) {
      const int page_id = page.at("page").get<int>();
      for (const auto& e : page.at("words")) out.push_back(parse_box_entry(e, page_id, false));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("ground truth: ") + e.what());
  }
  return out;
}

EvalResult evaluate_files(const std::string& predictions_path, const std::string& ground_truth_path,
                          double iou_min, const std::optional<std::string>& word) {
  std::vector<ScoredBox> preds = predictions_from_json(read_json(predictions_path));
  std::vector<ScoredBox> gt = ground_truth_from_json(read_json(ground_truth_path));
  if (word) {
    gt.erase(std::remove_if(gt.begin(), gt.end(), [&](const ScoredBox& g) { return g.word != *word; }),
             gt.end());
    for (ScoredBox& p : preds) p.word = *word;
  } else {
    std::set<std::string> words;
    for (const ScoredBox& g : gt) words.insert(g.word);
    if (words.size() == 1) {
      for (ScoredBox& p : preds) {
        if (p.word.empty()) p.word = *words.begin();
      }
    }
  }
  return evaluate(preds, gt, iou_min);
}

nlohmann::json to_json(const EvalResult& r) {
  nlohmann::json words = nlohmann::json::array();
  for (const WordEval& w : r.words) {
    words.push_back({{"word", w.word},
                     {"n_gt", w.n_gt},
                     {"n_pred", w.n_pred},
                     {"tp", w.tp},
                     {"fp", w.fp},
                     {"fn", w.fn},
                     {"precision", w.precision},
                     {"recall", w.recall},
                     {"average_precision", w.average_precision}});
  }
  return {{"iou_min", r.iou_min},
          {"map", r.mean_average_precision},
          {"tp", r.tp},
          {"fp", r.fp},
          {"fn", r.fn},
          {"words", std::move(words)}};
}

std::string format_table(const EvalResult& r) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-24s %6s %6s %5s %5s %5s %9s %7s %7s\n", "word", "gt", "pred", "tp", "fp",
                "fn", "precision", "recall", "AP");
  out += line;
  for (const WordEval& w : r.words) {
    const std::string name = w.word.empty() ? std::string("(all)") : w.word;
    std::snprintf(line, sizeof line, "%-24s %6d %6d %5d %5d %5d %9.4f %7.4f %7.4f\n", name.c_str(), w.n_gt,
                  w.n_pred, w.tp, w.fp, w.fn, w.precision, w.recall, w.average_precision);
    out += line;
  }
  std::snprintf(line, sizeof line, "mAP %.4f  (IoU >= %.2f, %d tp, %d fp, %d fn)\n", r.mean_average_precision,
                r.iou_min, r.tp, r.fp, r.fn);
  out += line;
  return out;
}

}  // namespace text
