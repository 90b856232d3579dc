#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "text/geometry.hpp"

namespace text {

struct ScoredBox {
  int page_id = 0;
  BoundingBox box;
  double score = 1.0;
  /// Word the box belongs to (its transcription); empty when unknown.
  std::string word;
};

struct WordEval {
  std::string word;
  int n_gt = 0;
  int n_pred = 0;
  int tp = 0;
  int fp = 0;
  int fn = 0;
  /// 1 when there are no predictions.
  double precision = 1.0;
  /// 1 when there is no ground truth.
  double recall = 1.0;
  double average_precision = 0.0;
};

struct EvalResult {
  double iou_min = 0.5;
  std::vector<WordEval> words;
  double mean_average_precision = 0.0;
  int tp = 0;
  int fp = 0;
  int fn = 0;
};

/// Ranking order for predictions: descending score, then page, y, x, h, w.
bool prediction_before(const ScoredBox& a, const ScoredBox& b);

/// Greedy one-to-one matching of predictions (in ranking order) to unmatched
/// ground truth on the same page with IoU >= iou_min, best IoU first. AP is
/// the exact area under the precision/recall step curve:
/// sum over true positives of precision-at-rank / n_gt.
/// With no ground truth AP is 1 if nothing was predicted, else 0.
WordEval evaluate_word(std::vector<ScoredBox> predictions, std::vector<ScoredBox> ground_truth,
                       double iou_min = 0.5);

/// Group by word and evaluate each group; mAP over the groups.
EvalResult evaluate(const std::vector<ScoredBox>& predictions, const std::vector<ScoredBox>& ground_truth,
                    double iou_min = 0.5);

/// Predictions: an array (or {"matches": [...]}) of {page, box, score} with
/// optional "transcription". Throws Error{SchemaError}.
std::vector<ScoredBox> predictions_from_json(const nlohmann::json& j);
/// Ground truth as written by export. Throws Error{SchemaError}.
std::vector<ScoredBox> ground_truth_from_json(const nlohmann::json& j);

/// Evaluate files. With `word`, only that word's ground truth is used and
/// every prediction is taken to be an instance of it; predictions without a
/// word are likewise assigned when the ground truth holds a single word.
/// Throws Error{IoFailure}, Error{ParseError}, Error{SchemaError}.
EvalResult evaluate_files(const std::string& predictions_path, const std::string& ground_truth_path,
                          double iou_min = 0.5, const std::optional<std::string>& word = std::nullopt);

nlohmann::json to_json(const EvalResult& r);
std::string format_table(const EvalResult& r);

}  // namespace text
