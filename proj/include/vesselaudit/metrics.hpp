#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "vesselaudit/raster.hpp"
#include "vesselaudit/stratify.hpp"

namespace vaudit {

// 2|P∩G| / (|P|+|G|); 1.0 when both masks are empty.
double dice(const BinaryMask& pred, const BinaryMask& gt);

// TP / (TP+FN); absent when the ground truth has no foreground.
std::optional<double> sensitivity(const BinaryMask& pred, const BinaryMask& gt);

// TN / (TN+FP); with `fov` given, only pixels inside it are counted.
// Absent when no negative ground-truth pixels are in scope.
std::optional<double> specificity(const BinaryMask& pred, const BinaryMask& gt,
                                  const BinaryMask* fov = nullptr);

// Sensitivity restricted to each width class of the ground truth.
struct StratifiedSensitivity {
  std::optional<double> thin;
  std::optional<double> medium;
  std::optional<double> thick;
};

StratifiedSensitivity stratified_sensitivity(const BinaryMask& pred,
                                             const BinaryMask& gt,
                                             const StratumLabels& labels);

struct EvalResult {
  std::string image_id;
  double dice_score = 0.0;
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  StratifiedSensitivity stratified;
  StratumCounts gt_counts;
};

// Full per-image protocol: binarize the probability map at `threshold`,
// bring the prediction to the ground-truth grid by nearest neighbour,
// stratify the ground truth, then score. A prediction already at native
// size passes through the resize unchanged.
EvalResult evaluate_image(const ProbabilityMap& pred, const BinaryMask& gt_native,
                          double threshold, const StratumThresholds& thresholds,
                          const BinaryMask* fov = nullptr, std::string image_id = {});

EvalResult evaluate_image(const BinaryMask& pred, const BinaryMask& gt_native,
                          const StratumThresholds& thresholds,
                          const BinaryMask* fov = nullptr, std::string image_id = {});

// As above with the ground-truth stratification precomputed; `labels` must
// match `gt_native`.
EvalResult evaluate_image(const BinaryMask& pred, const BinaryMask& gt_native,
                          const StratumLabels& labels,
                          const BinaryMask* fov = nullptr, std::string image_id = {});

struct MetricStat {
  double mean = 0.0;
  double stddev = 0.0;
};

// Cross-validated summary for one (dataset, condition) cell. A metric is
// absent when no fold had a defined value for it; `incomplete` marks rows
// that are missing predictions for some image.
struct SummaryRow {
  std::string dataset;
  std::string condition;
  int processed_width = 0;
  std::optional<MetricStat> dice;
  std::optional<MetricStat> sens;
  std::optional<MetricStat> spec;
  std::optional<MetricStat> thin;
  std::optional<MetricStat> medium;
  std::optional<MetricStat> thick;
  bool incomplete = false;
};

// Two-level reduction: unweighted image mean inside each fold (absent
// values excluded), then mean and sample standard deviation across folds.
// A single fold yields stddev 0. `fold_of` must cover every image id, and
// every fold 0..max must appear.
SummaryRow aggregate(const std::vector<EvalResult>& results,
                     const std::unordered_map<std::string, int>& fold_of);

}  // namespace vaudit
