#include "vesselaudit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "vesselaudit/edt.hpp"
#include "vesselaudit/resample.hpp"

namespace vaudit {
namespace {

void check_same_size(const BinaryMask& a, const BinaryMask& b, const char* what) {
  if (a.size() != b.size()) {
    throw Error(std::string(what) + ": size mismatch " + a.size().str() + " vs " +
                b.size().str());
  }
}

std::optional<double> ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double dice(const BinaryMask& pred, const BinaryMask& gt) {
  check_same_size(pred, gt, "dice");
  std::int64_t inter = (pred.plane() * gt.plane()).cast<std::int64_t>().sum();
  std::int64_t total = pred.foreground_count() + gt.foreground_count();
  if (total == 0) return 1.0;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(total);
}

std::optional<double> sensitivity(const BinaryMask& pred, const BinaryMask& gt) {
  check_same_size(pred, gt, "sensitivity");
  std::int64_t tp = (pred.plane() * gt.plane()).cast<std::int64_t>().sum();
  return ratio(tp, gt.foreground_count());
}

std::optional<double> specificity(const BinaryMask& pred, const BinaryMask& gt,
                                  const BinaryMask* fov) {
  check_same_size(pred, gt, "specificity");
  if (fov) check_same_size(*fov, gt, "specificity fov");

  std::int64_t tn = 0;
  std::int64_t negatives = 0;
  for (int r = 0; r < gt.height(); ++r) {
    for (int c = 0; c < gt.width(); ++c) {
      if (fov && !(*fov)(r, c)) continue;
      if (gt(r, c)) continue;
      ++negatives;
      if (!pred(r, c)) ++tn;
    }
  }
  return ratio(tn, negatives);
}

StratifiedSensitivity stratified_sensitivity(const BinaryMask& pred,
                                             const BinaryMask& gt,
                                             const StratumLabels& labels) {
  check_same_size(pred, gt, "stratified_sensitivity");
  if (labels.size() != gt.size()) {
    throw Error("stratified_sensitivity: labels do not match the ground truth size");
  }

  std::int64_t hit[4] = {0, 0, 0, 0};
  std::int64_t total[4] = {0, 0, 0, 0};
  for (int r = 0; r < gt.height(); ++r) {
    for (int c = 0; c < gt.width(); ++c) {
      auto label = static_cast<int>(labels.plane()(r, c));
      if (label == 0) continue;
      ++total[label];
      if (pred(r, c) && gt(r, c)) ++hit[label];
    }
  }

  StratifiedSensitivity s;
  s.thin = ratio(hit[1], total[1]);
  s.medium = ratio(hit[2], total[2]);
  s.thick = ratio(hit[3], total[3]);
  return s;
}

EvalResult evaluate_image(const BinaryMask& pred, const BinaryMask& gt_native,
                          const StratumLabels& labels, const BinaryMask* fov,
                          std::string image_id) {
  if (labels.size() != gt_native.size()) {
    throw Error("evaluate_image: labels do not match the ground truth size");
  }
  BinaryMask pred_native =
      pred.size() == gt_native.size() ? pred : resize_nearest(pred, gt_native.size());

  EvalResult res;
  res.image_id = std::move(image_id);
  res.dice_score = dice(pred_native, gt_native);
  res.sensitivity = sensitivity(pred_native, gt_native);
  res.specificity = specificity(pred_native, gt_native, fov);
  res.stratified = stratified_sensitivity(pred_native, gt_native, labels);
  res.gt_counts = stratum_counts(labels);
  return res;
}

EvalResult evaluate_image(const BinaryMask& pred, const BinaryMask& gt_native,
                          const StratumThresholds& thresholds, const BinaryMask* fov,
                          std::string image_id) {
  DistanceMap dmap = euclidean_distance_transform(gt_native);
  StratumLabels labels = stratify(dmap, gt_native, thresholds);
  return evaluate_image(pred, gt_native, labels, fov, std::move(image_id));
}

EvalResult evaluate_image(const ProbabilityMap& pred, const BinaryMask& gt_native,
                          double threshold, const StratumThresholds& thresholds,
                          const BinaryMask* fov, std::string image_id) {
  return evaluate_image(binarize(pred, threshold), gt_native, thresholds, fov,
                        std::move(image_id));
}

SummaryRow aggregate(const std::vector<EvalResult>& results,
                     const std::unordered_map<std::string, int>& fold_of) {
  if (results.empty()) throw Error("aggregate: no results");

  // Per-fold accumulation of each metric: sum of present values + count.
  struct FoldAcc {
    double sum[6] = {};
    int n[6] = {};
  };
  std::map<int, FoldAcc> folds;
  for (const auto& [id, fold] : fold_of) folds[fold];

  for (const auto& res : results) {
    auto it = fold_of.find(res.image_id);
    if (it == fold_of.end()) {
      throw Error("aggregate: image " + res.image_id + " has no fold assignment");
    }
    FoldAcc& acc = folds[it->second];
    const std::optional<double> values[6] = {res.dice_score,   res.sensitivity,
                                             res.specificity,  res.stratified.thin,
                                             res.stratified.medium, res.stratified.thick};
    for (int m = 0; m < 6; ++m) {
      if (values[m]) {
        acc.sum[m] += *values[m];
        ++acc.n[m];
      }
    }
  }

  SummaryRow row;
  for (const auto& [fold, acc] : folds) {
    bool any = false;
    for (int m = 0; m < 6 && !any; ++m) any = acc.n[m] > 0;
    if (!any) throw Error("aggregate: fold " + std::to_string(fold) + " has no results");
  }

  std::optional<MetricStat>* stats[6] = {&row.dice, &row.sens, &row.spec,
                                         &row.thin, &row.medium, &row.thick};
  for (int m = 0; m < 6; ++m) {
    std::vector<double> fold_means;
    for (const auto& [fold, acc] : folds) {
      if (acc.n[m] > 0) fold_means.push_back(acc.sum[m] / acc.n[m]);
    }
    if (fold_means.empty()) continue;
    double mean = 0.0;
    for (double v : fold_means) mean += v;
    mean /= static_cast<double>(fold_means.size());
    double var = 0.0;
    if (fold_means.size() > 1) {
      for (double v : fold_means) var += (v - mean) * (v - mean);
      var /= static_cast<double>(fold_means.size() - 1);
    }
    *stats[m] = MetricStat{mean, std::sqrt(var)};
  }
  return row;
}

}  // namespace vaudit
