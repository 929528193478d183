#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "cmaxdn/core.hpp"
#include "cmaxdn/iwe.hpp"
#include "cmaxdn/warp.hpp"

namespace cmaxdn {

struct DegenerateLabels : Error {
  using Error::Error;
};
struct LengthMismatch : Error {
  using Error::Error;
};
struct GeometryMismatch : Error {
  using Error::Error;
};
struct ZeroIdentityVariance : Error {
  using Error::Error;
};

/// ROC curve over all score thresholds, equal scores grouped into one sweep
/// point, with the trapezoidal area under it.
struct RocCurve {
  std::vector<std::pair<double, double>> points;  // (fpr, tpr), (0,0) -> (1,1)
  double auc = 0.0;
};

inline RocCurve roc_auc(const std::vector<double>& scores,
                        const std::vector<uint8_t>& gt_labels) {
  if (scores.size() != gt_labels.size()) {
    throw LengthMismatch("scores and labels differ in length");
  }
  std::size_t pos = 0, neg = 0;
  for (uint8_t l : gt_labels) (l ? pos : neg) += 1;
  if (pos == 0 || neg == 0) {
    throw DegenerateLabels("ROC needs both signal and noise ground truth");
  }
  std::vector<uint32_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<uint32_t>(i);
  std::sort(order.begin(), order.end(),
            [&](uint32_t a, uint32_t b) { return scores[a] > scores[b]; });

  RocCurve roc;
  roc.points.emplace_back(0.0, 0.0);
  std::size_t tp = 0, fp = 0, i = 0;
  double prev_fpr = 0.0, prev_tpr = 0.0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (gt_labels[order[j]] ? tp : fp) += 1;
      ++j;
    }
    i = j;
    const double fpr = double(fp) / double(neg);
    const double tpr = double(tp) / double(pos);
    roc.points.emplace_back(fpr, tpr);
    roc.auc += (fpr - prev_fpr) * (tpr + prev_tpr) * 0.5;
    prev_fpr = fpr;
    prev_tpr = tpr;
  }
  return roc;
}

/// Relative IWE sharpness: variance under `params` over variance under the
/// identity warp, both on the same masked events. Greater than 1 means the
/// warp sharpened the image.
inline double fwl(const EventSlice& slice, const MotionParams& params,
                  const std::vector<uint8_t>& mask, double epsilon) {
  std::size_t selected = 0;
  for (uint8_t m : mask) selected += m ? 1 : 0;
  if (mask.size() != slice.size() || selected == 0) {
    throw LengthMismatch("mask must select at least one event of the slice");
  }
  const Iwe warped = accumulate(warp_events(slice, params), slice.sensor, epsilon, &mask);
  const Iwe identity =
      accumulate(warp_events(slice, MotionParams{}), slice.sensor, epsilon, &mask);
  const double var_id = variance_objective(identity);
  if (!(var_id > 0.0)) {
    throw ZeroIdentityVariance("identity-warp IWE has zero variance");
  }
  return variance_objective(warped) / var_id;
}

/// Root-mean-square angular-velocity error in degrees per second.
inline double angvel_rms_deg(const std::vector<Eigen::Vector3d>& estimates,
                             const std::vector<Eigen::Vector3d>& gts) {
  if (estimates.size() != gts.size() || estimates.empty()) {
    throw LengthMismatch("estimate/ground-truth sequences must have equal nonzero length");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    acc += (estimates[i] - gts[i]).squaredNorm();
  }
  return std::sqrt(acc / double(estimates.size())) * 180.0 / std::numbers::pi;
}

/// Dense per-pixel flow field, px/s.
struct DenseFlow {
  int width = 0;
  int height = 0;
  std::vector<Eigen::Vector2d> v;

  const Eigen::Vector2d& at(int x, int y) const { return v[std::size_t(y) * width + x]; }
};

struct FlowError {
  double epe_px = 0.0;
  double outlier_pct = 0.0;  // share of pixels with endpoint error > 3 px
};

namespace detail {

constexpr double kFlowOutlierPx = 3.0;

template <typename GtSampler>
FlowError flow_epe_impl(const TileFlow& estimate, GtSampler&& gt,
                        const std::vector<uint8_t>& pixel_mask,
                        const CameraModel& cam, double duration) {
  if (pixel_mask.size() != std::size_t(cam.pixel_count())) {
    throw GeometryMismatch("pixel mask does not match the sensor geometry");
  }
  double acc = 0.0;
  std::size_t n = 0, outliers = 0;
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) {
      if (!pixel_mask[std::size_t(y) * cam.width + x]) continue;
      const Eigen::Vector2d p{double(x), double(y)};
      const double err = (flow_at(estimate, p) - gt(x, y)).norm() * duration;
      acc += err;
      if (err > kFlowOutlierPx) ++outliers;
      ++n;
    }
  }
  if (n == 0) throw GeometryMismatch("pixel mask selects no pixels");
  return {acc / double(n), 100.0 * double(outliers) / double(n)};
}

}  // namespace detail

/// Mean endpoint error (flow x duration, in px) and outlier share over the
/// masked pixels, against a tile-grid ground truth.
inline FlowError flow_epe(const TileFlow& estimate, const TileFlow& gt,
                          const std::vector<uint8_t>& pixel_mask,
                          const CameraModel& cam, double duration) {
  if (gt.grid_w != estimate.grid_w || gt.grid_h != estimate.grid_h) {
    throw GeometryMismatch("estimate and ground-truth grids differ");
  }
  return detail::flow_epe_impl(
      estimate,
      [&](int x, int y) { return flow_at(gt, {double(x), double(y)}); },
      pixel_mask, cam, duration);
}

/// Same against a dense per-pixel ground truth.
inline FlowError flow_epe(const TileFlow& estimate, const DenseFlow& gt,
                          const std::vector<uint8_t>& pixel_mask,
                          const CameraModel& cam, double duration) {
  if (gt.width != cam.width || gt.height != cam.height) {
    throw GeometryMismatch("dense ground truth does not match the sensor");
  }
  return detail::flow_epe_impl(
      estimate, [&](int x, int y) -> const Eigen::Vector2d& { return gt.at(x, y); },
      pixel_mask, cam, duration);
}

/// Precision and recall with signal as the positive class.
inline std::pair<double, double> precision_recall(const LabelSet& labels,
                                                  const std::vector<uint8_t>& gt) {
  if (labels.size() != gt.size()) {
    throw LengthMismatch("labels and ground truth differ in length");
  }
  std::size_t pos = 0;
  for (uint8_t l : gt) pos += l ? 1 : 0;
  if (pos == 0 || pos == gt.size()) {
    throw DegenerateLabels("precision/recall needs both classes in the ground truth");
  }
  std::size_t tp = 0, predicted = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (labels.labels[i]) {
      ++predicted;
      if (gt[i]) ++tp;
    }
  }
  const double precision = predicted == 0 ? 0.0 : double(tp) / double(predicted);
  const double recall = double(tp) / double(pos);
  return {precision, recall};
}

}  // namespace cmaxdn
