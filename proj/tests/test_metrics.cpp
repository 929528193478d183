#include <gtest/gtest.h>

#include <numbers>

#include "cmaxdn/baselines.hpp"
#include "cmaxdn/metrics.hpp"
#include "cmaxdn/rng.hpp"
#include "cmaxdn/sim.hpp"
#include "test_util.hpp"

using namespace cmaxdn;

namespace {

// Oracle: AUC as the probability that a random signal event outscores a
// random noise event, ties at half credit.
double auc_pair_oracle(const std::vector<double>& scores,
                       const std::vector<uint8_t>& gt) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!gt[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (gt[j]) continue;
      ++pairs;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / double(pairs);
}

SceneSpec bar_scene(uint64_t seed) {
  SceneSpec spec;
  spec.pattern = ScenePattern::Bar;
  spec.sensor = testutil::camera(100, 100);
  TileFlow f = TileFlow::zero(spec.sensor, 16);
  for (auto& v : f.v) v = {60.0, 0.0};
  spec.motion = MotionParams{f};
  spec.duration = 0.15;
  spec.events_per_edge_pixel = 250.0;
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST(RocAuc, PerfectRankingGivesOne) {
  const std::vector<double> scores = {5, 4, 3, 2, 1, 0.5};
  const std::vector<uint8_t> gt = {1, 1, 1, 0, 0, 0};
  const RocCurve roc = roc_auc(scores, gt);
  EXPECT_DOUBLE_EQ(roc.auc, 1.0);
  EXPECT_EQ(roc.points.front(), (std::pair<double, double>(0.0, 0.0)));
  EXPECT_EQ(roc.points.back(), (std::pair<double, double>(1.0, 1.0)));
}

TEST(RocAuc, InvertedRankingGivesZero) {
  const std::vector<double> scores = {1, 2, 3, 4};
  const std::vector<uint8_t> gt = {1, 1, 0, 0};
  EXPECT_DOUBLE_EQ(roc_auc(scores, gt).auc, 0.0);
}

TEST(RocAuc, DocumentedSixEventExample) {
  const std::vector<double> scores = {0.9, 0.8, 0.7, 0.6, 0.5, 0.4};
  const std::vector<uint8_t> gt = {1, 1, 0, 1, 0, 0};
  const RocCurve roc = roc_auc(scores, gt);
  EXPECT_NEAR(roc.auc, 8.0 / 9.0, 1e-12);
  EXPECT_NEAR(roc.auc, auc_pair_oracle(scores, gt), 1e-12);
}

TEST(RocAuc, MatchesPairCountingOracleWithTies) {
  SplitMix64 rng(101);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 5 + rng.below(120);
    std::vector<double> scores(n);
    std::vector<uint8_t> gt(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = 0.25 * double(rng.below(12));  // coarse grid forces ties
      gt[i] = rng.below(2) ? 1 : 0;
    }
    bool pos = false, neg = false;
    for (uint8_t l : gt) (l ? pos : neg) = true;
    if (!pos || !neg) continue;
    EXPECT_NEAR(roc_auc(scores, gt).auc, auc_pair_oracle(scores, gt), 1e-9);
  }
}

TEST(RocAuc, CurveIsMonotone) {
  SplitMix64 rng(103);
  std::vector<double> scores(200);
  std::vector<uint8_t> gt(200);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = rng.uniform();
    gt[i] = rng.below(2) ? 1 : 0;
  }
  gt[0] = 1;
  gt[1] = 0;
  const RocCurve roc = roc_auc(scores, gt);
  for (std::size_t i = 1; i < roc.points.size(); ++i) {
    EXPECT_GE(roc.points[i].first, roc.points[i - 1].first);
    EXPECT_GE(roc.points[i].second, roc.points[i - 1].second);
  }
}

TEST(RocAuc, InvariantUnderStrictlyIncreasingTransforms) {
  SplitMix64 rng(107);
  std::vector<double> scores(150);
  std::vector<uint8_t> gt(150);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = 0.5 * double(rng.below(20));
    gt[i] = rng.below(3) ? 1 : 0;
  }
  gt[0] = 1;
  gt[1] = 0;
  const double base = roc_auc(scores, gt).auc;
  std::vector<double> logs(scores.size()), exps(scores.size()), affine(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    logs[i] = std::log1p(scores[i]);
    exps[i] = std::exp(scores[i]);
    affine[i] = 3.0 * scores[i] + 7.0;
  }
  EXPECT_DOUBLE_EQ(roc_auc(logs, gt).auc, base);
  EXPECT_DOUBLE_EQ(roc_auc(exps, gt).auc, base);
  EXPECT_DOUBLE_EQ(roc_auc(affine, gt).auc, base);
}

TEST(RocAuc, RejectsSingleClassGroundTruth) {
  EXPECT_THROW(roc_auc({1.0, 2.0}, {1, 1}), DegenerateLabels);
  EXPECT_THROW(roc_auc({1.0, 2.0}, {0, 0}), DegenerateLabels);
}

TEST(Fwl, IdentityIsExactlyOne) {
  SplitMix64 rng(109);
  const auto cam = testutil::camera(48, 48);
  const EventSlice s = testutil::random_slice(rng, cam, 300);
  EXPECT_EQ(fwl(s, MotionParams{}, testutil::all_mask(s.size()), 1.0), 1.0);
}

TEST(Fwl, TrueMotionSharpensSimulatedBar) {
  const LabeledSlice scene = generate_scene(bar_scene(5));
  ASSERT_GT(scene.slice.size(), 100u);
  const auto mask = testutil::all_mask(scene.slice.size());
  const double at_truth = fwl(scene.slice, scene.gt_motion, mask, 1.0);
  EXPECT_GT(at_truth, 1.0);
}

TEST(Fwl, GrosslyWrongMotionDoesNotBeatTruth) {
  const LabeledSlice scene = generate_scene(bar_scene(6));
  const auto mask = testutil::all_mask(scene.slice.size());
  MotionParams negated = scene.gt_motion;
  for (auto& v : std::get<TileFlow>(negated.model).v) v = -v;
  const double at_truth = fwl(scene.slice, scene.gt_motion, mask, 1.0);
  const double at_wrong = fwl(scene.slice, negated, mask, 1.0);
  EXPECT_LE(at_wrong, at_truth);
}

TEST(Fwl, InvariantToUniformTimeShift) {
  const LabeledSlice scene = generate_scene(bar_scene(7));
  const auto mask = testutil::all_mask(scene.slice.size());
  const double base = fwl(scene.slice, scene.gt_motion, mask, 1.0);
  EventSlice shifted = scene.slice;
  shifted.t_ref += 100.0;
  for (auto& e : shifted.events) e.t += 100.0;
  const double moved = fwl(shifted, scene.gt_motion, mask, 1.0);
  EXPECT_NEAR(moved, base, 1e-9 * base);
}

TEST(Fwl, RejectsEmptyMask) {
  SplitMix64 rng(113);
  const auto cam = testutil::camera(16, 16);
  const EventSlice s = testutil::random_slice(rng, cam, 10);
  std::vector<uint8_t> mask(s.size(), 0);
  EXPECT_THROW(fwl(s, MotionParams{}, mask, 1.0), LengthMismatch);
}

TEST(AngvelRms, ExactEstimatesGiveZero) {
  const std::vector<Eigen::Vector3d> est = {{1, 2, 3}, {0, 0, 1}};
  EXPECT_EQ(angvel_rms_deg(est, est), 0.0);
}

TEST(AngvelRms, SinglePairUnitConversion) {
  const std::vector<Eigen::Vector3d> est = {{0.1, 0.0, 0.0}};
  const std::vector<Eigen::Vector3d> gt = {{0.0, 0.0, 0.0}};
  EXPECT_NEAR(angvel_rms_deg(est, gt), 5.729577951308232, 1e-12);
  EXPECT_NEAR(angvel_rms_deg(est, gt), 5.7296, 1e-4);
}

TEST(AngvelRms, DominatesMeanAbsoluteError) {
  SplitMix64 rng(127);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Eigen::Vector3d> est, gt;
    double mean_abs = 0.0;
    const std::size_t n = 2 + rng.below(10);
    for (std::size_t i = 0; i < n; ++i) {
      est.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
      gt.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
      mean_abs += (est.back() - gt.back()).norm();
    }
    mean_abs = mean_abs / double(n) * 180.0 / std::numbers::pi;
    EXPECT_GE(angvel_rms_deg(est, gt), mean_abs - 1e-12);
  }
}

TEST(AngvelRms, RejectsLengthMismatch) {
  EXPECT_THROW(angvel_rms_deg({{1, 0, 0}}, {}), LengthMismatch);
}

TEST(FlowEpe, ExactEstimateGivesZero) {
  const auto cam = testutil::camera(64, 64);
  TileFlow f = TileFlow::zero(cam, 16);
  for (auto& v : f.v) v = {12.0, -3.0};
  const auto err = flow_epe(f, f, std::vector<uint8_t>(cam.pixel_count(), 1), cam, 0.1);
  EXPECT_EQ(err.epe_px, 0.0);
  EXPECT_EQ(err.outlier_pct, 0.0);
}

TEST(FlowEpe, UniformBiasGivesThatBias) {
  const auto cam = testutil::camera(64, 64);
  TileFlow gt = TileFlow::zero(cam, 16);
  TileFlow est = gt;
  for (auto& v : est.v) v = {10.0, 0.0};  // 1 px over 0.1 s
  const auto err = flow_epe(est, gt, std::vector<uint8_t>(cam.pixel_count(), 1), cam, 0.1);
  EXPECT_NEAR(err.epe_px, 1.0, 1e-12);
  EXPECT_EQ(err.outlier_pct, 0.0);
}

TEST(FlowEpe, HalfOffsetHalfExact) {
  const auto cam = testutil::camera(64, 64);
  DenseFlow gt;
  gt.width = 64;
  gt.height = 64;
  gt.v.assign(64 * 64, {0.0, 0.0});
  TileFlow est = TileFlow::zero(cam, 16);
  std::vector<uint8_t> mask(cam.pixel_count(), 1);
  // left half of the ground truth disagrees by 4 px over the unit duration
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 32; ++x) gt.v[y * 64 + x] = {4.0, 0.0};
  }
  const auto err = flow_epe(est, gt, mask, cam, 1.0);
  EXPECT_NEAR(err.epe_px, 2.0, 1e-12);
  EXPECT_NEAR(err.outlier_pct, 50.0, 1e-12);
}

TEST(FlowEpe, RejectsGeometryMismatch) {
  const auto cam = testutil::camera(64, 64);
  const TileFlow est = TileFlow::zero(cam, 16);
  const TileFlow gt = TileFlow::zero(cam, 32);
  EXPECT_THROW(flow_epe(est, gt, std::vector<uint8_t>(cam.pixel_count(), 1), cam, 1.0),
               GeometryMismatch);
}

TEST(PrecisionRecall, PerfectLabels) {
  LabelSet l;
  l.labels = {1, 0, 1, 0};
  l.scores = {1, 0, 1, 0};
  const auto [p, r] = precision_recall(l, {1, 0, 1, 0});
  EXPECT_EQ(p, 1.0);
  EXPECT_EQ(r, 1.0);
}

TEST(PrecisionRecall, AllSignalGivesBaseRatePrecision) {
  LabelSet l;
  l.labels = {1, 1, 1, 1};
  l.scores = {1, 1, 1, 1};
  const auto [p, r] = precision_recall(l, {1, 0, 0, 1});
  EXPECT_EQ(r, 1.0);
  EXPECT_DOUBLE_EQ(p, 0.5);
}

TEST(PrecisionRecall, RandomLabelsApproachBaseRate) {
  SplitMix64 rng(131);
  const auto cam = testutil::camera(32, 32);
  const EventSlice s = testutil::random_slice(rng, cam, 2000);
  std::vector<uint8_t> gt(s.size());
  for (auto& g : gt) g = rng.below(10) < 7 ? 1 : 0;  // base rate ~0.7
  double mean_precision = 0.0;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const LabelSet l = random_downsample(s, 0.7, seed);
    mean_precision += precision_recall(l, gt).first;
  }
  mean_precision /= 20.0;
  EXPECT_NEAR(mean_precision, 0.7, 0.02);
}

TEST(PrecisionRecall, RejectsDegenerateGroundTruth) {
  LabelSet l;
  l.labels = {1, 1};
  l.scores = {1, 1};
  EXPECT_THROW(precision_recall(l, {1, 1}), DegenerateLabels);
}
