#include <gtest/gtest.h>

#include "cmaxdn/cmax.hpp"
#include "cmaxdn/metrics.hpp"
#include "cmaxdn/sim.hpp"
#include "test_util.hpp"

using namespace cmaxdn;

namespace {

SceneSpec star_scene(uint64_t seed, double wz = 0.5, double rate = 150.0) {
  SceneSpec spec;
  spec.pattern = ScenePattern::Star;
  spec.star_arms = 8;
  spec.sensor = testutil::camera(100, 100);
  AngularVelocity a;
  a.omega = {0.0, 0.0, wz};
  spec.motion = MotionParams{a};
  spec.duration = 0.2;
  spec.events_per_edge_pixel = rate;
  spec.seed = seed;
  return spec;
}

OptimizerConfig angular_config() {
  OptimizerConfig cfg;
  cfg.initial_params = MotionParams{AngularVelocity{}};
  return cfg;
}

}  // namespace

TEST(EstimateMotion, RecoversRotationFromZeroInit) {
  const LabeledSlice scene = generate_scene(star_scene(1));
  const auto mask = testutil::all_mask(scene.slice.size());
  const MotionEstimate est = estimate_motion(scene.slice, mask, angular_config());
  const Eigen::Vector3d gt(0.0, 0.0, 0.5);
  EXPECT_TRUE(est.converged);
  EXPECT_LT((est.params.angular()->omega - gt).norm() / gt.norm(), 0.05);
}

TEST(EstimateMotion, ObjectiveValueMatchesEvaluationAtResult) {
  const LabeledSlice scene = generate_scene(star_scene(2));
  const auto mask = testutil::all_mask(scene.slice.size());
  OptimizerConfig cfg = angular_config();
  cfg.max_iters = 10;
  const MotionEstimate est = estimate_motion(scene.slice, mask, cfg);
  const double f = evaluate_objective(scene.slice, mask, est.params, cfg.objective, cfg.epsilon);
  EXPECT_NEAR(est.objective_value, f, 1e-9 * std::max(1.0, std::abs(f)));
}

TEST(EstimateMotion, ThrowsWhenMaskSelectsNothing) {
  const LabeledSlice scene = generate_scene(star_scene(3, 0.5, 60.0));
  std::vector<uint8_t> mask(scene.slice.size(), 0);
  EXPECT_THROW(estimate_motion(scene.slice, mask, angular_config()), NoEventsSelected);
  EXPECT_THROW(one_step(scene.slice, mask, MotionParams{AngularVelocity{}}, angular_config()),
               NoEventsSelected);
}

TEST(EstimateMotion, DoesNotInventMotionOnStaticScene) {
  // static bar plus background noise: no rotation signal exists
  SceneSpec spec;
  spec.pattern = ScenePattern::Bar;
  spec.sensor = testutil::camera(80, 80);
  spec.motion = MotionParams{};
  spec.duration = 0.2;
  spec.events_per_edge_pixel = 120.0;
  spec.seed = 5;
  const LabeledSlice noisy = inject_ba_noise(generate_scene(spec), 2.0, 6);
  const auto mask = testutil::all_mask(noisy.slice.size());
  try {
    const MotionEstimate est = estimate_motion(noisy.slice, mask, angular_config());
    EXPECT_TRUE(est.params.angular()->omega.norm() < 0.1 || !est.converged);
  } catch (const DegenerateObjective&) {
    SUCCEED();  // equally honest outcome
  }
}

TEST(EstimateMotion, IdentityVariantReturnsImmediately) {
  const LabeledSlice scene = generate_scene(star_scene(7, 0.5, 60.0));
  const auto mask = testutil::all_mask(scene.slice.size());
  OptimizerConfig cfg;
  cfg.initial_params = MotionParams{};
  const MotionEstimate est = estimate_motion(scene.slice, mask, cfg);
  EXPECT_TRUE(est.converged);
  EXPECT_EQ(est.iterations_used, 0);
  EXPECT_TRUE(est.params.is_identity());
}

TEST(EstimateMotion, RejectsBadConfig) {
  const LabeledSlice scene = generate_scene(star_scene(9, 0.5, 60.0));
  const auto mask = testutil::all_mask(scene.slice.size());
  OptimizerConfig cfg = angular_config();
  cfg.param_tolerance = 0.0;
  EXPECT_THROW(estimate_motion(scene.slice, mask, cfg), std::invalid_argument);
  cfg = angular_config();
  cfg.max_iters = 0;
  EXPECT_THROW(estimate_motion(scene.slice, mask, cfg), std::invalid_argument);
  cfg = angular_config();
  cfg.line_search_shrink = 1.0;
  EXPECT_THROW(estimate_motion(scene.slice, mask, cfg), std::invalid_argument);
}

TEST(OneStep, NearOptimumStepIsSmallerThanFdStep) {
  const LabeledSlice scene = generate_scene(star_scene(11));
  const auto mask = testutil::all_mask(scene.slice.size());
  OptimizerConfig cfg = angular_config();
  cfg.param_tolerance = 1e-5;
  const MotionEstimate est = estimate_motion(scene.slice, mask, cfg);
  ASSERT_TRUE(est.converged);
  const MotionParams after = one_step(scene.slice, mask, est.params, cfg);
  const double step = (after.angular()->omega - est.params.angular()->omega)
                          .cwiseAbs()
                          .maxCoeff();
  EXPECT_LT(step, cfg.fd_step_angular);
}

TEST(OneStep, FromPerturbedOptimumStrictlyIncreasesObjective) {
  const LabeledSlice scene = generate_scene(star_scene(13));
  const auto mask = testutil::all_mask(scene.slice.size());
  const OptimizerConfig cfg = angular_config();
  AngularVelocity perturbed;
  perturbed.omega = {0.0, 0.0, 0.35};  // well inside the basin, off the peak
  const MotionParams start{perturbed};
  const double f0 = evaluate_objective(scene.slice, mask, start, cfg.objective, cfg.epsilon);
  const MotionParams after = one_step(scene.slice, mask, start, cfg);
  const double f1 = evaluate_objective(scene.slice, mask, after, cfg.objective, cfg.epsilon);
  EXPECT_GT(f1, f0);
}

TEST(OneStep, GradientMatchesHalfStepFiniteDifference) {
  // Richardson-style cross-check of d(variance)/d(wz) on a smooth scene
  const LabeledSlice scene = generate_scene(star_scene(17, 0.5, 250.0));
  const auto mask = testutil::all_mask(scene.slice.size());
  auto eval = [&](double wz) {
    AngularVelocity a;
    a.omega = {0.0, 0.0, wz};
    return evaluate_objective(scene.slice, mask, MotionParams{a},
                              ObjectiveKind::Variance, 1.0);
  };
  const double wz = 0.3, h = 0.01;
  const double g_full = (eval(wz + h) - eval(wz - h)) / (2.0 * h);
  const double g_half = (eval(wz + h / 2) - eval(wz - h / 2)) / h;
  EXPECT_NEAR(g_full, g_half, 1e-3 * std::abs(g_half));
}

TEST(OneStep, AcceptedObjectiveSequenceIsNonDecreasing) {
  const LabeledSlice scene = generate_scene(star_scene(19));
  const auto mask = testutil::all_mask(scene.slice.size());
  const OptimizerConfig cfg = angular_config();
  MotionParams theta = cfg.initial_params;
  double prev = evaluate_objective(scene.slice, mask, theta, cfg.objective, cfg.epsilon);
  for (int it = 0; it < 25; ++it) {
    theta = one_step(scene.slice, mask, theta, cfg);
    const double f = evaluate_objective(scene.slice, mask, theta, cfg.objective, cfg.epsilon);
    EXPECT_GE(f, prev);
    prev = f;
  }
}

TEST(TileFlowOptimization, OneStepImprovesPerturbedFlowAlignment) {
  // Unregularized tile flow eventually overfits by collapsing events, so the
  // testable contract is local: a step from a uniformly perturbed truth must
  // move the field back toward alignment at the event positions.
  SceneSpec spec;
  spec.pattern = ScenePattern::Star;
  spec.star_arms = 8;
  spec.sensor = testutil::camera(80, 80);
  TileFlow gt = TileFlow::zero(spec.sensor, 16);
  for (auto& v : gt.v) v = {25.0, 18.0};
  spec.motion = MotionParams{gt};
  spec.duration = 0.2;
  spec.events_per_edge_pixel = 200.0;
  spec.seed = 21;
  const LabeledSlice scene = generate_scene(spec);
  const auto mask = testutil::all_mask(scene.slice.size());

  TileFlow init = gt;
  for (auto& v : init.v) v += Eigen::Vector2d(8.0, -8.0);
  OptimizerConfig cfg;
  cfg.initial_params = MotionParams{init};

  auto epe_at_events = [&](const MotionParams& p) {
    double err = 0.0;
    for (const Event& e : scene.slice.events) {
      err += (flow_at(*p.tile_flow(), {double(e.x), double(e.y)}) -
              Eigen::Vector2d(25.0, 18.0))
                 .norm();
    }
    return err / double(scene.slice.size());
  };
  const MotionParams after = one_step(scene.slice, mask, cfg.initial_params, cfg);
  EXPECT_LT(epe_at_events(after), epe_at_events(cfg.initial_params));
}

TEST(TileFlowOptimization, EventFreeTilesStayFrozen) {
  SceneSpec spec;
  spec.pattern = ScenePattern::Bar;
  spec.sensor = testutil::camera(80, 80);
  TileFlow gt = TileFlow::zero(spec.sensor, 16);
  for (auto& v : gt.v) v = {20.0, 0.0};
  spec.motion = MotionParams{gt};
  spec.duration = 0.15;
  spec.events_per_edge_pixel = 120.0;
  spec.seed = 23;
  const LabeledSlice scene = generate_scene(spec);
  const auto mask = testutil::all_mask(scene.slice.size());

  // which tiles hold events
  TileFlow init = TileFlow::zero(spec.sensor, 16);
  std::vector<uint8_t> occupied(init.v.size(), 0);
  for (const Event& e : scene.slice.events) {
    occupied[std::size_t(e.y / 16) * init.grid_w + e.x / 16] = 1;
  }
  ASSERT_TRUE(std::find(occupied.begin(), occupied.end(), 0) != occupied.end());

  OptimizerConfig cfg;
  cfg.initial_params = MotionParams{init};
  cfg.max_iters = 10;
  const MotionEstimate est = estimate_motion(scene.slice, mask, cfg);
  const auto* flow = est.params.tile_flow();
  for (std::size_t t = 0; t < occupied.size(); ++t) {
    if (!occupied[t]) {
      EXPECT_EQ(flow->v[t].x(), 0.0);
      EXPECT_EQ(flow->v[t].y(), 0.0);
    }
  }
}

TEST(InternalEstimator, WrapsOneStepExactly) {
  const LabeledSlice scene = generate_scene(star_scene(27, 0.5, 80.0));
  const auto mask = testutil::all_mask(scene.slice.size());
  const OptimizerConfig cfg = angular_config();
  const MotionEstimator est = internal_estimator(cfg);
  MotionParams a = cfg.initial_params, b = cfg.initial_params;
  for (int it = 0; it < 5; ++it) {
    a = one_step(scene.slice, mask, a, cfg);
    b = est(scene.slice, mask, b);
    EXPECT_EQ(a.angular()->omega, b.angular()->omega);
  }
}
