#pragma once

#include <algorithm>
#include <vector>

#include "cmaxdn/cmax.hpp"
#include "cmaxdn/core.hpp"
#include "cmaxdn/iwe.hpp"
#include "cmaxdn/rng.hpp"
#include "cmaxdn/warp.hpp"

namespace cmaxdn {

struct MissingPreviousLabels : Error {
  using Error::Error;
};

/// Per-event score choices. LocalContrast reads the IWE of all events at the
/// event's warped position; SignalRatio is the share of that value owed to
/// the previously labeled signal events.
enum class ScoreKind { LocalContrast, SignalRatio };

struct HistoryRecord {
  double objective = 0.0;
  double threshold = 0.0;
  std::size_t signal_count = 0;
};

/// Output of the alternating loop: final labels, final motion, and one
/// history record per outer iteration.
struct JointResult {
  LabelSet labels;
  MotionEstimate motion;
  int iterations = 0;
  std::vector<HistoryRecord> history;
};

/// Scores every event by sampling the IWE built from all events (warped with
/// `params`) at the event's own warped position. Out-of-bounds events score
/// zero. SignalRatio needs the previous iteration's labels for the signal IWE.
inline std::vector<double> score_events(const EventSlice& slice,
                                        const MotionParams& params,
                                        const LabelSet* labels_prev,
                                        ScoreKind kind, double epsilon) {
  if (kind == ScoreKind::SignalRatio && labels_prev == nullptr) {
    throw MissingPreviousLabels("signal-ratio scores need a previous signal/noise split");
  }
  const WarpedEvents warped = warp_events(slice, params);
  const Iwe iwe_all = accumulate(warped, slice.sensor, epsilon);
  Iwe iwe_signal;
  if (kind == ScoreKind::SignalRatio) {
    iwe_signal = accumulate(warped, slice.sensor, epsilon, &labels_prev->labels);
  }
  std::vector<double> scores(slice.size(), 0.0);
  for (std::size_t k = 0; k < slice.size(); ++k) {
    if (!warped.in_bounds[k]) continue;
    const double all = bilinear_sample(iwe_all, warped.coords[k]);
    if (kind == ScoreKind::LocalContrast) {
      scores[k] = all;
    } else {
      scores[k] = all > 0.0 ? bilinear_sample(iwe_signal, warped.coords[k]) / all : 0.0;
    }
  }
  return scores;
}

/// Rank-threshold classification: exactly ceil(tau*N) events with the highest
/// scores become signal. Ties break toward the earlier timestamp, then the
/// lower event index. The threshold is the score of the last admitted event.
inline LabelSet classify(const EventSlice& slice,
                         const std::vector<double>& scores, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("tau must be in (0, 1]");
  }
  const std::size_t n = scores.size();
  LabelSet out;
  out.scores = scores;
  out.labels.assign(n, 0);
  out.tau = tau;
  if (n == 0) return out;
  std::vector<uint32_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<uint32_t>(i);
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    const double ta = slice.events[a].t, tb = slice.events[b].t;
    if (ta != tb) return ta < tb;
    return a < b;
  });
  const std::size_t m = signal_target(n, tau);
  for (std::size_t i = 0; i < m; ++i) out.labels[order[i]] = 1;
  out.threshold = scores[order[m - 1]];
  return out;
}

/// Seed-deterministic random split with signal fraction tau; the signal
/// events get score 1, the rest 0.
inline LabelSet random_split(const EventSlice& slice, double tau, uint64_t seed) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("tau must be in (0, 1]");
  }
  const std::size_t n = slice.size();
  LabelSet out;
  out.scores.assign(n, 0.0);
  out.labels.assign(n, 0);
  out.tau = tau;
  out.threshold = 1.0;
  SplitMix64 rng(mix_seed(seed, 0x5914a7));
  for (uint32_t k : sample_without_replacement(n, signal_target(n, tau), rng)) {
    out.labels[k] = 1;
    out.scores[k] = 1.0;
  }
  return out;
}

namespace detail {

inline JointResult joint_estimate_impl(const EventSlice& slice, double tau,
                                       ScoreKind kind, const OptimizerConfig& cfg,
                                       uint64_t seed, const MotionEstimator* custom) {
  validate_config(cfg);
  JointResult res;
  res.labels = random_split(slice, tau, seed);
  MotionParams theta = cfg.initial_params;
  if (!is_finite(theta)) throw NonFiniteResult("initial parameters are not finite");
  const bool optimizable = dof(theta) > 0;
  bool converged = !optimizable;
  while (res.iterations < cfg.max_iters) {
    ++res.iterations;
    double step = 0.0;
    double objective;
    if (custom) {
      MotionParams next = (*custom)(slice, res.labels.labels, theta);
      step = param_diff_inf(next, theta);
      objective = evaluate_objective(slice, res.labels.labels, next,
                                     cfg.objective, cfg.epsilon);
      theta = std::move(next);
    } else if (optimizable) {
      StepResult r = one_step_ex(slice, res.labels.labels, theta, cfg);
      step = r.step_inf;
      objective = r.objective;
      theta = std::move(r.params);
    } else {
      objective = evaluate_objective(slice, res.labels.labels, theta,
                                     cfg.objective, cfg.epsilon);
    }
    const std::vector<double> scores =
        score_events(slice, theta, &res.labels, kind, cfg.epsilon);
    res.labels = classify(slice, scores, tau);
    res.history.push_back({objective, res.labels.threshold, res.labels.signal_count()});
    if (optimizable && step < cfg.param_tolerance) {
      converged = true;
      break;
    }
    if (!optimizable) break;  // nothing to iterate on
  }
  res.motion.params = std::move(theta);
  res.motion.iterations_used = res.iterations;
  res.motion.converged = converged;
  res.motion.objective_value = evaluate_objective(
      slice, res.labels.labels, res.motion.params, cfg.objective, cfg.epsilon);
  return res;
}

}  // namespace detail

/// Alternating joint estimation: starting from a seeded random split, repeat
/// one motion update fitted on the current signal set, then re-score and
/// re-classify all events, until the motion parameters converge. The reported
/// objective_value is evaluated at the final parameters on the final signal
/// set; history objectives are on the per-iteration fitting sets.
inline JointResult joint_estimate(const EventSlice& slice, double tau,
                                  ScoreKind kind, const OptimizerConfig& cfg,
                                  uint64_t seed) {
  return detail::joint_estimate_impl(slice, tau, kind, cfg, seed, nullptr);
}

/// Same loop with a caller-provided motion estimator in place of the
/// built-in contrast-ascent step.
inline JointResult joint_estimate(const EventSlice& slice, double tau,
                                  ScoreKind kind, const OptimizerConfig& cfg,
                                  uint64_t seed, const MotionEstimator& estimator) {
  return detail::joint_estimate_impl(slice, tau, kind, cfg, seed, &estimator);
}

/// Checks that thresholding the local-contrast scores at t1 yields the same
/// label set as the induced signal-ratio rule with per-event threshold
/// T2 = 1 - noise_k/t1. The ratio rule is evaluated in cross-multiplied form
/// noise_k*(score_k - t1) > 0, which is algebraically identical for positive
/// scores and avoids division roundoff. The two rules genuinely coincide
/// only where the noise sample is nonzero.
inline bool equivalence_check(const std::vector<double>& scores,
                              const std::vector<double>& noise_iwe_samples,
                              double t1) {
  for (std::size_t k = 0; k < scores.size(); ++k) {
    const bool by_contrast = scores[k] > t1;
    const bool by_ratio =
        scores[k] > 0.0 && noise_iwe_samples[k] * (scores[k] - t1) > 0.0;
    if (by_contrast != by_ratio) return false;
  }
  return true;
}

}  // namespace cmaxdn
