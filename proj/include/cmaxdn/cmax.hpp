#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "cmaxdn/core.hpp"
#include "cmaxdn/iwe.hpp"
#include "cmaxdn/warp.hpp"

namespace cmaxdn {

struct NoEventsSelected : Error {
  using Error::Error;
};

/// The objective did not change across the finite-difference stencil, so no
/// ascent direction exists (e.g. the selected subset carries no motion).
struct DegenerateObjective : Error {
  using Error::Error;
};

enum class ObjectiveKind { GradientMagnitude, Variance };

struct OptimizerConfig {
  int max_iters = 100;
  double param_tolerance = 1e-4;  // infinity norm on the parameter change
  double fd_step_angular = 1e-3;  // rad/s
  double fd_step_flow = 1e-1;     // px/s
  double trial_step_angular = 0.5;  // first line-search trial, rad/s
  double trial_step_flow = 20.0;    // px/s
  double line_search_shrink = 0.5;
  int max_backtracks = 20;
  ObjectiveKind objective = ObjectiveKind::GradientMagnitude;
  double epsilon = 1.0;  // IWE kernel
  MotionParams initial_params;
};

struct MotionEstimate {
  MotionParams params;
  double objective_value = 0.0;
  int iterations_used = 0;
  bool converged = false;
};

/// Replaceable motion-update hook: any callable mapping (slice, signal mask,
/// current params) to refined params can stand in for the built-in
/// contrast-ascent step, e.g. a learned flow estimator.
using MotionEstimator = std::function<MotionParams(
    const EventSlice&, const std::vector<uint8_t>&, const MotionParams&)>;

namespace detail {

inline int dof(const MotionParams& p) {
  if (p.angular()) return 3;
  if (const auto* f = p.tile_flow()) return static_cast<int>(f->v.size()) * 2;
  return 0;
}

inline void add_param(MotionParams& p, int i, double d) {
  if (auto* a = std::get_if<AngularVelocity>(&p.model)) {
    a->omega[i] += d;
    return;
  }
  auto& f = std::get<TileFlow>(p.model);
  f.v[std::size_t(i) / 2][i % 2] += d;
}

inline double param_diff_inf(const MotionParams& a, const MotionParams& b) {
  if (const auto* aa = a.angular()) {
    return (aa->omega - b.angular()->omega).cwiseAbs().maxCoeff();
  }
  if (const auto* fa = a.tile_flow()) {
    const auto* fb = b.tile_flow();
    double m = 0.0;
    for (std::size_t i = 0; i < fa->v.size(); ++i) {
      m = std::max(m, (fa->v[i] - fb->v[i]).cwiseAbs().maxCoeff());
    }
    return m;
  }
  return 0.0;
}

inline double fd_step(const OptimizerConfig& cfg, const MotionParams& p) {
  return p.tile_flow() ? cfg.fd_step_flow : cfg.fd_step_angular;
}

inline double trial_step(const OptimizerConfig& cfg, const MotionParams& p) {
  return p.tile_flow() ? cfg.trial_step_flow : cfg.trial_step_angular;
}

inline std::size_t count_selected(const std::vector<uint8_t>& mask) {
  std::size_t n = 0;
  for (uint8_t m : mask) n += m ? 1 : 0;
  return n;
}

inline void validate_config(const OptimizerConfig& cfg) {
  if (cfg.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(cfg.param_tolerance > 0.0)) throw std::invalid_argument("param_tolerance must be > 0");
  if (!(cfg.fd_step_angular > 0.0) || !(cfg.fd_step_flow > 0.0)) {
    throw std::invalid_argument("finite-difference steps must be > 0");
  }
  if (!(cfg.line_search_shrink > 0.0 && cfg.line_search_shrink < 1.0)) {
    throw std::invalid_argument("line_search_shrink must be in (0,1)");
  }
}

/// Per-dof freeze flags: tile-flow dims whose tile block contains no
/// selected event stay fixed so that event-free regions cannot drift.
inline std::vector<uint8_t> frozen_dims(const EventSlice& slice,
                                        const std::vector<uint8_t>& mask,
                                        const MotionParams& params) {
  const auto* f = params.tile_flow();
  if (!f) return {};
  std::vector<std::size_t> count(f->v.size(), 0);
  for (std::size_t k = 0; k < slice.size(); ++k) {
    if (!mask[k]) continue;
    const int i = slice.events[k].x / f->tile_size;
    const int j = slice.events[k].y / f->tile_size;
    ++count[std::size_t(j) * f->grid_w + i];
  }
  std::vector<uint8_t> frozen(f->v.size() * 2, 0);
  for (std::size_t t = 0; t < count.size(); ++t) {
    if (count[t] == 0) frozen[2 * t] = frozen[2 * t + 1] = 1;
  }
  return frozen;
}

}  // namespace detail

/// Contrast objective of the masked events warped by `params`. Fused
/// warp-and-splat; numerically identical to accumulate(warp_events(...)).
inline double evaluate_objective(const EventSlice& slice,
                                 const std::vector<uint8_t>& mask,
                                 const MotionParams& params, ObjectiveKind kind,
                                 double epsilon) {
  Iwe iwe = detail::make_iwe(slice.sensor, epsilon);
  const int n = 2 * iwe.truncation_radius + 1;
  std::vector<double> wx(n), wy(n);
  for (std::size_t k = 0; k < slice.size(); ++k) {
    if (!mask[k]) continue;
    const Event& e = slice.events[k];
    const Eigen::Vector2d w = warp_point({double(e.x), double(e.y)}, e.t,
                                         slice.t_ref, params, slice.sensor);
    if (!w.allFinite()) throw NonFiniteResult("warp produced a non-finite coordinate");
    if (!inside_sensor(w, slice.sensor)) continue;
    iwe.total_mass += detail::splat(iwe, w.x(), w.y(), wx, wy);
  }
  return kind == ObjectiveKind::Variance ? variance_objective(iwe)
                                         : gradient_magnitude_objective(iwe);
}

namespace detail {

struct StepResult {
  MotionParams params;
  double objective = 0.0;  // objective at `params` on the fitting mask
  bool moved = false;
  double step_inf = 0.0;  // infinity norm of the accepted parameter change
};

/// One gradient-ascent update: central finite differences, then a
/// backtracking line search along the normalized ascent direction.
inline StepResult one_step_ex(const EventSlice& slice,
                              const std::vector<uint8_t>& mask,
                              const MotionParams& params,
                              const OptimizerConfig& cfg) {
  validate_config(cfg);
  if (count_selected(mask) == 0) {
    throw NoEventsSelected("the subset mask selects no events");
  }
  const double f0 = evaluate_objective(slice, mask, params, cfg.objective, cfg.epsilon);
  const int nd = dof(params);
  if (nd == 0) return {params, f0, false, 0.0};

  const std::vector<uint8_t> frozen = frozen_dims(slice, mask, params);
  const double h = fd_step(cfg, params);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(nd);
  bool any_diff = false;
  for (int i = 0; i < nd; ++i) {
    if (!frozen.empty() && frozen[i]) continue;
    MotionParams plus = params;
    add_param(plus, i, h);
    MotionParams minus = params;
    add_param(minus, i, -h);
    const double fp = evaluate_objective(slice, mask, plus, cfg.objective, cfg.epsilon);
    const double fm = evaluate_objective(slice, mask, minus, cfg.objective, cfg.epsilon);
    if (fp != f0 || fm != f0) any_diff = true;
    g[i] = (fp - fm) / (2.0 * h);
  }
  if (!any_diff) {
    throw DegenerateObjective("objective is constant across the finite-difference stencil");
  }
  const double gmax = g.cwiseAbs().maxCoeff();
  if (gmax == 0.0) return {params, f0, false, 0.0};

  const Eigen::VectorXd dir = g / gmax;  // step size below is the inf norm
  double alpha = trial_step(cfg, params);
  for (int b = 0; b <= cfg.max_backtracks; ++b) {
    MotionParams trial = params;
    for (int i = 0; i < nd; ++i) {
      if (dir[i] != 0.0) add_param(trial, i, alpha * dir[i]);
    }
    double ft;
    try {
      ft = evaluate_objective(slice, mask, trial, cfg.objective, cfg.epsilon);
    } catch (const NonFiniteResult&) {
      alpha *= cfg.line_search_shrink;
      continue;
    }
    if (ft > f0) return {std::move(trial), ft, true, alpha};
    alpha *= cfg.line_search_shrink;
  }
  return {params, f0, false, 0.0};
}

}  // namespace detail

/// Returns the parameters after exactly one accepted line-search step, or
/// unchanged parameters when no ascent step is found.
inline MotionParams one_step(const EventSlice& slice,
                             const std::vector<uint8_t>& mask,
                             const MotionParams& params,
                             const OptimizerConfig& cfg) {
  return detail::one_step_ex(slice, mask, params, cfg).params;
}

/// Gradient ascent on the contrast objective over the masked events,
/// starting from cfg.initial_params. Stops when the parameter change drops
/// below cfg.param_tolerance or after cfg.max_iters steps.
inline MotionEstimate estimate_motion(const EventSlice& slice,
                                      const std::vector<uint8_t>& mask,
                                      const OptimizerConfig& cfg) {
  detail::validate_config(cfg);
  if (detail::count_selected(mask) == 0) {
    throw NoEventsSelected("the subset mask selects no events");
  }
  MotionParams theta = cfg.initial_params;
  if (!is_finite(theta)) throw NonFiniteResult("initial parameters are not finite");
  if (detail::dof(theta) == 0) {
    const double f = evaluate_objective(slice, mask, theta, cfg.objective, cfg.epsilon);
    return {theta, f, 0, true};
  }
  MotionEstimate est;
  est.params = theta;
  while (est.iterations_used < cfg.max_iters) {
    ++est.iterations_used;
    detail::StepResult r = detail::one_step_ex(slice, mask, est.params, cfg);
    est.params = std::move(r.params);
    est.objective_value = r.objective;
    if (r.step_inf < cfg.param_tolerance) {
      est.converged = true;
      break;
    }
  }
  return est;
}

/// The built-in optimizer wrapped as a MotionEstimator.
inline MotionEstimator internal_estimator(const OptimizerConfig& cfg) {
  return [cfg](const EventSlice& slice, const std::vector<uint8_t>& mask,
               const MotionParams& current) {
    return one_step(slice, mask, current, cfg);
  };
}

}  // namespace cmaxdn
