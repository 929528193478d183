#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <variant>
#include <vector>

#include "cmaxdn/core.hpp"

namespace cmaxdn {

/// Raised when a warp produces a non-finite coordinate, e.g. a rotation
/// pushing a point behind the camera.
struct NonFiniteResult : Error {
  using Error::Error;
};

struct Identity {};

/// Constant angular velocity of the camera, rad/s.
struct AngularVelocity {
  Eigen::Vector3d omega = Eigen::Vector3d::Zero();
};

/// Coarse optical-flow field: one px/s velocity vector per tile, bilinearly
/// interpolated between tile centers and held constant beyond the border
/// centers. Grid dimensions are ceil(width/tile) x ceil(height/tile).
struct TileFlow {
  int tile_size = 16;
  int grid_w = 0;
  int grid_h = 0;
  std::vector<Eigen::Vector2d> v;

  static TileFlow zero(const CameraModel& cam, int tile = 16) {
    TileFlow f;
    f.tile_size = tile;
    f.grid_w = (cam.width + tile - 1) / tile;
    f.grid_h = (cam.height + tile - 1) / tile;
    f.v.assign(static_cast<std::size_t>(f.grid_w) * f.grid_h,
               Eigen::Vector2d::Zero());
    return f;
  }

  const Eigen::Vector2d& at(int i, int j) const { return v[std::size_t(j) * grid_w + i]; }
  Eigen::Vector2d& at(int i, int j) { return v[std::size_t(j) * grid_w + i]; }

  /// Pixel coordinate of tile center (i, j).
  Eigen::Vector2d center(int i, int j) const {
    return {(i + 0.5) * tile_size - 0.5, (j + 0.5) * tile_size - 0.5};
  }
};

/// The motion hypothesis theta being fitted.
struct MotionParams {
  std::variant<Identity, AngularVelocity, TileFlow> model;

  MotionParams() : model(Identity{}) {}
  MotionParams(AngularVelocity m) : model(std::move(m)) {}
  MotionParams(TileFlow m) : model(std::move(m)) {}
  MotionParams(Identity m) : model(m) {}

  bool is_identity() const { return std::holds_alternative<Identity>(model); }
  const AngularVelocity* angular() const { return std::get_if<AngularVelocity>(&model); }
  const TileFlow* tile_flow() const { return std::get_if<TileFlow>(&model); }
};

inline bool is_finite(const MotionParams& p) {
  if (const auto* a = p.angular()) return a->omega.allFinite();
  if (const auto* f = p.tile_flow()) {
    for (const auto& v : f->v)
      if (!v.allFinite()) return false;
  }
  return true;
}

/// Bilinear interpolation of the tile grid at pixel position x, with
/// constant extrapolation outside the border tile centers.
inline Eigen::Vector2d flow_at(const TileFlow& f, const Eigen::Vector2d& x) {
  const double t = f.tile_size;
  auto clamp = [](double v, double lo, double hi) {
    return v < lo ? lo : (v > hi ? hi : v);
  };
  double gx = clamp((x.x() + 0.5) / t - 0.5, 0.0, double(f.grid_w - 1));
  double gy = clamp((x.y() + 0.5) / t - 0.5, 0.0, double(f.grid_h - 1));
  int i0 = static_cast<int>(gx);
  int j0 = static_cast<int>(gy);
  if (i0 > f.grid_w - 2) i0 = f.grid_w > 1 ? f.grid_w - 2 : 0;
  if (j0 > f.grid_h - 2) j0 = f.grid_h > 1 ? f.grid_h - 2 : 0;
  int i1 = f.grid_w > 1 ? i0 + 1 : i0;
  int j1 = f.grid_h > 1 ? j0 + 1 : j0;
  double ax = gx - i0;
  double ay = gy - j0;
  return (1 - ax) * (1 - ay) * f.at(i0, j0) + ax * (1 - ay) * f.at(i1, j0) +
         (1 - ax) * ay * f.at(i0, j1) + ax * ay * f.at(i1, j1);
}

inline Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

/// Exponential map so(3) -> SO(3) by Rodrigues' formula, with the series
/// expansion below 1e-8 rad where the closed form degenerates to 0/0.
inline Eigen::Matrix3d rotation_from_rotvec(const Eigen::Vector3d& phi) {
  const double angle = phi.norm();
  const Eigen::Matrix3d k = skew(phi);
  if (angle < 1e-8) {
    return Eigen::Matrix3d::Identity() + k + 0.5 * k * k;
  }
  const Eigen::Matrix3d ku = k / angle;
  return Eigen::Matrix3d::Identity() + std::sin(angle) * ku +
         (1.0 - std::cos(angle)) * ku * ku;
}

namespace detail {

constexpr double kMinDepth = 1e-6;

/// Rotational transport of one pixel through calibrated homogeneous
/// coordinates: backproject, rotate by omega*(t_ref - t_k), reproject.
inline Eigen::Vector2d rotate_pixel(const Eigen::Vector2d& px,
                                    const Eigen::Matrix3d& rot,
                                    const CameraModel& cam) {
  const Eigen::Vector3d xh((px.x() - cam.cx) / cam.fx,
                           (px.y() - cam.cy) / cam.fy, 1.0);
  const Eigen::Vector3d xr = rot * xh;
  if (!(xr.z() > kMinDepth)) {
    throw NonFiniteResult("warped point left the visible half-space");
  }
  return {cam.fx * xr.x() / xr.z() + cam.cx, cam.fy * xr.y() / xr.z() + cam.cy};
}

}  // namespace detail

/// Transports one pixel position from t_k to t_ref under the motion model.
inline Eigen::Vector2d warp_point(const Eigen::Vector2d& x, double t_k,
                                  double t_ref, const MotionParams& params,
                                  const CameraModel& cam) {
  if (const auto* a = params.angular()) {
    return detail::rotate_pixel(x, rotation_from_rotvec(a->omega * (t_ref - t_k)), cam);
  }
  if (const auto* f = params.tile_flow()) {
    return x + (t_k - t_ref) * flow_at(*f, x);
  }
  return x;
}

/// Real-valued event positions at t_ref plus a visibility flag per event.
struct WarpedEvents {
  std::vector<Eigen::Vector2d> coords;
  std::vector<uint8_t> in_bounds;

  std::size_t size() const { return coords.size(); }
};

inline bool inside_sensor(const Eigen::Vector2d& x, const CameraModel& cam) {
  return x.x() >= 0.0 && x.x() <= cam.width - 1 && x.y() >= 0.0 &&
         x.y() <= cam.height - 1;
}

/// Warps every event of the slice to slice.t_ref.
inline WarpedEvents warp_events(const EventSlice& slice, const MotionParams& params) {
  if (!is_finite(params)) {
    throw NonFiniteResult("motion parameters are not finite");
  }
  WarpedEvents out;
  out.coords.reserve(slice.size());
  out.in_bounds.reserve(slice.size());
  for (const Event& e : slice.events) {
    Eigen::Vector2d w = warp_point({double(e.x), double(e.y)}, e.t, slice.t_ref,
                                   params, slice.sensor);
    if (!w.allFinite()) {
      throw NonFiniteResult("warp produced a non-finite coordinate");
    }
    out.in_bounds.push_back(inside_sensor(w, slice.sensor) ? 1 : 0);
    out.coords.push_back(w);
  }
  return out;
}

}  // namespace cmaxdn
