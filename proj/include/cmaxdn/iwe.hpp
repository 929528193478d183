#pragma once

#include <cmath>
#include <vector>

#include "cmaxdn/core.hpp"
#include "cmaxdn/warp.hpp"

namespace cmaxdn {

struct ImageTooSmall : Error {
  using Error::Error;
};

/// Image of warped events: every in-bounds event deposits a truncated,
/// per-event-normalized Gaussian so that pixel values keep the meaning of
/// event counts.
struct Iwe {
  int width = 0;
  int height = 0;
  double epsilon = 1.0;
  int truncation_radius = 3;
  double total_mass = 0.0;
  std::vector<double> pixels;

  double at(int x, int y) const { return pixels[std::size_t(y) * width + x]; }
  double& at(int x, int y) { return pixels[std::size_t(y) * width + x]; }
};

namespace detail {

/// Adds one unit-mass splat centered at the real-valued position (x, y).
/// wx/wy are scratch buffers of size 2*radius+1. Returns the deposited mass
/// (1 up to roundoff; splats are renormalized over the visible taps).
inline double splat(Iwe& iwe, double x, double y, std::vector<double>& wx,
                    std::vector<double>& wy) {
  const int r = iwe.truncation_radius;
  const int cx = static_cast<int>(std::lround(x));
  const int cy = static_cast<int>(std::lround(y));
  const double inv2e2 = 1.0 / (2.0 * iwe.epsilon * iwe.epsilon);
  for (int d = -r; d <= r; ++d) {
    const double dx = cx + d - x;
    const double dy = cy + d - y;
    wx[d + r] = std::exp(-dx * dx * inv2e2);
    wy[d + r] = std::exp(-dy * dy * inv2e2);
  }
  const int x0 = std::max(cx - r, 0), x1 = std::min(cx + r, iwe.width - 1);
  const int y0 = std::max(cy - r, 0), y1 = std::min(cy + r, iwe.height - 1);
  if (x0 > x1 || y0 > y1) return 0.0;
  double norm = 0.0;
  for (int py = y0; py <= y1; ++py) {
    const double wyv = wy[py - cy + r];
    for (int px = x0; px <= x1; ++px) norm += wx[px - cx + r] * wyv;
  }
  if (norm <= 0.0) return 0.0;
  const double inv = 1.0 / norm;
  double deposited = 0.0;
  for (int py = y0; py <= y1; ++py) {
    const double wyv = wy[py - cy + r] * inv;
    double* row = &iwe.pixels[std::size_t(py) * iwe.width];
    for (int px = x0; px <= x1; ++px) {
      const double w = wx[px - cx + r] * wyv;
      row[px] += w;
      deposited += w;
    }
  }
  return deposited;
}

inline Iwe make_iwe(const CameraModel& cam, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("IWE kernel epsilon must be positive");
  }
  Iwe iwe;
  iwe.width = cam.width;
  iwe.height = cam.height;
  iwe.epsilon = epsilon;
  iwe.truncation_radius = static_cast<int>(std::ceil(3.0 * epsilon));
  iwe.pixels.assign(std::size_t(cam.width) * cam.height, 0.0);
  return iwe;
}

}  // namespace detail

/// Accumulates warped events into an IWE. Events flagged out of bounds (and
/// events excluded by the optional mask) contribute nothing.
inline Iwe accumulate(const WarpedEvents& warped, const CameraModel& cam,
                      double epsilon, const std::vector<uint8_t>* mask = nullptr) {
  Iwe iwe = detail::make_iwe(cam, epsilon);
  const int n = 2 * iwe.truncation_radius + 1;
  std::vector<double> wx(n), wy(n);
  for (std::size_t k = 0; k < warped.size(); ++k) {
    if (!warped.in_bounds[k]) continue;
    if (mask && !(*mask)[k]) continue;
    iwe.total_mass += detail::splat(iwe, warped.coords[k].x(), warped.coords[k].y(), wx, wy);
  }
  return iwe;
}

/// Population variance of the image over all pixels.
inline double variance_objective(const Iwe& iwe) {
  const std::size_t p = iwe.pixels.size();
  if (p == 0) return 0.0;
  double mean = 0.0;
  for (double v : iwe.pixels) mean += v;
  mean /= static_cast<double>(p);
  double acc = 0.0;
  for (double v : iwe.pixels) {
    const double d = v - mean;
    acc += d * d;
  }
  return acc / static_cast<double>(p);
}

/// Mean squared magnitude of central-difference gradients over the interior.
inline double gradient_magnitude_objective(const Iwe& iwe) {
  if (iwe.width < 3 || iwe.height < 3) {
    throw ImageTooSmall("gradient objective needs at least a 3x3 image");
  }
  double acc = 0.0;
  for (int y = 1; y < iwe.height - 1; ++y) {
    const double* up = &iwe.pixels[std::size_t(y - 1) * iwe.width];
    const double* row = &iwe.pixels[std::size_t(y) * iwe.width];
    const double* dn = &iwe.pixels[std::size_t(y + 1) * iwe.width];
    for (int x = 1; x < iwe.width - 1; ++x) {
      const double gx = 0.5 * (row[x + 1] - row[x - 1]);
      const double gy = 0.5 * (dn[x] - up[x]);
      acc += gx * gx + gy * gy;
    }
  }
  return acc / (double(iwe.width - 2) * double(iwe.height - 2));
}

/// Bilinear image sample at a real-valued position, clamped to the border.
inline double bilinear_sample(const Iwe& iwe, const Eigen::Vector2d& x) {
  auto clamp = [](double v, double lo, double hi) {
    return v < lo ? lo : (v > hi ? hi : v);
  };
  const double fx = clamp(x.x(), 0.0, double(iwe.width - 1));
  const double fy = clamp(x.y(), 0.0, double(iwe.height - 1));
  int x0 = static_cast<int>(fx);
  int y0 = static_cast<int>(fy);
  if (x0 > iwe.width - 2) x0 = iwe.width > 1 ? iwe.width - 2 : 0;
  if (y0 > iwe.height - 2) y0 = iwe.height > 1 ? iwe.height - 2 : 0;
  const int x1 = iwe.width > 1 ? x0 + 1 : x0;
  const int y1 = iwe.height > 1 ? y0 + 1 : y0;
  const double ax = fx - x0;
  const double ay = fy - y0;
  return (1 - ax) * (1 - ay) * iwe.at(x0, y0) + ax * (1 - ay) * iwe.at(x1, y0) +
         (1 - ax) * ay * iwe.at(x0, y1) + ax * ay * iwe.at(x1, y1);
}

}  // namespace cmaxdn
