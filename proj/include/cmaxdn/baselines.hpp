#pragma once

#include <limits>
#include <vector>

#include "cmaxdn/core.hpp"
#include "cmaxdn/rng.hpp"

namespace cmaxdn {

/// Background-activity filter settings: an event is kept when some earlier
/// event fell within the Chebyshev neighborhood during the time window.
struct BafConfig {
  double time_window = 5e-3;  // seconds
  int neighborhood_radius = 1;  // px
};

/// Classical background-activity filter. Scores are 1 for signal and 0 for
/// noise; tau records the achieved signal fraction. Polarity is ignored.
inline LabelSet baf_filter(const EventSlice& slice, const BafConfig& cfg) {
  if (!(cfg.time_window > 0.0)) throw std::invalid_argument("time_window must be > 0");
  if (cfg.neighborhood_radius < 1) throw std::invalid_argument("radius must be >= 1");
  const int w = slice.sensor.width, h = slice.sensor.height;
  const int r = cfg.neighborhood_radius;
  std::vector<double> last(std::size_t(w) * h, -std::numeric_limits<double>::infinity());
  LabelSet out;
  out.scores.assign(slice.size(), 0.0);
  out.labels.assign(slice.size(), 0);
  out.threshold = 0.5;
  for (std::size_t k = 0; k < slice.size(); ++k) {
    const Event& e = slice.events[k];
    bool supported = false;
    const int x0 = std::max(e.x - r, 0), x1 = std::min(e.x + r, w - 1);
    const int y0 = std::max(e.y - r, 0), y1 = std::min(e.y + r, h - 1);
    for (int y = y0; y <= y1 && !supported; ++y) {
      const double* row = &last[std::size_t(y) * w];
      for (int x = x0; x <= x1; ++x) {
        if (e.t - row[x] <= cfg.time_window) {
          supported = true;
          break;
        }
      }
    }
    if (supported) {
      out.labels[k] = 1;
      out.scores[k] = 1.0;
    }
    last[std::size_t(e.y) * w + e.x] = e.t;
  }
  out.tau = slice.empty() ? 1.0
                          : double(out.signal_count()) / double(slice.size());
  return out;
}

/// Uniform seed-deterministic choice of ceil(tau*N) events as signal.
inline LabelSet random_downsample(const EventSlice& slice, double tau, uint64_t seed) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("tau must be in (0, 1]");
  }
  LabelSet out;
  out.scores.assign(slice.size(), 0.0);
  out.labels.assign(slice.size(), 0);
  out.threshold = 0.5;
  out.tau = tau;
  SplitMix64 rng(mix_seed(seed, 0xD05A));
  for (uint32_t k :
       sample_without_replacement(slice.size(), signal_target(slice.size(), tau), rng)) {
    out.labels[k] = 1;
    out.scores[k] = 1.0;
  }
  return out;
}

}  // namespace cmaxdn
