#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmaxdn {

/// Base class of all recoverable pipeline errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Pinhole sensor geometry. Pixel (0,0) is the top-left pixel center and the
/// image plane spans [0, width-1] x [0, height-1] in pixel units.
struct CameraModel {
  int width = 0;
  int height = 0;
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  int pixel_count() const { return width * height; }
  bool valid() const { return width > 0 && height > 0 && fx > 0.0 && fy > 0.0; }
};

/// One pixel activation: integer pixel, time in seconds, polarity in {+1,-1}.
struct Event {
  int x = 0;
  int y = 0;
  double t = 0.0;
  int8_t p = 1;

  bool operator==(const Event&) const = default;
};

/// A time-ordered batch of events together with the reference time that all
/// warps transport to. Immutable by convention once filled in.
struct EventSlice {
  std::vector<Event> events;
  double t_ref = 0.0;
  CameraModel sensor;

  std::size_t size() const { return events.size(); }
  bool empty() const { return events.empty(); }
};

enum class SliceFault {
  Ok,
  UnsortedTimestamps,
  OutOfBoundsPixel,
  BadPolarity,
};

/// Outcome of validate_slice; `index` is the first offending event.
struct SliceValidation {
  SliceFault fault = SliceFault::Ok;
  std::size_t index = 0;

  bool ok() const { return fault == SliceFault::Ok; }
};

inline const char* to_string(SliceFault f) {
  switch (f) {
    case SliceFault::Ok: return "ok";
    case SliceFault::UnsortedTimestamps: return "unsorted timestamps";
    case SliceFault::OutOfBoundsPixel: return "out-of-bounds pixel";
    case SliceFault::BadPolarity: return "bad polarity";
  }
  return "?";
}

/// Checks the Event invariants and the ascending-timestamp ordering that all
/// downstream modules assume. Returns the first violation found.
inline SliceValidation validate_slice(const EventSlice& slice) {
  const auto& ev = slice.events;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (ev[i].x < 0 || ev[i].x >= slice.sensor.width || ev[i].y < 0 ||
        ev[i].y >= slice.sensor.height) {
      return {SliceFault::OutOfBoundsPixel, i};
    }
    if (ev[i].p != 1 && ev[i].p != -1) {
      return {SliceFault::BadPolarity, i};
    }
    if (i > 0 && ev[i].t < ev[i - 1].t) {
      return {SliceFault::UnsortedTimestamps, i};
    }
  }
  return {};
}

/// Per-event signal/noise decision plus the scores and threshold behind it.
/// `labels[k]` is 1 for signal, 0 for noise.
struct LabelSet {
  std::vector<double> scores;
  std::vector<uint8_t> labels;
  double threshold = 0.0;
  double tau = 1.0;

  std::size_t size() const { return labels.size(); }

  std::size_t signal_count() const {
    std::size_t n = 0;
    for (uint8_t l : labels) n += l;
    return n;
  }
};

/// Number of events classified as signal for a target ratio tau: the
/// mathematical ceil of tau*n. The small backoff keeps products like
/// 0.823*1000 that land one ulp above an integer from overshooting it.
inline std::size_t signal_target(std::size_t n, double tau) {
  if (n == 0) return 0;
  auto m = static_cast<std::size_t>(std::ceil(tau * static_cast<double>(n) - 1e-9));
  if (m < 1) m = 1;
  if (m > n) m = n;
  return m;
}

}  // namespace cmaxdn
