#pragma once

#include <fmt/format.h>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "cmaxdn/core.hpp"
#include "cmaxdn/iwe.hpp"
#include "cmaxdn/warp.hpp"

namespace cmaxdn {

struct ParseError : Error {
  using Error::Error;
};

namespace detail {

inline std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
  if (!f) throw Error(fmt::format("cannot open '{}' for writing", path));
  return f;
}

inline std::ifstream open_in(const std::string& path, bool binary = false) {
  std::ifstream f(path, binary ? std::ios::binary : std::ios::in);
  if (!f) throw Error(fmt::format("cannot open '{}' for reading", path));
  return f;
}

inline double parse_double(const std::string& tok, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(fmt::format("bad number '{}' in {}", tok, where));
  }
}

}  // namespace detail

// --- event text format: one `t x y p` line per event, '#' comments ---------

inline void write_events(const std::string& path, const EventSlice& slice) {
  auto f = detail::open_out(path);
  f << "# cmaxdn events v1\n";
  for (const Event& e : slice.events) {
    f << fmt::format("{} {} {} {}\n", e.t, e.x, e.y, int(e.p));
  }
}

inline EventSlice read_events(const std::string& path, const CameraModel& sensor) {
  auto f = detail::open_in(path);
  EventSlice slice;
  slice.sensor = sensor;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string t, x, y, p;
    if (!(ss >> t >> x >> y >> p)) {
      throw ParseError(fmt::format("{}:{}: expected `t x y p`", path, lineno));
    }
    const std::string where = fmt::format("{}:{}", path, lineno);
    Event e;
    e.t = detail::parse_double(t, where);
    e.x = static_cast<int>(detail::parse_double(x, where));
    e.y = static_cast<int>(detail::parse_double(y, where));
    e.p = static_cast<int8_t>(detail::parse_double(p, where));
    slice.events.push_back(e);
  }
  if (!slice.events.empty()) slice.t_ref = slice.events.front().t;
  const SliceValidation v = validate_slice(slice);
  if (!v.ok()) {
    throw ParseError(fmt::format("{}: {} at event {}", path, to_string(v.fault), v.index));
  }
  return slice;
}

// --- camera config: flat `key value` lines ----------------------------------

inline void write_camera(const std::string& path, const CameraModel& cam) {
  auto f = detail::open_out(path);
  f << "# cmaxdn camera v1\n";
  f << fmt::format("width {}\nheight {}\nfx {}\nfy {}\ncx {}\ncy {}\n", cam.width,
                   cam.height, cam.fx, cam.fy, cam.cx, cam.cy);
}

inline CameraModel read_camera(const std::string& path) {
  auto f = detail::open_in(path);
  CameraModel cam;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string key, value;
    if (!(ss >> key >> value)) {
      throw ParseError(fmt::format("{}:{}: expected `key value`", path, lineno));
    }
    const double v = detail::parse_double(value, fmt::format("{}:{}", path, lineno));
    if (key == "width") cam.width = static_cast<int>(v);
    else if (key == "height") cam.height = static_cast<int>(v);
    else if (key == "fx") cam.fx = v;
    else if (key == "fy") cam.fy = v;
    else if (key == "cx") cam.cx = v;
    else if (key == "cy") cam.cy = v;
    else throw ParseError(fmt::format("{}:{}: unknown key '{}'", path, lineno, key));
  }
  if (!cam.valid()) throw ParseError(fmt::format("{}: incomplete camera model", path));
  return cam;
}

// --- label format: `index label score`, label in {S,N} ----------------------

inline void write_labels(const std::string& path, const LabelSet& labels) {
  auto f = detail::open_out(path);
  f << "# cmaxdn labels v1\n";
  for (std::size_t k = 0; k < labels.size(); ++k) {
    f << fmt::format("{} {} {}\n", k, labels.labels[k] ? 'S' : 'N', labels.scores[k]);
  }
}

inline LabelSet read_labels(const std::string& path) {
  auto f = detail::open_in(path);
  LabelSet out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string idx, label, score;
    if (!(ss >> idx >> label >> score) || (label != "S" && label != "N")) {
      throw ParseError(fmt::format("{}:{}: expected `index S|N score`", path, lineno));
    }
    const std::size_t k = static_cast<std::size_t>(
        detail::parse_double(idx, fmt::format("{}:{}", path, lineno)));
    if (k != out.labels.size()) {
      throw ParseError(fmt::format("{}:{}: indices must be consecutive from 0", path, lineno));
    }
    out.labels.push_back(label == "S" ? 1 : 0);
    out.scores.push_back(detail::parse_double(score, fmt::format("{}:{}", path, lineno)));
  }
  out.tau = out.labels.empty() ? 1.0
                               : double(out.signal_count()) / double(out.labels.size());
  out.threshold = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (out.labels[k]) out.threshold = std::min(out.threshold, out.scores[k]);
  }
  if (!std::isfinite(out.threshold)) out.threshold = 0.0;
  return out;
}

// --- motion params as a single text token sequence --------------------------

inline std::string format_motion(const MotionParams& p) {
  if (const auto* a = p.angular()) {
    return fmt::format("angular {} {} {}", a->omega.x(), a->omega.y(), a->omega.z());
  }
  if (const auto* f = p.tile_flow()) {
    std::string s = fmt::format("tileflow {} {} {}", f->tile_size, f->grid_w, f->grid_h);
    for (const auto& v : f->v) s += fmt::format(" {} {}", v.x(), v.y());
    return s;
  }
  return "identity";
}

inline MotionParams parse_motion(std::istringstream& ss, const std::string& where) {
  std::string kind;
  if (!(ss >> kind)) throw ParseError(fmt::format("missing motion kind in {}", where));
  if (kind == "identity") return MotionParams{};
  if (kind == "angular") {
    std::string x, y, z;
    if (!(ss >> x >> y >> z)) throw ParseError(fmt::format("bad angular motion in {}", where));
    AngularVelocity a;
    a.omega = {detail::parse_double(x, where), detail::parse_double(y, where),
               detail::parse_double(z, where)};
    return MotionParams{a};
  }
  if (kind == "tileflow") {
    int tile = 0, gw = 0, gh = 0;
    if (!(ss >> tile >> gw >> gh) || tile < 1 || gw < 1 || gh < 1) {
      throw ParseError(fmt::format("bad tileflow header in {}", where));
    }
    TileFlow f;
    f.tile_size = tile;
    f.grid_w = gw;
    f.grid_h = gh;
    f.v.resize(std::size_t(gw) * gh);
    for (auto& v : f.v) {
      std::string x, y;
      if (!(ss >> x >> y)) throw ParseError(fmt::format("truncated tileflow grid in {}", where));
      v = {detail::parse_double(x, where), detail::parse_double(y, where)};
    }
    return MotionParams{std::move(f)};
  }
  throw ParseError(fmt::format("unknown motion kind '{}' in {}", kind, where));
}

// --- ground-truth sidecar: `index label` plus motion/noise header -----------

struct GroundTruthFile {
  std::vector<uint8_t> labels;
  MotionParams motion;
  double noise_hz = 0.0;
};

inline void write_ground_truth(const std::string& path, const GroundTruthFile& gt) {
  auto f = detail::open_out(path);
  f << "# cmaxdn gt v1\n";
  f << fmt::format("# gt_motion {}\n", format_motion(gt.motion));
  f << fmt::format("# noise_hz {}\n", gt.noise_hz);
  for (std::size_t k = 0; k < gt.labels.size(); ++k) {
    f << fmt::format("{} {}\n", k, gt.labels[k] ? 'S' : 'N');
  }
}

inline GroundTruthFile read_ground_truth(const std::string& path) {
  auto f = detail::open_in(path);
  GroundTruthFile gt;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const std::string where = fmt::format("{}:{}", path, lineno);
    if (line.rfind("# gt_motion ", 0) == 0) {
      std::istringstream ss(line.substr(12));
      gt.motion = parse_motion(ss, where);
      continue;
    }
    if (line.rfind("# noise_hz ", 0) == 0) {
      gt.noise_hz = detail::parse_double(line.substr(11), where);
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string idx, label;
    if (!(ss >> idx >> label) || (label != "S" && label != "N")) {
      throw ParseError(fmt::format("{}: expected `index S|N`", where));
    }
    if (static_cast<std::size_t>(detail::parse_double(idx, where)) != gt.labels.size()) {
      throw ParseError(fmt::format("{}: indices must be consecutive from 0", where));
    }
    gt.labels.push_back(label == "S" ? 1 : 0);
  }
  return gt;
}

// --- IWE export --------------------------------------------------------------

/// 8-bit PGM, min-max normalized.
inline void write_pgm(const std::string& path, const Iwe& iwe) {
  auto f = detail::open_out(path, true);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : iwe.pixels) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
  f << fmt::format("P5\n# cmaxdn iwe v1\n{} {}\n255\n", iwe.width, iwe.height);
  std::vector<unsigned char> row(iwe.width);
  for (int y = 0; y < iwe.height; ++y) {
    for (int x = 0; x < iwe.width; ++x) {
      row[x] = static_cast<unsigned char>(std::lround((iwe.at(x, y) - lo) * scale));
    }
    f.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
}

/// Raw float32 image: a text header with width and height, then row-major
/// little-endian samples.
inline void write_raw_float(const std::string& path, const Iwe& iwe) {
  auto f = detail::open_out(path, true);
  f << fmt::format("# cmaxdn iwe-f32 v1\n{} {}\n", iwe.width, iwe.height);
  std::vector<float> row(iwe.width);
  for (int y = 0; y < iwe.height; ++y) {
    for (int x = 0; x < iwe.width; ++x) row[x] = static_cast<float>(iwe.at(x, y));
    f.write(reinterpret_cast<const char*>(row.data()), row.size() * sizeof(float));
  }
}

/// Reads back a raw float image; only the pixel data and geometry are
/// meaningful on the result.
inline Iwe read_raw_float(const std::string& path) {
  auto f = detail::open_in(path, true);
  std::string header, dims;
  if (!std::getline(f, header) || header != "# cmaxdn iwe-f32 v1" || !std::getline(f, dims)) {
    throw ParseError(fmt::format("{}: bad raw image header", path));
  }
  std::istringstream ss(dims);
  Iwe iwe;
  if (!(ss >> iwe.width >> iwe.height) || iwe.width < 1 || iwe.height < 1) {
    throw ParseError(fmt::format("{}: bad raw image dimensions", path));
  }
  std::vector<float> data(std::size_t(iwe.width) * iwe.height);
  f.read(reinterpret_cast<char*>(data.data()), data.size() * sizeof(float));
  if (!f) throw ParseError(fmt::format("{}: truncated raw image", path));
  iwe.pixels.assign(data.begin(), data.end());
  for (double v : iwe.pixels) iwe.total_mass += v;
  return iwe;
}

}  // namespace cmaxdn
