// Command-line driver: simulate labeled event streams, run the joint
// denoise/motion estimation (or classical baselines), evaluate against
// ground truth, and sweep tau/noise grids into CSV.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "cmaxdn/baselines.hpp"
#include "cmaxdn/cmax.hpp"
#include "cmaxdn/core.hpp"
#include "cmaxdn/denoise.hpp"
#include "cmaxdn/io.hpp"
#include "cmaxdn/metrics.hpp"
#include "cmaxdn/rng.hpp"
#include "cmaxdn/sim.hpp"
#include "cmaxdn/warp.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cmaxdn;

namespace {

struct SceneOptions {
  int width = 200, height = 200;
  double fx = 0.0, fy = 0.0, cx = -1.0, cy = -1.0;
  std::string pattern = "star";
  int arms = 8;
  double near_density = 1.0, far_density = 0.3;
  std::string motion = "angular";
  std::vector<double> omega = {0.0, 0.0, 2.0};
  std::vector<double> flow = {40.0, 0.0};
  std::vector<double> flow_far = {10.0, 0.0};
  int tile_size = 16;
  double rate = 500.0;
  double duration = 0.2;
  double noise_hz = 0.0;
};

struct OptimOptions {
  std::string objective = "gradmag";
  double epsilon = 1.0;
  int max_iters = 100;
  double tol = 1e-4;
  double fd_step_angular = 1e-3;
  double fd_step_flow = 0.1;
  double trial_step_angular = 0.5;
  double trial_step_flow = 20.0;
  double shrink = 0.5;
  int backtracks = 20;
  std::string motion = "angular";
  std::vector<double> init_omega = {0.0, 0.0, 0.0};
  std::vector<double> init_flow = {0.0, 0.0};
  int tile_size = 16;
};

void add_scene_flags(CLI::App* cmd, SceneOptions& o) {
  cmd->add_option("--width", o.width, "sensor width, px");
  cmd->add_option("--height", o.height, "sensor height, px");
  cmd->add_option("--fx", o.fx, "focal length x, px (default min(width,height))");
  cmd->add_option("--fy", o.fy, "focal length y, px");
  cmd->add_option("--cx", o.cx, "principal point x (default image center)");
  cmd->add_option("--cy", o.cy, "principal point y");
  cmd->add_option("--pattern", o.pattern, "star|bar|two-depth")
      ->check(CLI::IsMember({"star", "bar", "two-depth"}));
  cmd->add_option("--arms", o.arms, "star arm count");
  cmd->add_option("--near-density", o.near_density, "two-depth near rate multiplier");
  cmd->add_option("--far-density", o.far_density, "two-depth far rate multiplier");
  cmd->add_option("--motion", o.motion, "ground-truth motion: angular|flow|identity")
      ->check(CLI::IsMember({"angular", "flow", "identity"}));
  cmd->add_option("--omega", o.omega, "angular velocity wx wy wz, rad/s")->expected(3);
  cmd->add_option("--flow", o.flow, "uniform flow vx vy, px/s")->expected(2);
  cmd->add_option("--flow-far", o.flow_far, "two-depth far-half flow vx vy, px/s")->expected(2);
  cmd->add_option("--tile-size", o.tile_size, "flow tile size, px");
  cmd->add_option("--rate", o.rate, "events per edge pixel, Hz");
  cmd->add_option("--duration", o.duration, "slice duration, s");
  cmd->add_option("--noise-hz", o.noise_hz, "injected BA noise rate, Hz per pixel");
}

void add_optim_flags(CLI::App* cmd, OptimOptions& o) {
  cmd->add_option("--objective", o.objective, "contrast objective: gradmag|variance")
      ->check(CLI::IsMember({"gradmag", "variance"}));
  cmd->add_option("--epsilon", o.epsilon, "IWE Gaussian kernel, px");
  cmd->add_option("--max-iters", o.max_iters, "outer iteration cap");
  cmd->add_option("--tol", o.tol, "convergence tolerance on the parameter change");
  cmd->add_option("--fd-step-angular", o.fd_step_angular, "FD step, rad/s");
  cmd->add_option("--fd-step-flow", o.fd_step_flow, "FD step, px/s");
  cmd->add_option("--trial-step-angular", o.trial_step_angular, "line-search trial, rad/s");
  cmd->add_option("--trial-step-flow", o.trial_step_flow, "line-search trial, px/s");
  cmd->add_option("--shrink", o.shrink, "line-search backtracking factor");
  cmd->add_option("--backtracks", o.backtracks, "line-search backtrack cap");
  cmd->add_option("--fit-motion", o.motion, "fitted motion variant: angular|flow")
      ->check(CLI::IsMember({"angular", "flow"}));
  cmd->add_option("--init-omega", o.init_omega, "initial angular velocity")->expected(3);
  cmd->add_option("--init-flow", o.init_flow, "initial uniform flow")->expected(2);
  cmd->add_option("--fit-tile-size", o.tile_size, "tile size of the fitted flow, px");
}

CameraModel scene_camera(const SceneOptions& o) {
  CameraModel cam;
  cam.width = o.width;
  cam.height = o.height;
  cam.fx = o.fx > 0.0 ? o.fx : std::min(o.width, o.height);
  cam.fy = o.fy > 0.0 ? o.fy : cam.fx;
  cam.cx = o.cx >= 0.0 ? o.cx : 0.5 * (o.width - 1);
  cam.cy = o.cy >= 0.0 ? o.cy : 0.5 * (o.height - 1);
  return cam;
}

MotionParams scene_motion(const SceneOptions& o, const CameraModel& cam) {
  if (o.motion == "identity") return MotionParams{};
  if (o.motion == "angular") {
    AngularVelocity a;
    a.omega = {o.omega[0], o.omega[1], o.omega[2]};
    return MotionParams{a};
  }
  TileFlow f = TileFlow::zero(cam, o.tile_size);
  const Eigen::Vector2d near{o.flow[0], o.flow[1]};
  const Eigen::Vector2d far{o.flow_far[0], o.flow_far[1]};
  const bool split = o.pattern == "two-depth";
  const double mid = 0.5 * (cam.width - 1);
  for (int j = 0; j < f.grid_h; ++j) {
    for (int i = 0; i < f.grid_w; ++i) {
      f.at(i, j) = (split && f.center(i, j).x() >= mid) ? far : near;
    }
  }
  return MotionParams{std::move(f)};
}

SceneSpec scene_spec(const SceneOptions& o, uint64_t seed) {
  SceneSpec spec;
  spec.pattern = o.pattern == "bar"         ? ScenePattern::Bar
                 : o.pattern == "two-depth" ? ScenePattern::TwoDepth
                                            : ScenePattern::Star;
  spec.star_arms = o.arms;
  spec.near_density = o.near_density;
  spec.far_density = o.far_density;
  spec.sensor = scene_camera(o);
  spec.motion = scene_motion(o, spec.sensor);
  spec.duration = o.duration;
  spec.events_per_edge_pixel = o.rate;
  spec.seed = seed;
  return spec;
}

OptimizerConfig optimizer_config(const OptimOptions& o, const CameraModel& cam) {
  OptimizerConfig cfg;
  cfg.max_iters = o.max_iters;
  cfg.param_tolerance = o.tol;
  cfg.fd_step_angular = o.fd_step_angular;
  cfg.fd_step_flow = o.fd_step_flow;
  cfg.trial_step_angular = o.trial_step_angular;
  cfg.trial_step_flow = o.trial_step_flow;
  cfg.line_search_shrink = o.shrink;
  cfg.max_backtracks = o.backtracks;
  cfg.objective =
      o.objective == "variance" ? ObjectiveKind::Variance : ObjectiveKind::GradientMagnitude;
  cfg.epsilon = o.epsilon;
  if (o.motion == "angular") {
    AngularVelocity a;
    a.omega = {o.init_omega[0], o.init_omega[1], o.init_omega[2]};
    cfg.initial_params = MotionParams{a};
  } else {
    TileFlow f = TileFlow::zero(cam, o.tile_size);
    for (auto& v : f.v) v = {o.init_flow[0], o.init_flow[1]};
    cfg.initial_params = MotionParams{std::move(f)};
  }
  return cfg;
}

json scene_json(const SceneOptions& o, uint64_t seed) {
  return json{{"width", o.width},       {"height", o.height},
              {"fx", o.fx},             {"fy", o.fy},
              {"cx", o.cx},             {"cy", o.cy},
              {"pattern", o.pattern},   {"arms", o.arms},
              {"near_density", o.near_density},
              {"far_density", o.far_density},
              {"motion", o.motion},     {"omega", o.omega},
              {"flow", o.flow},         {"flow_far", o.flow_far},
              {"tile_size", o.tile_size},
              {"rate", o.rate},         {"duration", o.duration},
              {"noise_hz", o.noise_hz}, {"seed", seed}};
}

json optim_json(const OptimOptions& o) {
  return json{{"objective", o.objective},
              {"epsilon", o.epsilon},
              {"max_iters", o.max_iters},
              {"tol", o.tol},
              {"fd_step_angular", o.fd_step_angular},
              {"fd_step_flow", o.fd_step_flow},
              {"trial_step_angular", o.trial_step_angular},
              {"trial_step_flow", o.trial_step_flow},
              {"shrink", o.shrink},
              {"backtracks", o.backtracks},
              {"fit_motion", o.motion},
              {"init_omega", o.init_omega},
              {"init_flow", o.init_flow},
              {"fit_tile_size", o.tile_size}};
}

void make_layout(const fs::path& out) {
  for (const char* sub : {"events", "labels", "iwe", "metrics"}) {
    fs::create_directories(out / sub);
  }
}

json motion_json(const MotionEstimate& est, const std::string& objective) {
  json j;
  if (const auto* a = est.params.angular()) {
    j["variant"] = "angular";
    j["omega"] = {a->omega.x(), a->omega.y(), a->omega.z()};
  } else if (const auto* f = est.params.tile_flow()) {
    j["variant"] = "tileflow";
    j["tile_size"] = f->tile_size;
    j["grid_w"] = f->grid_w;
    j["grid_h"] = f->grid_h;
    json grid = json::array();
    for (const auto& v : f->v) grid.push_back({v.x(), v.y()});
    j["v"] = grid;
  } else {
    j["variant"] = "identity";
  }
  j["objective"] = objective;
  j["objective_value"] = est.objective_value;
  j["iterations_used"] = est.iterations_used;
  j["converged"] = est.converged;
  return j;
}

MotionParams motion_from_json(const json& j) {
  const std::string variant = j.at("variant");
  if (variant == "angular") {
    AngularVelocity a;
    a.omega = Eigen::Vector3d(j.at("omega")[0].get<double>(), j.at("omega")[1].get<double>(),
                              j.at("omega")[2].get<double>());
    return MotionParams{a};
  }
  if (variant == "tileflow") {
    TileFlow f;
    f.tile_size = j.at("tile_size");
    f.grid_w = j.at("grid_w");
    f.grid_h = j.at("grid_h");
    for (const auto& v : j.at("v")) {
      f.v.emplace_back(v[0].get<double>(), v[1].get<double>());
    }
    return MotionParams{std::move(f)};
  }
  return MotionParams{};
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw Error(fmt::format("cannot open '{}' for writing", path.string()));
  f << j.dump(2) << "\n";
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream f(path);
  if (!f) throw Error(fmt::format("cannot open '{}' for writing", path.string()));
  f << body;
}

EventSlice signal_only(const EventSlice& slice, const LabelSet& labels) {
  EventSlice out;
  out.sensor = slice.sensor;
  out.t_ref = slice.t_ref;
  for (std::size_t k = 0; k < slice.size(); ++k) {
    if (labels.labels[k]) out.events.push_back(slice.events[k]);
  }
  if (!out.events.empty()) out.t_ref = out.events.front().t;
  return out;
}

struct IndexMismatch : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------

int cmd_simulate(const SceneOptions& scene, uint64_t seed, const std::string& out_dir,
                 bool dump_config) {
  if (dump_config) {
    std::cout << json{{"command", "simulate"}, {"out", out_dir}, {"scene", scene_json(scene, seed)}}
                     .dump(2)
              << "\n";
  }
  const fs::path out(out_dir);
  make_layout(out);
  const SceneSpec spec = scene_spec(scene, seed);
  LabeledSlice labeled = generate_scene(spec);
  if (scene.noise_hz > 0.0) {
    labeled = inject_ba_noise(labeled, scene.noise_hz, mix_seed(seed, 0xA0));
  }
  write_events((out / "events" / "events.txt").string(), labeled.slice);
  write_camera((out / "events" / "camera.txt").string(), spec.sensor);
  GroundTruthFile gt;
  gt.labels = labeled.gt_labels;
  gt.motion = labeled.gt_motion;
  gt.noise_hz = labeled.injected_noise_rate;
  write_ground_truth((out / "events" / "gt.txt").string(), gt);

  std::size_t noise = 0;
  for (uint8_t l : labeled.gt_labels) noise += l ? 0 : 1;
  fmt::print("events: {} (signal {}, noise {}, noise fraction {:.4f})\n",
             labeled.slice.size(), labeled.slice.size() - noise, noise,
             labeled.slice.empty() ? 0.0 : double(noise) / double(labeled.slice.size()));
  return 0;
}

int cmd_denoise(const std::string& events_path, const std::string& camera_path,
                const std::string& out_dir, const std::string& method, double tau,
                const std::string& score, const OptimOptions& optim, uint64_t seed,
                double baf_window, int baf_radius, bool dump_config) {
  if (dump_config) {
    std::cout << json{{"command", "denoise"},
                      {"events", events_path},
                      {"camera", camera_path},
                      {"out", out_dir},
                      {"method", method},
                      {"tau", tau},
                      {"score", score},
                      {"seed", seed},
                      {"baf_window", baf_window},
                      {"baf_radius", baf_radius},
                      {"optimizer", optim_json(optim)}}
                     .dump(2)
              << "\n";
  }
  const fs::path out(out_dir);
  make_layout(out);
  const CameraModel cam = read_camera(camera_path);
  const EventSlice slice = read_events(events_path, cam);

  LabelSet labels;
  if (method == "baf") {
    labels = baf_filter(slice, BafConfig{baf_window, baf_radius});
  } else if (method == "random") {
    labels = random_downsample(slice, tau, seed);
  } else {
    const OptimizerConfig cfg = optimizer_config(optim, cam);
    const ScoreKind kind =
        score == "ratio" ? ScoreKind::SignalRatio : ScoreKind::LocalContrast;
    const JointResult res = joint_estimate(slice, tau, kind, cfg, seed);
    labels = res.labels;

    write_json(out / "metrics" / "motion.json", motion_json(res.motion, optim.objective));
    std::string hist = "iter,objective,threshold,signal_count\n";
    for (std::size_t i = 0; i < res.history.size(); ++i) {
      hist += fmt::format("{},{},{},{}\n", i + 1, res.history[i].objective,
                          res.history[i].threshold, res.history[i].signal_count);
    }
    write_text(out / "metrics" / "history.csv", hist);

    const WarpedEvents warped = warp_events(slice, res.motion.params);
    write_pgm((out / "iwe" / "all_warped.pgm").string(),
              accumulate(warped, cam, optim.epsilon));
    write_pgm((out / "iwe" / "signal_warped.pgm").string(),
              accumulate(warped, cam, optim.epsilon, &labels.labels));
  }
  const WarpedEvents unwarped = warp_events(slice, MotionParams{});
  write_pgm((out / "iwe" / "identity.pgm").string(),
            accumulate(unwarped, cam, optim.epsilon));
  write_labels((out / "labels" / "labels.txt").string(), labels);
  write_events((out / "events" / "denoised.txt").string(), signal_only(slice, labels));
  fmt::print("kept {} of {} events ({} method)\n", labels.signal_count(), slice.size(),
             method);
  return 0;
}

int cmd_evaluate(const std::string& labels_path, const std::string& gt_path,
                 const std::string& out_dir, const std::string& events_path,
                 const std::string& camera_path, const std::string& motion_path,
                 double epsilon, bool dump_config) {
  if (dump_config) {
    std::cout << json{{"command", "evaluate"}, {"labels", labels_path},
                      {"gt", gt_path},         {"out", out_dir},
                      {"events", events_path}, {"camera", camera_path},
                      {"motion_json", motion_path}, {"epsilon", epsilon}}
                     .dump(2)
              << "\n";
  }
  const fs::path out(out_dir);
  make_layout(out);
  const LabelSet labels = read_labels(labels_path);
  const GroundTruthFile gt = read_ground_truth(gt_path);
  if (labels.size() != gt.labels.size()) {
    throw IndexMismatch(fmt::format("labels file has {} entries, ground truth {}",
                                    labels.size(), gt.labels.size()));
  }

  json metrics;
  bool pos = false, neg = false;
  for (uint8_t l : gt.labels) (l ? pos : neg) = true;
  if (pos && neg) {
    const RocCurve roc = roc_auc(labels.scores, gt.labels);
    metrics["auc"] = roc.auc;
    const auto [precision, recall] = precision_recall(labels, gt.labels);
    metrics["precision"] = precision;
    metrics["recall"] = recall;
    std::string csv = "fpr,tpr\n";
    for (const auto& [fpr, tpr] : roc.points) csv += fmt::format("{},{}\n", fpr, tpr);
    write_text(out / "metrics" / "roc.csv", csv);
  } else {
    std::cerr << "note: single-class ground truth, skipping auc/precision/recall\n";
  }

  if (!events_path.empty() && !camera_path.empty() && !motion_path.empty()) {
    const CameraModel cam = read_camera(camera_path);
    const EventSlice slice = read_events(events_path, cam);
    std::ifstream mf(motion_path);
    if (!mf) throw Error(fmt::format("cannot open '{}'", motion_path));
    const MotionParams estimated = motion_from_json(json::parse(mf));
    metrics["fwl"] = fwl(slice, estimated, std::vector<uint8_t>(slice.size(), 1), epsilon);
    if (estimated.angular() && gt.motion.angular()) {
      metrics["rms_deg"] =
          angvel_rms_deg({estimated.angular()->omega}, {gt.motion.angular()->omega});
    }
    if (estimated.tile_flow() && gt.motion.tile_flow() && !slice.empty()) {
      const double span = slice.events.back().t - slice.events.front().t;
      const auto err = flow_epe(*estimated.tile_flow(), *gt.motion.tile_flow(),
                                std::vector<uint8_t>(cam.pixel_count(), 1), cam, span);
      metrics["epe_px"] = err.epe_px;
      metrics["outlier_pct"] = err.outlier_pct;
    }
  }
  write_json(out / "metrics" / "metrics.json", metrics);
  std::cout << metrics.dump(2) << "\n";
  return 0;
}

int cmd_sweep(const SceneOptions& scene, const OptimOptions& optim,
              std::vector<double> taus, std::vector<double> rates,
              const std::string& score, uint64_t seed, const std::string& out_dir,
              bool dump_config) {
  if (dump_config) {
    std::cout << json{{"command", "sweep"},
                      {"out", out_dir},
                      {"taus", taus},
                      {"noise_hz_list", rates},
                      {"score", score},
                      {"seed", seed},
                      {"scene", scene_json(scene, seed)},
                      {"optimizer", optim_json(optim)}}
                     .dump(2)
              << "\n";
  }
  const fs::path out(out_dir);
  make_layout(out);
  const ScoreKind kind = score == "ratio" ? ScoreKind::SignalRatio : ScoreKind::LocalContrast;

  std::string csv = "tau,noise_hz,auc,fwl,rms_deg,runtime_s\n";
  for (std::size_t ri = 0; ri < rates.size(); ++ri) {
    SceneSpec spec = scene_spec(scene, mix_seed(seed, ri));
    const LabeledSlice labeled =
        inject_ba_noise(generate_scene(spec), rates[ri], mix_seed(seed, 0x100 + ri));
    const OptimizerConfig cfg = optimizer_config(optim, spec.sensor);
    for (std::size_t ti = 0; ti < taus.size(); ++ti) {
      const auto t0 = std::chrono::steady_clock::now();
      const JointResult res = joint_estimate(labeled.slice, taus[ti], kind, cfg,
                                             mix_seed(seed, 0x1000 + ri * 64 + ti));
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
      const double auc = roc_auc(res.labels.scores, labeled.gt_labels).auc;
      const double sharp = fwl(labeled.slice, res.motion.params,
                               std::vector<uint8_t>(labeled.slice.size(), 1), cfg.epsilon);
      double rms = -1.0;
      if (res.motion.params.angular() && labeled.gt_motion.angular()) {
        rms = angvel_rms_deg({res.motion.params.angular()->omega},
                             {labeled.gt_motion.angular()->omega});
      }
      csv += fmt::format("{},{},{},{},{},{:.3f}\n", taus[ti], rates[ri], auc, sharp, rms,
                         dt.count());
      fmt::print("tau {} noise {} Hz: auc {:.4f} fwl {:.4f} rms {:.3f} deg/s\n", taus[ti],
                 rates[ri], auc, sharp, rms);
    }
  }
  write_text(out / "metrics" / "sweep.csv", csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"joint event denoising and motion estimation by contrast maximization"};
  app.require_subcommand(1);

  // simulate
  SceneOptions sim_scene;
  uint64_t sim_seed = 0;
  std::string sim_out;
  bool sim_dump = false;
  CLI::App* sim = app.add_subcommand("simulate", "generate a labeled synthetic event stream");
  add_scene_flags(sim, sim_scene);
  sim->add_option("--out", sim_out, "output directory")->required();
  sim->add_option("--seed", sim_seed, "random seed");
  sim->add_flag("--dump-config", sim_dump, "print the resolved configuration");

  // denoise
  std::string dn_events, dn_camera, dn_out, dn_method = "joint", dn_score = "local";
  double dn_tau = 0.85, dn_baf_window = 5e-3;
  int dn_baf_radius = 1;
  uint64_t dn_seed = 0;
  bool dn_dump = false;
  OptimOptions dn_optim;
  CLI::App* dn = app.add_subcommand("denoise", "classify events and estimate motion");
  dn->add_option("--events", dn_events, "event file")->required();
  dn->add_option("--camera", dn_camera, "camera config file")->required();
  dn->add_option("--out", dn_out, "output directory")->required();
  dn->add_option("--method", dn_method, "joint|baf|random")
      ->check(CLI::IsMember({"joint", "baf", "random"}));
  dn->add_option("--tau", dn_tau, "target signal ratio in (0,1]");
  dn->add_option("--score", dn_score, "per-event score kind: local|ratio")
      ->check(CLI::IsMember({"local", "ratio"}));
  dn->add_option("--seed", dn_seed, "random seed");
  dn->add_option("--baf-window", dn_baf_window, "BAF time window, s");
  dn->add_option("--baf-radius", dn_baf_radius, "BAF Chebyshev radius, px");
  dn->add_flag("--dump-config", dn_dump, "print the resolved configuration");
  add_optim_flags(dn, dn_optim);

  // evaluate
  std::string ev_labels, ev_gt, ev_out, ev_events, ev_camera, ev_motion;
  double ev_epsilon = 1.0;
  bool ev_dump = false;
  CLI::App* ev = app.add_subcommand("evaluate", "score labels against ground truth");
  ev->add_option("--labels", ev_labels, "labels file")->required();
  ev->add_option("--gt", ev_gt, "ground-truth sidecar file")->required();
  ev->add_option("--out", ev_out, "output directory")->required();
  ev->add_option("--events", ev_events, "event file (enables FWL/RMS/EPE)");
  ev->add_option("--camera", ev_camera, "camera config file");
  ev->add_option("--motion-json", ev_motion, "estimated motion JSON");
  ev->add_option("--epsilon", ev_epsilon, "IWE kernel for FWL, px");
  ev->add_flag("--dump-config", ev_dump, "print the resolved configuration");

  // sweep
  SceneOptions sw_scene;
  OptimOptions sw_optim;
  std::vector<double> sw_taus = {0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1};
  std::vector<double> sw_rates = {1.0, 5.0, 10.0};
  std::string sw_out, sw_score = "local";
  uint64_t sw_seed = 0;
  bool sw_dump = false;
  CLI::App* sw = app.add_subcommand("sweep", "joint estimation across tau and noise grids");
  add_scene_flags(sw, sw_scene);
  add_optim_flags(sw, sw_optim);
  sw->add_option("--taus", sw_taus, "target signal ratios to sweep");
  sw->add_option("--noise-hz-list", sw_rates, "BA noise rates to sweep, Hz per pixel");
  sw->add_option("--score", sw_score, "per-event score kind: local|ratio")
      ->check(CLI::IsMember({"local", "ratio"}));
  sw->add_option("--out", sw_out, "output directory")->required();
  sw->add_option("--seed", sw_seed, "random seed");
  sw->add_flag("--dump-config", sw_dump, "print the resolved configuration");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(sim_scene, sim_seed, sim_out, sim_dump);
    if (dn->parsed()) {
      return cmd_denoise(dn_events, dn_camera, dn_out, dn_method, dn_tau, dn_score,
                         dn_optim, dn_seed, dn_baf_window, dn_baf_radius, dn_dump);
    }
    if (ev->parsed()) {
      return cmd_evaluate(ev_labels, ev_gt, ev_out, ev_events, ev_camera, ev_motion,
                          ev_epsilon, ev_dump);
    }
    if (sw->parsed()) {
      return cmd_sweep(sw_scene, sw_optim, sw_taus, sw_rates, sw_score, sw_seed, sw_out,
                       sw_dump);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
