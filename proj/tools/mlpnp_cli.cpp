// Command line front end: solve single instances from correspondence files,
// generate synthetic instances, run the benchmark protocol and the
// sequential covariance-feedback protocol.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bench/experiment.hpp"
#include "bench/scene.hpp"
#include "bench/sequence.hpp"
#include "io/config.hpp"
#include "io/corrfile.hpp"
#include "io/text.hpp"
#include "mlpnp/mlpnp.hpp"

namespace fs = std::filesystem;
using namespace mlpnp;
using mlpnp::io::format_full;

namespace {

constexpr const char* kVersion = "mlpnp 1.0.0";

// Collects every file written during a run; the manifest goes out last and
// doubles as the completion marker.
class RunManifest {
 public:
  RunManifest(fs::path dir, std::string config_ref, std::uint64_t seed)
      : dir_(std::move(dir)), config_ref_(std::move(config_ref)), seed_(seed) {}

  std::ofstream open(const std::string& name) {
    outputs_.push_back(name);
    std::ofstream out(dir_ / name);
    if (!out) throw Error(ErrorCode::io_error, "cannot write '" + (dir_ / name).string() + "'");
    return out;
  }

  void finalize() {
    nlohmann::json j;
    j["tool"] = kVersion;
    j["config"] = config_ref_;
    j["seed"] = seed_;
    j["outputs"] = outputs_;
    std::ofstream out(dir_ / "manifest.json");
    out << j.dump(2) << "\n";
  }

 private:
  fs::path dir_;
  std::string config_ref_;
  std::uint64_t seed_;
  std::vector<std::string> outputs_;
};

std::string csv(const std::vector<std::string>& fields) {
  std::string line;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += fields[i];
  }
  return line + "\n";
}

void print_pose_report(std::ostream& out, const PoseSolutiond& sol) {
  const auto& rot = sol.pose.rotation;
  out << "rotation: ";
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out << format_full(rot(r, c)) << (r == 2 && c == 2 ? "\n" : " ");
  out << "translation: " << format_full(sol.pose.translation.x()) << ' '
      << format_full(sol.pose.translation.y()) << ' '
      << format_full(sol.pose.translation.z()) << "\n";
  out << "sigmas_rot_deg:";
  for (int k = 0; k < 3; ++k) out << ' ' << format_full(sol.sigmas[k] * 180.0 / M_PI);
  out << "\nsigmas_trans:";
  for (int k = 3; k < 6; ++k) out << ' ' << format_full(sol.sigmas[k]);
  out << "\nsigma0_sq: " << format_full(sol.sigma0_sq) << "\n";
  out << "planar: " << (sol.diagnostics.planar ? 1 : 0) << "\n";
  out << "gn_iterations: " << sol.diagnostics.gn_iterations << "\n";
  out << "weighted_cost: " << format_full(sol.diagnostics.weighted_cost) << "\n";
  out << "redundancy: " << sol.diagnostics.redundancy << "\n";
  out << "condition: " << format_full(sol.diagnostics.linear_condition) << "\n";
}

// ---------------------------------------------------------------- solve ---

struct SolveArgs {
  std::string input;
  std::string out_file;
  double focal = 800.0;
  double cx = 0.0;
  double cy = 0.0;
  bool no_covariance = false;
};

int cmd_solve(const SolveArgs& args) {
  const io::CorrespondenceFile data = io::read_correspondence_file(args.input);
  const PinholeCamera<double> cam(args.focal, Vec2<double>(args.cx, args.cy));

  std::vector<Correspondenced> corrs(data.points.size());
  for (size_t i = 0; i < data.points.size(); ++i) {
    corrs[i].point = data.points[i];
    // identity weighting skips the covariance propagation entirely, so files
    // without usable covariances still solve
    corrs[i].observation =
        args.no_covariance
            ? bearing_from_direction<double>(cam.unproject(data.pixels[i].pixel))
            : to_bearing(project_forward(cam, data.pixels[i]));
  }

  SolverOptionsd opts;
  opts.use_covariance = !args.no_covariance;
  const PoseSolutiond sol = solve<double>(corrs, opts);
  print_pose_report(std::cout, sol);
  if (!args.out_file.empty()) io::write_pose_file(args.out_file, sol.pose);
  return 0;
}

// ------------------------------------------------------------- generate ---

struct GenerateArgs {
  std::string output;
  int n_points = 50;
  std::string noise = "uniform";
  double sigma = 1.0;
  double sigma_max = 10.0;
  bool planar = false;
  double focal = 800.0;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
};

bench::NoiseModel noise_from_name(const std::string& name, double sigma, double sigma_max) {
  if (name == "uniform") return bench::NoiseModel::uniform(sigma);
  if (name == "deciles") return bench::NoiseModel::deciles(sigma_max);
  if (name == "per-point") return bench::NoiseModel::per_point(sigma_max);
  throw Error(ErrorCode::config_error, "unknown noise model '" + name + "'");
}

int cmd_generate(const GenerateArgs& args) {
  bench::SceneConfig cfg;
  cfg.n_points = args.n_points;
  cfg.noise = noise_from_name(args.noise, args.sigma, args.sigma_max);
  cfg.planar = args.planar;
  cfg.focal = args.focal;
  cfg.seed = args.seed;
  const bench::Scene scene = bench::generate_scene(cfg, args.trial);

  io::CorrespondenceFile data;
  data.points.reserve(scene.corrs.size());
  for (const auto& corr : scene.corrs) data.points.push_back(corr.point);
  data.pixels = scene.pixels;
  io::write_correspondence_file(args.output, data,
                                "focal " + format_full(args.focal) + "  seed " +
                                    std::to_string(args.seed) + "  trial " +
                                    std::to_string(args.trial));
  io::write_pose_file(args.output + ".gt", scene.ground_truth);
  std::cout << "wrote " << args.output << " and " << args.output << ".gt\n";
  return 0;
}

// ---------------------------------------------------------------- bench ---

struct BenchArgs {
  std::string config_path;
  std::string out_dir = "bench_out";
  std::uint64_t seed = 0;
  int trials = -1;  // -1: take from config/defaults
  int sigma_points = -1;
  double sigma_max = -1.0;
  bool planar = false;
  bool no_covariance = false;
  bool timing = false;
};

struct GridResult {
  std::string grid;  // "points" or "sigma"
  int n_points;
  double sigma_max;
  bench::ExperimentReport report;
};

int cmd_bench(const BenchArgs& args) {
  io::Config cfg;
  if (!args.config_path.empty()) cfg = io::Config::from_file(args.config_path);

  const std::uint64_t seed = args.seed ? args.seed : cfg.get_u64("seed", 0);
  const int trials = args.trials > 0 ? args.trials : cfg.get_int("trials", 250);
  const int points_min = cfg.get_int("points_min", 10);
  const int points_max = cfg.get_int("points_max", 200);
  const int points_step = cfg.get_int("points_step", 10);
  const double sigma_max = args.sigma_max > 0 ? args.sigma_max : cfg.get_double("sigma_max", 10.0);
  const int sigma_steps = cfg.get_int("sigma_steps", 10);
  const int sigma_points =
      args.sigma_points > 0 ? args.sigma_points : cfg.get_int("sigma_points", 50);
  const bool planar = args.planar || cfg.get_bool("planar", false);
  const double focal = cfg.get_double("focal", 800.0);
  const bool timing = args.timing || cfg.get_bool("timing", false);
  cfg.reject_unknown_keys();

  if (trials < 1) throw Error(ErrorCode::config_error, "trials must be >= 1");
  if (points_min < 6 || points_step < 1 || points_max < points_min)
    throw Error(ErrorCode::config_error, "bad points grid");

  std::vector<bench::SolverSpec> solvers;
  if (!args.no_covariance) solvers.push_back({"mlpnp", true});
  solvers.push_back({"mlpnp-id", false});

  fs::create_directories(args.out_dir);
  RunManifest manifest(args.out_dir,
                       args.config_path.empty() ? "(defaults)" : args.config_path, seed);

  std::vector<GridResult> results;

  // error vs number of points, mixed-decile noise
  for (int n = points_min; n <= points_max; n += points_step) {
    bench::SceneConfig scene_cfg;
    scene_cfg.n_points = n;
    scene_cfg.noise = bench::NoiseModel::deciles(sigma_max);
    scene_cfg.planar = planar;
    scene_cfg.focal = focal;
    scene_cfg.seed = seed;
    results.push_back({"points", n, sigma_max, bench::run_experiment(scene_cfg, trials, solvers)});
  }

  // error vs noise level, fixed point count, per-feature uniform sigma
  for (int s = 1; s <= sigma_steps; ++s) {
    const double smax = sigma_max * s / sigma_steps;
    bench::SceneConfig scene_cfg;
    scene_cfg.n_points = sigma_points;
    scene_cfg.noise = bench::NoiseModel::per_point(smax);
    scene_cfg.planar = planar;
    scene_cfg.focal = focal;
    scene_cfg.seed = seed;
    results.push_back(
        {"sigma", sigma_points, smax, bench::run_experiment(scene_cfg, trials, solvers)});
  }

  {
    auto out = manifest.open("trials.csv");
    out << csv({"grid", "n_points", "sigma_max", "planar", "trial", "solver", "ok",
                "rot_err_deg", "trans_err_pct", "sigma0_sq", "error"});
    for (const auto& res : results)
      for (const auto& rec : res.report.trials)
        out << csv({res.grid, std::to_string(res.n_points), format_full(res.sigma_max),
                    planar ? "1" : "0", std::to_string(rec.trial), rec.solver,
                    rec.ok ? "1" : "0", format_full(rec.rot_err_deg),
                    format_full(rec.trans_err_pct), format_full(rec.sigma0_sq), rec.error});
  }
  {
    auto out = manifest.open("summary.csv");
    out << csv({"grid", "n_points", "sigma_max", "planar", "solver", "n_ok", "mean_rot_err_deg",
                "mean_trans_err_pct", "mean_sigma0_sq"});
    for (const auto& res : results)
      for (const auto& agg : res.report.solvers)
        out << csv({res.grid, std::to_string(res.n_points), format_full(res.sigma_max),
                    planar ? "1" : "0", agg.name, std::to_string(agg.n_ok),
                    format_full(agg.mean_rot_err_deg), format_full(agg.mean_trans_err_pct),
                    format_full(agg.mean_sigma0_sq)});
  }
  for (const char* grid : {"points", "sigma"}) {
    auto out = manifest.open(std::string("error_vs_") + grid + ".dat");
    out << "# " << (grid == std::string("points") ? "n_points" : "sigma_max");
    for (const auto& spec : solvers) out << "  rot_" << spec.name << "  trans_" << spec.name;
    out << "\n";
    for (const auto& res : results) {
      if (res.grid != grid) continue;
      out << (res.grid == "points" ? std::to_string(res.n_points) : format_full(res.sigma_max));
      for (const auto& agg : res.report.solvers)
        out << "  " << format_full(agg.mean_rot_err_deg) << "  "
            << format_full(agg.mean_trans_err_pct);
      out << "\n";
    }
  }

  // wall-clock measurements are inherently nondeterministic, so they are
  // opt-in and live in their own files
  if (timing) {
    auto out = manifest.open("runtime.csv");
    auto dat = manifest.open("runtime_vs_points.dat");
    out << csv({"n_points", "solver", "runtime_sec"});
    dat << "# n_points";
    for (const auto& spec : solvers) dat << "  " << spec.name;
    dat << "\n";
    for (int n : {10, 20, 50, 100, 200, 500, 1000}) {
      bench::SceneConfig scene_cfg;
      scene_cfg.n_points = n;
      scene_cfg.noise = bench::NoiseModel::deciles(sigma_max);
      scene_cfg.planar = planar;
      scene_cfg.focal = focal;
      scene_cfg.seed = seed;
      const auto report = bench::run_experiment(scene_cfg, std::min(trials, 50), solvers);
      dat << n;
      for (const auto& agg : report.solvers) {
        out << csv({std::to_string(n), agg.name, format_full(agg.runtime_sec)});
        dat << "  " << format_full(agg.runtime_sec);
      }
      dat << "\n";
    }
  }

  manifest.finalize();

  std::cout << "grid      n_points  sigma_max  solver     mean_rot_deg      mean_trans_pct\n";
  for (const auto& res : results)
    for (const auto& agg : res.report.solvers)
      std::cout << res.grid << (res.grid == "points" ? "  " : "   ") << "  " << res.n_points
                << "  " << res.sigma_max << "  " << agg.name << "  " << agg.mean_rot_err_deg
                << "  " << agg.mean_trans_err_pct << "\n";
  return 0;
}

// ------------------------------------------------------------- sequence ---

struct SequenceArgs {
  std::string config_path;
  std::string out_dir;
  int n_points = 12;
  int frames = 2;
  int trials = 250;
  double sigma = 1.0;
  double motion_rot_deg = 2.0;
  double motion_trans = 0.1;
  std::uint64_t seed = 0;
};

int cmd_sequence(const SequenceArgs& args) {
  bench::SequenceConfig cfg;
  cfg.n_points = args.n_points;
  cfg.n_frames = args.frames;
  cfg.trials = args.trials;
  cfg.pixel_sigma = args.sigma;
  cfg.motion_rot_deg = args.motion_rot_deg;
  cfg.motion_trans = args.motion_trans;
  cfg.seed = args.seed;
  if (!args.config_path.empty()) {
    const io::Config file = io::Config::from_file(args.config_path);
    cfg.n_points = file.get_int("points", cfg.n_points);
    cfg.n_frames = file.get_int("frames", cfg.n_frames);
    cfg.trials = file.get_int("trials", cfg.trials);
    cfg.pixel_sigma = file.get_double("sigma", cfg.pixel_sigma);
    cfg.motion_rot_deg = file.get_double("motion_rot_deg", cfg.motion_rot_deg);
    cfg.motion_trans = file.get_double("motion_trans", cfg.motion_trans);
    cfg.seed = file.get_u64("seed", cfg.seed);
    file.reject_unknown_keys();
  }
  if (cfg.n_frames < 1 || cfg.trials < 1 || cfg.n_points < 6)
    throw Error(ErrorCode::config_error, "bad sequence configuration");

  const bench::SequenceReport report = bench::run_sequence(cfg);

  std::cout << "frame  rot_plain  rot_feedback  trans_plain  trans_feedback   (means over "
            << report.n_ok << " trials)\n";
  for (const auto& f : report.frames)
    std::cout << f.frame << "  " << f.mean_rot_plain << "  " << f.mean_rot_feedback << "  "
              << f.mean_trans_plain << "  " << f.mean_trans_feedback << "\n";

  if (!args.out_dir.empty()) {
    fs::create_directories(args.out_dir);
    RunManifest manifest(args.out_dir,
                         args.config_path.empty() ? "(defaults)" : args.config_path, cfg.seed);
    auto out = manifest.open("sequence.csv");
    out << csv({"trial", "frame", "rot_plain", "trans_plain", "rot_feedback", "trans_feedback"});
    for (const auto& row : report.rows)
      out << csv({std::to_string(row.trial), std::to_string(row.frame),
                  format_full(row.rot_plain), format_full(row.trans_plain),
                  format_full(row.rot_feedback), format_full(row.trans_feedback)});
    auto summary = manifest.open("sequence_summary.csv");
    summary << csv({"frame", "mean_rot_plain", "mean_trans_plain", "mean_rot_feedback",
                    "mean_trans_feedback", "n_trials"});
    for (const auto& f : report.frames)
      summary << csv({std::to_string(f.frame), format_full(f.mean_rot_plain),
                      format_full(f.mean_trans_plain), format_full(f.mean_rot_feedback),
                      format_full(f.mean_trans_feedback), std::to_string(report.n_ok)});
    manifest.finalize();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::cout.precision(17);  // round-trip precision on every numeric output
  CLI::App app{"Maximum-likelihood perspective-n-point solver and benchmark"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "solve a correspondence file");
  solve_cmd->add_option("input", solve_args.input, "correspondence file")->required();
  solve_cmd->add_option("--focal", solve_args.focal, "focal length in pixels");
  solve_cmd->add_option("--cx", solve_args.cx, "principal point x");
  solve_cmd->add_option("--cy", solve_args.cy, "principal point y");
  solve_cmd->add_option("--out", solve_args.out_file, "write the pose to this file");
  solve_cmd->add_flag("--no-covariance", solve_args.no_covariance, "identity weighting");

  GenerateArgs gen_args;
  auto* gen_cmd = app.add_subcommand("generate", "write a synthetic instance");
  gen_cmd->add_option("output", gen_args.output, "output correspondence file")->required();
  gen_cmd->add_option("--points", gen_args.n_points, "number of points");
  gen_cmd->add_option("--noise", gen_args.noise, "uniform | deciles | per-point");
  gen_cmd->add_option("--sigma", gen_args.sigma, "pixel sigma (uniform model)");
  gen_cmd->add_option("--sigma-max", gen_args.sigma_max, "maximum sigma (mixed models)");
  gen_cmd->add_flag("--planar", gen_args.planar, "points on the world plane z=0");
  gen_cmd->add_option("--focal", gen_args.focal, "focal length in pixels");
  gen_cmd->add_option("--seed", gen_args.seed, "random seed");
  gen_cmd->add_option("--trial", gen_args.trial, "trial index within the seed stream");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "run the synthetic benchmark protocol");
  bench_cmd->add_option("--config", bench_args.config_path, "key=value config file");
  bench_cmd->add_option("--out-dir", bench_args.out_dir, "output directory");
  bench_cmd->add_option("--seed", bench_args.seed, "random seed");
  bench_cmd->add_option("--trials", bench_args.trials, "trials per grid cell");
  bench_cmd->add_option("--points", bench_args.sigma_points, "point count of the sigma grid");
  bench_cmd->add_option("--sigma-max", bench_args.sigma_max, "maximum pixel sigma");
  bench_cmd->add_flag("--planar", bench_args.planar, "planar scenes");
  bench_cmd->add_flag("--no-covariance", bench_args.no_covariance,
                      "run only the identity-weighted solver");
  bench_cmd->add_flag("--timing", bench_args.timing, "also measure runtimes (nondeterministic)");

  SequenceArgs seq_args;
  auto* seq_cmd = app.add_subcommand("sequence", "two-frame covariance feedback protocol");
  seq_cmd->add_option("--config", seq_args.config_path, "key=value config file");
  seq_cmd->add_option("--out-dir", seq_args.out_dir, "output directory");
  seq_cmd->add_option("--points", seq_args.n_points, "number of points");
  seq_cmd->add_option("--frames", seq_args.frames, "number of frames");
  seq_cmd->add_option("--trials", seq_args.trials, "number of trials");
  seq_cmd->add_option("--sigma", seq_args.sigma, "true pixel noise");
  seq_cmd->add_option("--motion-rot", seq_args.motion_rot_deg, "inter-frame rotation, degrees");
  seq_cmd->add_option("--motion-trans", seq_args.motion_trans, "inter-frame translation");
  seq_cmd->add_option("--seed", seq_args.seed, "random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) return cmd_solve(solve_args);
    if (*gen_cmd) return cmd_generate(gen_args);
    if (*bench_cmd) return cmd_bench(bench_args);
    if (*seq_cmd) return cmd_sequence(seq_args);
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return static_cast<int>(err.code());
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
