// Command-line front end. Talks to the library only through rotvo.h.

#include <cinttypes>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "rotvo/rotvo.h"

namespace {

namespace fs = std::filesystem;

// Exit codes: 0 success, 1 numerical failure, 2 bad input or usage.
constexpr int kExitNumerical = 1;
constexpr int kExitInput = 2;

struct CliError {
  rotvo_status status;
  std::string message;
};

int ExitCodeOf(rotvo_status s) {
  switch (s) {
    case ROTVO_ERR_NUMERICAL:
    case ROTVO_ERR_NO_MODEL:
    case ROTVO_ERR_INTERNAL:
      return kExitNumerical;
    default:
      return kExitInput;
  }
}

void Check(rotvo_status s) {
  if (s != ROTVO_OK) throw CliError{s, rotvo_last_error()};
}

template <typename T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
using ConfigPtr =
    std::unique_ptr<rotvo_config, Deleter<rotvo_config, rotvo_config_destroy>>;
using DatasetPtr = std::unique_ptr<rotvo_dataset,
                                   Deleter<rotvo_dataset, rotvo_dataset_destroy>>;
using RunPtr = std::unique_ptr<rotvo_run, Deleter<rotvo_run, rotvo_run_destroy>>;
using TrajPtr =
    std::unique_ptr<rotvo_trajectory,
                    Deleter<rotvo_trajectory, rotvo_trajectory_destroy>>;

ConfigPtr NewConfig() {
  rotvo_config* c = nullptr;
  Check(rotvo_config_create(&c));
  return ConfigPtr(c);
}

DatasetPtr OpenDataset(const std::string& dir) {
  rotvo_dataset* d = nullptr;
  Check(rotvo_dataset_open(dir.c_str(), &d));
  return DatasetPtr(d);
}

TrajPtr ReadTrajectory(const std::string& path) {
  rotvo_trajectory* t = nullptr;
  Check(rotvo_trajectory_read(path.c_str(), &t));
  return TrajPtr(t);
}

RunPtr Run(const rotvo_dataset* d, const rotvo_config* c) {
  rotvo_run* r = nullptr;
  Check(rotvo_run_sequence(d, c, &r));
  return RunPtr(r);
}

TrajPtr RunTrajectory(const rotvo_run* r) {
  rotvo_trajectory* t = nullptr;
  Check(rotvo_run_trajectory(r, &t));
  return TrajPtr(t);
}

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    throw CliError{ROTVO_ERR_IO, path.string() + ": cannot write"};
  }
}

// Pipeline settings shared by `run` and `ablate`. Only flags given on the
// command line override the config file.
struct PipelineFlags {
  std::string config_file;
  // deque keeps the bound strings at fixed addresses.
  std::deque<std::pair<CLI::Option*, std::string>> values;
  std::vector<std::string> keys;
  CLI::Option* no_loops = nullptr;

  void Add(CLI::App* app, bool with_mode) {
    app->add_option("--config", config_file, "key=value config or manifest")
        ->check(CLI::ExistingFile);
    AddValue(app, "--f-window", "f_window", "frames paired with each new one");
    AddValue(app, "--r-window", "r_window", "frames re-optimized per step");
    AddValue(app, "--theta-matches", "theta_matches",
             "minimum inliers to accept a pair");
    if (with_mode) {
      AddValue(app, "--mode", "mode", "incremental | chaining")
          ->check(CLI::IsMember(
              {"incremental", "chaining", "global-each-frame"}));
    }
    AddValue(app, "--seed", "seed", "RANSAC seed");
    AddValue(app, "--loss", "irls.loss", "geman-mcclure | huber");
    no_loops = app->add_flag("--no-loops", "ignore loop candidates");
  }

  CLI::Option* AddValue(CLI::App* app, const std::string& flag,
                        const std::string& key, const std::string& help) {
    values.emplace_back(nullptr, "");
    keys.push_back(key);
    CLI::Option* opt = app->add_option(flag, values.back().second, help);
    values.back().first = opt;
    return opt;
  }

  ConfigPtr Resolve() const {
    ConfigPtr cfg = NewConfig();
    if (!config_file.empty()) {
      Check(rotvo_config_load(cfg.get(), config_file.c_str()));
    }
    for (size_t i = 0; i < values.size(); ++i) {
      if (values[i].first->count() > 0) {
        Check(rotvo_config_set(cfg.get(), keys[i].c_str(),
                               values[i].second.c_str()));
      }
    }
    if (no_loops->count() > 0) {
      Check(rotvo_config_set(cfg.get(), "loops", "false"));
    }
    return cfg;
  }
};

void LogRun(const char* label, const rotvo_run* run) {
  const size_t n = rotvo_run_num_steps(run);
  size_t skipped = 0;
  int loops = 0;
  double total_us = 0;
  for (size_t i = 0; i < n; ++i) {
    rotvo_step s;
    Check(rotvo_run_step(run, i, &s));
    skipped += s.skipped ? 1 : 0;
    loops += s.loops_accepted;
    total_us += s.relrot_us + s.graph_us + s.rotavg_us + s.loop_us;
  }
  std::fprintf(stderr,
               "rotvo: %s: %zu frames, %zu skipped, %d loops accepted, "
               "%.3f s\n",
               label, n, skipped, loops, total_us * 1e-6);
}

// ---- run ----

struct RunArgs {
  std::string dataset;
  std::string out;
  PipelineFlags flags;
};

int CmdRun(const RunArgs& a) {
  ConfigPtr cfg = a.flags.Resolve();
  DatasetPtr data = OpenDataset(a.dataset);
  RunPtr run = Run(data.get(), cfg.get());
  LogRun("run", run.get());
  const std::string out = a.out.empty() ? a.dataset : a.out;
  fs::create_directories(out);
  Check(rotvo_run_write(run.get(), out.c_str(), a.dataset.c_str()));
  std::fprintf(stderr, "rotvo: wrote %s\n",
               (fs::path(out) / "trajectory.txt").string().c_str());
  return 0;
}

// ---- eval ----

struct EvalArgs {
  std::string estimate;
  std::string truth;
  bool delta = false;
};

int CmdEval(const EvalArgs& a) {
  TrajPtr truth = ReadTrajectory(a.truth);
  TrajPtr est = ReadTrajectory(a.estimate);
  if (a.delta) {
    size_t n = 0;
    Check(rotvo_rpe_curve(truth.get(), est.get(), nullptr, 0, &n));
    std::vector<double> curve(n);
    Check(rotvo_rpe_curve(truth.get(), est.get(), curve.data(), n, &n));
    std::printf("delta,rmse_deg\n");
    for (size_t i = 0; i < n; ++i) {
      std::printf("%zu,%s\n", i + 1, Num(curve[i]).c_str());
    }
    return 0;
  }
  rotvo_metrics m;
  Check(rotvo_evaluate(truth.get(), est.get(), &m));
  std::printf("metric,value_deg\n");
  std::printf("rpe1,%s\n", Num(m.rpe1_deg).c_str());
  std::printf("rpen,%s\n", Num(m.rpen_deg).c_str());
  if (m.has_rotation_error) {
    std::printf("r_err,%s\n", Num(m.rotation_error_deg).c_str());
    std::printf("r_err_per_100m,%s\n",
                Num(m.rotation_error_deg_per_100m).c_str());
  } else {
    std::fprintf(stderr,
                 "rotvo: eval: distance-based rotation error skipped "
                 "(no positions or no segment pairs)\n");
  }
  return 0;
}

// ---- synth ----

struct SynthArgs {
  std::string preset;
  std::string out;
  int frames = 0;
  uint64_t seed = 0;
  double noise_deg = 0;
  double outlier_frac = 0;
  int points = 0;
  int f_window = 0;
  double rel_noise_deg = 0.1;
  int outlier_edges = 0;
  bool loop = true;
};

int CmdSynth(const SynthArgs& a) {
  rotvo_synth_spec spec;
  rotvo_synth_spec_init(&spec);
  spec.seed = a.seed;
  spec.bearing_noise_deg = a.noise_deg;
  spec.outlier_frac = a.outlier_frac;
  if (a.points > 0) spec.n_points = a.points;
  if (a.f_window > 0) spec.f_window = a.f_window;
  spec.add_closing_loop = a.loop ? 1 : 0;
  if (a.preset == "drive-loop") {
    spec.motion = ROTVO_MOTION_DRIVE_LOOP;
    spec.n_frames = a.frames > 0 ? a.frames : 500;
  } else if (a.preset == "pure-rotation") {
    spec.motion = ROTVO_MOTION_PURE_ROTATION;
    spec.n_frames = a.frames > 0 ? a.frames : 100;
    spec.add_closing_loop = 0;
  } else if (a.preset == "mixed") {
    spec.motion = ROTVO_MOTION_MIXED;
    spec.n_frames = a.frames > 0 ? a.frames : 200;
    spec.add_closing_loop = 0;
  } else {  // rotgraph
    spec.motion = ROTVO_MOTION_DRIVE_LOOP;
    spec.n_frames = a.frames > 0 ? a.frames : 200;
    spec.rel_rot_noise_deg = a.rel_noise_deg;
    spec.n_outlier_edges = a.outlier_edges;
    Check(rotvo_synth_write_rotgraph(&spec, a.out.c_str()));
    std::fprintf(stderr, "rotvo: wrote view graph with %d nodes to %s\n",
                 spec.n_frames, a.out.c_str());
    return 0;
  }
  Check(rotvo_synth_write_dataset(&spec, a.out.c_str()));
  std::fprintf(stderr, "rotvo: wrote %s dataset with %d frames to %s\n",
               a.preset.c_str(), spec.n_frames, a.out.c_str());
  return 0;
}

// ---- ablate ----

struct AblateArgs {
  std::string dataset;
  std::string truth;
  std::string out;
  bool global_each_frame = false;
  PipelineFlags flags;
};

int CmdAblate(const AblateArgs& a) {
  const std::string truth_path =
      a.truth.empty() ? (fs::path(a.dataset) / "truth.txt").string() : a.truth;
  TrajPtr truth = ReadTrajectory(truth_path);
  DatasetPtr data = OpenDataset(a.dataset);

  std::vector<std::string> modes = {"incremental", "chaining"};
  if (a.global_each_frame) modes.push_back("global-each-frame");

  std::vector<RunPtr> runs;
  std::vector<rotvo_metrics> metrics;
  for (const auto& mode : modes) {
    ConfigPtr cfg = a.flags.Resolve();
    Check(rotvo_config_set(cfg.get(), "mode", mode.c_str()));
    runs.push_back(Run(data.get(), cfg.get()));
    LogRun(mode.c_str(), runs.back().get());
    TrajPtr est = RunTrajectory(runs.back().get());
    rotvo_metrics m;
    Check(rotvo_evaluate(truth.get(), est.get(), &m));
    metrics.push_back(m);
  }

  auto column = [](const std::string& mode) {
    std::string c = mode;
    for (char& ch : c) {
      if (ch == '-') ch = '_';
    }
    return c;
  };

  std::string cmp = "metric";
  for (const auto& mode : modes) cmp += "," + column(mode) + "_deg";
  cmp += "\n";
  auto row = [&](const char* name, auto get) {
    cmp += name;
    for (const auto& m : metrics) cmp += "," + Num(get(m));
    cmp += "\n";
  };
  row("rpe1", [](const rotvo_metrics& m) { return m.rpe1_deg; });
  row("rpen", [](const rotvo_metrics& m) { return m.rpen_deg; });
  if (metrics.front().has_rotation_error) {
    row("r_err", [](const rotvo_metrics& m) { return m.rotation_error_deg; });
    row("r_err_per_100m", [](const rotvo_metrics& m) {
      return m.rotation_error_deg_per_100m;
    });
  }

  std::string timing = "frame_id";
  for (const auto& mode : modes) {
    timing += "," + column(mode) + "_total_us," + column(mode) + "_rotavg_us";
  }
  timing += "\n";
  const size_t n = rotvo_run_num_steps(runs.front().get());
  for (size_t i = 0; i < n; ++i) {
    std::string line;
    for (const auto& run : runs) {
      rotvo_step s;
      Check(rotvo_run_step(run.get(), i, &s));
      if (line.empty()) line = std::to_string(s.frame_id);
      char buf[96];
      std::snprintf(buf, sizeof(buf), ",%.1f,%.1f",
                    s.relrot_us + s.graph_us + s.rotavg_us + s.loop_us,
                    s.rotavg_us);
      line += buf;
    }
    timing += line + "\n";
  }

  std::fputs(cmp.c_str(), stdout);
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    WriteText(fs::path(a.out) / "comparison.csv", cmp);
    WriteText(fs::path(a.out) / "timing_comparison.csv", timing);
    std::fprintf(stderr, "rotvo: wrote comparison.csv and "
                         "timing_comparison.csv to %s\n", a.out.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rotation-only visual odometry"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rotvo_version()));

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "estimate orientations");
  run->add_option("dataset", run_args.dataset, "dataset directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  run->add_option("--out", run_args.out,
                  "output directory (default: the dataset directory)");
  run_args.flags.Add(run, true);

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "score a trajectory");
  eval->add_option("trajectory", eval_args.estimate, "estimated trajectory")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("truth", eval_args.truth, "ground truth")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_flag("--delta", eval_args.delta,
                 "print RMSE for every frame step instead of the summary");

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand("synth", "generate synthetic data");
  synth->add_option("preset", synth_args.preset)
      ->required()
      ->check(CLI::IsMember({"drive-loop", "pure-rotation", "mixed",
                             "rotgraph"}));
  synth->add_option("out", synth_args.out, "output directory")->required();
  synth->add_option("--frames", synth_args.frames, "number of frames");
  synth->add_option("--seed", synth_args.seed);
  synth->add_option("--noise-deg", synth_args.noise_deg,
                    "bearing noise std in degrees");
  synth->add_option("--outlier-frac", synth_args.outlier_frac,
                    "fraction of outlier correspondences");
  synth->add_option("--points", synth_args.points, "points per pair");
  synth->add_option("--f-window", synth_args.f_window, "pairs per frame");
  synth->add_option("--rel-noise-deg", synth_args.rel_noise_deg,
                    "rotgraph: per-axis edge noise std in degrees");
  synth->add_option("--outlier-edges", synth_args.outlier_edges,
                    "rotgraph: number of corrupted edges");
  synth->add_flag("!--no-loop", synth_args.loop,
                  "omit the closing loop pair (0, n-1)");

  AblateArgs ablate_args;
  CLI::App* ablate =
      app.add_subcommand("ablate", "compare incremental and chaining");
  ablate->add_option("dataset", ablate_args.dataset, "dataset directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  ablate->add_option("--gt", ablate_args.truth,
                     "ground truth (default: <dataset>/truth.txt)");
  ablate->add_option("--out", ablate_args.out, "directory for the CSV files");
  ablate->add_flag("--global-each-frame", ablate_args.global_each_frame,
                   "also re-average the whole graph every frame");
  ablate_args.flags.Add(ablate, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*run) return CmdRun(run_args);
    if (*eval) return CmdEval(eval_args);
    if (*synth) return CmdSynth(synth_args);
    if (*ablate) return CmdAblate(ablate_args);
  } catch (const CliError& e) {
    std::fprintf(stderr, "rotvo: error (%s): %s\n",
                 rotvo_status_name(e.status), e.message.c_str());
    return ExitCodeOf(e.status);
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "rotvo: error (io): %s\n", e.what());
    return kExitInput;
  }
  return kExitInput;
}
