#include "rotvo/rotvo.h"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <new>
#include <string>

#include "rotvo/config.hpp"
#include "rotvo/dataset.hpp"
#include "rotvo/error.hpp"
#include "rotvo/metrics.hpp"
#include "rotvo/pipeline.hpp"
#include "rotvo/synth.hpp"
#include "rotvo/trajectory.hpp"
#include "text_io.hpp"

struct rotvo_config {
  rotvo::PipelineConfig cfg;
};

struct rotvo_dataset {
  rotvo::Dataset data;
};

struct rotvo_trajectory {
  rotvo::Trajectory traj;
};

struct rotvo_run {
  rotvo::PipelineConfig cfg;
  rotvo::RunResult result;
};

namespace {

thread_local std::string g_last_error;

rotvo_status StatusOf(rotvo::ErrorCode code) {
  using rotvo::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return ROTVO_ERR_INVALID_ARGUMENT;
    case ErrorCode::kInsufficientCorrespondences:
      return ROTVO_ERR_INSUFFICIENT_CORRESPONDENCES;
    case ErrorCode::kNoModel:
      return ROTVO_ERR_NO_MODEL;
    case ErrorCode::kIo:
      return ROTVO_ERR_IO;
    case ErrorCode::kFormat:
      return ROTVO_ERR_FORMAT;
    case ErrorCode::kNumerical:
      return ROTVO_ERR_NUMERICAL;
    case ErrorCode::kUnsupported:
      return ROTVO_ERR_UNSUPPORTED_METRIC;
    case ErrorCode::kEmptyPairSet:
      return ROTVO_ERR_EMPTY_PAIR_SET;
  }
  return ROTVO_ERR_INTERNAL;
}

rotvo_status Fail(rotvo_status s, const std::string& message) {
  g_last_error = message;
  return s;
}

// Runs `fn` and converts exceptions into a status plus thread-local message.
template <typename Fn>
rotvo_status Guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return ROTVO_OK;
  } catch (const rotvo::Error& e) {
    return Fail(StatusOf(e.code()), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return Fail(ROTVO_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return Fail(ROTVO_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(ROTVO_ERR_INTERNAL, e.what());
  }
}

#define ROTVO_REQUIRE(cond, what)                                \
  do {                                                           \
    if (!(cond)) {                                               \
      return Fail(ROTVO_ERR_INVALID_ARGUMENT, what " is NULL");  \
    }                                                            \
  } while (0)

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string TimingSummary(const rotvo::RunResult& r) {
  double relrot = 0, graph = 0, rotavg = 0, loop = 0;
  int skipped = 0, loops_accepted = 0;
  for (const auto& s : r.steps) {
    relrot += s.relrot_us;
    graph += s.graph_us;
    rotavg += s.rotavg_us;
    loop += s.loop_us;
    skipped += s.skipped ? 1 : 0;
    loops_accepted += s.loops_accepted;
  }
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "frames = %zu\nskipped = %d\nloops_accepted = %d\n"
                "relrot_us = %.1f\ngraph_us = %.1f\nrotavg_us = %.1f\n"
                "loop_us = %.1f\ntotal_us = %.1f\n",
                r.steps.size(), skipped, loops_accepted, relrot, graph, rotavg,
                loop, relrot + graph + rotavg + loop);
  return buf;
}

rotvo::SynthSpec ToSpec(const rotvo_synth_spec& c) {
  rotvo::SynthSpec s;
  s.n_frames = c.n_frames;
  switch (c.motion) {
    case ROTVO_MOTION_DRIVE_LOOP:
      s.motion = rotvo::SynthMotion::kDriveLoop;
      break;
    case ROTVO_MOTION_PURE_ROTATION:
      s.motion = rotvo::SynthMotion::kPureRotation;
      break;
    case ROTVO_MOTION_MIXED:
      s.motion = rotvo::SynthMotion::kMixed;
      break;
    default:
      rotvo::Throw(rotvo::ErrorCode::kInvalidArgument, "unknown motion");
  }
  s.step = c.step_m;
  s.yaw_rate = rotvo::DegToRad(c.yaw_rate_deg);
  s.wobble = rotvo::DegToRad(c.wobble_deg);
  s.f_window = c.f_window;
  s.n_points = c.n_points;
  s.half_fov = rotvo::DegToRad(c.half_fov_deg);
  s.bearing_noise = rotvo::DegToRad(c.bearing_noise_deg);
  s.outlier_frac = c.outlier_frac;
  s.rel_rot_noise = rotvo::DegToRad(c.rel_rot_noise_deg);
  s.n_outlier_edges = c.n_outlier_edges;
  if (c.add_closing_loop && c.n_frames > 1) {
    s.loop_pairs.push_back({0, c.n_frames - 1});
  }
  s.seed = c.seed;
  return s;
}

}  // namespace

extern "C" {

const char* rotvo_version(void) { return ROTVO_VERSION; }

const char* rotvo_status_name(rotvo_status status) {
  switch (status) {
    case ROTVO_OK:
      return "ok";
    case ROTVO_ERR_INVALID_ARGUMENT:
      return "invalid-argument";
    case ROTVO_ERR_INSUFFICIENT_CORRESPONDENCES:
      return "insufficient-correspondences";
    case ROTVO_ERR_NO_MODEL:
      return "no-model";
    case ROTVO_ERR_IO:
      return "io";
    case ROTVO_ERR_FORMAT:
      return "format";
    case ROTVO_ERR_NUMERICAL:
      return "numerical";
    case ROTVO_ERR_UNSUPPORTED_METRIC:
      return "unsupported-metric";
    case ROTVO_ERR_EMPTY_PAIR_SET:
      return "empty-pair-set";
    case ROTVO_ERR_INTERNAL:
      return "internal";
  }
  return "unknown";
}

const char* rotvo_last_error(void) { return g_last_error.c_str(); }

void rotvo_string_free(char* s) { std::free(s); }

rotvo_status rotvo_config_create(rotvo_config** out) {
  ROTVO_REQUIRE(out, "out");
  return Guard([&] { *out = new rotvo_config(); });
}

void rotvo_config_destroy(rotvo_config* cfg) { delete cfg; }

rotvo_status rotvo_config_set(rotvo_config* cfg, const char* key,
                              const char* value) {
  ROTVO_REQUIRE(cfg, "cfg");
  ROTVO_REQUIRE(key, "key");
  ROTVO_REQUIRE(value, "value");
  return Guard([&] { rotvo::SetConfigValue(key, value, &cfg->cfg); });
}

rotvo_status rotvo_config_load(rotvo_config* cfg, const char* path) {
  ROTVO_REQUIRE(cfg, "cfg");
  ROTVO_REQUIRE(path, "path");
  return Guard([&] {
    // Apply to a copy so a bad line leaves the handle untouched.
    rotvo::PipelineConfig next = cfg->cfg;
    rotvo::ApplyConfigFile(path, &next);
    cfg->cfg = next;
  });
}

rotvo_status rotvo_config_format(const rotvo_config* cfg, char** out) {
  ROTVO_REQUIRE(cfg, "cfg");
  ROTVO_REQUIRE(out, "out");
  return Guard([&] { *out = CopyString(rotvo::FormatConfig(cfg->cfg)); });
}

rotvo_status rotvo_dataset_open(const char* dir, rotvo_dataset** out) {
  ROTVO_REQUIRE(dir, "dir");
  ROTVO_REQUIRE(out, "out");
  return Guard([&] {
    auto* d = new rotvo_dataset();
    try {
      d->data = rotvo::ReadDataset(dir);
    } catch (...) {
      delete d;
      throw;
    }
    *out = d;
  });
}

void rotvo_dataset_destroy(rotvo_dataset* d) { delete d; }

int64_t rotvo_dataset_num_frames(const rotvo_dataset* d) {
  return d ? d->data.num_frames : 0;
}

size_t rotvo_dataset_num_pairs(const rotvo_dataset* d) {
  return d ? d->data.pairs.size() : 0;
}

size_t rotvo_dataset_num_loops(const rotvo_dataset* d) {
  if (d == nullptr) return 0;
  size_t n = 0;
  for (const auto& [k, cands] : d->data.loops) n += cands.size();
  return n;
}

rotvo_status rotvo_trajectory_read(const char* path, rotvo_trajectory** out) {
  ROTVO_REQUIRE(path, "path");
  ROTVO_REQUIRE(out, "out");
  return Guard([&] {
    auto t = rotvo::ReadTrajectory(path);
    *out = new rotvo_trajectory{std::move(t)};
  });
}

void rotvo_trajectory_destroy(rotvo_trajectory* t) { delete t; }

size_t rotvo_trajectory_size(const rotvo_trajectory* t) {
  return t ? t->traj.size() : 0;
}

rotvo_status rotvo_trajectory_get(const rotvo_trajectory* t, size_t index,
                                  int64_t* id, double q[4]) {
  ROTVO_REQUIRE(t, "trajectory");
  if (index >= t->traj.size()) {
    return Fail(ROTVO_ERR_INVALID_ARGUMENT, "trajectory index out of range");
  }
  const auto& e = t->traj[index];
  if (id) *id = e.id;
  if (q) {
    q[0] = e.orientation.w();
    q[1] = e.orientation.x();
    q[2] = e.orientation.y();
    q[3] = e.orientation.z();
  }
  g_last_error.clear();
  return ROTVO_OK;
}

rotvo_status rotvo_trajectory_write(const rotvo_trajectory* t,
                                    const char* path) {
  ROTVO_REQUIRE(t, "trajectory");
  ROTVO_REQUIRE(path, "path");
  return Guard([&] { rotvo::WriteTrajectory(path, t->traj); });
}

rotvo_status rotvo_run_sequence(const rotvo_dataset* d,
                                const rotvo_config* cfg, rotvo_run** out) {
  ROTVO_REQUIRE(d, "dataset");
  ROTVO_REQUIRE(cfg, "cfg");
  ROTVO_REQUIRE(out, "out");
  return Guard([&] {
    auto result = rotvo::RunSequence(d->data, cfg->cfg);
    *out = new rotvo_run{cfg->cfg, std::move(result)};
  });
}

void rotvo_run_destroy(rotvo_run* run) { delete run; }

size_t rotvo_run_num_steps(const rotvo_run* run) {
  return run ? run->result.steps.size() : 0;
}

rotvo_status rotvo_run_step(const rotvo_run* run, size_t index,
                            rotvo_step* out) {
  ROTVO_REQUIRE(run, "run");
  ROTVO_REQUIRE(out, "out");
  if (index >= run->result.steps.size()) {
    return Fail(ROTVO_ERR_INVALID_ARGUMENT, "step index out of range");
  }
  const auto& s = run->result.steps[index];
  out->frame_id = s.id;
  out->skipped = s.skipped ? 1 : 0;
  out->pairs_tried = s.pairs_tried;
  out->edges_added = s.edges_added;
  out->loops_tried = s.loops_tried;
  out->loops_accepted = s.loops_accepted;
  out->mean_inliers = s.mean_inliers;
  out->relrot_us = s.relrot_us;
  out->graph_us = s.graph_us;
  out->rotavg_us = s.rotavg_us;
  out->loop_us = s.loop_us;
  g_last_error.clear();
  return ROTVO_OK;
}

rotvo_status rotvo_run_trajectory(const rotvo_run* run,
                                  rotvo_trajectory** out) {
  ROTVO_REQUIRE(run, "run");
  ROTVO_REQUIRE(out, "out");
  return Guard([&] { *out = new rotvo_trajectory{run->result.trajectory}; });
}

rotvo_status rotvo_run_write(const rotvo_run* run, const char* out_dir,
                             const char* dataset_label) {
  ROTVO_REQUIRE(run, "run");
  ROTVO_REQUIRE(out_dir, "out_dir");
  ROTVO_REQUIRE(dataset_label, "dataset_label");
  return Guard([&] {
    const std::filesystem::path dir(out_dir);
    if (!std::filesystem::is_directory(dir)) {
      rotvo::Throw(rotvo::ErrorCode::kIo,
                   std::string(out_dir) + ": not a directory");
    }
    rotvo::WriteTrajectory((dir / "trajectory.txt").string(),
                           run->result.trajectory);
    rotvo::WriteFileAtomically((dir / "timing.csv").string(),
                               rotvo::FormatTimingCsv(run->result.steps));
    rotvo::WriteFileAtomically((dir / "timing_summary.txt").string(),
                               TimingSummary(run->result));
    rotvo::RunManifest m;
    m.version = ROTVO_VERSION;
    m.command = "run";
    m.dataset = dataset_label;
    m.outputs = {{"trajectory", "trajectory.txt"},
                 {"timing", "timing.csv"},
                 {"timing_summary", "timing_summary.txt"}};
    m.config = run->cfg;
    rotvo::WriteFileAtomically((dir / "manifest.txt").string(),
                               rotvo::FormatManifest(m));
  });
}

rotvo_status rotvo_evaluate(const rotvo_trajectory* truth,
                            const rotvo_trajectory* estimate,
                            rotvo_metrics* out) {
  ROTVO_REQUIRE(truth, "truth");
  ROTVO_REQUIRE(estimate, "estimate");
  ROTVO_REQUIRE(out, "out");
  return Guard([&] {
    rotvo_metrics m{};
    m.rpe1_deg = rotvo::RadToDeg(rotvo::Rpe1(truth->traj, estimate->traj));
    m.rpen_deg = rotvo::RadToDeg(rotvo::RpeN(truth->traj, estimate->traj));
    try {
      const auto r = rotvo::AverageRotationError(truth->traj, estimate->traj);
      m.has_rotation_error = 1;
      m.rotation_error_deg = rotvo::RadToDeg(r.mean);
      m.rotation_error_deg_per_100m = rotvo::RadToDeg(r.mean_per_meter) * 100;
      m.rotation_error_pairs = r.pairs;
    } catch (const rotvo::Error& e) {
      if (e.code() != rotvo::ErrorCode::kUnsupported &&
          e.code() != rotvo::ErrorCode::kEmptyPairSet) {
        throw;
      }
    }
    *out = m;
  });
}

rotvo_status rotvo_rpe_curve(const rotvo_trajectory* truth,
                             const rotvo_trajectory* estimate, double* values,
                             size_t capacity, size_t* count) {
  ROTVO_REQUIRE(truth, "truth");
  ROTVO_REQUIRE(estimate, "estimate");
  ROTVO_REQUIRE(count, "count");
  if (capacity > 0 && values == nullptr) {
    return Fail(ROTVO_ERR_INVALID_ARGUMENT, "values is NULL");
  }
  return Guard([&] {
    const auto jt = rotvo::Join(truth->traj, estimate->traj);
    const auto curve = rotvo::RpeCurve(jt);
    *count = curve.size();
    for (size_t i = 0; i < curve.size() && i < capacity; ++i) {
      values[i] = rotvo::RadToDeg(curve[i]);
    }
  });
}

void rotvo_synth_spec_init(rotvo_synth_spec* spec) {
  if (spec == nullptr) return;
  const rotvo::SynthSpec d;
  *spec = rotvo_synth_spec{};
  spec->n_frames = d.n_frames;
  spec->motion = ROTVO_MOTION_DRIVE_LOOP;
  spec->step_m = d.step;
  spec->yaw_rate_deg = rotvo::RadToDeg(d.yaw_rate);
  spec->wobble_deg = rotvo::RadToDeg(d.wobble);
  spec->f_window = d.f_window;
  spec->n_points = d.n_points;
  spec->half_fov_deg = rotvo::RadToDeg(d.half_fov);
  spec->seed = d.seed;
}

rotvo_status rotvo_synth_write_dataset(const rotvo_synth_spec* spec,
                                       const char* dir) {
  ROTVO_REQUIRE(spec, "spec");
  ROTVO_REQUIRE(dir, "dir");
  return Guard([&] {
    rotvo::WriteSynthDataset(dir, rotvo::GenerateDataset(ToSpec(*spec)));
  });
}

rotvo_status rotvo_synth_write_rotgraph(const rotvo_synth_spec* spec,
                                        const char* dir) {
  ROTVO_REQUIRE(spec, "spec");
  ROTVO_REQUIRE(dir, "dir");
  return Guard([&] {
    rotvo::WriteSynthGraph(dir, rotvo::GenerateRotGraph(ToSpec(*spec)));
  });
}

}  // extern "C"
