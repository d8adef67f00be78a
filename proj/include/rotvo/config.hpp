#pragma once

#include <string>
#include <vector>

#include "rotvo/pipeline.hpp"

namespace rotvo {

// Flat "key = value" settings. Angles are given in degrees where the key
// says so, tolerances in radians.
//
//   f_window r_window theta_matches mode loops seed
//   relrot.min_sample relrot.inlier_thresh_deg relrot.max_iters
//   relrot.step_tol relrot.obj_tol relrot.fd_step relrot.confidence
//   relrot.ransac_max_iters
//   irls.loss irls.loss_scale_deg irls.l1_iters irls.irls_iters
//   irls.step_tol irls.weight_floor
//
// Throws kInvalidArgument on an unknown key or a malformed value.
void SetConfigValue(const std::string& key, const std::string& value,
                    PipelineConfig* cfg);

// One "key = value" per line, '#' comments. Manifest-only keys (version,
// command, dataset, output.*) are skipped, so a run manifest can be fed back
// as a config file. Errors carry path:line.
void ApplyConfigFile(const std::string& path, PipelineConfig* cfg);

// All keys in the order listed above, values with 17 significant digits.
std::string FormatConfig(const PipelineConfig& cfg);

struct RunManifest {
  std::string version;
  std::string command;
  std::string dataset;
  std::vector<std::pair<std::string, std::string>> outputs;  // key, file
  PipelineConfig config;
};

std::string FormatManifest(const RunManifest& m);

}  // namespace rotvo
