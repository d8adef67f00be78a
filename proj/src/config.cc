#include "rotvo/config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>

#include "rotvo/error.hpp"
#include "text_io.hpp"

namespace rotvo {
namespace {

std::string Trim(const std::string& s) {
  const size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void BadValue(const std::string& key, const std::string& value) {
  Throw(ErrorCode::kInvalidArgument,
        "invalid value '" + value + "' for key '" + key + "'");
}

double ToDouble(const std::string& key, const std::string& v) {
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno == ERANGE) BadValue(key, v);
  return d;
}

long long ToInt(const std::string& key, const std::string& v) {
  char* end = nullptr;
  errno = 0;
  const long long i = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || errno == ERANGE) BadValue(key, v);
  return i;
}

int ToInt32(const std::string& key, const std::string& v) {
  const long long i = ToInt(key, v);
  if (i < -2147483647LL || i > 2147483647LL) BadValue(key, v);
  return static_cast<int>(i);
}

uint64_t ToU64(const std::string& key, const std::string& v) {
  if (v.empty() || v[0] == '-') BadValue(key, v);
  char* end = nullptr;
  errno = 0;
  const unsigned long long u = std::strtoull(v.c_str(), &end, 10);
  if (*end != '\0' || errno == ERANGE) BadValue(key, v);
  return u;
}

bool ToBool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  BadValue(key, v);
}

std::string Num(double d) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", d);
  return buf;
}

const char* LossName(RobustLoss l) {
  return l == RobustLoss::kHuber ? "huber" : "geman-mcclure";
}

struct Field {
  std::function<void(PipelineConfig*, const std::string&, const std::string&)>
      set;
  std::function<std::string(const PipelineConfig&)> get;
};

const std::vector<std::pair<std::string, Field>>& Fields() {
  static const auto* fields = new std::vector<std::pair<std::string, Field>>{
      {"f_window",
       {[](PipelineConfig* c, const std::string& k, const std::string& v) {
          c->f_window = ToInt32(k, v);
        },
        [](const PipelineConfig& c) { return std::to_string(c.f_window); }}},
      {"r_window",
       {[](PipelineConfig* c, const std::string& k, const std::string& v) {
          c->r_window = ToInt32(k, v);
        },
        [](const PipelineConfig& c) { return std::to_string(c.r_window); }}},
      {"theta_matches",
       {[](PipelineConfig* c, const std::string& k, const std::string& v) {
          c->theta_matches = ToInt32(k, v);
        },
        [](const PipelineConfig& c) {
          return std::to_string(c.theta_matches);
        }}},
      {"mode",
       {[](PipelineConfig* c, const std::string&, const std::string& v) {
          c->mode = ParsePipelineMode(v);
        },
        [](const PipelineConfig& c) {
          return std::string(PipelineModeName(c.mode));
        }}},
      {"loops",
       {[](PipelineConfig* c, const std::string& k, const std::string& v) {
          c->loops = ToBool(k, v);
        },
        [](const PipelineConfig& c) {
          return std::string(c.loops ? "true" : "false");
        }}},
      {"seed",
       {[](PipelineConfig* c, const std::string& k, const std::string& v) {
          c->seed = ToU64(k, v);
        },
        [](const PipelineConfig& c) { return std::to_string(c.seed); }}},
      {"relrot.min_sample",
       {[](PipelineConfig* c, const std::string& k, const std::string& v) {
          c->relrot.min_sample = ToInt32(k, v);
        },
        [](const PipelineConfig& c) {
          return std::to_string(c.relrot.min_sample);
        }}},
      {"relrot.inlier_thresh_deg",
       {[](PipelineConfig* c, const std::string& k, const std::string& v) {
          c->relrot.inlier_thresh = DegToRad(ToDouble(k, v));
        },
        [](const PipelineConfig& c) {
          return Num(RadToDeg(c.relrot.inlier_thresh));
        }}},
      {"relrot.max_iters",
       {[](PipelineConfig* c, const std::string& k, const std::string& v) {
          c->relrot.max_iters = ToInt32(k, v);
        },
        [](const PipelineConfig& c) {
          return std::to_string(c.relrot.max_iters);
        }}},
      {"relrot.step_tol",
       {[](PipelineConfig* c, const std::string& k, const std::string& v) {
          c->relrot.step_tol = ToDouble(k, v);
        },
        [](const PipelineConfig& c) { return Num(c.relrot.step_tol); }}},
      {"relrot.obj_tol",
       {[](PipelineConfig* c, const std::string& k, const std::string& v) {
          c->relrot.obj_tol = ToDouble(k, v);
        },
        [](const PipelineConfig& c) { return Num(c.relrot.obj_tol); }}},
      {"relrot.fd_step",
       {[](PipelineConfig* c, const std::string& k, const std::string& v) {
          c->relrot.fd_step = ToDouble(k, v);
        },
        [](const PipelineConfig& c) { return Num(c.relrot.fd_step); }}},
      {"relrot.confidence",
       {[](PipelineConfig* c, const std::string& k, const std::string& v) {
          c->relrot.confidence = ToDouble(k, v);
        },
        [](const PipelineConfig& c) { return Num(c.relrot.confidence); }}},
      {"relrot.ransac_max_iters",
       {[](PipelineConfig* c, const std::string& k, const std::string& v) {
          c->relrot.ransac_max_iters = ToInt32(k, v);
        },
        [](const PipelineConfig& c) {
          return std::to_string(c.relrot.ransac_max_iters);
        }}},
      {"irls.loss",
       {[](PipelineConfig* c, const std::string& k, const std::string& v) {
          if (v == "huber") {
            c->irls.loss = RobustLoss::kHuber;
          } else if (v == "geman-mcclure") {
            c->irls.loss = RobustLoss::kGemanMcClure;
          } else {
            BadValue(k, v);
          }
        },
        [](const PipelineConfig& c) {
          return std::string(LossName(c.irls.loss));
        }}},
      {"irls.loss_scale_deg",
       {[](PipelineConfig* c, const std::string& k, const std::string& v) {
          c->irls.loss_scale = DegToRad(ToDouble(k, v));
        },
        [](const PipelineConfig& c) {
          return Num(RadToDeg(c.irls.loss_scale));
        }}},
      {"irls.l1_iters",
       {[](PipelineConfig* c, const std::string& k, const std::string& v) {
          c->irls.l1_iters = ToInt32(k, v);
        },
        [](const PipelineConfig& c) {
          return std::to_string(c.irls.l1_iters);
        }}},
      {"irls.irls_iters",
       {[](PipelineConfig* c, const std::string& k, const std::string& v) {
          c->irls.irls_iters = ToInt32(k, v);
        },
        [](const PipelineConfig& c) {
          return std::to_string(c.irls.irls_iters);
        }}},
      {"irls.step_tol",
       {[](PipelineConfig* c, const std::string& k, const std::string& v) {
          c->irls.step_tol = ToDouble(k, v);
        },
        [](const PipelineConfig& c) { return Num(c.irls.step_tol); }}},
      {"irls.weight_floor",
       {[](PipelineConfig* c, const std::string& k, const std::string& v) {
          c->irls.weight_floor = ToDouble(k, v);
        },
        [](const PipelineConfig& c) { return Num(c.irls.weight_floor); }}},
  };
  return *fields;
}

bool IsManifestOnly(const std::string& key) {
  return key == "version" || key == "command" || key == "dataset" ||
         key.rfind("output.", 0) == 0;
}

}  // namespace

void SetConfigValue(const std::string& key, const std::string& value,
                    PipelineConfig* cfg) {
  for (const auto& [name, field] : Fields()) {
    if (name == key) {
      field.set(cfg, key, Trim(value));
      return;
    }
  }
  Throw(ErrorCode::kInvalidArgument, "unknown config key '" + key + "'");
}

void ApplyConfigFile(const std::string& path, PipelineConfig* cfg) {
  std::ifstream in(path);
  if (!in) Throw(ErrorCode::kIo, path + ": cannot open for reading");
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = path + ":" + std::to_string(number) + ": ";
    if (eq == std::string::npos) {
      Throw(ErrorCode::kFormat, where + "expected 'key = value'");
    }
    const std::string key = Trim(line.substr(0, eq));
    if (IsManifestOnly(key)) continue;
    try {
      SetConfigValue(key, line.substr(eq + 1), cfg);
    } catch (const Error& e) {
      Throw(ErrorCode::kFormat, where + e.what());
    }
  }
}

std::string FormatConfig(const PipelineConfig& cfg) {
  std::string out;
  for (const auto& [name, field] : Fields()) {
    out += name + " = " + field.get(cfg) + "\n";
  }
  return out;
}

std::string FormatManifest(const RunManifest& m) {
  std::string out = "version = " + m.version + "\n";
  out += "command = " + m.command + "\n";
  out += "dataset = " + m.dataset + "\n";
  for (const auto& [key, file] : m.outputs) {
    out += "output." + key + " = " + file + "\n";
  }
  out += FormatConfig(m.config);
  return out;
}

}  // namespace rotvo
