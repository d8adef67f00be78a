#include "rotvo/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "rotvo/error.hpp"

namespace rotvo {
namespace {

using Clock = std::chrono::steady_clock;

double MicrosSince(Clock::time_point t0) {
  return std::chrono::duration<double, std::micro>(Clock::now() - t0).count();
}

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool IsRejection(const Error& e) {
  return e.code() == ErrorCode::kNoModel ||
         e.code() == ErrorCode::kInsufficientCorrespondences;
}

}  // namespace

const char* PipelineModeName(PipelineMode mode) {
  switch (mode) {
    case PipelineMode::kIncremental:
      return "incremental";
    case PipelineMode::kChaining:
      return "chaining";
    case PipelineMode::kGlobalEachFrame:
      return "global-each-frame";
  }
  return "unknown";
}

PipelineMode ParsePipelineMode(const std::string& name) {
  if (name == "incremental") return PipelineMode::kIncremental;
  if (name == "chaining") return PipelineMode::kChaining;
  if (name == "global-each-frame") return PipelineMode::kGlobalEachFrame;
  Throw(ErrorCode::kInvalidArgument, "unknown pipeline mode '" + name + "'");
}

void PipelineConfig::Validate() const {
  if (f_window < 1) Throw(ErrorCode::kInvalidArgument, "f_window must be >= 1");
  if (r_window < f_window) {
    Throw(ErrorCode::kInvalidArgument, "r_window must be >= f_window");
  }
  if (relrot.min_sample < 5) {
    Throw(ErrorCode::kInvalidArgument, "relrot min_sample must be >= 5");
  }
  if (theta_matches < relrot.min_sample) {
    Throw(ErrorCode::kInvalidArgument,
          "theta_matches must be >= the minimal sample size");
  }
  if (!(relrot.inlier_thresh > 0.0) || !(relrot.confidence > 0.0) ||
      !(relrot.confidence < 1.0) || relrot.ransac_max_iters < 1 ||
      relrot.max_iters < 1) {
    Throw(ErrorCode::kInvalidArgument, "invalid relative rotation settings");
  }
  irls.Validate();
}

Pipeline::Pipeline(const PipelineConfig& cfg) : cfg_(cfg) { cfg_.Validate(); }

uint64_t Pipeline::PairSeed(FrameId j, FrameId k) const {
  uint64_t h = SplitMix64(cfg_.seed);
  h = SplitMix64(h ^ static_cast<uint64_t>(j));
  return SplitMix64(h ^ static_cast<uint64_t>(k));
}

Rot3 Pipeline::WarmStart(FrameId j, FrameId /*k*/) const {
  const FrameId last = accepted_.back();
  const auto it = std::lower_bound(accepted_.begin(), accepted_.end(), j);
  if (it != accepted_.begin()) {
    const FrameId prev_j = *(it - 1);
    if (const Edge* e = graph_.FindEdge(prev_j, last)) {
      return RelRotFromEdgeRotation(e->rotation);
    }
  }
  if (accepted_.size() >= 2) {
    const FrameId before = accepted_[accepted_.size() - 2];
    const Rot3& r_last = graph_.Orientation(last);
    const Rot3 guess = r_last * Relative(graph_.Orientation(before), r_last);
    return RelRotFromEdgeRotation(Relative(graph_.Orientation(j), guess));
  }
  return Rot3::Identity();
}

StepReport Pipeline::ProcessFrame(const FrameRecord& rec) {
  if (rec.id <= last_input_) {
    Throw(ErrorCode::kInvalidArgument,
          "frame " + std::to_string(rec.id) + " arrived after frame " +
              std::to_string(last_input_));
  }
  last_input_ = rec.id;
  StepReport rep;
  rep.id = rec.id;

  if (graph_.empty()) {
    const auto t0 = Clock::now();
    graph_.AddNode(rec.id, Rot3::Identity());
    accepted_.push_back(rec.id);
    rep.graph_us = MicrosSince(t0);
    rep.connected = true;
    return rep;
  }

  // Matching window: the last f_window accepted frames, oldest first.
  const size_t n_win =
      std::min(accepted_.size(), static_cast<size_t>(cfg_.f_window));
  std::vector<FrameId> window(accepted_.end() - n_win, accepted_.end());
  if (cfg_.mode == PipelineMode::kChaining) {
    std::reverse(window.begin(), window.end());
  }

  auto t0 = Clock::now();
  std::vector<Edge> found;
  for (FrameId j : window) {
    const auto pair = std::find_if(rec.pairs.begin(), rec.pairs.end(),
                                   [j](const PairView& p) { return p.j == j; });
    if (pair == rec.pairs.end()) continue;
    ++rep.pairs_tried;
    RelRotConfig rc = cfg_.relrot;
    rc.seed = PairSeed(j, rec.id);
    try {
      const RelRotResult fit = RansacRelRot(pair->corr, WarmStart(j, rec.id), rc);
      const int n = static_cast<int>(fit.inliers.size());
      if (n > cfg_.theta_matches) {
        found.push_back(
            Edge{j, rec.id, EdgeRotationFromRelRot(fit.rotation), n, false});
      }
    } catch (const Error& e) {
      if (!IsRejection(e)) throw;
    }
    if (cfg_.mode == PipelineMode::kChaining && !found.empty()) break;
  }
  rep.relrot_us = MicrosSince(t0);

  if (found.empty()) {
    rep.skipped = true;
    return rep;
  }

  t0 = Clock::now();
  const Edge* newest = &found.front();
  for (const Edge& e : found) {
    if (e.j > newest->j) newest = &e;
  }
  graph_.AddNode(rec.id, graph_.Orientation(newest->j) * newest->rotation);
  rep.min_inliers = found.front().inlier_count;
  double sum = 0.0;
  for (const Edge& e : found) {
    if (graph_.AddEdge(e.j, e.k, e.rotation, e.inlier_count, false)) {
      ++rep.edges_added;
    }
    rep.min_inliers = std::min(rep.min_inliers, e.inlier_count);
    rep.max_inliers = std::max(rep.max_inliers, e.inlier_count);
    sum += e.inlier_count;
  }
  rep.mean_inliers = sum / static_cast<double>(found.size());
  accepted_.push_back(rec.id);
  LocalSubgraph sub;
  if (cfg_.mode == PipelineMode::kIncremental) {
    sub = ExtractLocalSubgraph(graph_, cfg_.r_window);
  }
  rep.graph_us = MicrosSince(t0);

  t0 = Clock::now();
  switch (cfg_.mode) {
    case PipelineMode::kIncremental:
      SolveIncremental(graph_, sub, cfg_.irls);
      break;
    case PipelineMode::kGlobalEachFrame:
      SolveGlobal(graph_, cfg_.irls);
      break;
    case PipelineMode::kChaining:
      break;
  }
  rep.rotavg_us = MicrosSince(t0);
  rep.connected = true;

  if (!cfg_.loops || cfg_.mode == PipelineMode::kChaining) return rep;
  t0 = Clock::now();
  LoopConfig lc{cfg_.theta_matches, cfg_.f_window, cfg_.relrot};
  std::vector<Edge> loops;
  for (const LoopCandidate& cand : rec.loops) {
    if (cand.k != rec.id) {
      Throw(ErrorCode::kInvalidArgument,
            "loop candidate for frame " + std::to_string(cand.k) +
                " delivered with frame " + std::to_string(rec.id));
    }
    ++rep.loops_tried;
    // A candidate whose old frame was skipped has nothing to attach to.
    if (!graph_.HasNode(cand.j)) continue;
    lc.relrot.seed = PairSeed(cand.j, cand.k);
    if (auto e = ValidateLoop(graph_, cand, lc)) loops.push_back(*e);
  }
  rep.loops_accepted = CloseLoops(graph_, loops, cfg_.irls);
  rep.loop_us = MicrosSince(t0);
  return rep;
}

Trajectory Pipeline::CurrentTrajectory() const {
  Trajectory t;
  t.reserve(graph_.num_nodes());
  for (FrameId id : graph_.node_ids()) {
    t.push_back({id, graph_.Orientation(id), std::nullopt});
  }
  return t;
}

RunResult RunSequence(const Dataset& d, const PipelineConfig& cfg) {
  std::vector<std::vector<PairView>> by_frame(d.num_frames);
  for (const auto& [key, corr] : d.pairs) {
    if (key.second >= d.num_frames) {
      Throw(ErrorCode::kInvalidArgument, "pair refers to frame " +
                                             std::to_string(key.second) +
                                             " beyond the sequence");
    }
    by_frame[key.second].push_back({key.first, corr});
  }
  Pipeline p(cfg);
  RunResult out;
  out.steps.reserve(d.num_frames);
  for (FrameId id = 0; id < d.num_frames; ++id) {
    FrameRecord rec{id, std::move(by_frame[id]), {}};
    if (const auto it = d.loops.find(id); it != d.loops.end()) {
      rec.loops = it->second;
    }
    out.steps.push_back(p.ProcessFrame(rec));
  }
  out.trajectory = p.CurrentTrajectory();
  return out;
}

std::string FormatTimingCsv(std::span<const StepReport> steps) {
  std::string out = "frame_id,relrot_us,graph_us,rotavg_us,loop_us\n";
  char buf[160];
  for (const auto& s : steps) {
    std::snprintf(buf, sizeof(buf), "%lld,%.1f,%.1f,%.1f,%.1f\n",
                  static_cast<long long>(s.id), s.relrot_us, s.graph_us,
                  s.rotavg_us, s.loop_us);
    out += buf;
  }
  return out;
}

}  // namespace rotvo
