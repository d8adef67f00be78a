#include "rotvo/loopclose.hpp"

#include "rotvo/error.hpp"

namespace rotvo {

std::optional<Edge> ValidateLoop(const ViewGraph& g, const LoopCandidate& cand,
                                 const LoopConfig& cfg) {
  if (cand.j >= cand.k || cand.k - cand.j <= cfg.f_window) {
    Throw(ErrorCode::kInvalidArgument,
          "loop candidate (" + std::to_string(cand.j) + ", " +
              std::to_string(cand.k) +
              ") must satisfy j < k and k - j > |F_window|");
  }
  if (!g.HasNode(cand.j) || !g.HasNode(cand.k)) {
    Throw(ErrorCode::kInvalidArgument,
          "loop candidate (" + std::to_string(cand.j) + ", " +
              std::to_string(cand.k) + ") refers to a frame not in the graph");
  }
  const Rot3 init = RelRotFromEdgeRotation(
      Relative(g.Orientation(cand.j), g.Orientation(cand.k)));
  try {
    const RelRotResult fit = RansacRelRot(cand.corr, init, cfg.relrot);
    if (static_cast<int>(fit.inliers.size()) <= cfg.theta_matches) {
      return std::nullopt;
    }
    return Edge{cand.j, cand.k, EdgeRotationFromRelRot(fit.rotation),
                static_cast<int>(fit.inliers.size()), true};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNoModel ||
        e.code() == ErrorCode::kInsufficientCorrespondences) {
      return std::nullopt;
    }
    throw;
  }
}

int CloseLoops(ViewGraph& g, std::span<const Edge> edges,
               const IrlsConfig& cfg, IrlsReport* report) {
  int changed = 0;
  for (const Edge& e : edges) {
    if (g.AddEdge(e.j, e.k, e.rotation, e.inlier_count, true)) ++changed;
  }
  if (changed == 0) return 0;
  IrlsReport r = SolveGlobal(g, cfg);
  if (report) *report = std::move(r);
  return changed;
}

}  // namespace rotvo
