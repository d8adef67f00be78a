#pragma once

#include <vector>

#include "rotvo/so3.hpp"
#include "rotvo/viewgraph.hpp"

namespace rotvo {

enum class RobustLoss {
  kHuber,        // w = 1 for r <= delta, delta / r beyond
  kGemanMcClure  // w = (delta^2 / (delta^2 + r^2))^2
};

struct IrlsConfig {
  RobustLoss loss = RobustLoss::kGemanMcClure;
  double loss_scale = 0.017453292519943295;  // delta, radians
  int l1_iters = 5;
  int irls_iters = 20;
  double step_tol = 1e-6;  // radians
  double weight_floor = 1e-3;

  // Throws kInvalidArgument unless delta > 0, iterations >= 1 and
  // 0 <= weight_floor < 1.
  void Validate() const;
};

// Tangent discrepancy log(R_jkᵀ R_jᵀ R_k) of an edge; its norm is the
// geodesic residual of the edge.
Vec3 EdgeResidual(const Rot3& r_j, const Rot3& r_k, const Rot3& r_jk);

// Robust weight in (0, 1] of a residual norm under the given loss.
double RobustWeight(RobustLoss loss, double delta, double residual);
double RobustCost(RobustLoss loss, double delta, double residual);

enum class IrlsPhase { kL1, kRobust };

struct IrlsSweep {
  IrlsPhase phase = IrlsPhase::kL1;
  // Weighted least-squares cost of the linearized system before (delta = 0)
  // and after the solve.
  double surrogate_before = 0.0;
  double surrogate_after = 0.0;
  // Robust cost of the phase evaluated at the orientations entering the
  // sweep.
  double robust_cost = 0.0;
  double max_step = 0.0;
};

struct IrlsReport {
  std::vector<IrlsSweep> sweeps;
  // Edges that entered the system (indices into ViewGraph::edges()) and their
  // robust-phase weights at the returned orientations.
  std::vector<size_t> edges;
  std::vector<double> final_weights;
  bool converged = false;

  double WeightOf(size_t edge_index) const;
};

// L1-IRLS over the whole graph, warm-started from the current orientations.
// The gauge node stays fixed; every other node is updated. Throws
// kInvalidArgument on a disconnected graph and kNumerical when the
// factorization fails.
IrlsReport SolveGlobal(ViewGraph& g, const IrlsConfig& cfg = {});

// The same machinery restricted to the window of `sub`: only window nodes
// move, anchors (or the pinned node during cold start) enter residuals as
// constants and are never written. Throws kInvalidArgument when a window
// node has no path to a fixed node through sub.edges.
IrlsReport SolveIncremental(ViewGraph& g, const LocalSubgraph& sub,
                            const IrlsConfig& cfg = {});

}  // namespace rotvo
