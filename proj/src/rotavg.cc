#include "rotvo/rotavg.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "rotvo/error.hpp"

namespace rotvo {

void IrlsConfig::Validate() const {
  if (!(loss_scale > 0.0) || l1_iters < 1 || irls_iters < 1 ||
      !(weight_floor >= 0.0 && weight_floor < 1.0) || !(step_tol >= 0.0)) {
    Throw(ErrorCode::kInvalidArgument,
          "IRLS config requires delta > 0, iterations >= 1 and "
          "0 <= weight_floor < 1");
  }
}

Vec3 EdgeResidual(const Rot3& r_j, const Rot3& r_k, const Rot3& r_jk) {
  return Log(r_jk.inverse() * (r_j.inverse() * r_k));
}

double RobustWeight(RobustLoss loss, double delta, double r) {
  switch (loss) {
    case RobustLoss::kHuber:
      return r <= delta ? 1.0 : delta / r;
    case RobustLoss::kGemanMcClure: {
      const double s = delta * delta / (delta * delta + r * r);
      return s * s;
    }
  }
  return 1.0;
}

double RobustCost(RobustLoss loss, double delta, double r) {
  switch (loss) {
    case RobustLoss::kHuber:
      return r <= delta ? 0.5 * r * r : delta * r - 0.5 * delta * delta;
    case RobustLoss::kGemanMcClure:
      return 0.5 * delta * delta * r * r / (delta * delta + r * r);
  }
  return 0.0;
}

double IrlsReport::WeightOf(size_t edge_index) const {
  for (size_t i = 0; i < edges.size(); ++i) {
    if (edges[i] == edge_index) return final_weights[i];
  }
  Throw(ErrorCode::kInvalidArgument,
        "edge " + std::to_string(edge_index) + " was not part of the solve");
}

namespace {

// Tangent-space IRLS over a set of free nodes. The linearization uses the
// world-frame discrepancy r = log(R_k R_jkᵀ R_jᵀ) with left retraction
// R <- exp(dw) R, for which the edge rows are exactly +I at k and -I at j.
class IrlsSolver {
 public:
  IrlsSolver(ViewGraph& g, std::vector<FrameId> free_ids,
             std::vector<size_t> edges, const IrlsConfig& cfg)
      : g_(g), cfg_(cfg), free_ids_(std::move(free_ids)) {
    cfg_.Validate();
    column_.reserve(free_ids_.size());
    estimate_.reserve(free_ids_.size());
    for (size_t i = 0; i < free_ids_.size(); ++i) {
      column_.emplace(free_ids_[i], static_cast<int>(i));
      estimate_.push_back(g_.Orientation(free_ids_[i]));
    }
    for (size_t e : edges) {
      const Edge& edge = g_.edges()[e];
      const int cj = Column(edge.j);
      const int ck = Column(edge.k);
      if (cj < 0 && ck < 0) continue;
      rows_.push_back(Row{e, cj, ck});
    }
    residual_.resize(rows_.size());
    norm_.resize(rows_.size());
    weight_.resize(rows_.size());
  }

  void CheckReachable() const {
    const size_t n = free_ids_.size();
    std::vector<std::vector<int>> adj(n);
    std::vector<char> reached(n, 0);
    std::vector<int> todo;
    for (const Row& row : rows_) {
      if (row.cj >= 0 && row.ck >= 0) {
        adj[row.cj].push_back(row.ck);
        adj[row.ck].push_back(row.cj);
      } else {
        const int c = row.cj >= 0 ? row.cj : row.ck;
        if (!reached[c]) {
          reached[c] = 1;
          todo.push_back(c);
        }
      }
    }
    while (!todo.empty()) {
      const int v = todo.back();
      todo.pop_back();
      for (int w : adj[v]) {
        if (!reached[w]) {
          reached[w] = 1;
          todo.push_back(w);
        }
      }
    }
    for (size_t i = 0; i < n; ++i) {
      if (!reached[i]) {
        Throw(ErrorCode::kInvalidArgument,
              "node " + std::to_string(free_ids_[i]) +
                  " is not connected to any fixed orientation");
      }
    }
  }

  IrlsReport Run() {
    IrlsReport report;
    int sweep_index = 0;
    bool done = false;
    for (IrlsPhase phase : {IrlsPhase::kL1, IrlsPhase::kRobust}) {
      const int iters =
          phase == IrlsPhase::kL1 ? cfg_.l1_iters : cfg_.irls_iters;
      for (int it = 0; it < iters; ++it) {
        const IrlsSweep sweep = Sweep(phase, sweep_index++);
        report.sweeps.push_back(sweep);
        if (sweep.max_step < cfg_.step_tol) {
          done = phase == IrlsPhase::kRobust;
          break;
        }
      }
    }
    report.converged = done;
    for (size_t i = 0; i < free_ids_.size(); ++i) {
      g_.SetOrientation(free_ids_[i], estimate_[i]);
    }
    ComputeResiduals();
    report.edges.reserve(rows_.size());
    report.final_weights.reserve(rows_.size());
    for (size_t i = 0; i < rows_.size(); ++i) {
      report.edges.push_back(rows_[i].edge);
      report.final_weights.push_back(
          RobustWeight(cfg_.loss, cfg_.loss_scale, norm_[i]));
    }
    return report;
  }

 private:
  struct Row {
    size_t edge;
    int cj;
    int ck;
  };

  int Column(FrameId id) const {
    const auto it = column_.find(id);
    return it == column_.end() ? -1 : it->second;
  }

  const Rot3& Current(FrameId id, int col) const {
    return col >= 0 ? estimate_[col] : g_.Orientation(id);
  }

  void ComputeResiduals() {
    for (size_t i = 0; i < rows_.size(); ++i) {
      const Edge& e = g_.edges()[rows_[i].edge];
      const Rot3& rj = Current(e.j, rows_[i].cj);
      const Rot3& rk = Current(e.k, rows_[i].ck);
      residual_[i] = Log(rk * e.rotation.inverse() * rj.inverse());
      norm_[i] = residual_[i].norm();
    }
  }

  IrlsSweep Sweep(IrlsPhase phase, int sweep_index) {
    ComputeResiduals();
    IrlsSweep stats;
    stats.phase = phase;
    const double delta = cfg_.loss_scale;
    const double eps = std::max(cfg_.weight_floor * delta, 1e-12);
    for (size_t i = 0; i < rows_.size(); ++i) {
      const double r = norm_[i];
      if (phase == IrlsPhase::kL1) {
        weight_[i] = eps / std::max(r, eps);
        stats.robust_cost += r > eps ? r : 0.5 * (r * r / eps + eps);
      } else {
        weight_[i] = RobustWeight(cfg_.loss, delta, r);
        stats.robust_cost += RobustCost(cfg_.loss, delta, r);
      }
      stats.surrogate_before += weight_[i] * norm_[i] * norm_[i];
    }

    const int n = static_cast<int>(3 * free_ids_.size());
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(rows_.size() * 12);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (size_t i = 0; i < rows_.size(); ++i) {
      const double w = weight_[i];
      const int cj = rows_[i].cj;
      const int ck = rows_[i].ck;
      for (int a = 0; a < 3; ++a) {
        if (ck >= 0) {
          triplets.emplace_back(3 * ck + a, 3 * ck + a, w);
          rhs(3 * ck + a) -= w * residual_[i](a);
        }
        if (cj >= 0) {
          triplets.emplace_back(3 * cj + a, 3 * cj + a, w);
          rhs(3 * cj + a) += w * residual_[i](a);
        }
        if (cj >= 0 && ck >= 0) {
          triplets.emplace_back(3 * cj + a, 3 * ck + a, -w);
          triplets.emplace_back(3 * ck + a, 3 * cj + a, -w);
        }
      }
    }
    Eigen::SparseMatrix<double> normal(n, n);
    normal.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(normal);
    if (ldlt.info() != Eigen::Success) {
      Throw(ErrorCode::kNumerical,
            "normal-equation factorization failed at IRLS sweep " +
                std::to_string(sweep_index));
    }
    const Eigen::VectorXd step = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success || !step.allFinite()) {
      Throw(ErrorCode::kNumerical,
            "normal-equation solve failed at IRLS sweep " +
                std::to_string(sweep_index));
    }

    for (size_t i = 0; i < rows_.size(); ++i) {
      Vec3 lin = residual_[i];
      if (rows_[i].ck >= 0) lin += step.segment<3>(3 * rows_[i].ck);
      if (rows_[i].cj >= 0) lin -= step.segment<3>(3 * rows_[i].cj);
      stats.surrogate_after += weight_[i] * lin.squaredNorm();
    }
    for (size_t c = 0; c < free_ids_.size(); ++c) {
      const Vec3 d = step.segment<3>(3 * c);
      stats.max_step = std::max(stats.max_step, d.norm());
      estimate_[c] = Exp(d) * estimate_[c];
    }
    return stats;
  }

  ViewGraph& g_;
  IrlsConfig cfg_;
  std::vector<FrameId> free_ids_;
  std::unordered_map<FrameId, int> column_;
  std::vector<Rot3> estimate_;
  std::vector<Row> rows_;
  std::vector<Vec3> residual_;
  std::vector<double> norm_;
  std::vector<double> weight_;
};

}  // namespace

IrlsReport SolveGlobal(ViewGraph& g, const IrlsConfig& cfg) {
  cfg.Validate();
  if (g.num_nodes() < 2) return IrlsReport{{}, {}, {}, true};
  if (!g.IsConnected()) {
    Throw(ErrorCode::kInvalidArgument,
          "global rotation averaging needs a connected view-graph");
  }
  const auto& ids = g.node_ids();
  std::vector<FrameId> free_ids(ids.begin() + 1, ids.end());
  std::vector<size_t> edges(g.num_edges());
  for (size_t i = 0; i < edges.size(); ++i) edges[i] = i;
  IrlsSolver solver(g, std::move(free_ids), std::move(edges), cfg);
  return solver.Run();
}

IrlsReport SolveIncremental(ViewGraph& g, const LocalSubgraph& sub,
                            const IrlsConfig& cfg) {
  cfg.Validate();
  if (sub.window.empty()) {
    Throw(ErrorCode::kInvalidArgument, "incremental solve with empty window");
  }
  std::vector<FrameId> free_ids;
  free_ids.reserve(sub.window.size());
  for (FrameId id : sub.window) {
    if (sub.pinned && *sub.pinned == id) continue;
    if (id == g.gauge_id()) continue;
    free_ids.push_back(id);
  }
  if (free_ids.empty()) return IrlsReport{{}, {}, {}, true};
  IrlsSolver solver(g, std::move(free_ids), sub.edges, cfg);
  solver.CheckReachable();
  return solver.Run();
}

}  // namespace rotvo
