#include "rotvo/rotavg.hpp"

#include <map>

#include <gtest/gtest.h>

#include "rotvo/error.hpp"
#include "rotvo/synth.hpp"
#include "test_util.hpp"

namespace rotvo {
namespace {

using testing::MatrixAngle;
using testing::RandomRotation;
using testing::RandomUnit;

TEST(RobustWeight, Formulas) {
  const double d = 0.02;
  EXPECT_DOUBLE_EQ(RobustWeight(RobustLoss::kHuber, d, 0.01), 1.0);
  EXPECT_DOUBLE_EQ(RobustWeight(RobustLoss::kHuber, d, 0.08), 0.25);
  const double r = 0.03;
  const double gm = d * d / (d * d + r * r);
  EXPECT_NEAR(RobustWeight(RobustLoss::kGemanMcClure, d, r), gm * gm, 1e-15);
  EXPECT_DOUBLE_EQ(RobustWeight(RobustLoss::kGemanMcClure, d, 0.0), 1.0);
}

TEST(RobustCost, DerivativeOverResidualIsWeight) {
  const double d = DegToRad(1.0);
  for (auto loss : {RobustLoss::kHuber, RobustLoss::kGemanMcClure}) {
    for (double r : {0.3 * d, 0.9 * d, 2.5 * d, 10.0 * d}) {
      const double h = 1e-7 * d;
      const double deriv =
          (RobustCost(loss, d, r + h) - RobustCost(loss, d, r - h)) / (2 * h);
      EXPECT_NEAR(deriv / r, RobustWeight(loss, d, r), 1e-6);
    }
  }
}

TEST(EdgeResidual, NormIsGeodesicDiscrepancy) {
  std::mt19937_64 rng(1);
  const Rot3 rj = RandomRotation(rng), rk = RandomRotation(rng);
  const Rot3 rjk = Relative(rj, rk) * Exp(Vec3(0.01, 0.0, -0.02));
  const Mat3 m = rjk.matrix().transpose() * rj.matrix().transpose() *
                 rk.matrix();
  EXPECT_NEAR(EdgeResidual(rj, rk, rjk).norm(), MatrixAngle(m), 1e-12);
  EXPECT_LT(EdgeResidual(rj, rk, Relative(rj, rk)).norm(), 1e-12);
}

TEST(IrlsConfig, Validate) {
  IrlsConfig c;
  c.loss_scale = 0;
  EXPECT_ROTVO_ERROR(c.Validate(), ErrorCode::kInvalidArgument);
  c = IrlsConfig{};
  c.weight_floor = 1.0;
  EXPECT_ROTVO_ERROR(c.Validate(), ErrorCode::kInvalidArgument);
}

// Exact graph, nodes perturbed: the solve returns the truth.
TEST(SolveGlobal, RecoversExactGraph) {
  SynthSpec spec;
  spec.n_frames = 25;
  spec.seed = 3;
  SynthGraph sg = GenerateRotGraph(spec);
  std::mt19937_64 rng(3);
  for (FrameId id = 1; id < spec.n_frames; ++id) {
    sg.graph.SetOrientation(
        id, sg.truth[id].orientation * Exp(RandomUnit(rng) * DegToRad(3.0)));
  }
  const IrlsReport rep = SolveGlobal(sg.graph);
  EXPECT_TRUE(rep.converged);
  for (FrameId id = 0; id < spec.n_frames; ++id) {
    EXPECT_LT(GeodesicAngle(sg.graph.Orientation(id), sg.truth[id].orientation),
              1e-7);
  }
  EXPECT_EQ(sg.graph.Orientation(0), Rot3());
}

// With one corrupted edge the robust solve matches the solution of the graph
// without that edge (chained along a spanning tree) and downweights it.
TEST(SolveGlobal, MatchesOutlierRemovedSolution) {
  SynthSpec spec;
  spec.n_frames = 30;
  spec.n_outlier_edges = 1;
  spec.seed = 4;
  SynthGraph sg = GenerateRotGraph(spec);
  const auto [oj, ok] = sg.outlier_edges.front();
  std::map<FrameId, Mat3> ref{{0, Mat3::Identity()}};
  for (bool grew = true; grew;) {
    grew = false;
    for (const Edge& e : sg.graph.edges()) {
      if (e.j == oj && e.k == ok) continue;
      if (ref.contains(e.j) && !ref.contains(e.k)) {
        ref[e.k] = ref[e.j] * e.rotation.matrix();
        grew = true;
      }
    }
  }
  std::mt19937_64 rng(4);
  for (FrameId id = 1; id < spec.n_frames; ++id) {
    sg.graph.SetOrientation(
        id, sg.truth[id].orientation * Exp(RandomUnit(rng) * DegToRad(2.0)));
  }
  const IrlsReport rep = SolveGlobal(sg.graph);
  for (FrameId id = 0; id < spec.n_frames; ++id) {
    EXPECT_LT(MatrixAngle(sg.graph.Orientation(id).matrix().transpose() *
                          ref.at(id)),
              1e-4);
  }
  for (size_t e = 0; e < sg.graph.edges().size(); ++e) {
    const Edge& ed = sg.graph.edges()[e];
    if (ed.j == oj && ed.k == ok) EXPECT_LT(rep.WeightOf(e), 0.1);
  }
}

TEST(SolveGlobal, RejectsDisconnectedGraph) {
  ViewGraph g;
  g.AddNode(0, Rot3());
  g.AddNode(1, Rot3());
  g.AddNode(2, Rot3());
  g.AddEdge(0, 1, Rot3(), 200, false);
  EXPECT_ROTVO_ERROR(SolveGlobal(g), ErrorCode::kInvalidArgument);
}

double GmCost(double r, double d) {
  return 0.5 * d * d * r * r / (d * d + r * r);
}

// One free node between two conflicting targets; the optimum lies on the
// geodesic between them and is found by golden-section search.
TEST(SolveIncremental, MatchesOneDimensionalSearch) {
  std::mt19937_64 rng(5);
  const IrlsConfig cfg;
  const Rot3 a = RandomRotation(rng);
  const Vec3 axis = RandomUnit(rng);
  const double theta = DegToRad(0.6);
  const Rot3 b = a * Exp(axis * theta);
  ViewGraph g;
  const Rot3 anchor1 = RandomRotation(rng), anchor2 = RandomRotation(rng);
  g.AddNode(0, Rot3());
  g.AddNode(1, anchor1);
  g.AddNode(2, anchor2);
  g.AddNode(3, a);
  g.AddEdge(0, 3, a, 100, false);
  g.AddEdge(1, 3, Relative(anchor1, a), 100, false);
  g.AddEdge(2, 3, Relative(anchor2, b), 100, false);
  const LocalSubgraph sub = ExtractLocalSubgraph(g, 1);
  ASSERT_EQ(sub.window, std::vector<FrameId>{3});
  SolveIncremental(g, sub, cfg);

  const auto f = [&](double t) {
    return 2 * GmCost(t * theta, cfg.loss_scale) +
           GmCost((1 - t) * theta, cfg.loss_scale);
  };
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = 0, hi = 1;
  for (int i = 0; i < 200; ++i) {
    const double c = hi - phi * (hi - lo), d = lo + phi * (hi - lo);
    if (f(c) < f(d)) {
      hi = d;
    } else {
      lo = c;
    }
  }
  const Rot3 oracle = a * Exp(axis * (0.5 * (lo + hi) * theta));
  EXPECT_LT(GeodesicAngle(g.Orientation(3), oracle), 1e-6);
  EXPECT_GT(GeodesicAngle(g.Orientation(3), a), 1e-5);
  // Anchors are constants.
  EXPECT_EQ(g.Orientation(1), anchor1);
  EXPECT_EQ(g.Orientation(2), anchor2);
}

TEST(SolveIncremental, WindowWithoutPathToFixedNodeFails) {
  ViewGraph g;
  for (int i = 0; i < 4; ++i) g.AddNode(i, Rot3());
  g.AddEdge(0, 1, Rot3(), 200, false);
  g.AddEdge(2, 3, Rot3(), 200, false);
  LocalSubgraph sub;
  sub.window = {2, 3};
  sub.anchors = {1};
  sub.edges = {1};
  EXPECT_ROTVO_ERROR(SolveIncremental(g, sub), ErrorCode::kInvalidArgument);
}

TEST(Irls, SweepsRecordPhases) {
  SynthSpec spec;
  spec.n_frames = 10;
  spec.rel_rot_noise = DegToRad(0.1);
  SynthGraph sg = GenerateRotGraph(spec);
  IrlsConfig cfg;
  cfg.step_tol = 1e-12;
  const IrlsReport rep = SolveGlobal(sg.graph, cfg);
  ASSERT_GE(rep.sweeps.size(), static_cast<size_t>(cfg.l1_iters));
  for (int i = 0; i < cfg.l1_iters; ++i) {
    EXPECT_EQ(rep.sweeps[i].phase, IrlsPhase::kL1);
  }
  for (const auto& s : rep.sweeps) {
    EXPECT_LE(s.surrogate_after, s.surrogate_before + 1e-15);
  }
  EXPECT_EQ(rep.edges.size(), sg.graph.num_edges());
  EXPECT_EQ(rep.final_weights.size(), rep.edges.size());
}

}  // namespace
}  // namespace rotvo
