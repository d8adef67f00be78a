#include "rotvo/loopclose.hpp"

#include <gtest/gtest.h>

#include "rotvo/error.hpp"
#include "rotvo/synth.hpp"
#include "test_util.hpp"

namespace rotvo {
namespace {

struct Fixture {
  SynthSpec spec;
  Trajectory truth;
  ViewGraph graph;
};

// Graph over a 60-frame course whose estimates drift by a small rotation
// per frame.
Fixture DriftedGraph() {
  Fixture f;
  f.spec.n_frames = 60;
  f.spec.n_points = 200;
  f.truth = GenerateTrajectory(f.spec);
  Rot3 drift;
  for (const auto& e : f.truth) {
    f.graph.AddNode(e.id, e.id == 0 ? Rot3() : e.orientation * drift);
    drift = drift * Exp(Vec3(0, DegToRad(0.02), 0));
  }
  for (FrameId k = 1; k < f.spec.n_frames; ++k) {
    f.graph.AddEdge(k - 1, k,
                    Relative(f.graph.Orientation(k - 1), f.graph.Orientation(k)),
                    200, false);
  }
  return f;
}

TEST(ValidateLoop, AcceptsGeometricallyConsistentCandidate) {
  Fixture f = DriftedGraph();
  LoopCandidate cand{50, 55, GeneratePair(f.spec, f.truth[50], f.truth[55], 1,
                                          nullptr)};
  cand.j = 40;
  cand.corr = GeneratePair(f.spec, f.truth[40], f.truth[55], 1, nullptr);
  const auto edge = ValidateLoop(f.graph, cand, LoopConfig{});
  ASSERT_TRUE(edge.has_value());
  EXPECT_TRUE(edge->is_loop);
  EXPECT_EQ(edge->j, 40);
  EXPECT_EQ(edge->k, 55);
  EXPECT_LT(GeodesicAngle(edge->rotation,
                          Relative(f.truth[40].orientation,
                                   f.truth[55].orientation)),
            1e-6);
  EXPECT_GT(edge->inlier_count, 100);
}

TEST(ValidateLoop, RejectsTooFewInliers) {
  Fixture f = DriftedGraph();
  SynthSpec sparse = f.spec;
  sparse.n_points = 80;
  LoopCandidate cand{40, 55,
                     GeneratePair(sparse, f.truth[40], f.truth[55], 2, nullptr)};
  EXPECT_FALSE(ValidateLoop(f.graph, cand, LoopConfig{}).has_value());
}

TEST(ValidateLoop, MalformedCandidates) {
  Fixture f = DriftedGraph();
  const CorrSet c = GeneratePair(f.spec, f.truth[10], f.truth[20], 3, nullptr);
  EXPECT_ROTVO_ERROR(ValidateLoop(f.graph, {20, 10, c}, LoopConfig{}),
                     ErrorCode::kInvalidArgument);
  EXPECT_ROTVO_ERROR(ValidateLoop(f.graph, {17, 20, c}, LoopConfig{}),
                     ErrorCode::kInvalidArgument);
  EXPECT_ROTVO_ERROR(ValidateLoop(f.graph, {10, 99, c}, LoopConfig{}),
                     ErrorCode::kInvalidArgument);
}

TEST(CloseLoops, RedistributesDrift) {
  Fixture f = DriftedGraph();
  const Edge loop{0, 59,
                  Relative(f.truth[0].orientation, f.truth[59].orientation),
                  300, true};
  const double before =
      GeodesicAngle(f.graph.Orientation(59), f.truth[59].orientation);
  IrlsReport rep;
  EXPECT_EQ(CloseLoops(f.graph, {&loop, 1}, IrlsConfig{}, &rep), 1);
  const double after =
      GeodesicAngle(f.graph.Orientation(59), f.truth[59].orientation);
  EXPECT_LT(after, 0.2 * before);
  EXPECT_FALSE(rep.sweeps.empty());
}

TEST(CloseLoops, NoChangeLeavesGraphUntouched) {
  Fixture f = DriftedGraph();
  const Edge weak{58, 59, Rot3(), 10, true};  // fewer inliers than existing
  const Rot3 before = f.graph.Orientation(30);
  EXPECT_EQ(CloseLoops(f.graph, {&weak, 1}, IrlsConfig{}), 0);
  EXPECT_EQ(f.graph.Orientation(30), before);
}

}  // namespace
}  // namespace rotvo
