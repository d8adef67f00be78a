#include "rotvo/pipeline.hpp"

#include <gtest/gtest.h>

#include "rotvo/error.hpp"
#include "rotvo/metrics.hpp"
#include "rotvo/synth.hpp"
#include "test_util.hpp"

namespace rotvo {
namespace {

SynthDataset SmallNoisy(uint64_t seed = 1) {
  SynthSpec spec;
  spec.n_frames = 60;
  spec.bearing_noise = DegToRad(0.1);
  spec.outlier_frac = 0.1;
  spec.seed = seed;
  return GenerateDataset(spec);
}

TEST(PipelineConfig, Validate) {
  PipelineConfig c;
  c.Validate();
  c.f_window = 11;
  EXPECT_ROTVO_ERROR(c.Validate(), ErrorCode::kInvalidArgument);
  c = PipelineConfig{};
  c.theta_matches = 3;
  EXPECT_ROTVO_ERROR(c.Validate(), ErrorCode::kInvalidArgument);
}

TEST(PipelineMode, NamesRoundTrip) {
  for (auto m : {PipelineMode::kIncremental, PipelineMode::kChaining,
                 PipelineMode::kGlobalEachFrame}) {
    EXPECT_EQ(ParsePipelineMode(PipelineModeName(m)), m);
  }
  EXPECT_ROTVO_ERROR(ParsePipelineMode("fast"), ErrorCode::kInvalidArgument);
}

TEST(RunSequence, EmptyDataset) {
  const RunResult r = RunSequence(Dataset{}, PipelineConfig{});
  EXPECT_TRUE(r.trajectory.empty());
  EXPECT_TRUE(r.steps.empty());
}

TEST(RunSequence, SingleFrameIsIdentity) {
  Dataset d;
  d.num_frames = 1;
  const RunResult r = RunSequence(d, PipelineConfig{});
  ASSERT_EQ(r.trajectory.size(), 1u);
  EXPECT_EQ(r.trajectory[0].id, 0);
  EXPECT_EQ(r.trajectory[0].orientation, Rot3());
}

TEST(RunSequence, NoiseFreeIsExact) {
  SynthSpec spec;
  spec.n_frames = 40;
  const SynthDataset s = GenerateDataset(spec);
  const RunResult r = RunSequence(s.data, PipelineConfig{});
  ASSERT_EQ(r.trajectory.size(), 40u);
  for (size_t i = 0; i < 40; ++i) {
    EXPECT_LT(GeodesicAngle(r.trajectory[i].orientation, s.truth[i].orientation),
              1e-7);
  }
  for (const auto& st : r.steps) {
    EXPECT_FALSE(st.skipped);
    EXPECT_EQ(st.edges_added, std::min<int>(st.id, spec.f_window));
  }
}

TEST(RunSequence, Deterministic) {
  const SynthDataset s = SmallNoisy();
  PipelineConfig cfg;
  cfg.seed = 5;
  const RunResult a = RunSequence(s.data, cfg);
  const RunResult b = RunSequence(s.data, cfg);
  ASSERT_EQ(a.trajectory.size(), b.trajectory.size());
  for (size_t i = 0; i < a.trajectory.size(); ++i) {
    EXPECT_EQ(a.trajectory[i].orientation, b.trajectory[i].orientation);
  }
}

TEST(RunSequence, IncrementalBeatsChaining) {
  const SynthDataset s = SmallNoisy(2);
  PipelineConfig cfg;
  const double inc = Rpe1(s.truth, RunSequence(s.data, cfg).trajectory);
  cfg.mode = PipelineMode::kChaining;
  const RunResult chain = RunSequence(s.data, cfg);
  EXPECT_LT(inc, Rpe1(s.truth, chain.trajectory));
  for (const auto& st : chain.steps) {
    EXPECT_LE(st.edges_added, 1);
    EXPECT_EQ(st.loops_tried, 0);
  }
}

TEST(RunSequence, UnmatchedFrameIsSkipped) {
  SynthSpec spec;
  spec.n_frames = 12;
  SynthDataset s = GenerateDataset(spec);
  // Frame 6 keeps only an undersized pair.
  for (FrameId j = 2; j < 5; ++j) s.data.pairs.erase({j, 6});
  s.data.pairs.at({5, 6}).resize(50);
  const RunResult r = RunSequence(s.data, PipelineConfig{});
  EXPECT_TRUE(r.steps[6].skipped);
  EXPECT_EQ(r.trajectory.size(), 11u);
  for (const auto& e : r.trajectory) EXPECT_NE(e.id, 6);
}

TEST(Pipeline, RejectsOutOfOrderFrames) {
  Pipeline p{PipelineConfig{}};
  p.ProcessFrame({0, {}, {}});
  p.ProcessFrame({2, {}, {}});
  EXPECT_ROTVO_ERROR(p.ProcessFrame({1, {}, {}}), ErrorCode::kInvalidArgument);
  EXPECT_ROTVO_ERROR(p.ProcessFrame({2, {}, {}}), ErrorCode::kInvalidArgument);
}

TEST(Pipeline, LoopClosureReported) {
  SynthSpec spec;
  spec.n_frames = 80;
  spec.bearing_noise = DegToRad(0.1);
  spec.loop_pairs = {{5, 79}};
  const SynthDataset s = GenerateDataset(spec);
  const RunResult r = RunSequence(s.data, PipelineConfig{});
  EXPECT_EQ(r.steps[79].loops_tried, 1);
  EXPECT_EQ(r.steps[79].loops_accepted, 1);
  PipelineConfig off;
  off.loops = false;
  EXPECT_EQ(RunSequence(s.data, off).steps[79].loops_tried, 0);
}

TEST(FormatTimingCsv, HeaderAndRows) {
  std::vector<StepReport> steps(2);
  steps[1].id = 1;
  steps[1].rotavg_us = 12.25;
  const std::string csv = FormatTimingCsv(steps);
  EXPECT_EQ(csv,
            "frame_id,relrot_us,graph_us,rotavg_us,loop_us\n"
            "0,0.0,0.0,0.0,0.0\n"
            "1,0.0,0.0,12.2,0.0\n");
}

}  // namespace
}  // namespace rotvo
