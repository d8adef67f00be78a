// Sweeps the RANSAC inlier threshold on synthetic 200-point pairs with 30%
// outliers and 0.1 deg bearing noise and prints, per threshold, the median
// rotation error and the mean inlier precision and recall over the seeds.
// The defaults in RelRotConfig and the RANSAC acceptance thresholds were
// chosen from this table.
//
//   calibrate_ransac [n_seeds] [threshold_deg ...]

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "rotvo/relrot.hpp"
#include "rotvo/synth.hpp"

namespace {

struct Row {
  double median_err_deg;
  double max_err_deg;
  double precision;
  double recall;
};

// Pairs (i, i + gap) along a 500-frame drive loop, covering straights and
// turns, with gap 1..4 as in the sliding window.
Row Evaluate(double thresh_deg, int n_seeds) {
  rotvo::SynthSpec spec;
  spec.n_frames = 500;
  spec.n_points = 200;
  spec.bearing_noise = rotvo::DegToRad(0.1);
  spec.outlier_frac = 0.3;
  const rotvo::Trajectory truth = rotvo::GenerateTrajectory(spec);

  std::vector<double> errs;
  double precision = 0, recall = 0;
  for (int s = 0; s < n_seeds; ++s) {
    const int gap = 1 + s % 4;
    const int i = (s * 37) % (spec.n_frames - gap);
    std::vector<bool> mask;
    const rotvo::CorrSet c =
        rotvo::GeneratePair(spec, truth[i], truth[i + gap], 1000 + s, &mask);
    rotvo::RelRotConfig cfg;
    cfg.inlier_thresh = rotvo::DegToRad(thresh_deg);
    cfg.seed = s;
    const auto r = rotvo::RansacRelRot(c, rotvo::Rot3::Identity(), cfg);
    const rotvo::Rot3 rel = rotvo::RelRotFromEdgeRotation(rotvo::Relative(
        truth[i].orientation, truth[i + gap].orientation));
    errs.push_back(rotvo::RadToDeg(rotvo::GeodesicAngle(r.rotation, rel)));
    int tp = 0;
    for (int idx : r.inliers) tp += mask[idx] ? 1 : 0;
    const int n_true = static_cast<int>(std::count(mask.begin(), mask.end(),
                                                   true));
    precision += r.inliers.empty() ? 0.0 : double(tp) / r.inliers.size();
    recall += n_true == 0 ? 1.0 : double(tp) / n_true;
  }
  std::vector<double> sorted = errs;
  std::sort(sorted.begin(), sorted.end());
  return {sorted[sorted.size() / 2], sorted.back(), precision / n_seeds,
          recall / n_seeds};
}

}  // namespace

int main(int argc, char** argv) {
  const int n_seeds = argc > 1 ? std::atoi(argv[1]) : 100;
  std::vector<double> thresholds;
  for (int a = 2; a < argc; ++a) thresholds.push_back(std::atof(argv[a]));
  if (thresholds.empty()) thresholds = {0.2, 0.3, 0.5, 0.75, 1.0, 1.5};
  std::printf("thresh_deg,median_err_deg,max_err_deg,precision,recall\n");
  for (double t : thresholds) {
    const Row r = Evaluate(t, n_seeds);
    std::printf("%.3g,%.4f,%.4f,%.4f,%.4f\n", t, r.median_err_deg,
                r.max_err_deg, r.precision, r.recall);
  }
  return 0;
}
