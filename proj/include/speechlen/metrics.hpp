#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "speechlen/corpus.hpp"

namespace speechlen {

struct ScoredSample {
  std::string item_id;
  ClassLabel label = ClassLabel::DEP_NEG;
  double score = 0.0;  // in [0,1], higher = more likely +dep
};

struct RocPoint {
  double threshold = 0.0;  // classify positive when score >= threshold
  double fpr = 0.0;
  double tpr = 0.0;
};

// Threshold sweep over distinct scores, descending. Starts at (0,0) with an
// infinite threshold, ends at (1,1); tied scores collapse to one point.
struct RocCurve {
  std::vector<RocPoint> points;
};

// Mann-Whitney statistic: fraction of (positive, negative) pairs where the
// positive outscores the negative, ties worth 0.5. Exactly equals both
// brute-force pair counting and the trapezoidal area under roc_curve.
// Throws on single-class input.
double auc(const std::vector<ScoredSample>& samples);

double trapezoid_area(const RocCurve& curve);

RocCurve roc_curve(const std::vector<ScoredSample>& samples);

struct OperatingPoint {
  double specificity = 0.0;
  double sensitivity = 0.0;
  double threshold = 0.0;
};

// Smallest specificity still >= target (no interpolation); among points with
// that specificity the highest sensitivity wins. Throws when no curve point
// reaches the target.
OperatingPoint operating_point(const RocCurve& curve, double target_specificity);

struct BootstrapCi {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n_resamples = 0;  // valid resamples used
  std::size_t n_skipped = 0;    // degenerate single-class resamples discarded
};

// Percentile interval over seeded item resamples. Resample i uses a seed
// derived from (seed + i), so intervals are reproducible and resamples could
// run concurrently. Degenerate resamples are skipped and redrawn.
// Requires n_resamples >= 100.
BootstrapCi bootstrap_ci(const std::vector<ScoredSample>& samples, std::size_t n_resamples,
                         std::uint64_t seed, double level = 0.95);

}  // namespace speechlen
