#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "speechlen/error.hpp"
#include "speechlen/metrics.hpp"
#include "speechlen/rng.hpp"

using namespace speechlen;

namespace {

ScoredSample sample(ClassLabel label, double score) { return {"", label, score}; }

std::vector<ScoredSample> make_samples(const std::vector<double>& pos,
                                       const std::vector<double>& neg) {
  std::vector<ScoredSample> out;
  for (double s : pos) out.push_back(sample(ClassLabel::DEP_POS, s));
  for (double s : neg) out.push_back(sample(ClassLabel::DEP_NEG, s));
  return out;
}

// The definition, written the slow way: count pairs, half credit for ties.
double pair_counting_auc(const std::vector<ScoredSample>& samples) {
  double numerator = 0.0;
  std::size_t n_pairs = 0;
  for (const auto& p : samples) {
    if (p.label != ClassLabel::DEP_POS) continue;
    for (const auto& n : samples) {
      if (n.label != ClassLabel::DEP_NEG) continue;
      ++n_pairs;
      if (p.score > n.score) numerator += 1.0;
      else if (p.score == n.score) numerator += 0.5;
    }
  }
  return numerator / static_cast<double>(n_pairs);
}

std::vector<ScoredSample> random_tied_samples(Rng& rng) {
  // Scores on a coarse grid force plenty of ties, within and across classes.
  const std::size_t n_pos = 1 + rng.below(15);
  const std::size_t n_neg = 1 + rng.below(15);
  std::vector<ScoredSample> samples;
  for (std::size_t i = 0; i < n_pos; ++i) {
    samples.push_back(sample(ClassLabel::DEP_POS, static_cast<double>(rng.below(8)) / 7.0));
  }
  for (std::size_t i = 0; i < n_neg; ++i) {
    samples.push_back(sample(ClassLabel::DEP_NEG, static_cast<double>(rng.below(8)) / 7.0));
  }
  return samples;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("auc on a worked four-sample example") {
  // Pairs: (.9,.6)+1 (.9,.2)+1 (.4,.6)+0 (.4,.2)+1 of 4 -> 0.75.
  CHECK(auc(make_samples({0.9, 0.4}, {0.6, 0.2})) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("auc degenerate orderings") {
  CHECK(auc(make_samples({0.8, 0.9}, {0.1, 0.2})) == 1.0);
  CHECK(auc(make_samples({0.1, 0.2}, {0.8, 0.9})) == 0.0);
  CHECK(auc(make_samples({0.5, 0.5}, {0.5, 0.5})) == 0.5);  // all ties
}

TEST_CASE("auc throws on single-class input") {
  CHECK_THROWS_AS(auc(make_samples({0.5}, {})), Error);
  CHECK_THROWS_AS(auc(make_samples({}, {0.5})), Error);
  CHECK_THROWS_AS(auc({}), Error);
}

TEST_CASE("rank auc equals pair counting on tie-heavy random sets") {
  for (std::uint64_t k = 0; k < 200; ++k) {
    Rng rng(mix_seed(90000 + k));
    const auto samples = random_tied_samples(rng);
    CHECK(auc(samples) == doctest::Approx(pair_counting_auc(samples)).epsilon(1e-13));
  }
}

TEST_CASE("roc on a worked example with a cross-class tie") {
  // Descending distinct scores: 0.9 (pos), 0.8 (pos+neg tie), 0.3 (neg).
  const auto samples = make_samples({0.9, 0.8}, {0.8, 0.3});
  const RocCurve curve = roc_curve(samples);
  REQUIRE(curve.points.size() == 4);
  CHECK(curve.points[0].fpr == 0.0);
  CHECK(curve.points[0].tpr == 0.0);
  CHECK(std::isinf(curve.points[0].threshold));
  CHECK(curve.points[1].threshold == 0.9);
  CHECK(curve.points[1].fpr == 0.0);
  CHECK(curve.points[1].tpr == doctest::Approx(0.5));
  // The tie at 0.8 moves both rates in one step: no separate corner point.
  CHECK(curve.points[2].threshold == 0.8);
  CHECK(curve.points[2].fpr == doctest::Approx(0.5));
  CHECK(curve.points[2].tpr == doctest::Approx(1.0));
  CHECK(curve.points[3].fpr == 1.0);
  CHECK(curve.points[3].tpr == 1.0);
  // Trapezoid picks up the tie's half credit: auc = 0.875.
  CHECK(trapezoid_area(curve) == doctest::Approx(auc(samples)).epsilon(1e-15));
}

TEST_CASE("roc curves are monotone from (0,0) to (1,1) and integrate to auc") {
  for (std::uint64_t k = 0; k < 200; ++k) {
    Rng rng(mix_seed(91000 + k));
    const auto samples = random_tied_samples(rng);
    const RocCurve curve = roc_curve(samples);
    REQUIRE(curve.points.size() >= 2);
    CHECK(curve.points.front().fpr == 0.0);
    CHECK(curve.points.front().tpr == 0.0);
    CHECK(curve.points.back().fpr == 1.0);
    CHECK(curve.points.back().tpr == 1.0);
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
      CHECK(curve.points[i].fpr >= curve.points[i - 1].fpr);
      CHECK(curve.points[i].tpr >= curve.points[i - 1].tpr);
      CHECK(curve.points[i].threshold < curve.points[i - 1].threshold);
    }
    CHECK(trapezoid_area(curve) == doctest::Approx(auc(samples)).epsilon(1e-12));
  }
}

TEST_CASE("operating point picks the tightest specificity then best sensitivity") {
  // fpr steps: 0, 0.25, 0.5, 1 -> specificities 1, 0.75, 0.5, 0.
  const auto samples = make_samples({0.9, 0.7, 0.6}, {0.8, 0.5, 0.4, 0.3});
  const RocCurve curve = roc_curve(samples);
  const OperatingPoint at70 = operating_point(curve, 0.70);
  CHECK(at70.specificity == doctest::Approx(0.75));
  // Both the 0.7 and 0.6 thresholds sit at fpr 0.25; the sweep keeps the
  // higher-sensitivity one.
  CHECK(at70.sensitivity == doctest::Approx(1.0));
  const OperatingPoint exact = operating_point(curve, 1.0);
  CHECK(exact.specificity == 1.0);
  CHECK(exact.sensitivity == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(operating_point(RocCurve{}, 0.5), Error);
}

TEST_CASE("bootstrap is deterministic per seed and validates inputs") {
  Rng rng(mix_seed(42));
  std::vector<ScoredSample> samples;
  for (int i = 0; i < 40; ++i) samples.push_back(sample(ClassLabel::DEP_POS, rng.uniform(0.3, 1.0)));
  for (int i = 0; i < 40; ++i) samples.push_back(sample(ClassLabel::DEP_NEG, rng.uniform(0.0, 0.7)));

  const BootstrapCi a = bootstrap_ci(samples, 200, 7);
  const BootstrapCi b = bootstrap_ci(samples, 200, 7);
  CHECK(a.lo == b.lo);
  CHECK(a.hi == b.hi);
  CHECK(a.n_resamples == 200);
  CHECK(a.lo <= a.hi);
  CHECK(a.lo >= 0.0);
  CHECK(a.hi <= 1.0);

  // Adjacent base seeds share all but one resample stream (resample i draws
  // from seed + i), so move far enough away for disjoint streams.
  const BootstrapCi c = bootstrap_ci(samples, 200, 9999);
  CHECK((c.lo != a.lo || c.hi != a.hi));

  CHECK_THROWS_AS(bootstrap_ci(samples, 99, 7), Error);   // too few resamples
  CHECK_THROWS_AS(bootstrap_ci(samples, 200, 7, 0.0), Error);
  CHECK_THROWS_AS(bootstrap_ci(make_samples({0.5}, {}), 200, 7), Error);
}

TEST_CASE("bootstrap skips degenerate resamples yet returns the asked-for count") {
  // One positive among many negatives: resamples often miss the positive.
  std::vector<ScoredSample> samples = make_samples({0.9}, {});
  for (int i = 0; i < 15; ++i) samples.push_back(sample(ClassLabel::DEP_NEG, 0.1 + 0.01 * i));
  const BootstrapCi ci = bootstrap_ci(samples, 100, 5);
  CHECK(ci.n_resamples == 100);
  CHECK(ci.n_skipped > 0);  // with 16 items, P(resample misses the positive) ~ .36
}

TEST_CASE("bootstrap intervals cover an analytic auc at roughly nominal rate") {
  // X ~ U[.3,1], Y ~ U[0,.7]: P(Y > X) = P(both in [.3,.7])/2 = (4/7)^2/2,
  // so auc = 1 - 8/49 = 41/49.
  const double analytic = 41.0 / 49.0;
  int covered = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    Rng rng(mix_seed(7000 + trial));
    std::vector<ScoredSample> samples;
    for (int i = 0; i < 40; ++i) {
      samples.push_back(sample(ClassLabel::DEP_POS, rng.uniform(0.3, 1.0)));
    }
    for (int i = 0; i < 40; ++i) {
      samples.push_back(sample(ClassLabel::DEP_NEG, rng.uniform(0.0, 0.7)));
    }
    const BootstrapCi ci = bootstrap_ci(samples, 200, 1000 + trial, 0.95);
    if (ci.lo <= analytic && analytic <= ci.hi) ++covered;
  }
  // Percentile bootstrap under-covers slightly at n = 40; anything far below
  // nominal signals a real defect.
  CHECK(covered >= 88);
}

}  // TEST_SUITE
