#include "speechlen/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "speechlen/error.hpp"
#include "speechlen/rng.hpp"

namespace speechlen {

namespace {

struct ClassCounts {
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
};

ClassCounts count_classes(const std::vector<ScoredSample>& samples) {
  ClassCounts c;
  for (const auto& s : samples) {
    if (s.label == ClassLabel::DEP_POS) ++c.n_pos;
    else ++c.n_neg;
  }
  return c;
}

// Score-sorted tie-group sweep. Numerator accumulates integer halves, so the
// result is exact and matches brute-force pair counting bit for bit.
double auc_or_nan(const std::vector<ScoredSample>& samples) {
  const ClassCounts c = count_classes(samples);
  if (c.n_pos == 0 || c.n_neg == 0) return std::numeric_limits<double>::quiet_NaN();

  std::vector<std::pair<double, bool>> scored;  // (score, is_pos)
  scored.reserve(samples.size());
  for (const auto& s : samples) scored.emplace_back(s.score, s.label == ClassLabel::DEP_POS);
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  double numerator = 0.0;
  double neg_below = 0.0;
  std::size_t i = 0;
  while (i < scored.size()) {
    std::size_t j = i;
    double pos_here = 0.0;
    double neg_here = 0.0;
    while (j < scored.size() && scored[j].first == scored[i].first) {
      if (scored[j].second) pos_here += 1.0;
      else neg_here += 1.0;
      ++j;
    }
    numerator += pos_here * (neg_below + 0.5 * neg_here);
    neg_below += neg_here;
    i = j;
  }
  return numerator / (static_cast<double>(c.n_pos) * static_cast<double>(c.n_neg));
}

}  // namespace

double auc(const std::vector<ScoredSample>& samples) {
  const double value = auc_or_nan(samples);
  if (std::isnan(value)) throw Error("auc requires at least one sample of each class");
  return value;
}

RocCurve roc_curve(const std::vector<ScoredSample>& samples) {
  const ClassCounts c = count_classes(samples);
  if (c.n_pos == 0 || c.n_neg == 0) throw Error("roc_curve requires at least one sample of each class");

  std::vector<std::pair<double, bool>> scored;
  scored.reserve(samples.size());
  for (const auto& s : samples) scored.emplace_back(s.score, s.label == ClassLabel::DEP_POS);
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t i = 0;
  while (i < scored.size()) {
    const double threshold = scored[i].first;
    while (i < scored.size() && scored[i].first == threshold) {
      if (scored[i].second) ++tp;
      else ++fp;
      ++i;
    }
    curve.points.push_back({threshold,
                            static_cast<double>(fp) / static_cast<double>(c.n_neg),
                            static_cast<double>(tp) / static_cast<double>(c.n_pos)});
  }
  return curve;
}

double trapezoid_area(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }
  return area;
}

OperatingPoint operating_point(const RocCurve& curve, double target_specificity) {
  bool found = false;
  OperatingPoint best;
  for (const auto& p : curve.points) {
    const double specificity = 1.0 - p.fpr;
    if (specificity < target_specificity) continue;
    const bool better = !found || specificity < best.specificity ||
                        (specificity == best.specificity && p.tpr > best.sensitivity);
    if (better) {
      best = {specificity, p.tpr, p.threshold};
      found = true;
    }
  }
  if (!found) {
    throw Error("no operating point reaches specificity " + std::to_string(target_specificity));
  }
  return best;
}

BootstrapCi bootstrap_ci(const std::vector<ScoredSample>& samples, std::size_t n_resamples,
                         std::uint64_t seed, double level) {
  if (n_resamples < 100) throw Error("bootstrap_ci requires at least 100 resamples");
  if (level <= 0.0 || level >= 1.0) throw Error("bootstrap level must be in (0, 1)");
  auc(samples);  // validates both classes present

  const std::size_t n = samples.size();
  std::vector<double> values;
  values.reserve(n_resamples);
  BootstrapCi ci;

  std::vector<ScoredSample> resample(n);
  for (std::uint64_t i = 0; values.size() < n_resamples; ++i) {
    Rng rng(mix_seed(seed + i));
    for (std::size_t k = 0; k < n; ++k) resample[k] = samples[rng.below(n)];
    const double value = auc_or_nan(resample);
    if (std::isnan(value)) {
      ++ci.n_skipped;
      continue;
    }
    values.push_back(value);
  }

  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    const double idx = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = idx - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
  };
  const double alpha = (1.0 - level) / 2.0;
  ci.lo = quantile(alpha);
  ci.hi = quantile(1.0 - alpha);
  ci.n_resamples = values.size();
  return ci;
}

}  // namespace speechlen
