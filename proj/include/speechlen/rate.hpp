#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "speechlen/corpus.hpp"

namespace speechlen {

// Fallback words/second used whenever durations are absent and for
// words<->seconds conversion defaults.
inline constexpr double kDefaultRateWps = 2.39;

struct RateBin {
  ClassLabel label = ClassLabel::DEP_NEG;
  int bin_low = 0;    // natural length bin [bin_low, bin_low + width)
  int bin_high = 0;   // exclusive
  double mean_wpm = 0.0;  // pooled within the bin
  std::size_t count = 0;
};

struct RateStats {
  double global_wps = 0.0;
  double global_wpm = 0.0;  // always 60 * global_wps
  std::vector<RateBin> bins;  // -dep bins first, then +dep, ascending bin_low
  // Pooled -dep rate minus pooled +dep rate, wpm; absent when either class has
  // no durated responses.
  std::optional<double> class_gap_wpm;
};

// Token count / duration. Throws when duration is absent or not positive.
double response_rate(const Response& response);

// Pooled rate: total words / total seconds over every durated response.
// Pooling, not mean-of-rates; sub-pool pooling reproduces it exactly.
// Throws when no response has a duration.
double global_rate(const Corpus& corpus);

// Responses bucketed by natural token count; bins with fewer than
// min_bin_count durated responses are omitted.
RateStats rate_by_class_and_length(const Corpus& corpus, int bin_width = 25,
                                   std::size_t min_bin_count = 30);

double words_to_seconds(double n_words, double rate_wps);

// floor(t * rate); the only lossy direction of the conversion.
long long seconds_to_words(double t_seconds, double rate_wps);

}  // namespace speechlen
