#include "speechlen/rate.hpp"

#include <cmath>
#include <map>

#include "speechlen/error.hpp"

namespace speechlen {

double response_rate(const Response& response) {
  if (!response.duration_s || *response.duration_s <= 0.0) {
    throw Error("response \"" + response.response_id + "\" has no positive duration");
  }
  return static_cast<double>(response.tokens.size()) / *response.duration_s;
}

double global_rate(const Corpus& corpus) {
  double words = 0.0;
  double seconds = 0.0;
  for (const auto& session : corpus.sessions) {
    for (const auto& r : session.responses) {
      if (r.duration_s && *r.duration_s > 0.0) {
        words += static_cast<double>(r.tokens.size());
        seconds += *r.duration_s;
      }
    }
  }
  if (seconds <= 0.0) throw Error("no responses with positive duration");
  return words / seconds;
}

RateStats rate_by_class_and_length(const Corpus& corpus, int bin_width,
                                   std::size_t min_bin_count) {
  if (bin_width <= 0) throw Error("bin_width must be positive");

  struct Pool {
    double words = 0.0;
    double seconds = 0.0;
    std::size_t count = 0;
  };
  // Keyed by (class, bin_low) so output order is deterministic.
  std::map<std::pair<int, int>, Pool> pools;
  Pool class_pool[2];

  RateStats stats;
  stats.global_wps = global_rate(corpus);
  stats.global_wpm = 60.0 * stats.global_wps;

  for (const auto& session : corpus.sessions) {
    const int label = session.label() == ClassLabel::DEP_POS ? 1 : 0;
    for (const auto& r : session.responses) {
      if (!r.duration_s || *r.duration_s <= 0.0) continue;
      const int bin_low = static_cast<int>(r.tokens.size()) / bin_width * bin_width;
      Pool& pool = pools[{label, bin_low}];
      pool.words += static_cast<double>(r.tokens.size());
      pool.seconds += *r.duration_s;
      ++pool.count;
      class_pool[label].words += static_cast<double>(r.tokens.size());
      class_pool[label].seconds += *r.duration_s;
      ++class_pool[label].count;
    }
  }

  for (const auto& [key, pool] : pools) {
    if (pool.count < min_bin_count) continue;
    RateBin bin;
    bin.label = key.first ? ClassLabel::DEP_POS : ClassLabel::DEP_NEG;
    bin.bin_low = key.second;
    bin.bin_high = key.second + bin_width;
    bin.mean_wpm = 60.0 * pool.words / pool.seconds;
    bin.count = pool.count;
    stats.bins.push_back(bin);
  }

  if (class_pool[0].seconds > 0.0 && class_pool[1].seconds > 0.0) {
    const double neg_wpm = 60.0 * class_pool[0].words / class_pool[0].seconds;
    const double pos_wpm = 60.0 * class_pool[1].words / class_pool[1].seconds;
    stats.class_gap_wpm = neg_wpm - pos_wpm;
  }
  return stats;
}

double words_to_seconds(double n_words, double rate_wps) {
  if (rate_wps <= 0.0) throw Error("rate_wps must be positive");
  return n_words / rate_wps;
}

long long seconds_to_words(double t_seconds, double rate_wps) {
  if (rate_wps <= 0.0) throw Error("rate_wps must be positive");
  return static_cast<long long>(std::floor(t_seconds * rate_wps));
}

}  // namespace speechlen
