#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "speechlen/corpus.hpp"

namespace speechlen {

enum class InfoPlacement { FRONT, BACK, UNIFORM };
// Whether the informative window is measured over the concatenated session
// stream or within each response separately. Session analyses saturate at the
// stream level, response analyses at the response level, so both modes exist.
enum class InfoScope { SESSION, RESPONSE };

const char* to_string(InfoPlacement placement);
const char* to_string(InfoScope scope);
InfoPlacement info_placement_from_string(const std::string& s);
InfoScope info_scope_from_string(const std::string& s);

struct SynthConfig {
  std::uint64_t seed = 1;
  int n_train_sessions = 200;
  int n_test_sessions = 200;
  double train_pos_prior = 0.28;
  double test_pos_prior = 0.22;
  int responses_min = 4;
  int responses_max = 6;

  // Response lengths are lognormal; the median grows per position so later
  // responses run longer. Defaults put the mean response near 125 words.
  double length_median_words = 104.0;
  double length_log_sigma = 0.6;
  double position_growth = 0.18;
  int min_response_words = 5;

  // Class-discriminative tokens appear only inside the placement window, at
  // rate info_rate_pos for +dep speakers and info_rate_neg for -dep.
  int informative_prefix_words = 200;  // window size L* for FRONT
  InfoPlacement info_placement = InfoPlacement::FRONT;
  InfoScope info_scope = InfoScope::RESPONSE;
  double back_fraction = 0.4;  // BACK window: last ceil(back_fraction * length)
  double info_rate_pos = 0.030;
  double info_rate_neg = 0.018;

  // Optional density shaping. decay < 1 makes earlier responses denser
  // (screening interviews front-load the load-bearing questions, so that is
  // the default); power > 0 makes shorter responses denser (rate scales by
  // (density_length_ref / natural_length)^power).
  double density_position_decay = 0.75;
  double density_length_power = 0.0;
  double density_length_ref = 125.0;

  // Durations: words / class rate, with uniform +-jitter. Slowdown subtracts
  // wpm per 100 words of natural length for both classes.
  double rate_wpm_neg = 145.9;
  double rate_wpm_pos = 140.9;
  double rate_slowdown_wpm_per_100 = 0.0;
  double duration_jitter = 0.05;

  int vocab_filler_size = 500;
  int vocab_info_size = 50;

  void check() const;  // throws on infeasible or out-of-range settings
};

struct PlantedTruth {
  // Window size for FRONT placement; absent for BACK/UNIFORM, where signal
  // runs to the end of the stream.
  std::optional<int> saturation_words;
  double rate_gap_wpm = 0.0;  // rate_wpm_neg - rate_wpm_pos
  // Session-level AUC of the generative log-likelihood-ratio statistic at
  // full length, Monte Carlo on a seed derived from config.seed.
  double analytic_auc = 0.5;
  std::size_t analytic_draws = 0;
};

// Deterministic per seed: identical config => bit-identical corpus. Speakers
// are unique per session, partitions disjoint by construction, and the
// result passes validate() with zero violations.
std::pair<Corpus, PlantedTruth> generate(const SynthConfig& config);

PlantedTruth planted_truth(const SynthConfig& config, std::size_t draws = 100000);

// JSON mirror of SynthConfig: missing keys take defaults, unknown keys error.
SynthConfig synth_config_from_json_text(const std::string& text);
std::string synth_config_to_json(const SynthConfig& config);
std::string truth_to_json(const SynthConfig& config, const PlantedTruth& truth);

}  // namespace speechlen
