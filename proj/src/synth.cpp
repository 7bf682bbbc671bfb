#include "speechlen/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "speechlen/error.hpp"
#include "speechlen/metrics.hpp"
#include "speechlen/rng.hpp"

namespace speechlen {

using nlohmann::json;

const char* to_string(InfoPlacement placement) {
  switch (placement) {
    case InfoPlacement::FRONT: return "front";
    case InfoPlacement::BACK: return "back";
    case InfoPlacement::UNIFORM: return "uniform";
  }
  return "front";
}

const char* to_string(InfoScope scope) {
  return scope == InfoScope::SESSION ? "session" : "response";
}

InfoPlacement info_placement_from_string(const std::string& s) {
  if (s == "front") return InfoPlacement::FRONT;
  if (s == "back") return InfoPlacement::BACK;
  if (s == "uniform") return InfoPlacement::UNIFORM;
  throw Error("unknown info_placement \"" + s + "\" (expected front, back, or uniform)");
}

InfoScope info_scope_from_string(const std::string& s) {
  if (s == "session") return InfoScope::SESSION;
  if (s == "response") return InfoScope::RESPONSE;
  throw Error("unknown info_scope \"" + s + "\" (expected session or response)");
}

void SynthConfig::check() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(std::string("synth config: ") + what);
  };
  require(n_train_sessions >= 0 && n_test_sessions >= 0, "session counts must be nonnegative");
  require(train_pos_prior > 0.0 && train_pos_prior < 1.0, "train_pos_prior must be in (0, 1)");
  require(test_pos_prior > 0.0 && test_pos_prior < 1.0, "test_pos_prior must be in (0, 1)");
  require(responses_min >= 1 && responses_max >= responses_min, "bad responses_per_session range");
  require(length_median_words > 0.0, "length_median_words must be positive");
  require(length_log_sigma >= 0.0, "length_log_sigma must be nonnegative");
  require(position_growth > -1.0, "position_growth must exceed -1");
  require(min_response_words >= 1, "min_response_words must be at least 1");
  require(informative_prefix_words >= 1, "informative_prefix_words must be at least 1");
  require(back_fraction > 0.0 && back_fraction <= 1.0, "back_fraction must be in (0, 1]");
  require(info_rate_neg >= 0.0, "info_rate_neg must be nonnegative");
  require(info_rate_pos > info_rate_neg, "info_rate_pos must exceed info_rate_neg");
  require(info_rate_pos <= 1.0, "info_rate_pos must be at most 1");
  require(density_position_decay > 0.0 && density_position_decay <= 1.0,
          "density_position_decay must be in (0, 1]");
  require(density_length_power >= 0.0, "density_length_power must be nonnegative");
  require(density_length_ref > 0.0, "density_length_ref must be positive");
  require(rate_wpm_neg > 0.0 && rate_wpm_pos > 0.0, "class rates must be positive");
  require(rate_slowdown_wpm_per_100 >= 0.0, "rate_slowdown_wpm_per_100 must be nonnegative");
  require(duration_jitter >= 0.0 && duration_jitter < 0.5, "duration_jitter must be in [0, 0.5)");
  require(vocab_filler_size >= 1 && vocab_info_size >= 1, "vocab sizes must be at least 1");
}

namespace {

// Skeleton of one session before tokens exist: response lengths plus the
// contiguous informative range within each response.
struct SessionPlan {
  std::vector<int> lengths;
  std::vector<std::pair<int, int>> info_range;  // [lo, hi) word indices per response
  std::vector<double> rate_scale;               // density modifiers per response
};

int draw_length(const SynthConfig& cfg, int position, Rng& rng) {
  const double log_median =
      std::log(cfg.length_median_words) + position * std::log1p(cfg.position_growth);
  const double raw = rng.lognormal(log_median, cfg.length_log_sigma);
  return std::max(cfg.min_response_words, static_cast<int>(std::llround(raw)));
}

SessionPlan draw_session_plan(const SynthConfig& cfg, Rng& rng) {
  SessionPlan plan;
  const int k = static_cast<int>(rng.uniform_int(cfg.responses_min, cfg.responses_max));
  plan.lengths.reserve(k);
  for (int p = 0; p < k; ++p) plan.lengths.push_back(draw_length(cfg, p, rng));

  long long total = 0;
  for (int len : plan.lengths) total += len;

  // Session-scope windows are contiguous in stream coordinates, so each
  // response's share is contiguous too.
  long long window_lo = 0;
  long long window_hi = total;
  if (cfg.info_scope == InfoScope::SESSION) {
    if (cfg.info_placement == InfoPlacement::FRONT) {
      window_hi = std::min<long long>(total, cfg.informative_prefix_words);
    } else if (cfg.info_placement == InfoPlacement::BACK) {
      window_lo = total - static_cast<long long>(
                              std::ceil(cfg.back_fraction * static_cast<double>(total)));
    }
  }

  long long offset = 0;
  for (std::size_t p = 0; p < plan.lengths.size(); ++p) {
    const int len = plan.lengths[p];
    int lo = 0;
    int hi = len;
    if (cfg.info_scope == InfoScope::SESSION) {
      lo = static_cast<int>(std::clamp<long long>(window_lo - offset, 0, len));
      hi = static_cast<int>(std::clamp<long long>(window_hi - offset, 0, len));
    } else {
      if (cfg.info_placement == InfoPlacement::FRONT) {
        hi = std::min(len, cfg.informative_prefix_words);
      } else if (cfg.info_placement == InfoPlacement::BACK) {
        lo = len - static_cast<int>(std::ceil(cfg.back_fraction * static_cast<double>(len)));
      }
    }
    plan.info_range.emplace_back(lo, hi);

    double scale = std::pow(cfg.density_position_decay, static_cast<double>(p));
    if (cfg.density_length_power > 0.0) {
      scale *= std::pow(cfg.density_length_ref / static_cast<double>(len),
                        cfg.density_length_power);
    }
    plan.rate_scale.push_back(scale);
    offset += len;
  }
  return plan;
}

double clamped_rate(const SynthConfig& cfg, bool pos, double scale) {
  const double base = pos ? cfg.info_rate_pos : cfg.info_rate_neg;
  return std::clamp(base * scale, 0.0, 1.0);
}

std::string zero_padded(const char* prefix, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%05d", prefix, index);
  return buf;
}

Session draw_session(const SynthConfig& cfg, Partition partition, int index, Rng& rng) {
  const double prior =
      partition == Partition::TRAIN ? cfg.train_pos_prior : cfg.test_pos_prior;
  const bool pos = rng.uniform01() < prior;

  Session session;
  const char* tag = partition == Partition::TRAIN ? "tr-" : "te-";
  session.session_id = zero_padded(("s-" + std::string(tag)).c_str(), index);
  session.speaker_id = zero_padded(("sp-" + std::string(tag)).c_str(), index);
  session.partition = partition;
  session.phq8 = static_cast<int>(pos ? rng.uniform_int(10, 24) : rng.uniform_int(0, 9));

  const SessionPlan plan = draw_session_plan(cfg, rng);
  for (std::size_t p = 0; p < plan.lengths.size(); ++p) {
    const int len = plan.lengths[p];
    const auto [info_lo, info_hi] = plan.info_range[p];
    const double rate = clamped_rate(cfg, pos, plan.rate_scale[p]);

    Response r;
    r.session_id = session.session_id;
    r.position = static_cast<int>(p);
    r.response_id = session.session_id + "#" + std::to_string(p);
    r.tokens.reserve(len);
    for (int j = 0; j < len; ++j) {
      const bool informative = j >= info_lo && j < info_hi && rng.uniform01() < rate;
      if (informative) {
        r.tokens.push_back("cue" + std::to_string(rng.below(cfg.vocab_info_size)));
      } else {
        r.tokens.push_back("w" + std::to_string(rng.below(cfg.vocab_filler_size)));
      }
    }

    const double base_wpm = pos ? cfg.rate_wpm_pos : cfg.rate_wpm_neg;
    const double wpm = std::max(
        1.0, base_wpm - cfg.rate_slowdown_wpm_per_100 * static_cast<double>(len) / 100.0);
    const double jitter = rng.uniform(-cfg.duration_jitter, cfg.duration_jitter);
    r.duration_s = static_cast<double>(len) / (wpm / 60.0) * (1.0 + jitter);

    session.responses.push_back(std::move(r));
  }
  return session;
}

}  // namespace

std::pair<Corpus, PlantedTruth> generate(const SynthConfig& config) {
  config.check();
  Corpus corpus;
  corpus.source_path = "synth:seed=" + std::to_string(config.seed);
  corpus.format_tag = "synth";

  Rng rng(mix_seed(config.seed));
  corpus.sessions.reserve(static_cast<std::size_t>(config.n_train_sessions) +
                          static_cast<std::size_t>(config.n_test_sessions));
  for (int i = 0; i < config.n_train_sessions; ++i) {
    corpus.sessions.push_back(draw_session(config, Partition::TRAIN, i, rng));
  }
  for (int i = 0; i < config.n_test_sessions; ++i) {
    corpus.sessions.push_back(draw_session(config, Partition::TEST, i, rng));
  }
  return {std::move(corpus), planted_truth(config)};
}

PlantedTruth planted_truth(const SynthConfig& config, std::size_t draws) {
  config.check();
  PlantedTruth truth;
  truth.rate_gap_wpm = config.rate_wpm_neg - config.rate_wpm_pos;
  if (config.info_placement == InfoPlacement::FRONT) {
    truth.saturation_words = config.informative_prefix_words;
  }

  // AUC of the exact log-likelihood-ratio statistic over full-length session
  // draws: the ceiling any token scorer can reach on this corpus family.
  Rng rng(mix_seed(config.seed ^ 0x7472757468ULL));
  const std::size_t per_class = std::max<std::size_t>(1, draws / 2);
  std::vector<ScoredSample> samples;
  samples.reserve(2 * per_class);

  for (int cls = 0; cls < 2; ++cls) {
    const bool pos = cls == 1;
    for (std::size_t d = 0; d < per_class; ++d) {
      const SessionPlan plan = draw_session_plan(config, rng);
      double llr = 0.0;
      for (std::size_t p = 0; p < plan.lengths.size(); ++p) {
        const int window = plan.info_range[p].second - plan.info_range[p].first;
        if (window <= 0) continue;
        const double p_pos = clamped_rate(config, true, plan.rate_scale[p]);
        const double p_neg = clamped_rate(config, false, plan.rate_scale[p]);
        if (p_neg <= 0.0 || p_pos >= 1.0) continue;  // degenerate rates carry infinite evidence
        const double rate = pos ? p_pos : p_neg;
        int hits = 0;
        for (int j = 0; j < window; ++j) {
          if (rng.uniform01() < rate) ++hits;
        }
        llr += hits * std::log(p_pos / p_neg) +
               (window - hits) * std::log((1.0 - p_pos) / (1.0 - p_neg));
      }
      ScoredSample s;
      s.label = pos ? ClassLabel::DEP_POS : ClassLabel::DEP_NEG;
      // auc() only ranks scores, so the raw statistic needs no squashing.
      s.score = llr;
      samples.push_back(std::move(s));
    }
  }
  truth.analytic_auc = auc(samples);
  truth.analytic_draws = 2 * per_class;
  return truth;
}

namespace {

template <typename T>
void load_field(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace

SynthConfig synth_config_from_json_text(const std::string& text) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("synth config: parse error: ") + e.what());
  }
  if (!obj.is_object()) throw Error("synth config must be a JSON object");

  static const char* known[] = {
      "seed", "n_train_sessions", "n_test_sessions", "train_pos_prior", "test_pos_prior",
      "responses_min", "responses_max", "length_median_words", "length_log_sigma",
      "position_growth", "min_response_words", "informative_prefix_words", "info_placement",
      "info_scope", "back_fraction", "info_rate_pos", "info_rate_neg",
      "density_position_decay", "density_length_power", "density_length_ref", "rate_wpm_neg",
      "rate_wpm_pos", "rate_slowdown_wpm_per_100", "duration_jitter", "vocab_filler_size",
      "vocab_info_size"};
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return key == k; }) == std::end(known)) {
      throw Error("synth config: unknown key \"" + key + "\"");
    }
  }

  SynthConfig cfg;
  try {
    load_field(obj, "seed", cfg.seed);
    load_field(obj, "n_train_sessions", cfg.n_train_sessions);
    load_field(obj, "n_test_sessions", cfg.n_test_sessions);
    load_field(obj, "train_pos_prior", cfg.train_pos_prior);
    load_field(obj, "test_pos_prior", cfg.test_pos_prior);
    load_field(obj, "responses_min", cfg.responses_min);
    load_field(obj, "responses_max", cfg.responses_max);
    load_field(obj, "length_median_words", cfg.length_median_words);
    load_field(obj, "length_log_sigma", cfg.length_log_sigma);
    load_field(obj, "position_growth", cfg.position_growth);
    load_field(obj, "min_response_words", cfg.min_response_words);
    load_field(obj, "informative_prefix_words", cfg.informative_prefix_words);
    if (obj.contains("info_placement")) {
      cfg.info_placement = info_placement_from_string(obj.at("info_placement").get<std::string>());
    }
    if (obj.contains("info_scope")) {
      cfg.info_scope = info_scope_from_string(obj.at("info_scope").get<std::string>());
    }
    load_field(obj, "back_fraction", cfg.back_fraction);
    load_field(obj, "info_rate_pos", cfg.info_rate_pos);
    load_field(obj, "info_rate_neg", cfg.info_rate_neg);
    load_field(obj, "density_position_decay", cfg.density_position_decay);
    load_field(obj, "density_length_power", cfg.density_length_power);
    load_field(obj, "density_length_ref", cfg.density_length_ref);
    load_field(obj, "rate_wpm_neg", cfg.rate_wpm_neg);
    load_field(obj, "rate_wpm_pos", cfg.rate_wpm_pos);
    load_field(obj, "rate_slowdown_wpm_per_100", cfg.rate_slowdown_wpm_per_100);
    load_field(obj, "duration_jitter", cfg.duration_jitter);
    load_field(obj, "vocab_filler_size", cfg.vocab_filler_size);
    load_field(obj, "vocab_info_size", cfg.vocab_info_size);
  } catch (const json::exception& e) {
    throw Error(std::string("synth config: ") + e.what());
  }
  cfg.check();
  return cfg;
}

namespace {

json synth_config_json(const SynthConfig& cfg) {
  json obj;
  obj["seed"] = cfg.seed;
  obj["n_train_sessions"] = cfg.n_train_sessions;
  obj["n_test_sessions"] = cfg.n_test_sessions;
  obj["train_pos_prior"] = cfg.train_pos_prior;
  obj["test_pos_prior"] = cfg.test_pos_prior;
  obj["responses_min"] = cfg.responses_min;
  obj["responses_max"] = cfg.responses_max;
  obj["length_median_words"] = cfg.length_median_words;
  obj["length_log_sigma"] = cfg.length_log_sigma;
  obj["position_growth"] = cfg.position_growth;
  obj["min_response_words"] = cfg.min_response_words;
  obj["informative_prefix_words"] = cfg.informative_prefix_words;
  obj["info_placement"] = to_string(cfg.info_placement);
  obj["info_scope"] = to_string(cfg.info_scope);
  obj["back_fraction"] = cfg.back_fraction;
  obj["info_rate_pos"] = cfg.info_rate_pos;
  obj["info_rate_neg"] = cfg.info_rate_neg;
  obj["density_position_decay"] = cfg.density_position_decay;
  obj["density_length_power"] = cfg.density_length_power;
  obj["density_length_ref"] = cfg.density_length_ref;
  obj["rate_wpm_neg"] = cfg.rate_wpm_neg;
  obj["rate_wpm_pos"] = cfg.rate_wpm_pos;
  obj["rate_slowdown_wpm_per_100"] = cfg.rate_slowdown_wpm_per_100;
  obj["duration_jitter"] = cfg.duration_jitter;
  obj["vocab_filler_size"] = cfg.vocab_filler_size;
  obj["vocab_info_size"] = cfg.vocab_info_size;
  return obj;
}

}  // namespace

std::string synth_config_to_json(const SynthConfig& config) {
  return synth_config_json(config).dump(2) + "\n";
}

std::string truth_to_json(const SynthConfig& config, const PlantedTruth& truth) {
  json obj;
  if (truth.saturation_words) {
    obj["saturation_words"] = *truth.saturation_words;
  } else {
    obj["saturation_words"] = nullptr;
  }
  obj["rate_gap_wpm"] = truth.rate_gap_wpm;
  obj["analytic_auc"] = truth.analytic_auc;
  obj["analytic_draws"] = truth.analytic_draws;
  obj["config"] = synth_config_json(config);
  return obj.dump(2) + "\n";
}

}  // namespace speechlen
