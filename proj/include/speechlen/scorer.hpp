#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "speechlen/corpus.hpp"

namespace speechlen {

// Behavioral contract every scorer obeys: deterministic, pure, returns a
// value in [0,1] for any token sequence including the empty one. The item id
// and gate are context for adapters backed by precomputed tables; token-based
// scorers must ignore them.
class Scorer {
 public:
  virtual ~Scorer() = default;

  // tokens: the (possibly gated) token stream; gate: the word gate it was cut
  // at, or the natural length when ungated.
  virtual double score(const std::string& item_id, const std::vector<std::string>& tokens,
                       int gate) const = 0;

  // Scores of `tokens` truncated at each gate in `gates` (ascending word
  // counts). Default recuts per gate; overrides can be incremental.
  virtual std::vector<double> score_prefixes(const std::string& item_id,
                                             const std::vector<std::string>& tokens,
                                             const std::vector<int>& gates) const;

  // True when the scorer derives the score from the tokens themselves, so it
  // can score arbitrary substreams (head/tail splits, replay streams).
  virtual bool scores_tokens() const = 0;
};

enum class LengthNorm { Sum, Mean, SqrtMean };

const char* to_string(LengthNorm norm);  // "sum" / "mean" / "sqrt-mean"
LengthNorm length_norm_from_string(const std::string& s);

// Trainable log-odds lexicon. weight(t) is the smoothed log-ratio of t's
// class-conditional frequencies; bias is the log prior odds of +dep.
struct Lexicon {
  std::unordered_map<std::string, double> weights;  // unseen tokens weigh 0
  double bias = 0.0;
  double smoothing_alpha = 1.0;
  LengthNorm norm = LengthNorm::SqrtMean;
};

// weight(t) = log((c_pos(t)+a)/(T_pos+aV)) - log((c_neg(t)+a)/(T_neg+aV)),
// V = vocabulary size over both classes; bias = log(n_pos / n_neg) over
// training sessions. Only TRAIN-partition sessions are accepted; any TEST
// session is an error (speaker independence by construction). Throws when the
// training data is single-class.
Lexicon train_lexicon(const std::vector<Session>& train_sessions, double smoothing_alpha = 1.0,
                      LengthNorm norm = LengthNorm::SqrtMean);

// logistic(bias + normalized weight sum); SqrtMean divides the sum by
// sqrt(n), Mean by n, Sum not at all. Empty input scores logistic(bias).
double lexicon_score(const Lexicon& lexicon, const std::vector<std::string>& tokens);

// File format: "# bias=... / # alpha=... / # norm=..." comment lines, then a
// token,weight CSV sorted by token.
void save_lexicon(const Lexicon& lexicon, const std::string& path);
Lexicon load_lexicon(const std::string& path);

class LexiconScorer : public Scorer {
 public:
  explicit LexiconScorer(Lexicon lexicon) : lexicon_(std::move(lexicon)) {}

  double score(const std::string& item_id, const std::vector<std::string>& tokens,
               int gate) const override;
  // Incremental: one pass over tokens regardless of how many gates.
  std::vector<double> score_prefixes(const std::string& item_id,
                                     const std::vector<std::string>& tokens,
                                     const std::vector<int>& gates) const override;
  bool scores_tokens() const override { return true; }

  const Lexicon& lexicon() const { return lexicon_; }

 private:
  Lexicon lexicon_;
};

// Externally computed gated scores: (item_id, gate_words) -> score.
struct ScoreTable {
  // Per item, (gate, score) pairs sorted by gate ascending.
  std::unordered_map<std::string, std::vector<std::pair<int, double>>> rows;
};

// Score at the largest stored gate <= requested (step-function lookup).
// Throws on unknown items and on gates below the item's smallest stored gate.
double table_score(const ScoreTable& table, const std::string& item_id, int gate);

// CSV item_id,gate_words,score with a header row.
void save_score_table(const ScoreTable& table, const std::string& path);
ScoreTable load_score_table(const std::string& path);

class TableScorer : public Scorer {
 public:
  explicit TableScorer(ScoreTable table) : table_(std::move(table)) {}

  double score(const std::string& item_id, const std::vector<std::string>& tokens,
               int gate) const override;
  bool scores_tokens() const override { return false; }

 private:
  ScoreTable table_;
};

}  // namespace speechlen
