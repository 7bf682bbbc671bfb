#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "speechlen/corpus.hpp"

namespace speechlen {

enum class GateUnit { WORDS, SECONDS };

// Gate grid plus the rule for where curves stop. `gates` is in `unit`; for
// SECONDS each gate converts to floor(gate * rate_wps) words before use.
struct GateSpec {
  std::vector<int> gates;  // strictly ascending, positive
  GateUnit unit = GateUnit::WORDS;
  double rate_wps = 2.39;
  int stop_min_count = 30;
  double stop_min_fraction = 0.05;

  void check() const;  // throws on invariant violations
};

// gates converted to word counts; identity when unit is WORDS.
std::vector<int> word_gates(const GateSpec& spec);

// Default grids: responses 10,20,...,400; sessions 50,100,...,1500.
GateSpec default_response_gates();
GateSpec default_session_gates();

// Arithmetic grid start, start+step, ..., <= stop.
std::vector<int> gate_grid(int start, int stop, int step);

// One evaluation unit: either a response or a concatenated session stream,
// before gating.
struct EvalUnit {
  std::string item_id;
  ClassLabel label = ClassLabel::DEP_NEG;
  std::vector<std::string> tokens;
};

// All responses of a partition, labeled by their session's gold label.
std::vector<EvalUnit> response_units(const Corpus& corpus, Partition partition);

// One unit per session: responses concatenated in position order. first_n > 0
// keeps only each session's first N responses (sessions with fewer than N are
// dropped so the item set is comparable across N).
std::vector<EvalUnit> session_units(const Corpus& corpus, Partition partition,
                                    std::size_t first_n = 0);

struct GatedItem {
  std::string item_id;
  ClassLabel label = ClassLabel::DEP_NEG;
  std::vector<std::string> gated_tokens;  // first min(natural_length, gate) tokens
  std::size_t natural_length = 0;
  int gate = 0;
};

// Prefix cut at x words; shorter items are included in full, never excluded.
GatedItem gate_response(const Response& response, ClassLabel label, int x);

// Responses concatenated in position order, then prefix-cut at x.
GatedItem gate_session(const Session& session, int x);

GatedItem gate_unit(const EvalUnit& unit, int x);

struct GatedEvalSet {
  int gate = 0;
  std::vector<GatedItem> items;
  std::size_t n_at_or_above_gate = 0;  // items with natural_length >= gate
};

GatedEvalSet gated_eval_set(const std::vector<EvalUnit>& units, int x);

// Largest configured gate g with
//   count(natural_length >= g) >= max(stop_min_count, ceil(stop_min_fraction * n)).
// Falls back to the smallest gate when none qualifies.
int curve_stop_gate(const std::vector<EvalUnit>& units, const GateSpec& spec);
int curve_stop_gate(const std::vector<std::size_t>& natural_lengths, const GateSpec& spec);

}  // namespace speechlen
