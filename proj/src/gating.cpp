#include "speechlen/gating.hpp"

#include <algorithm>
#include <cmath>

#include "speechlen/error.hpp"
#include "speechlen/rate.hpp"

namespace speechlen {

void GateSpec::check() const {
  if (gates.empty()) throw Error("gate spec has no gates");
  int prev = 0;
  for (int g : gates) {
    if (g <= prev) throw Error("gates must be strictly ascending and positive");
    prev = g;
  }
  if (unit == GateUnit::SECONDS && rate_wps <= 0.0) {
    throw Error("rate_wps must be positive when gates are in seconds");
  }
  if (stop_min_count < 1) throw Error("stop_min_count must be at least 1");
  if (stop_min_fraction < 0.0 || stop_min_fraction > 1.0) {
    throw Error("stop_min_fraction must be in [0, 1]");
  }
}

std::vector<int> word_gates(const GateSpec& spec) {
  spec.check();
  if (spec.unit == GateUnit::WORDS) return spec.gates;
  std::vector<int> words;
  words.reserve(spec.gates.size());
  int prev = 0;
  for (int g : spec.gates) {
    const int w = static_cast<int>(seconds_to_words(static_cast<double>(g), spec.rate_wps));
    if (w <= prev) {
      throw Error("seconds gates convert to a non-ascending word grid; use a coarser grid");
    }
    words.push_back(w);
    prev = w;
  }
  return words;
}

std::vector<int> gate_grid(int start, int stop, int step) {
  if (start < 1 || step < 1 || stop < start) throw Error("bad gate grid");
  std::vector<int> gates;
  for (int g = start; g <= stop; g += step) gates.push_back(g);
  return gates;
}

GateSpec default_response_gates() {
  GateSpec spec;
  spec.gates = gate_grid(10, 400, 10);
  return spec;
}

GateSpec default_session_gates() {
  GateSpec spec;
  spec.gates = gate_grid(50, 1500, 50);
  return spec;
}

std::vector<EvalUnit> response_units(const Corpus& corpus, Partition partition) {
  std::vector<EvalUnit> units;
  for (const auto& session : corpus.sessions) {
    if (session.partition != partition) continue;
    const ClassLabel label = session.label();
    for (const auto& r : session.responses) {
      units.push_back({r.response_id, label, r.tokens});
    }
  }
  return units;
}

std::vector<EvalUnit> session_units(const Corpus& corpus, Partition partition,
                                    std::size_t first_n) {
  std::vector<EvalUnit> units;
  for (const auto& session : corpus.sessions) {
    if (session.partition != partition) continue;
    if (first_n > 0 && session.responses.size() < first_n) continue;
    EvalUnit unit;
    unit.item_id = session.session_id;
    unit.label = session.label();
    const std::size_t take = first_n > 0 ? first_n : session.responses.size();
    for (std::size_t i = 0; i < take; ++i) {
      const auto& tokens = session.responses[i].tokens;
      unit.tokens.insert(unit.tokens.end(), tokens.begin(), tokens.end());
    }
    units.push_back(std::move(unit));
  }
  return units;
}

namespace {

GatedItem gate_tokens(std::string item_id, ClassLabel label,
                      const std::vector<std::string>& tokens, int x) {
  if (x < 1) throw Error("gate must be at least 1 word");
  GatedItem item;
  item.item_id = std::move(item_id);
  item.label = label;
  item.natural_length = tokens.size();
  item.gate = x;
  const std::size_t keep = std::min<std::size_t>(tokens.size(), static_cast<std::size_t>(x));
  item.gated_tokens.assign(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(keep));
  return item;
}

}  // namespace

GatedItem gate_response(const Response& response, ClassLabel label, int x) {
  return gate_tokens(response.response_id, label, response.tokens, x);
}

GatedItem gate_session(const Session& session, int x) {
  std::vector<std::string> stream;
  for (const auto& r : session.responses) {
    stream.insert(stream.end(), r.tokens.begin(), r.tokens.end());
  }
  return gate_tokens(session.session_id, session.label(), stream, x);
}

GatedItem gate_unit(const EvalUnit& unit, int x) {
  return gate_tokens(unit.item_id, unit.label, unit.tokens, x);
}

GatedEvalSet gated_eval_set(const std::vector<EvalUnit>& units, int x) {
  GatedEvalSet set;
  set.gate = x;
  set.items.reserve(units.size());
  for (const auto& unit : units) {
    set.items.push_back(gate_unit(unit, x));
    if (unit.tokens.size() >= static_cast<std::size_t>(x)) ++set.n_at_or_above_gate;
  }
  return set;
}

int curve_stop_gate(const std::vector<std::size_t>& natural_lengths, const GateSpec& spec) {
  if (natural_lengths.empty()) throw Error("curve_stop_gate needs at least one item");
  const std::vector<int> gates = word_gates(spec);
  const double n = static_cast<double>(natural_lengths.size());
  const std::size_t required = std::max<std::size_t>(
      static_cast<std::size_t>(spec.stop_min_count),
      static_cast<std::size_t>(std::ceil(spec.stop_min_fraction * n)));

  // Sorted lengths make count(natural >= g) one binary search per gate.
  std::vector<std::size_t> sorted = natural_lengths;
  std::sort(sorted.begin(), sorted.end());

  int stop = gates.front();
  for (int g : gates) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), static_cast<std::size_t>(g));
    const std::size_t at_or_above = static_cast<std::size_t>(sorted.end() - it);
    if (at_or_above >= required) stop = g;
  }
  return stop;
}

int curve_stop_gate(const std::vector<EvalUnit>& units, const GateSpec& spec) {
  std::vector<std::size_t> lengths;
  lengths.reserve(units.size());
  for (const auto& u : units) lengths.push_back(u.tokens.size());
  return curve_stop_gate(lengths, spec);
}

}  // namespace speechlen
