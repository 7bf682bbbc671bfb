#include "speechlen/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "speechlen/error.hpp"
#include "speechlen/io.hpp"
#include "speechlen/rate.hpp"

namespace speechlen {

using nlohmann::json;

namespace {

void require_both_classes(const std::vector<EvalUnit>& units, const char* what) {
  bool pos = false;
  bool neg = false;
  for (const auto& u : units) {
    if (u.label == ClassLabel::DEP_POS) pos = true;
    else neg = true;
  }
  if (!pos || !neg) throw Error(std::string(what) + " requires both classes in the test data");
}

std::vector<Session const*> test_sessions(const Corpus& corpus) {
  std::vector<Session const*> sessions;
  for (const auto& s : corpus.sessions) {
    if (s.partition == Partition::TEST) sessions.push_back(&s);
  }
  return sessions;
}

}  // namespace

GatedCurve gated_auc_curve(const std::vector<EvalUnit>& units, const Scorer& scorer,
                           const GateSpec& spec, const std::string& condition,
                           const CurveOptions& opts) {
  if (units.empty()) throw Error("gated curve \"" + condition + "\": no items to evaluate");
  require_both_classes(units, "gated curve");

  const std::vector<int> all_gates = word_gates(spec);
  const int stop = curve_stop_gate(units, spec);
  std::vector<int> gates;
  for (int g : all_gates) {
    if (g <= stop) gates.push_back(g);
  }

  GatedCurve curve;
  curve.condition = condition;
  curve.unit = spec.unit;
  curve.rate_wps = spec.rate_wps;
  curve.stop_gate = stop;

  // One pass per item over its tokens, however many gates there are; the
  // per-gate sample vectors carry no ids to keep this linear in corpus size.
  std::vector<std::vector<ScoredSample>> samples_at(
      gates.size(), std::vector<ScoredSample>(units.size()));
  std::vector<std::size_t> n_at_or_above(gates.size(), 0);
  for (std::size_t u = 0; u < units.size(); ++u) {
    const auto scores = scorer.score_prefixes(units[u].item_id, units[u].tokens, gates);
    for (std::size_t gi = 0; gi < gates.size(); ++gi) {
      samples_at[gi][u].label = units[u].label;
      samples_at[gi][u].score = scores[gi];
      if (units[u].tokens.size() >= static_cast<std::size_t>(gates[gi])) ++n_at_or_above[gi];
    }
  }

  for (std::size_t gi = 0; gi < gates.size(); ++gi) {
    CurvePoint point;
    point.gate = gates[gi];
    point.auc = auc(samples_at[gi]);
    point.n_items = units.size();
    point.n_at_or_above = n_at_or_above[gi];
    if (opts.with_ci) {
      const auto ci = bootstrap_ci(samples_at[gi], opts.n_resamples,
                                   opts.seed + static_cast<std::uint64_t>(gates[gi]), opts.level);
      point.ci_lo = ci.lo;
      point.ci_hi = ci.hi;
    }
    curve.points.push_back(point);
  }
  return curve;
}

GatedCurve response_gated_auc(const Corpus& corpus, const Scorer& scorer, const GateSpec& spec,
                              const CurveOptions& opts) {
  return gated_auc_curve(response_units(corpus, Partition::TEST), scorer, spec, "response", opts);
}

GatedCurve session_gated_auc(const Corpus& corpus, const Scorer& scorer, const GateSpec& spec,
                             const CurveOptions& opts) {
  return gated_auc_curve(session_units(corpus, Partition::TEST), scorer, spec, "session", opts);
}

std::vector<GatedCurve> progressive_session_auc(const Corpus& corpus, const Scorer& scorer,
                                                const GateSpec& spec, int max_n,
                                                const CurveOptions& opts, ProgressiveMode mode) {
  if (max_n < 1) throw Error("progressive analysis needs max_n >= 1");

  std::vector<Session const*> sessions;
  for (const auto* s : test_sessions(corpus)) {
    if (mode == ProgressiveMode::PAD_WITH_AVAILABLE ||
        s->responses.size() >= static_cast<std::size_t>(max_n)) {
      sessions.push_back(s);
    }
  }
  if (sessions.empty()) {
    throw Error("no test session has " + std::to_string(max_n) + " responses");
  }

  std::vector<GatedCurve> curves;
  for (int n = 1; n <= max_n; ++n) {
    std::vector<EvalUnit> units;
    units.reserve(sessions.size());
    for (const auto* s : sessions) {
      EvalUnit unit;
      unit.item_id = s->session_id;
      unit.label = s->label();
      const std::size_t take = std::min<std::size_t>(s->responses.size(),
                                                     static_cast<std::size_t>(n));
      for (std::size_t i = 0; i < take; ++i) {
        const auto& tokens = s->responses[i].tokens;
        unit.tokens.insert(unit.tokens.end(), tokens.begin(), tokens.end());
      }
      units.push_back(std::move(unit));
    }
    curves.push_back(
        gated_auc_curve(units, scorer, spec, "first-N=" + std::to_string(n), opts));
  }
  return curves;
}

RocAtGatesReport roc_at_gates(const Corpus& corpus, const Scorer& scorer,
                              const std::vector<int>& gates) {
  if (gates.empty()) throw Error("roc_at_gates needs at least one gate");
  for (std::size_t i = 0; i < gates.size(); ++i) {
    if (gates[i] < 1 || (i > 0 && gates[i] <= gates[i - 1])) {
      throw Error("roc gates must be strictly ascending and positive");
    }
  }
  const auto units = session_units(corpus, Partition::TEST);
  if (units.empty()) throw Error("roc_at_gates: no test sessions");
  require_both_classes(units, "roc_at_gates");

  RocAtGatesReport report;
  std::vector<std::vector<ScoredSample>> samples_at(
      gates.size(), std::vector<ScoredSample>(units.size()));
  for (std::size_t u = 0; u < units.size(); ++u) {
    const auto scores = scorer.score_prefixes(units[u].item_id, units[u].tokens, gates);
    for (std::size_t gi = 0; gi < gates.size(); ++gi) {
      samples_at[gi][u].label = units[u].label;
      samples_at[gi][u].score = scores[gi];
    }
  }
  for (std::size_t gi = 0; gi < gates.size(); ++gi) {
    RocAtGate entry;
    entry.gate = gates[gi];
    entry.curve = roc_curve(samples_at[gi]);
    entry.auc = auc(samples_at[gi]);
    report.rocs.push_back(std::move(entry));
  }
  return report;
}

OrderingHistogram ordering_histogram(const Corpus& corpus, int k) {
  if (k < 2) throw Error("ordering histogram needs k >= 2");
  OrderingHistogram hist;
  hist.k = k;
  hist.cell.assign(k, std::vector<double>(k, 0.0));

  for (const auto& session : corpus.sessions) {
    if (session.responses.size() != static_cast<std::size_t>(k)) continue;
    ++hist.n_sessions;
    std::vector<int> order(k);
    for (int i = 0; i < k; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const auto la = session.responses[a].tokens.size();
      const auto lb = session.responses[b].tokens.size();
      if (la != lb) return la < lb;
      return a < b;  // tie: earlier position takes the lower rank
    });
    for (int rank = 0; rank < k; ++rank) {
      hist.cell[order[rank]][rank] += 1.0;
    }
  }
  if (hist.n_sessions == 0) {
    throw Error("no session has exactly " + std::to_string(k) + " responses");
  }
  for (auto& row : hist.cell) {
    for (auto& value : row) value /= static_cast<double>(hist.n_sessions);
  }
  return hist;
}

std::pair<GatedCurve, GatedCurve> extremes_gated_auc(const Corpus& corpus, const Scorer& scorer,
                                                     const GateSpec& spec,
                                                     const CurveOptions& opts) {
  std::vector<EvalUnit> shortest;
  std::vector<EvalUnit> longest;
  for (const auto* s : test_sessions(corpus)) {
    if (s->responses.size() < 2) continue;
    std::size_t arg_min = 0;
    std::size_t arg_max = 0;
    for (std::size_t i = 1; i < s->responses.size(); ++i) {
      if (s->responses[i].tokens.size() < s->responses[arg_min].tokens.size()) arg_min = i;
      if (s->responses[i].tokens.size() > s->responses[arg_max].tokens.size()) arg_max = i;
    }
    const ClassLabel label = s->label();
    shortest.push_back(
        {s->responses[arg_min].response_id, label, s->responses[arg_min].tokens});
    longest.push_back({s->responses[arg_max].response_id, label, s->responses[arg_max].tokens});
  }
  if (shortest.empty()) throw Error("extremes analysis needs test sessions with >= 2 responses");

  return {gated_auc_curve(shortest, scorer, spec, "shortest", opts),
          gated_auc_curve(longest, scorer, spec, "longest", opts)};
}

PartSplitReport part_split_auc(const Corpus& corpus, const Scorer& scorer, int bin_lo, int bin_hi,
                               double fraction, std::size_t min_count) {
  if (bin_lo < 1 || bin_hi < bin_lo) throw Error("bad part-split length bin");
  if (fraction < 0.0 || fraction > 1.0) throw Error("split fraction must be in [0, 1]");
  if (!scorer.scores_tokens()) {
    throw Error("part-split analysis needs a token-based scorer, not a score table");
  }

  PartSplitReport report;
  report.bin_lo = bin_lo;
  report.bin_hi = bin_hi;
  report.fraction = fraction;

  std::vector<ScoredSample> heads;
  std::vector<ScoredSample> tails;
  std::size_t nonempty_heads = 0;
  std::size_t nonempty_tails = 0;
  for (const auto* session : test_sessions(corpus)) {
    const ClassLabel label = session->label();
    for (const auto& r : session->responses) {
      const auto length = r.tokens.size();
      if (length < static_cast<std::size_t>(bin_lo) || length > static_cast<std::size_t>(bin_hi)) {
        continue;
      }
      ++report.n_items;
      const std::size_t cut =
          static_cast<std::size_t>(std::floor(fraction * static_cast<double>(length)));
      const std::vector<std::string> head(r.tokens.begin(),
                                          r.tokens.begin() + static_cast<std::ptrdiff_t>(cut));
      const std::vector<std::string> tail(r.tokens.begin() + static_cast<std::ptrdiff_t>(cut),
                                          r.tokens.end());
      if (!head.empty()) ++nonempty_heads;
      if (!tail.empty()) ++nonempty_tails;
      heads.push_back({r.response_id, label,
                       scorer.score(r.response_id, head, static_cast<int>(head.size()))});
      tails.push_back({r.response_id, label,
                       scorer.score(r.response_id, tail, static_cast<int>(tail.size()))});
    }
  }
  if (report.n_items < min_count) {
    throw Error("part-split bin holds " + std::to_string(report.n_items) +
                " responses, fewer than " + std::to_string(min_count));
  }

  if (nonempty_heads > 0) report.auc_head = auc(heads);
  if (nonempty_tails > 0) report.auc_tail = auc(tails);
  if (report.auc_head && report.auc_tail) {
    report.delta = *report.auc_tail - *report.auc_head;
  }
  return report;
}

ThresholdReport detect_thresholds(const GatedCurve& curve, double kappa_min, double kappa_sat,
                                  int smooth_window) {
  if (curve.points.size() < 3) throw Error("threshold detection needs a curve with >= 3 points");
  if (smooth_window < 1 || smooth_window % 2 == 0) {
    throw Error("smooth_window must be odd and positive");
  }
  if (kappa_min <= 0.0 || kappa_min > kappa_sat || kappa_sat > 1.0) {
    throw Error("need 0 < kappa_min <= kappa_sat <= 1");
  }

  ThresholdReport report;
  report.condition = curve.condition;
  report.kappa_min = kappa_min;
  report.kappa_sat = kappa_sat;
  report.smooth_window = smooth_window;

  const std::size_t n = curve.points.size();
  const std::size_t half = static_cast<std::size_t>(smooth_window / 2);
  std::vector<double> smoothed(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += curve.points[j].auc;
    smoothed[i] = sum / static_cast<double>(hi - lo + 1);
  }

  double gain_max = smoothed[0] - 0.5;
  for (double y : smoothed) gain_max = std::max(gain_max, y - 0.5);
  report.auc_max = 0.5 + gain_max;
  if (gain_max <= 0.0) return report;  // at or below chance: thresholds absent

  for (std::size_t i = 0; i < n; ++i) {
    const double gain = smoothed[i] - 0.5;
    if (!report.min_length_words && gain >= kappa_min * gain_max) {
      report.min_length_words = curve.points[i].gate;
      report.auc_at_min = smoothed[i];
    }
    if (!report.saturation_words && gain >= kappa_sat * gain_max) {
      report.saturation_words = curve.points[i].gate;
    }
  }
  return report;
}

namespace {

std::string opt_field(const std::optional<double>& value) {
  return value ? io::fmt_double(*value) : std::string();
}

}  // namespace

std::string curves_to_csv(const std::vector<GatedCurve>& curves) {
  std::ostringstream out;
  out << "condition,unit,gate,gate_seconds,auc,n_items,n_at_or_above,ci_lo,ci_hi\n";
  for (const auto& curve : curves) {
    const char* unit = curve.unit == GateUnit::WORDS ? "words" : "seconds";
    for (const auto& p : curve.points) {
      out << io::csv_field(curve.condition) << ',' << unit << ',' << p.gate << ','
          << io::fmt_double(words_to_seconds(p.gate, curve.rate_wps)) << ','
          << io::fmt_double(p.auc) << ',' << p.n_items << ',' << p.n_at_or_above << ','
          << opt_field(p.ci_lo) << ',' << opt_field(p.ci_hi) << "\n";
    }
  }
  return out.str();
}

std::vector<GatedCurve> curves_from_csv_text(const std::string& text) {
  std::istringstream in(text);
  std::vector<GatedCurve> curves;
  std::map<std::string, std::size_t> index;
  bool have_header = false;
  io::for_each_csv_row(in, [&](const std::vector<std::string>& row, std::size_t line_no) {
    if (!have_header) {
      if (row.empty() || row[0] != "condition") {
        throw Error("curve csv: expected condition,... header");
      }
      have_header = true;
      return;
    }
    if (row.size() < 7) throw Error("curve csv: short row at line " + std::to_string(line_no));
    auto [it, inserted] = index.emplace(row[0], curves.size());
    if (inserted) {
      GatedCurve curve;
      curve.condition = row[0];
      curve.unit = row[1] == "seconds" ? GateUnit::SECONDS : GateUnit::WORDS;
      curves.push_back(std::move(curve));
    }
    try {
      CurvePoint p;
      p.gate = std::stoi(row[2]);
      p.auc = std::stod(row[4]);
      p.n_items = static_cast<std::size_t>(std::stoull(row[5]));
      p.n_at_or_above = static_cast<std::size_t>(std::stoull(row[6]));
      if (row.size() > 7 && !row[7].empty()) p.ci_lo = std::stod(row[7]);
      if (row.size() > 8 && !row[8].empty()) p.ci_hi = std::stod(row[8]);
      curves[it->second].points.push_back(p);
      curves[it->second].stop_gate = std::max(curves[it->second].stop_gate, p.gate);
    } catch (const std::exception&) {
      throw Error("curve csv: bad number at line " + std::to_string(line_no));
    }
  });
  if (curves.empty()) throw Error("curve csv: no data rows");
  return curves;
}

std::string roc_report_to_csv(const RocAtGatesReport& report) {
  std::ostringstream out;
  out << "gate,threshold,fpr,tpr,specificity,sensitivity\n";
  for (const auto& entry : report.rocs) {
    for (const auto& p : entry.curve.points) {
      out << entry.gate << ',' << io::fmt_double(p.threshold) << ',' << io::fmt_double(p.fpr)
          << ',' << io::fmt_double(p.tpr) << ',' << io::fmt_double(1.0 - p.fpr) << ','
          << io::fmt_double(p.tpr) << "\n";
    }
  }
  return out.str();
}

std::string ordering_to_csv(const OrderingHistogram& histogram) {
  std::ostringstream out;
  out << "position,length_rank,fraction\n";
  for (int position = 0; position < histogram.k; ++position) {
    for (int rank = 0; rank < histogram.k; ++rank) {
      out << (position + 1) << ',' << (rank + 1) << ','
          << io::fmt_double(histogram.cell[position][rank]) << "\n";
    }
  }
  return out.str();
}

std::string part_split_to_csv(const PartSplitReport& report) {
  std::ostringstream out;
  out << "bin_low,bin_high,fraction,n_items,auc_head,auc_tail,delta\n";
  out << report.bin_lo << ',' << report.bin_hi << ',' << io::fmt_double(report.fraction) << ','
      << report.n_items << ',' << opt_field(report.auc_head) << ',' << opt_field(report.auc_tail)
      << ',' << opt_field(report.delta) << "\n";
  return out.str();
}

std::string threshold_report_to_json(const ThresholdReport& report) {
  json obj;
  obj["condition"] = report.condition;
  if (report.min_length_words) obj["min_length_words"] = *report.min_length_words;
  else obj["min_length_words"] = nullptr;
  if (report.saturation_words) obj["saturation_words"] = *report.saturation_words;
  else obj["saturation_words"] = nullptr;
  obj["auc_max"] = report.auc_max;
  if (report.auc_at_min) obj["auc_at_min"] = *report.auc_at_min;
  else obj["auc_at_min"] = nullptr;
  obj["kappa_min"] = report.kappa_min;
  obj["kappa_sat"] = report.kappa_sat;
  obj["smooth_window"] = report.smooth_window;
  return obj.dump(2) + "\n";
}

}  // namespace speechlen
