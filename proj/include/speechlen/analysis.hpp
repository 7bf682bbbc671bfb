#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "speechlen/corpus.hpp"
#include "speechlen/gating.hpp"
#include "speechlen/metrics.hpp"
#include "speechlen/scorer.hpp"

namespace speechlen {

struct CurvePoint {
  int gate = 0;  // words
  double auc = 0.5;
  std::size_t n_items = 0;         // constant along a curve: shorter items stay in
  std::size_t n_at_or_above = 0;   // items whose natural length reaches the gate
  std::optional<double> ci_lo;
  std::optional<double> ci_hi;
};

struct GatedCurve {
  std::string condition;  // "response", "session", "first-N=3", "shortest", ...
  GateUnit unit = GateUnit::WORDS;
  double rate_wps = 2.39;  // for the words<->seconds column in CSV output
  int stop_gate = 0;
  std::vector<CurvePoint> points;  // ascending gates, truncated at stop_gate
};

struct CurveOptions {
  bool with_ci = false;
  std::size_t n_resamples = 200;
  std::uint64_t seed = 0;
  double level = 0.95;
};

// Core evaluator shared by every curve analysis: scores each unit's prefixes
// at all gates up to the stop gate, then computes AUC per gate. Item-level
// bootstrap CIs when opts.with_ci; sessions resample as whole sessions
// because a session is one item here.
GatedCurve gated_auc_curve(const std::vector<EvalUnit>& units, const Scorer& scorer,
                           const GateSpec& spec, const std::string& condition,
                           const CurveOptions& opts = {});

// Test-partition responses, gold label taken from the owning session.
GatedCurve response_gated_auc(const Corpus& corpus, const Scorer& scorer, const GateSpec& spec,
                              const CurveOptions& opts = {});

// Test-partition sessions, responses concatenated in position order.
GatedCurve session_gated_auc(const Corpus& corpus, const Scorer& scorer, const GateSpec& spec,
                             const CurveOptions& opts = {});

enum class ProgressiveMode {
  RESTRICT,            // only sessions with >= max_n responses; same set for every N
  PAD_WITH_AVAILABLE,  // all sessions; N-th curve takes min(N, available) responses
};

// One curve per N = 1..max_n over each session's first N responses. The
// default RESTRICT mode keeps the item set identical across N so the curves
// are comparable point by point.
std::vector<GatedCurve> progressive_session_auc(const Corpus& corpus, const Scorer& scorer,
                                                const GateSpec& spec, int max_n,
                                                const CurveOptions& opts = {},
                                                ProgressiveMode mode = ProgressiveMode::RESTRICT);

struct RocAtGate {
  int gate = 0;
  double auc = 0.5;
  RocCurve curve;
};

struct RocAtGatesReport {
  std::vector<RocAtGate> rocs;
  // Clinician-interview reference point reported alongside every ROC for
  // comparison labeling.
  double baseline_specificity = 0.87;
  double baseline_sensitivity = 0.54;
};

// ROC over gated test sessions, one curve per requested gate.
RocAtGatesReport roc_at_gates(const Corpus& corpus, const Scorer& scorer,
                              const std::vector<int>& gates);

struct OrderingHistogram {
  int k = 0;
  std::size_t n_sessions = 0;
  // cell[position][rank], both 0-based internally (reported 1-based); each
  // rank column sums to 1 over positions.
  std::vector<std::vector<double>> cell;
};

// Within sessions of exactly k responses, rank responses by token count
// (rank 1 = shortest, ties to the earlier position) and tally which position
// each rank lands on. Throws when no session has exactly k responses.
OrderingHistogram ordering_histogram(const Corpus& corpus, int k = 4);

// Gated curves over each test session's shortest and longest response
// (ties to the earlier position). Sessions need >= 2 responses.
std::pair<GatedCurve, GatedCurve> extremes_gated_auc(const Corpus& corpus, const Scorer& scorer,
                                                     const GateSpec& spec,
                                                     const CurveOptions& opts = {});

struct PartSplitReport {
  int bin_lo = 0;  // natural-length bin, inclusive bounds
  int bin_hi = 0;
  double fraction = 0.0;  // head = first floor(fraction * length) tokens
  std::size_t n_items = 0;
  std::optional<double> auc_head;  // absent when every head is empty
  std::optional<double> auc_tail;  // absent when every tail is empty
  std::optional<double> delta;     // auc_tail - auc_head when both exist
};

// Splits every test response with natural length in [bin_lo, bin_hi] at
// floor(fraction * length) and scores heads and tails separately. Needs a
// token-based scorer and at least min_count qualifying responses.
PartSplitReport part_split_auc(const Corpus& corpus, const Scorer& scorer, int bin_lo, int bin_hi,
                               double fraction, std::size_t min_count = 30);

struct ThresholdReport {
  std::string condition;
  std::optional<int> min_length_words;
  std::optional<int> saturation_words;
  double auc_max = 0.5;               // peak of the smoothed curve
  std::optional<double> auc_at_min;   // smoothed value at min_length_words
  double kappa_min = 0.5;
  double kappa_sat = 0.95;
  int smooth_window = 3;
};

// Smooths the curve with a centered moving average (window truncated at the
// edges), then reads gain(x) = y(x) - 0.5 against its maximum G:
// min length = first gate with gain >= kappa_min * G, saturation = first gate
// with gain >= kappa_sat * G. Both absent when G <= 0 (scorer at or below
// chance). Needs >= 3 points and odd smooth_window.
ThresholdReport detect_thresholds(const GatedCurve& curve, double kappa_min = 0.5,
                                  double kappa_sat = 0.95, int smooth_window = 3);

// CSV: condition,unit,gate,gate_seconds,auc,n_items,n_at_or_above,ci_lo,ci_hi.
std::string curves_to_csv(const std::vector<GatedCurve>& curves);
// Parses curves_to_csv output (used by threshold detection on saved curves).
std::vector<GatedCurve> curves_from_csv_text(const std::string& text);

// CSV: gate,threshold,fpr,tpr,specificity,sensitivity.
std::string roc_report_to_csv(const RocAtGatesReport& report);
// CSV: position,length_rank,fraction (both indices 1-based).
std::string ordering_to_csv(const OrderingHistogram& histogram);
// CSV: bin_low,bin_high,fraction,n_items,auc_head,auc_tail,delta.
std::string part_split_to_csv(const PartSplitReport& report);

std::string threshold_report_to_json(const ThresholdReport& report);

}  // namespace speechlen
