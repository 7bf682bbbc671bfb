// Command-line front end: one subcommand per analysis, file-in/file-out, a
// run manifest in every output directory. Exit codes: 0 success, 1 data or
// validation failure, 2 usage error.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "speechlen/analysis.hpp"
#include "speechlen/corpus.hpp"
#include "speechlen/error.hpp"
#include "speechlen/gating.hpp"
#include "speechlen/io.hpp"
#include "speechlen/metrics.hpp"
#include "speechlen/policy.hpp"
#include "speechlen/rate.hpp"
#include "speechlen/scorer.hpp"
#include "speechlen/synth.hpp"
#include "speechlen/version.hpp"

namespace sl = speechlen;
using nlohmann::json;

namespace {

// Accumulates everything the manifest needs while a subcommand runs.
struct RunContext {
  std::string command;
  std::string output_dir;  // empty when the subcommand writes nothing
  json config = json::object();
  std::optional<std::uint64_t> seed;
  std::vector<std::string> input_paths;
  std::vector<std::string> output_names;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void note_input(const std::string& path) { input_paths.push_back(path); }

  void write_output(const std::string& name, const std::string& content) {
    sl::io::write_text_file(output_dir + "/" + name, content);
    output_names.push_back(name);
  }

  void write_manifest() {
    if (output_dir.empty()) return;
    json manifest;
    manifest["command"] = command;
    manifest["config"] = config;
    if (seed) manifest["seed"] = *seed;
    else manifest["seed"] = nullptr;
    json inputs = json::array();
    for (const auto& path : input_paths) {
      inputs.push_back({{"path", path}, {"fnv1a64", sl::io::fnv1a64_file(path)}});
    }
    manifest["inputs"] = std::move(inputs);
    manifest["outputs"] = output_names;
    manifest["tool_version"] = sl::kVersion;
    const auto elapsed = std::chrono::steady_clock::now() - start;
    manifest["wall_time_s"] = std::chrono::duration<double>(elapsed).count();
    sl::io::write_text_file(output_dir + "/manifest.json", manifest.dump(2) + "\n");
  }
};

std::string join_command(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i) out += ' ';
    const std::string arg = argv[i];
    if (arg.find(' ') != std::string::npos) out += '"' + arg + '"';
    else out += arg;
  }
  return out;
}

void ensure_output_dir(RunContext& ctx, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw sl::Error("cannot create output directory " + dir + ": " + ec.message());
  ctx.output_dir = dir;
}

sl::CorpusFormat format_for(const std::string& flag, const std::string& path) {
  if (flag == "jsonl") return sl::CorpusFormat::JSONL;
  if (flag == "csv") return sl::CorpusFormat::CSV;
  if (!flag.empty()) throw sl::UsageError("unknown corpus format \"" + flag + "\"");
  return path.size() >= 4 && path.substr(path.size() - 4) == ".csv" ? sl::CorpusFormat::CSV
                                                                    : sl::CorpusFormat::JSONL;
}

sl::Corpus load_corpus(RunContext& ctx, const std::string& path, const std::string& format_flag) {
  ctx.note_input(path);
  return sl::ingest_corpus(path, format_for(format_flag, path));
}

std::vector<int> parse_gate_grid(const std::string& text) {
  int start = 0;
  int stop = 0;
  int step = 0;
  char sep1 = 0;
  char sep2 = 0;
  std::istringstream in(text);
  if (!(in >> start >> sep1 >> stop >> sep2 >> step) || sep1 != ':' || sep2 != ':' ||
      !in.eof() || start < 1 || step < 1 || stop < start) {
    throw sl::UsageError("bad --gates \"" + text + "\": expected start:stop:step");
  }
  return sl::gate_grid(start, stop, step);
}

std::unique_ptr<sl::Scorer> make_scorer(RunContext& ctx, const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw sl::UsageError("bad --scorer \"" + spec + "\": expected lexicon:PATH or table:PATH");
  }
  const std::string kind = spec.substr(0, colon);
  const std::string path = spec.substr(colon + 1);
  ctx.note_input(path);
  if (kind == "lexicon") return std::make_unique<sl::LexiconScorer>(sl::load_lexicon(path));
  if (kind == "table") return std::make_unique<sl::TableScorer>(sl::load_score_table(path));
  throw sl::UsageError("unknown scorer kind \"" + kind + "\" (expected lexicon or table)");
}

json curve_sidecar(const sl::GateSpec& spec, const std::vector<sl::GatedCurve>& curves,
                   const sl::CurveOptions& opts) {
  json sidecar;
  sidecar["gates"] = {{"unit", spec.unit == sl::GateUnit::WORDS ? "words" : "seconds"},
                      {"rate_wps", spec.rate_wps},
                      {"stop_min_count", spec.stop_min_count},
                      {"stop_min_fraction", spec.stop_min_fraction}};
  sidecar["bootstrap"] = {{"enabled", opts.with_ci},
                          {"n_resamples", opts.n_resamples},
                          {"seed", opts.seed},
                          {"level", opts.level}};
  json entries = json::array();
  for (const auto& curve : curves) {
    const sl::ThresholdReport report = sl::detect_thresholds(curve);
    json entry = json::parse(sl::threshold_report_to_json(report));
    entry["stop_gate"] = curve.stop_gate;
    entry["n_items"] = curve.points.empty() ? 0 : curve.points.front().n_items;
    entries.push_back(std::move(entry));
  }
  sidecar["curves"] = std::move(entries);
  return sidecar;
}

// Shared flags for every curve-producing subcommand.
struct CurveFlags {
  std::string input;
  std::string format;
  std::string scorer;
  std::string output_dir;
  std::string gates;
  std::string unit = "words";
  double rate_wps = sl::kDefaultRateWps;
  int stop_min_count = 30;
  double stop_min_fraction = 0.05;
  bool with_ci = false;
  std::size_t resamples = 200;
  std::uint64_t seed = 0;
  double level = 0.95;

  void add_to(CLI::App* cmd, bool needs_scorer = true) {
    cmd->add_option("--input", input, "corpus file")->required();
    cmd->add_option("--format", format, "corpus format: jsonl or csv (default: by extension)");
    if (needs_scorer) {
      cmd->add_option("--scorer", scorer, "scorer: lexicon:PATH or table:PATH")->required();
    }
    cmd->add_option("--output-dir", output_dir, "directory for outputs")->required();
    cmd->add_option("--gates", gates, "word gate grid start:stop:step");
    cmd->add_option("--unit", unit, "gate unit: words or seconds")
        ->check(CLI::IsMember({"words", "seconds"}));
    cmd->add_option("--rate-wps", rate_wps, "words/second for unit conversion");
    cmd->add_option("--stop-min-count", stop_min_count, "min items at/above the stop gate");
    cmd->add_option("--stop-min-fraction", stop_min_fraction, "min fraction at/above the stop gate");
    cmd->add_flag("--ci", with_ci, "bootstrap confidence intervals per point");
    cmd->add_option("--resamples", resamples, "bootstrap resamples (>= 100)");
    cmd->add_option("--seed", seed, "bootstrap seed");
    cmd->add_option("--level", level, "bootstrap confidence level");
  }

  sl::GateSpec gate_spec(const sl::GateSpec& defaults) const {
    sl::GateSpec spec = defaults;
    if (!gates.empty()) spec.gates = parse_gate_grid(gates);
    spec.unit = unit == "seconds" ? sl::GateUnit::SECONDS : sl::GateUnit::WORDS;
    spec.rate_wps = rate_wps;
    spec.stop_min_count = stop_min_count;
    spec.stop_min_fraction = stop_min_fraction;
    return spec;
  }

  sl::CurveOptions curve_options() const {
    sl::CurveOptions opts;
    opts.with_ci = with_ci;
    opts.n_resamples = resamples;
    opts.seed = seed;
    opts.level = level;
    return opts;
  }

  json config_json() const {
    json config;
    config["gates"] = gates.empty() ? "default" : gates;
    config["unit"] = unit;
    config["rate_wps"] = rate_wps;
    config["stop_min_count"] = stop_min_count;
    config["stop_min_fraction"] = stop_min_fraction;
    config["ci"] = with_ci;
    config["resamples"] = resamples;
    config["level"] = level;
    return config;
  }
};

sl::Corpus filter_partition(const sl::Corpus& corpus, const std::string& which) {
  if (which == "all") return corpus;
  const sl::Partition keep = sl::partition_from_string(which);
  sl::Corpus out;
  out.source_path = corpus.source_path;
  out.format_tag = corpus.format_tag;
  for (const auto& s : corpus.sessions) {
    if (s.partition == keep) out.sessions.push_back(s);
  }
  return out;
}

int run_validate(RunContext& ctx, const std::string& input, const std::string& format,
                 const std::string& output_dir) {
  const sl::Corpus corpus = load_corpus(ctx, input, format);
  const sl::ValidationReport report = sl::validate(corpus);

  json doc;
  doc["violations"] = json::array();
  for (const auto& v : report.violations) {
    doc["violations"].push_back({{"code", v.code}, {"message", v.message}});
  }
  doc["warnings"] = json::array();
  for (const auto& w : report.warnings) {
    doc["warnings"].push_back({{"code", w.code}, {"message", w.message}});
  }
  doc["ok"] = report.ok();

  if (!output_dir.empty()) {
    ensure_output_dir(ctx, output_dir);
    ctx.write_output("validation.json", doc.dump(2) + "\n");
    ctx.write_manifest();
  }
  for (const auto& v : report.violations) std::cout << "violation " << v.code << ": " << v.message << "\n";
  for (const auto& w : report.warnings) std::cout << "warning " << w.code << ": " << w.message << "\n";
  std::cout << (report.ok() ? "ok" : "invalid") << ": " << corpus.sessions.size() << " session(s)\n";
  return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gated-length evaluation toolkit for speech-based depression screening"};
  app.set_version_flag("--version", sl::kVersion);
  app.require_subcommand(1);

  RunContext ctx;
  ctx.command = join_command(argc, argv);

  // ---- synth ----
  auto* synth_cmd = app.add_subcommand("synth", "generate a seeded synthetic corpus");
  struct {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string output_dir;
    std::string output_format = "jsonl";
  } synth_args;
  synth_cmd->add_option("--config", synth_args.config_path, "synth config JSON");
  synth_cmd->add_option("--seed", synth_args.seed, "override the config seed");
  synth_cmd->add_option("--output-dir", synth_args.output_dir, "directory for outputs")->required();
  synth_cmd->add_option("--format", synth_args.output_format, "corpus output format")
      ->check(CLI::IsMember({"jsonl", "csv"}));

  // ---- ingest ----
  auto* ingest_cmd = app.add_subcommand("ingest", "read a corpus and rewrite it normalized");
  struct {
    std::string input;
    std::string format;
    std::string output_dir;
    std::string output_format = "jsonl";
  } ingest_args;
  ingest_cmd->add_option("--input", ingest_args.input, "corpus file")->required();
  ingest_cmd->add_option("--format", ingest_args.format, "input format: jsonl or csv");
  ingest_cmd->add_option("--output-dir", ingest_args.output_dir, "directory for outputs")->required();
  ingest_cmd->add_option("--output-format", ingest_args.output_format, "output format")
      ->check(CLI::IsMember({"jsonl", "csv"}));

  // ---- validate ----
  auto* validate_cmd = app.add_subcommand("validate", "check corpus invariants");
  struct {
    std::string input;
    std::string format;
    std::string output_dir;
  } validate_args;
  validate_cmd->add_option("--input", validate_args.input, "corpus file")->required();
  validate_cmd->add_option("--format", validate_args.format, "corpus format");
  validate_cmd->add_option("--output-dir", validate_args.output_dir, "directory for the report");

  // ---- stats ----
  auto* stats_cmd = app.add_subcommand("stats", "descriptive statistics by partition and class");
  struct {
    std::string input;
    std::string format;
    std::string output_dir;
    int bin_width = 25;
  } stats_args;
  stats_cmd->add_option("--input", stats_args.input, "corpus file")->required();
  stats_cmd->add_option("--format", stats_args.format, "corpus format");
  stats_cmd->add_option("--output-dir", stats_args.output_dir, "directory for outputs")->required();
  stats_cmd->add_option("--bin-width", stats_args.bin_width, "histogram bin width in words");

  // ---- rate ----
  auto* rate_cmd = app.add_subcommand("rate", "speaking-rate estimates");
  struct {
    std::string input;
    std::string format;
    std::string output_dir;
    int bin_width = 25;
    std::size_t min_bin_count = 30;
  } rate_args;
  rate_cmd->add_option("--input", rate_args.input, "corpus file")->required();
  rate_cmd->add_option("--format", rate_args.format, "corpus format");
  rate_cmd->add_option("--output-dir", rate_args.output_dir, "directory for outputs")->required();
  rate_cmd->add_option("--bin-width", rate_args.bin_width, "length bin width in words");
  rate_cmd->add_option("--min-bin-count", rate_args.min_bin_count, "omit bins below this count");

  // ---- curve ----
  auto* curve_cmd = app.add_subcommand("curve", "gated AUC curve for responses or sessions");
  std::string curve_kind;
  CurveFlags curve_flags;
  curve_cmd->add_option("kind", curve_kind, "response or session")
      ->required()
      ->check(CLI::IsMember({"response", "session"}));
  curve_flags.add_to(curve_cmd);

  // ---- progressive ----
  auto* prog_cmd = app.add_subcommand("progressive", "session curves over the first N responses");
  CurveFlags prog_flags;
  int prog_max_n = 4;
  std::string prog_mode = "restrict";
  prog_flags.add_to(prog_cmd);
  prog_cmd->add_option("--max-n", prog_max_n, "largest N");
  prog_cmd->add_option("--mode", prog_mode, "restrict or pad")
      ->check(CLI::IsMember({"restrict", "pad"}));

  // ---- roc ----
  auto* roc_cmd = app.add_subcommand("roc", "ROC per gate over gated sessions");
  struct {
    std::string input;
    std::string format;
    std::string scorer;
    std::string output_dir;
    std::string gates;
  } roc_args;
  roc_cmd->add_option("--input", roc_args.input, "corpus file")->required();
  roc_cmd->add_option("--format", roc_args.format, "corpus format");
  roc_cmd->add_option("--scorer", roc_args.scorer, "scorer: lexicon:PATH or table:PATH")->required();
  roc_cmd->add_option("--output-dir", roc_args.output_dir, "directory for outputs")->required();
  roc_cmd->add_option("--gates", roc_args.gates, "word gate grid start:stop:step")->required();

  // ---- ordering ----
  auto* ordering_cmd = app.add_subcommand("ordering", "within-session length-rank histogram");
  struct {
    std::string input;
    std::string format;
    std::string output_dir;
    int k = 4;
    std::string partition = "all";
  } ordering_args;
  ordering_cmd->add_option("--input", ordering_args.input, "corpus file")->required();
  ordering_cmd->add_option("--format", ordering_args.format, "corpus format");
  ordering_cmd->add_option("--output-dir", ordering_args.output_dir, "directory for outputs")->required();
  ordering_cmd->add_option("--k", ordering_args.k, "responses per session");
  ordering_cmd->add_option("--partition", ordering_args.partition, "all, train, or test")
      ->check(CLI::IsMember({"all", "train", "test"}));

  // ---- extremes ----
  auto* extremes_cmd = app.add_subcommand("extremes",
                                          "curves over each session's shortest and longest response");
  CurveFlags extremes_flags;
  extremes_flags.add_to(extremes_cmd);

  // ---- partsplit ----
  auto* partsplit_cmd = app.add_subcommand("partsplit", "head-versus-tail AUC within a length bin");
  struct {
    std::string input;
    std::string format;
    std::string scorer;
    std::string output_dir;
    int bin_low = 0;
    int bin_high = 0;
    double fraction = 0.6;
    std::size_t min_count = 30;
  } partsplit_args;
  partsplit_cmd->add_option("--input", partsplit_args.input, "corpus file")->required();
  partsplit_cmd->add_option("--format", partsplit_args.format, "corpus format");
  partsplit_cmd->add_option("--scorer", partsplit_args.scorer, "scorer: lexicon:PATH")->required();
  partsplit_cmd->add_option("--output-dir", partsplit_args.output_dir, "directory for outputs")->required();
  partsplit_cmd->add_option("--bin-low", partsplit_args.bin_low, "bin lower bound, words")->required();
  partsplit_cmd->add_option("--bin-high", partsplit_args.bin_high, "bin upper bound, words")->required();
  partsplit_cmd->add_option("--fraction", partsplit_args.fraction, "head fraction of each response");
  partsplit_cmd->add_option("--min-count", partsplit_args.min_count, "minimum responses in the bin");

  // ---- thresholds ----
  auto* thresholds_cmd = app.add_subcommand("thresholds", "detect min/saturation lengths on a saved curve");
  struct {
    std::string curve_path;
    std::string condition;
    std::string output_dir;
    double kappa_min = 0.5;
    double kappa_sat = 0.95;
    int smooth_window = 3;
  } thresholds_args;
  thresholds_cmd->add_option("--curve", thresholds_args.curve_path, "curve CSV from a curve run")->required();
  thresholds_cmd->add_option("--condition", thresholds_args.condition,
                             "only this condition (default: every condition in the file)");
  thresholds_cmd->add_option("--output-dir", thresholds_args.output_dir, "directory for outputs")->required();
  thresholds_cmd->add_option("--kappa-min", thresholds_args.kappa_min, "gain fraction for min length");
  thresholds_cmd->add_option("--kappa-sat", thresholds_args.kappa_sat, "gain fraction for saturation");
  thresholds_cmd->add_option("--smooth-window", thresholds_args.smooth_window, "moving-average window (odd)");

  // ---- train-lexicon ----
  auto* train_cmd = app.add_subcommand("train-lexicon", "train the log-odds lexicon on the train split");
  struct {
    std::string input;
    std::string format;
    std::string output_dir;
    double alpha = 1.0;
    std::string norm = "sqrt-mean";
    std::size_t max_sessions = 0;  // 0 = all train sessions
  } train_args;
  train_cmd->add_option("--input", train_args.input, "corpus file")->required();
  train_cmd->add_option("--format", train_args.format, "corpus format");
  train_cmd->add_option("--output-dir", train_args.output_dir, "directory for outputs")->required();
  train_cmd->add_option("--alpha", train_args.alpha, "additive smoothing");
  train_cmd->add_option("--norm", train_args.norm, "length normalization: sum, mean, sqrt-mean");
  train_cmd->add_option("--max-sessions", train_args.max_sessions,
                        "train on only the first N train sessions (0 = all)");

  // ---- score ----
  auto* score_cmd = app.add_subcommand("score", "emit a score table for items at gates");
  struct {
    std::string input;
    std::string format;
    std::string scorer;
    std::string output_dir;
    std::string unit = "session";
    std::string gates;
    std::string partition = "test";
  } score_args;
  score_cmd->add_option("--input", score_args.input, "corpus file")->required();
  score_cmd->add_option("--format", score_args.format, "corpus format");
  score_cmd->add_option("--scorer", score_args.scorer, "scorer: lexicon:PATH or table:PATH")->required();
  score_cmd->add_option("--output-dir", score_args.output_dir, "directory for outputs")->required();
  score_cmd->add_option("--unit", score_args.unit, "response or session items")
      ->check(CLI::IsMember({"response", "session"}));
  score_cmd->add_option("--gates", score_args.gates,
                        "score at these word gates instead of natural length");
  score_cmd->add_option("--partition", score_args.partition, "all, train, or test")
      ->check(CLI::IsMember({"all", "train", "test"}));

  // ---- policy-sim ----
  auto* policy_cmd = app.add_subcommand("policy-sim", "replay recorded sessions against the policy");
  struct {
    std::string input;
    std::string format;
    std::string scorer;
    std::string config_path;
    std::string preset = "default";
    std::string output_dir;
    std::string partition = "test";
    std::string trace = "changes";
  } policy_args;
  policy_cmd->add_option("--input", policy_args.input, "corpus file")->required();
  policy_cmd->add_option("--format", policy_args.format, "corpus format");
  policy_cmd->add_option("--scorer", policy_args.scorer, "scorer: lexicon:PATH")->required();
  policy_cmd->add_option("--config", policy_args.config_path, "policy config JSON");
  policy_cmd->add_option("--preset", policy_args.preset, "default or system1")
      ->check(CLI::IsMember({"default", "system1"}));
  policy_cmd->add_option("--output-dir", policy_args.output_dir, "directory for outputs")->required();
  policy_cmd->add_option("--partition", policy_args.partition, "all, train, or test")
      ->check(CLI::IsMember({"all", "train", "test"}));
  policy_cmd->add_option("--trace", policy_args.trace,
                         "trace detail: full (every word), changes, none")
      ->check(CLI::IsMember({"full", "changes", "none"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth_cmd->parsed()) {
      sl::SynthConfig config;
      if (!synth_args.config_path.empty()) {
        try {
          config = sl::synth_config_from_json_text(sl::io::read_text_file(synth_args.config_path));
        } catch (const sl::Error& e) {
          throw sl::UsageError(e.what());
        }
        ctx.note_input(synth_args.config_path);
      }
      if (synth_args.seed) config.seed = *synth_args.seed;
      ensure_output_dir(ctx, synth_args.output_dir);
      ctx.seed = config.seed;
      ctx.config = json::parse(sl::synth_config_to_json(config));

      const auto [corpus, truth] = sl::generate(config);
      const bool csv = synth_args.output_format == "csv";
      const std::string corpus_name = csv ? "corpus.csv" : "corpus.jsonl";
      sl::write_corpus(corpus, synth_args.output_dir + "/" + corpus_name,
                       csv ? sl::CorpusFormat::CSV : sl::CorpusFormat::JSONL);
      ctx.output_names.push_back(corpus_name);
      ctx.write_output("truth.json", sl::truth_to_json(config, truth));
      ctx.write_manifest();
      std::cout << "generated " << corpus.sessions.size() << " session(s)\n";
      return 0;
    }

    if (ingest_cmd->parsed()) {
      const sl::Corpus corpus = load_corpus(ctx, ingest_args.input, ingest_args.format);
      ensure_output_dir(ctx, ingest_args.output_dir);
      ctx.config = {{"output_format", ingest_args.output_format}};
      const bool csv = ingest_args.output_format == "csv";
      const std::string name = csv ? "corpus.csv" : "corpus.jsonl";
      sl::write_corpus(corpus, ingest_args.output_dir + "/" + name,
                       csv ? sl::CorpusFormat::CSV : sl::CorpusFormat::JSONL);
      ctx.output_names.push_back(name);
      ctx.write_manifest();
      std::size_t responses = 0;
      for (const auto& s : corpus.sessions) responses += s.responses.size();
      std::cout << "ingested " << corpus.sessions.size() << " session(s), " << responses
                << " response(s)\n";
      return 0;
    }

    if (validate_cmd->parsed()) {
      return run_validate(ctx, validate_args.input, validate_args.format,
                          validate_args.output_dir);
    }

    if (stats_cmd->parsed()) {
      const sl::Corpus corpus = load_corpus(ctx, stats_args.input, stats_args.format);
      ensure_output_dir(ctx, stats_args.output_dir);
      ctx.config = {{"bin_width", stats_args.bin_width}};
      ctx.write_output("stats.json", sl::stats_to_json(sl::corpus_stats(corpus, stats_args.bin_width)));
      ctx.write_manifest();
      return 0;
    }

    if (rate_cmd->parsed()) {
      const sl::Corpus corpus = load_corpus(ctx, rate_args.input, rate_args.format);
      ensure_output_dir(ctx, rate_args.output_dir);
      ctx.config = {{"bin_width", rate_args.bin_width}, {"min_bin_count", rate_args.min_bin_count}};
      const sl::RateStats stats =
          sl::rate_by_class_and_length(corpus, rate_args.bin_width, rate_args.min_bin_count);

      std::ostringstream csv;
      csv << "class,bin_low,bin_high,mean_wpm,count\n";
      for (const auto& bin : stats.bins) {
        csv << sl::to_string(bin.label) << ',' << bin.bin_low << ',' << bin.bin_high << ','
            << sl::io::fmt_double(bin.mean_wpm) << ',' << bin.count << "\n";
      }
      ctx.write_output("rate_bins.csv", csv.str());

      json summary;
      summary["global_wps"] = stats.global_wps;
      summary["global_wpm"] = stats.global_wpm;
      if (stats.class_gap_wpm) summary["class_gap_wpm"] = *stats.class_gap_wpm;
      else summary["class_gap_wpm"] = nullptr;
      ctx.write_output("rate_summary.json", summary.dump(2) + "\n");
      ctx.write_manifest();
      return 0;
    }

    if (curve_cmd->parsed()) {
      const sl::Corpus corpus = load_corpus(ctx, curve_flags.input, curve_flags.format);
      const auto scorer = make_scorer(ctx, curve_flags.scorer);
      ensure_output_dir(ctx, curve_flags.output_dir);
      ctx.seed = curve_flags.seed;
      ctx.config = curve_flags.config_json();
      ctx.config["kind"] = curve_kind;

      const sl::GateSpec spec = curve_flags.gate_spec(curve_kind == "response"
                                                          ? sl::default_response_gates()
                                                          : sl::default_session_gates());
      const sl::CurveOptions opts = curve_flags.curve_options();
      const sl::GatedCurve curve = curve_kind == "response"
                                       ? sl::response_gated_auc(corpus, *scorer, spec, opts)
                                       : sl::session_gated_auc(corpus, *scorer, spec, opts);
      ctx.write_output("curve.csv", sl::curves_to_csv({curve}));
      ctx.write_output("curve.json", curve_sidecar(spec, {curve}, opts).dump(2) + "\n");
      ctx.write_manifest();
      return 0;
    }

    if (prog_cmd->parsed()) {
      const sl::Corpus corpus = load_corpus(ctx, prog_flags.input, prog_flags.format);
      const auto scorer = make_scorer(ctx, prog_flags.scorer);
      ensure_output_dir(ctx, prog_flags.output_dir);
      ctx.seed = prog_flags.seed;
      ctx.config = prog_flags.config_json();
      ctx.config["max_n"] = prog_max_n;
      ctx.config["mode"] = prog_mode;

      const sl::GateSpec spec = prog_flags.gate_spec(sl::default_session_gates());
      const auto curves = sl::progressive_session_auc(
          corpus, *scorer, spec, prog_max_n, prog_flags.curve_options(),
          prog_mode == "pad" ? sl::ProgressiveMode::PAD_WITH_AVAILABLE
                             : sl::ProgressiveMode::RESTRICT);
      ctx.write_output("progressive.csv", sl::curves_to_csv(curves));
      ctx.write_output("progressive.json",
                       curve_sidecar(spec, curves, prog_flags.curve_options()).dump(2) + "\n");
      ctx.write_manifest();
      return 0;
    }

    if (roc_cmd->parsed()) {
      const sl::Corpus corpus = load_corpus(ctx, roc_args.input, roc_args.format);
      const auto scorer = make_scorer(ctx, roc_args.scorer);
      ensure_output_dir(ctx, roc_args.output_dir);
      ctx.config = {{"gates", roc_args.gates}};

      const auto report = sl::roc_at_gates(corpus, *scorer, parse_gate_grid(roc_args.gates));
      ctx.write_output("roc.csv", sl::roc_report_to_csv(report));
      json sidecar;
      sidecar["baseline_point"] = {{"specificity", report.baseline_specificity},
                                   {"sensitivity", report.baseline_sensitivity}};
      json per_gate = json::array();
      for (const auto& entry : report.rocs) {
        per_gate.push_back({{"gate", entry.gate}, {"auc", entry.auc}});
      }
      sidecar["gates"] = std::move(per_gate);
      ctx.write_output("roc.json", sidecar.dump(2) + "\n");
      ctx.write_manifest();
      return 0;
    }

    if (ordering_cmd->parsed()) {
      const sl::Corpus corpus = filter_partition(
          load_corpus(ctx, ordering_args.input, ordering_args.format), ordering_args.partition);
      ensure_output_dir(ctx, ordering_args.output_dir);
      ctx.config = {{"k", ordering_args.k}, {"partition", ordering_args.partition}};
      const auto histogram = sl::ordering_histogram(corpus, ordering_args.k);
      ctx.write_output("ordering.csv", sl::ordering_to_csv(histogram));
      json sidecar;
      sidecar["k"] = histogram.k;
      sidecar["n_sessions"] = histogram.n_sessions;
      ctx.write_output("ordering.json", sidecar.dump(2) + "\n");
      ctx.write_manifest();
      return 0;
    }

    if (extremes_cmd->parsed()) {
      const sl::Corpus corpus = load_corpus(ctx, extremes_flags.input, extremes_flags.format);
      const auto scorer = make_scorer(ctx, extremes_flags.scorer);
      ensure_output_dir(ctx, extremes_flags.output_dir);
      ctx.seed = extremes_flags.seed;
      ctx.config = extremes_flags.config_json();

      const sl::GateSpec spec = extremes_flags.gate_spec(sl::default_response_gates());
      const auto [shortest, longest] =
          sl::extremes_gated_auc(corpus, *scorer, spec, extremes_flags.curve_options());
      ctx.write_output("extremes.csv", sl::curves_to_csv({shortest, longest}));
      ctx.write_output("extremes.json",
                       curve_sidecar(spec, {shortest, longest}, extremes_flags.curve_options())
                               .dump(2) +
                           "\n");
      ctx.write_manifest();
      return 0;
    }

    if (partsplit_cmd->parsed()) {
      const sl::Corpus corpus = load_corpus(ctx, partsplit_args.input, partsplit_args.format);
      const auto scorer = make_scorer(ctx, partsplit_args.scorer);
      ensure_output_dir(ctx, partsplit_args.output_dir);
      ctx.config = {{"bin_low", partsplit_args.bin_low},
                    {"bin_high", partsplit_args.bin_high},
                    {"fraction", partsplit_args.fraction},
                    {"min_count", partsplit_args.min_count}};
      const auto report =
          sl::part_split_auc(corpus, *scorer, partsplit_args.bin_low, partsplit_args.bin_high,
                             partsplit_args.fraction, partsplit_args.min_count);
      ctx.write_output("partsplit.csv", sl::part_split_to_csv(report));
      ctx.write_manifest();
      return 0;
    }

    if (thresholds_cmd->parsed()) {
      ctx.note_input(thresholds_args.curve_path);
      const auto curves =
          sl::curves_from_csv_text(sl::io::read_text_file(thresholds_args.curve_path));
      ensure_output_dir(ctx, thresholds_args.output_dir);
      ctx.config = {{"condition", thresholds_args.condition.empty() ? "all" : thresholds_args.condition},
                    {"kappa_min", thresholds_args.kappa_min},
                    {"kappa_sat", thresholds_args.kappa_sat},
                    {"smooth_window", thresholds_args.smooth_window}};

      json reports = json::array();
      bool matched = false;
      for (const auto& curve : curves) {
        if (!thresholds_args.condition.empty() && curve.condition != thresholds_args.condition) {
          continue;
        }
        matched = true;
        const auto report =
            sl::detect_thresholds(curve, thresholds_args.kappa_min, thresholds_args.kappa_sat,
                                  thresholds_args.smooth_window);
        reports.push_back(json::parse(sl::threshold_report_to_json(report)));
      }
      if (!matched) {
        throw sl::Error("condition \"" + thresholds_args.condition + "\" not present in " +
                        thresholds_args.curve_path);
      }
      json doc;
      doc["reports"] = std::move(reports);
      ctx.write_output("thresholds.json", doc.dump(2) + "\n");
      ctx.write_manifest();
      return 0;
    }

    if (train_cmd->parsed()) {
      const sl::Corpus corpus = load_corpus(ctx, train_args.input, train_args.format);
      ensure_output_dir(ctx, train_args.output_dir);
      ctx.config = {{"alpha", train_args.alpha},
                    {"norm", train_args.norm},
                    {"max_sessions", train_args.max_sessions}};

      std::vector<sl::Session> train_sessions;
      for (const auto& s : corpus.sessions) {
        if (s.partition != sl::Partition::TRAIN) continue;
        if (train_args.max_sessions > 0 && train_sessions.size() >= train_args.max_sessions) break;
        train_sessions.push_back(s);
      }
      const sl::Lexicon lexicon = sl::train_lexicon(
          train_sessions, train_args.alpha, sl::length_norm_from_string(train_args.norm));
      sl::save_lexicon(lexicon, train_args.output_dir + "/lexicon.csv");
      ctx.output_names.push_back("lexicon.csv");
      ctx.write_manifest();
      std::cout << "trained on " << train_sessions.size() << " session(s), vocabulary "
                << lexicon.weights.size() << "\n";
      return 0;
    }

    if (score_cmd->parsed()) {
      const sl::Corpus corpus = filter_partition(
          load_corpus(ctx, score_args.input, score_args.format), score_args.partition);
      const auto scorer = make_scorer(ctx, score_args.scorer);
      ensure_output_dir(ctx, score_args.output_dir);
      ctx.config = {{"unit", score_args.unit},
                    {"partition", score_args.partition},
                    {"gates", score_args.gates.empty() ? "natural" : score_args.gates}};

      const auto units = score_args.unit == "response"
                             ? sl::response_units(corpus, sl::Partition::TEST)
                             : sl::session_units(corpus, sl::Partition::TEST);
      // When --partition selects train or all, rebuild over that filter.
      std::vector<sl::EvalUnit> items;
      if (score_args.partition == "test") {
        items = units;
      } else {
        for (const auto& partition : {sl::Partition::TRAIN, sl::Partition::TEST}) {
          const auto part_units = score_args.unit == "response"
                                      ? sl::response_units(corpus, partition)
                                      : sl::session_units(corpus, partition);
          items.insert(items.end(), part_units.begin(), part_units.end());
        }
      }

      sl::ScoreTable table;
      if (score_args.gates.empty()) {
        for (const auto& item : items) {
          const int natural = static_cast<int>(item.tokens.size());
          table.rows[item.item_id].emplace_back(
              natural, scorer->score(item.item_id, item.tokens, natural));
        }
      } else {
        const auto gates = parse_gate_grid(score_args.gates);
        for (const auto& item : items) {
          const auto scores = scorer->score_prefixes(item.item_id, item.tokens, gates);
          auto& row = table.rows[item.item_id];
          for (std::size_t gi = 0; gi < gates.size(); ++gi) {
            row.emplace_back(gates[gi], scores[gi]);
          }
        }
      }
      sl::save_score_table(table, score_args.output_dir + "/scores.csv");
      ctx.output_names.push_back("scores.csv");
      ctx.write_manifest();
      return 0;
    }

    if (policy_cmd->parsed()) {
      const sl::Corpus corpus = load_corpus(ctx, policy_args.input, policy_args.format);
      const auto scorer = make_scorer(ctx, policy_args.scorer);

      sl::PolicyConfig config = policy_args.preset == "system1"
                                    ? sl::PolicyConfig::system1_preset()
                                    : sl::PolicyConfig();
      if (!policy_args.config_path.empty()) {
        try {
          config = sl::policy_config_from_json_text(
              sl::io::read_text_file(policy_args.config_path));
        } catch (const sl::Error& e) {
          throw sl::UsageError(e.what());
        }
        ctx.note_input(policy_args.config_path);
      }
      ensure_output_dir(ctx, policy_args.output_dir);
      ctx.config = json::parse(sl::policy_config_to_json(config));
      ctx.config["partition"] = policy_args.partition;
      ctx.config["trace"] = policy_args.trace;

      std::ostringstream trace_out;
      std::ostringstream summary;
      summary << "session_id,full_words,elicited_words,elicited_fraction,score_full,score_elicited\n";

      std::vector<sl::ScoredSample> full_samples;
      std::vector<sl::ScoredSample> elicited_samples;
      double total_full = 0.0;
      double total_elicited = 0.0;
      std::size_t n_sessions = 0;

      for (const auto& session : corpus.sessions) {
        if (policy_args.partition != "all" &&
            session.partition != sl::partition_from_string(policy_args.partition)) {
          continue;
        }
        ++n_sessions;
        const sl::ReplayResult result = sl::simulate_replay(session, config, *scorer);

        if (policy_args.trace != "none") {
          for (const auto& step : result.trace) {
            if (policy_args.trace == "changes" &&
                step.decision == sl::Decision::CONTINUE_LISTENING &&
                step.state.last_event == sl::PolicyEvent::WORDS_UPDATED) {
              continue;
            }
            json line;
            line["session_id"] = session.session_id;
            line["event_index"] = step.event_index;
            line["question_index"] = step.state.question_index;
            line["current_response_words"] = step.state.current_response_words;
            line["session_total_words"] = step.state.session_total_words;
            line["last_event"] = sl::to_string(step.state.last_event);
            line["decision"] = sl::to_string(step.decision);
            line["reason"] = step.reason;
            trace_out << line.dump() << "\n";
          }
        }

        const double fraction =
            result.full_words == 0
                ? 0.0
                : static_cast<double>(result.elicited_words) / static_cast<double>(result.full_words);
        summary << sl::io::csv_field(session.session_id) << ',' << result.full_words << ','
                << result.elicited_words << ',' << sl::io::fmt_double(fraction) << ','
                << sl::io::fmt_double(result.score_full) << ','
                << sl::io::fmt_double(result.score_elicited) << "\n";

        full_samples.push_back({session.session_id, session.label(), result.score_full});
        elicited_samples.push_back({session.session_id, session.label(), result.score_elicited});
        total_full += static_cast<double>(result.full_words);
        total_elicited += static_cast<double>(result.elicited_words);
      }
      if (n_sessions == 0) throw sl::Error("no sessions in the requested partition");

      if (policy_args.trace != "none") ctx.write_output("replay_trace.jsonl", trace_out.str());
      ctx.write_output("replay_summary.csv", summary.str());

      json aggregate;
      aggregate["n_sessions"] = n_sessions;
      try {
        aggregate["auc_full"] = sl::auc(full_samples);
        aggregate["auc_elicited"] = sl::auc(elicited_samples);
      } catch (const sl::Error&) {
        aggregate["auc_full"] = nullptr;  // single-class partition
        aggregate["auc_elicited"] = nullptr;
      }
      aggregate["words_fraction"] = total_full == 0.0 ? 0.0 : total_elicited / total_full;
      ctx.write_output("replay_aggregate.json", aggregate.dump(2) + "\n");
      ctx.write_manifest();
      return 0;
    }

    throw sl::UsageError("no subcommand selected");
  } catch (const sl::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const sl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
