#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace speechlen {

// Binary gold label derived from the PHQ-8 score; use map_phq_to_class, never
// construct from anything else.
enum class ClassLabel { DEP_NEG, DEP_POS };

enum class Partition { TRAIN, TEST };

enum class CorpusFormat { JSONL, CSV };

const char* to_string(ClassLabel label);      // "+dep" / "-dep"
const char* to_string(Partition partition);   // "train" / "test"
Partition partition_from_string(const std::string& s);

// One spoken answer to one question.
struct Response {
  std::string response_id;
  std::string session_id;
  int position = 0;  // 0-based order within the session
  std::vector<std::string> tokens;
  std::optional<double> duration_s;
};

// Ordered responses sharing one gold PHQ-8 score. The session, not the
// response, is the unit of labeling.
struct Session {
  std::string session_id;
  std::string speaker_id;
  int phq8 = 0;
  Partition partition = Partition::TRAIN;
  std::vector<Response> responses;  // sorted by position

  ClassLabel label() const;
  std::size_t total_words() const;
};

struct Corpus {
  std::vector<Session> sessions;  // input order preserved
  std::string source_path;
  std::string format_tag;  // "jsonl", "csv", or "synth"
};

// DEP_POS iff phq8 >= 10. Throws on scores outside [0, 24].
ClassLabel map_phq_to_class(int phq8);

// Split on runs of whitespace, lowercase, drop empties. No other
// normalization; "word" means whatever this yields.
std::vector<std::string> tokenize(const std::string& transcript);

// Reads one response record per JSONL line / CSV row and groups them into
// sessions. Session-level fields are repeated on every record and must agree.
// Throws speechlen::Error with the offending line number on parse errors,
// duplicate response_ids, conflicting session fields, or out-of-range phq8.
Corpus ingest_corpus(const std::string& path, CorpusFormat format);

// Inverse of ingest for well-formed corpora: ingest(write(c)) reproduces the
// token sequences exactly.
void write_corpus(const Corpus& corpus, const std::string& path, CorpusFormat format);

struct Violation {
  std::string code;       // stable machine-readable id, e.g. "speaker_overlap"
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<Violation> warnings;  // currently only missing durations
  bool ok() const { return violations.empty(); }
};

// Pure check; never mutates and repeated calls give identical reports.
ValidationReport validate(const Corpus& corpus);

// Descriptive statistics for one (partition, class) cell.
struct GroupStats {
  Partition partition = Partition::TRAIN;
  ClassLabel label = ClassLabel::DEP_NEG;
  std::size_t n_sessions = 0;
  std::size_t n_responses = 0;
  std::size_t n_words = 0;
  double prior = 0.0;  // session share of this class within its partition
  double mean_responses_per_session = 0.0;
  double mean_response_words = 0.0;
  // Response word-count histogram: (bin_low, count), bin width from CorpusStats.
  std::vector<std::pair<int, std::size_t>> histogram;
  // Empirical CDF over distinct response lengths: (length, cumulative fraction).
  // Nondecreasing, last fraction == 1 when the group is nonempty.
  std::vector<std::pair<std::size_t, double>> cdf;
};

struct CorpusStats {
  int bin_width = 25;
  std::vector<GroupStats> groups;  // fixed order: train/-dep, train/+dep, test/-dep, test/+dep
  std::size_t total_sessions = 0;
  std::size_t total_responses = 0;
};

CorpusStats corpus_stats(const Corpus& corpus, int bin_width = 25);

// JSON document mirroring CorpusStats, deterministic key and array order.
std::string stats_to_json(const CorpusStats& stats);

}  // namespace speechlen
