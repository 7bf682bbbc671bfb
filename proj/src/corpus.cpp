#include "speechlen/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "speechlen/error.hpp"
#include "speechlen/io.hpp"

namespace speechlen {

using nlohmann::json;

const char* to_string(ClassLabel label) {
  return label == ClassLabel::DEP_POS ? "+dep" : "-dep";
}

const char* to_string(Partition partition) {
  return partition == Partition::TRAIN ? "train" : "test";
}

Partition partition_from_string(const std::string& s) {
  if (s == "train") return Partition::TRAIN;
  if (s == "test") return Partition::TEST;
  throw Error("unknown partition \"" + s + "\" (expected \"train\" or \"test\")");
}

ClassLabel Session::label() const { return map_phq_to_class(phq8); }

std::size_t Session::total_words() const {
  std::size_t n = 0;
  for (const auto& r : responses) n += r.tokens.size();
  return n;
}

ClassLabel map_phq_to_class(int phq8) {
  if (phq8 < 0 || phq8 > 24) {
    throw Error("phq8 score " + std::to_string(phq8) + " outside [0, 24]");
  }
  return phq8 >= 10 ? ClassLabel::DEP_POS : ClassLabel::DEP_NEG;
}

std::vector<std::string> tokenize(const std::string& transcript) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : transcript) {
    if (std::isspace(c)) {
      if (!current.empty()) {
        tokens.push_back(current);
        current.clear();
      }
    } else {
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!current.empty()) tokens.push_back(current);
  return tokens;
}

namespace {

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

// One flat input record; session fields repeat on every row.
struct RawRecord {
  std::string session_id;
  std::string speaker_id;
  int position = 0;
  std::string transcript;
  std::optional<double> duration_s;
  int phq8 = 0;
  Partition partition = Partition::TRAIN;
  std::string response_id;
  std::size_t line_no = 0;
};

Corpus assemble(std::vector<RawRecord> records, const std::string& path,
                const std::string& format_tag) {
  Corpus corpus;
  corpus.source_path = path;
  corpus.format_tag = format_tag;
  std::unordered_map<std::string, std::size_t> session_index;
  std::unordered_set<std::string> response_ids;

  for (auto& rec : records) {
    const std::string where = path + ":" + std::to_string(rec.line_no);
    if (rec.phq8 < 0 || rec.phq8 > 24) {
      throw Error(where + ": phq8 score " + std::to_string(rec.phq8) + " outside [0, 24]");
    }
    if (rec.response_id.empty()) {
      rec.response_id = rec.session_id + "#" + std::to_string(rec.position);
    }
    if (!response_ids.insert(rec.response_id).second) {
      throw Error(where + ": duplicate response_id \"" + rec.response_id + "\"");
    }

    auto [it, inserted] = session_index.emplace(rec.session_id, corpus.sessions.size());
    if (inserted) {
      Session s;
      s.session_id = rec.session_id;
      s.speaker_id = rec.speaker_id;
      s.phq8 = rec.phq8;
      s.partition = rec.partition;
      corpus.sessions.push_back(std::move(s));
    } else {
      const Session& s = corpus.sessions[it->second];
      if (s.speaker_id != rec.speaker_id || s.phq8 != rec.phq8 || s.partition != rec.partition) {
        throw Error(where + ": conflicting session field for session \"" + rec.session_id + "\"");
      }
    }

    Response r;
    r.response_id = std::move(rec.response_id);
    r.session_id = rec.session_id;
    r.position = rec.position;
    r.tokens = tokenize(rec.transcript);
    r.duration_s = rec.duration_s;
    corpus.sessions[it->second].responses.push_back(std::move(r));
  }

  for (auto& session : corpus.sessions) {
    std::stable_sort(session.responses.begin(), session.responses.end(),
                     [](const Response& a, const Response& b) { return a.position < b.position; });
  }
  return corpus;
}

std::vector<RawRecord> read_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::vector<RawRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(where + ": parse error: " + e.what());
    }
    try {
      RawRecord rec;
      rec.line_no = line_no;
      rec.session_id = obj.at("session_id").get<std::string>();
      rec.speaker_id = obj.at("speaker_id").get<std::string>();
      rec.position = obj.at("position").get<int>();
      rec.transcript = obj.at("transcript").get<std::string>();
      rec.phq8 = obj.at("phq8").get<int>();
      rec.partition = partition_from_string(obj.at("partition").get<std::string>());
      if (obj.contains("duration_s") && !obj["duration_s"].is_null()) {
        rec.duration_s = obj["duration_s"].get<double>();
      }
      if (obj.contains("response_id") && !obj["response_id"].is_null()) {
        rec.response_id = obj["response_id"].get<std::string>();
      }
      records.push_back(std::move(rec));
    } catch (const json::exception& e) {
      throw Error(where + ": parse error: " + e.what());
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
  }
  return records;
}

int parse_int_field(const std::string& s, const char* field, const std::string& where) {
  std::size_t pos = 0;
  int value = 0;
  try {
    value = std::stoi(s, &pos);
  } catch (const std::exception&) {
    throw Error(where + ": parse error: bad integer for " + field + ": \"" + s + "\"");
  }
  if (pos != s.size()) {
    throw Error(where + ": parse error: bad integer for " + field + ": \"" + s + "\"");
  }
  return value;
}

std::vector<RawRecord> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);

  std::vector<RawRecord> records;
  std::unordered_map<std::string, std::size_t> col;
  bool have_header = false;

  auto field = [&](const std::vector<std::string>& row, const char* name,
                   const std::string& where) -> const std::string& {
    auto it = col.find(name);
    if (it == col.end() || it->second >= row.size()) {
      throw Error(where + ": parse error: missing column \"" + std::string(name) + "\"");
    }
    return row[it->second];
  };

  io::for_each_csv_row(in, [&](const std::vector<std::string>& row, std::size_t line_no) {
    if (!have_header) {
      for (std::size_t i = 0; i < row.size(); ++i) col[row[i]] = i;
      for (const char* required :
           {"session_id", "speaker_id", "position", "transcript", "phq8", "partition"}) {
        if (!col.count(required)) {
          throw Error(path + ":1: parse error: header lacks column \"" + std::string(required) + "\"");
        }
      }
      have_header = true;
      return;
    }
    const std::string where = path + ":" + std::to_string(line_no);
    RawRecord rec;
    rec.line_no = line_no;
    rec.session_id = field(row, "session_id", where);
    rec.speaker_id = field(row, "speaker_id", where);
    rec.position = parse_int_field(field(row, "position", where), "position", where);
    rec.transcript = field(row, "transcript", where);
    rec.phq8 = parse_int_field(field(row, "phq8", where), "phq8", where);
    try {
      rec.partition = partition_from_string(field(row, "partition", where));
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
    if (auto it = col.find("duration_s"); it != col.end() && it->second < row.size()) {
      const std::string& d = row[it->second];
      if (!d.empty() && d != "null") {
        try {
          rec.duration_s = std::stod(d);
        } catch (const std::exception&) {
          throw Error(where + ": parse error: bad number for duration_s: \"" + d + "\"");
        }
      }
    }
    if (auto it = col.find("response_id"); it != col.end() && it->second < row.size()) {
      rec.response_id = row[it->second];
    }
    records.push_back(std::move(rec));
  });
  if (!have_header) throw Error(path + ":1: parse error: empty file, header row required");
  return records;
}

}  // namespace

Corpus ingest_corpus(const std::string& path, CorpusFormat format) {
  if (format == CorpusFormat::JSONL) return assemble(read_jsonl(path), path, "jsonl");
  return assemble(read_csv(path), path, "csv");
}

void write_corpus(const Corpus& corpus, const std::string& path, CorpusFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);

  if (format == CorpusFormat::CSV) {
    out << "session_id,speaker_id,position,transcript,duration_s,phq8,partition,response_id\n";
  }
  for (const auto& session : corpus.sessions) {
    for (const auto& response : session.responses) {
      if (format == CorpusFormat::JSONL) {
        json obj;
        obj["session_id"] = session.session_id;
        obj["speaker_id"] = session.speaker_id;
        obj["position"] = response.position;
        obj["transcript"] = join_tokens(response.tokens);
        if (response.duration_s) {
          obj["duration_s"] = *response.duration_s;
        } else {
          obj["duration_s"] = nullptr;
        }
        obj["phq8"] = session.phq8;
        obj["partition"] = to_string(session.partition);
        obj["response_id"] = response.response_id;
        out << obj.dump() << "\n";
      } else {
        out << io::csv_field(session.session_id) << ',' << io::csv_field(session.speaker_id) << ','
            << response.position << ',' << io::csv_field(join_tokens(response.tokens)) << ','
            << (response.duration_s ? io::fmt_double(*response.duration_s) : std::string()) << ','
            << session.phq8 << ',' << to_string(session.partition) << ','
            << io::csv_field(response.response_id) << "\n";
      }
    }
  }
  if (!out) throw Error("write failed: " + path);
}

ValidationReport validate(const Corpus& corpus) {
  ValidationReport report;
  auto violation = [&](const std::string& code, const std::string& message) {
    report.violations.push_back({code, message});
  };

  std::unordered_set<std::string> session_ids;
  std::map<std::string, Partition> speaker_partition;
  std::unordered_set<std::string> overlap_reported;
  std::size_t n_missing_duration = 0;

  for (const auto& session : corpus.sessions) {
    if (!session_ids.insert(session.session_id).second) {
      violation("duplicate_session", "duplicate session_id \"" + session.session_id + "\"");
    }
    if (session.phq8 < 0 || session.phq8 > 24) {
      violation("phq8_range", "session \"" + session.session_id + "\": phq8 " +
                                  std::to_string(session.phq8) + " outside [0, 24]");
    }

    auto [it, inserted] = speaker_partition.emplace(session.speaker_id, session.partition);
    if (!inserted && it->second != session.partition &&
        overlap_reported.insert(session.speaker_id).second) {
      violation("speaker_overlap",
                "speaker \"" + session.speaker_id + "\" appears in both train and test");
    }

    for (std::size_t i = 0; i < session.responses.size(); ++i) {
      const Response& r = session.responses[i];
      if (r.tokens.empty()) {
        violation("empty_response", "empty response \"" + r.response_id + "\"");
      }
      if (!r.duration_s) ++n_missing_duration;
    }
    bool contiguous = true;
    for (std::size_t i = 0; i < session.responses.size(); ++i) {
      if (session.responses[i].position != static_cast<int>(i)) contiguous = false;
    }
    if (session.responses.empty()) contiguous = false;
    if (!contiguous) {
      violation("noncontiguous_positions",
                "session \"" + session.session_id + "\": positions not contiguous from 0");
    }
  }

  if (n_missing_duration > 0) {
    report.warnings.push_back({"missing_duration", std::to_string(n_missing_duration) +
                                                       " response(s) lack duration_s"});
  }
  return report;
}

CorpusStats corpus_stats(const Corpus& corpus, int bin_width) {
  if (bin_width <= 0) throw Error("bin_width must be positive");
  CorpusStats stats;
  stats.bin_width = bin_width;

  const Partition partitions[] = {Partition::TRAIN, Partition::TEST};
  const ClassLabel labels[] = {ClassLabel::DEP_NEG, ClassLabel::DEP_POS};

  for (Partition partition : partitions) {
    std::size_t partition_sessions = 0;
    for (const auto& s : corpus.sessions) {
      if (s.partition == partition) ++partition_sessions;
    }
    for (ClassLabel label : labels) {
      GroupStats g;
      g.partition = partition;
      g.label = label;
      std::map<std::size_t, std::size_t> length_counts;
      for (const auto& session : corpus.sessions) {
        if (session.partition != partition || session.label() != label) continue;
        ++g.n_sessions;
        g.n_responses += session.responses.size();
        for (const auto& r : session.responses) {
          g.n_words += r.tokens.size();
          ++length_counts[r.tokens.size()];
        }
      }
      if (partition_sessions > 0) {
        g.prior = static_cast<double>(g.n_sessions) / static_cast<double>(partition_sessions);
      }
      if (g.n_sessions > 0) {
        g.mean_responses_per_session =
            static_cast<double>(g.n_responses) / static_cast<double>(g.n_sessions);
      }
      if (g.n_responses > 0) {
        g.mean_response_words = static_cast<double>(g.n_words) / static_cast<double>(g.n_responses);
      }

      std::map<int, std::size_t> bins;
      std::size_t cumulative = 0;
      for (const auto& [length, count] : length_counts) {
        bins[static_cast<int>(length) / bin_width * bin_width] += count;
        cumulative += count;
        g.cdf.emplace_back(length,
                           static_cast<double>(cumulative) / static_cast<double>(g.n_responses));
      }
      g.histogram.assign(bins.begin(), bins.end());
      stats.groups.push_back(std::move(g));
    }
  }

  for (const auto& g : stats.groups) {
    stats.total_sessions += g.n_sessions;
    stats.total_responses += g.n_responses;
  }
  return stats;
}

std::string stats_to_json(const CorpusStats& stats) {
  json doc;
  doc["bin_width"] = stats.bin_width;
  doc["total_sessions"] = stats.total_sessions;
  doc["total_responses"] = stats.total_responses;
  doc["groups"] = json::array();
  for (const auto& g : stats.groups) {
    json group;
    group["partition"] = to_string(g.partition);
    group["class"] = to_string(g.label);
    group["n_sessions"] = g.n_sessions;
    group["n_responses"] = g.n_responses;
    group["n_words"] = g.n_words;
    group["prior"] = g.prior;
    group["mean_responses_per_session"] = g.mean_responses_per_session;
    group["mean_response_words"] = g.mean_response_words;
    json hist = json::array();
    for (const auto& [bin_low, count] : g.histogram) {
      hist.push_back({{"bin_low", bin_low}, {"count", count}});
    }
    group["histogram"] = std::move(hist);
    json cdf = json::array();
    for (const auto& [length, fraction] : g.cdf) {
      cdf.push_back(json::array({length, fraction}));
    }
    group["cdf"] = std::move(cdf);
    doc["groups"].push_back(std::move(group));
  }
  return doc.dump(2) + "\n";
}

}  // namespace speechlen
