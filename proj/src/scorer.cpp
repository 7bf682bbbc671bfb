#include "speechlen/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "speechlen/error.hpp"
#include "speechlen/io.hpp"

namespace speechlen {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double squash(double bias, double weight_sum, std::size_t n, LengthNorm norm) {
  if (n == 0) return logistic(bias);
  double normalized = weight_sum;
  switch (norm) {
    case LengthNorm::Sum:
      break;
    case LengthNorm::Mean:
      normalized = weight_sum / static_cast<double>(n);
      break;
    case LengthNorm::SqrtMean:
      normalized = weight_sum / std::sqrt(static_cast<double>(n));
      break;
  }
  return logistic(bias + normalized);
}

}  // namespace

std::vector<double> Scorer::score_prefixes(const std::string& item_id,
                                           const std::vector<std::string>& tokens,
                                           const std::vector<int>& gates) const {
  std::vector<double> scores;
  scores.reserve(gates.size());
  for (int g : gates) {
    const std::size_t keep = std::min<std::size_t>(tokens.size(), static_cast<std::size_t>(g));
    const std::vector<std::string> prefix(tokens.begin(),
                                          tokens.begin() + static_cast<std::ptrdiff_t>(keep));
    scores.push_back(score(item_id, prefix, g));
  }
  return scores;
}

const char* to_string(LengthNorm norm) {
  switch (norm) {
    case LengthNorm::Sum: return "sum";
    case LengthNorm::Mean: return "mean";
    case LengthNorm::SqrtMean: return "sqrt-mean";
  }
  return "sqrt-mean";
}

LengthNorm length_norm_from_string(const std::string& s) {
  if (s == "sum") return LengthNorm::Sum;
  if (s == "mean") return LengthNorm::Mean;
  if (s == "sqrt-mean") return LengthNorm::SqrtMean;
  throw Error("unknown length norm \"" + s + "\" (expected sum, mean, or sqrt-mean)");
}

Lexicon train_lexicon(const std::vector<Session>& train_sessions, double smoothing_alpha,
                      LengthNorm norm) {
  if (smoothing_alpha <= 0.0) throw Error("smoothing_alpha must be positive");

  std::size_t n_pos_sessions = 0;
  std::size_t n_neg_sessions = 0;
  double total[2] = {0.0, 0.0};  // token totals per class, [neg, pos]
  std::unordered_map<std::string, std::pair<double, double>> counts;  // token -> (neg, pos)

  for (const auto& session : train_sessions) {
    if (session.partition != Partition::TRAIN) {
      throw Error("train_lexicon accepts only train-partition sessions (got \"" +
                  session.session_id + "\")");
    }
    const bool pos = session.label() == ClassLabel::DEP_POS;
    if (pos) ++n_pos_sessions;
    else ++n_neg_sessions;
    for (const auto& r : session.responses) {
      for (const auto& token : r.tokens) {
        auto& c = counts[token];
        if (pos) c.second += 1.0;
        else c.first += 1.0;
        total[pos ? 1 : 0] += 1.0;
      }
    }
  }
  if (n_pos_sessions == 0 || n_neg_sessions == 0) {
    throw Error("train_lexicon requires both classes in the training data");
  }

  Lexicon lexicon;
  lexicon.smoothing_alpha = smoothing_alpha;
  lexicon.norm = norm;
  lexicon.bias =
      std::log(static_cast<double>(n_pos_sessions) / static_cast<double>(n_neg_sessions));

  const double v = static_cast<double>(counts.size());
  const double denom_pos = total[1] + smoothing_alpha * v;
  const double denom_neg = total[0] + smoothing_alpha * v;
  lexicon.weights.reserve(counts.size());
  for (const auto& [token, c] : counts) {
    const double w = std::log((c.second + smoothing_alpha) / denom_pos) -
                     std::log((c.first + smoothing_alpha) / denom_neg);
    lexicon.weights.emplace(token, w);
  }
  return lexicon;
}

double lexicon_score(const Lexicon& lexicon, const std::vector<std::string>& tokens) {
  double sum = 0.0;
  for (const auto& token : tokens) {
    if (auto it = lexicon.weights.find(token); it != lexicon.weights.end()) sum += it->second;
  }
  return squash(lexicon.bias, sum, tokens.size(), lexicon.norm);
}

void save_lexicon(const Lexicon& lexicon, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << "# bias=" << io::fmt_double(lexicon.bias) << "\n";
  out << "# alpha=" << io::fmt_double(lexicon.smoothing_alpha) << "\n";
  out << "# norm=" << to_string(lexicon.norm) << "\n";
  out << "token,weight\n";
  std::map<std::string, double> sorted(lexicon.weights.begin(), lexicon.weights.end());
  for (const auto& [token, weight] : sorted) {
    out << io::csv_field(token) << ',' << io::fmt_double(weight) << "\n";
  }
  if (!out) throw Error("write failed: " + path);
}

Lexicon load_lexicon(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);

  Lexicon lexicon;
  std::string line;
  std::ostringstream body;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw Error(path + ":" + std::to_string(line_no) + ": bad header comment");
      }
      const std::string key = line.substr(2, eq - 2);
      const std::string value = line.substr(eq + 1);
      try {
        if (key == "bias") lexicon.bias = std::stod(value);
        else if (key == "alpha") lexicon.smoothing_alpha = std::stod(value);
        else if (key == "norm") lexicon.norm = length_norm_from_string(value);
      } catch (const std::invalid_argument&) {
        throw Error(path + ":" + std::to_string(line_no) + ": bad number in header comment");
      }
      continue;
    }
    body << line << "\n";
  }

  std::istringstream rows(body.str());
  bool have_header = false;
  io::for_each_csv_row(rows, [&](const std::vector<std::string>& row, std::size_t) {
    if (!have_header) {
      if (row.size() < 2 || row[0] != "token" || row[1] != "weight") {
        throw Error(path + ": expected token,weight header");
      }
      have_header = true;
      return;
    }
    if (row.size() < 2) throw Error(path + ": short lexicon row");
    try {
      lexicon.weights[row[0]] = std::stod(row[1]);
    } catch (const std::exception&) {
      throw Error(path + ": bad weight for token \"" + row[0] + "\"");
    }
  });
  if (!have_header) throw Error(path + ": empty lexicon file");
  return lexicon;
}

double LexiconScorer::score(const std::string&, const std::vector<std::string>& tokens,
                            int) const {
  return lexicon_score(lexicon_, tokens);
}

std::vector<double> LexiconScorer::score_prefixes(const std::string&,
                                                  const std::vector<std::string>& tokens,
                                                  const std::vector<int>& gates) const {
  std::vector<double> scores;
  scores.reserve(gates.size());
  double sum = 0.0;
  std::size_t consumed = 0;
  for (int g : gates) {
    const std::size_t keep = std::min<std::size_t>(tokens.size(), static_cast<std::size_t>(g));
    for (; consumed < keep; ++consumed) {
      if (auto it = lexicon_.weights.find(tokens[consumed]); it != lexicon_.weights.end()) {
        sum += it->second;
      }
    }
    scores.push_back(squash(lexicon_.bias, sum, keep, lexicon_.norm));
  }
  return scores;
}

double table_score(const ScoreTable& table, const std::string& item_id, int gate) {
  const auto it = table.rows.find(item_id);
  if (it == table.rows.end()) throw Error("score table has no item \"" + item_id + "\"");
  const auto& row = it->second;
  auto upper = std::upper_bound(row.begin(), row.end(), gate,
                                [](int g, const auto& entry) { return g < entry.first; });
  if (upper == row.begin()) {
    throw Error("gate " + std::to_string(gate) + " below minimum stored gate for item \"" +
                item_id + "\"");
  }
  return (upper - 1)->second;
}

void save_score_table(const ScoreTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << "item_id,gate_words,score\n";
  std::map<std::string, const std::vector<std::pair<int, double>>*> sorted;
  for (const auto& [item, row] : table.rows) sorted.emplace(item, &row);
  for (const auto& [item, row] : sorted) {
    for (const auto& [gate, score] : *row) {
      out << io::csv_field(item) << ',' << gate << ',' << io::fmt_double(score) << "\n";
    }
  }
  if (!out) throw Error("write failed: " + path);
}

ScoreTable load_score_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  ScoreTable table;
  bool have_header = false;
  io::for_each_csv_row(in, [&](const std::vector<std::string>& row, std::size_t line_no) {
    if (!have_header) {
      have_header = true;
      return;
    }
    if (row.size() < 3) {
      throw Error(path + ":" + std::to_string(line_no) + ": short score table row");
    }
    try {
      table.rows[row[0]].emplace_back(std::stoi(row[1]), std::stod(row[2]));
    } catch (const std::exception&) {
      throw Error(path + ":" + std::to_string(line_no) + ": bad number in score table row");
    }
  });
  for (auto& [item, row] : table.rows) {
    std::sort(row.begin(), row.end());
    for (std::size_t i = 1; i < row.size(); ++i) {
      if (row[i].first == row[i - 1].first) {
        throw Error(path + ": duplicate gate " + std::to_string(row[i].first) + " for item \"" +
                    item + "\"");
      }
    }
  }
  return table;
}

double TableScorer::score(const std::string& item_id, const std::vector<std::string>&,
                          int gate) const {
  return table_score(table_, item_id, gate);
}

}  // namespace speechlen
