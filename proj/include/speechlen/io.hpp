#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace speechlen::io {

// Shortest round-trip decimal form, locale independent. Used for every number
// that lands in a CSV or JSON file so reruns are byte-identical.
std::string fmt_double(double v);

// RFC 4180-style field quoting: quotes the field only when it contains a
// comma, quote, or newline.
std::string csv_field(const std::string& s);

// Streaming CSV reader with quoted-field and embedded-newline support.
// Calls `row_fn(fields, line_no)` per record; line_no is the physical line the
// record started on (1-based). Throws speechlen::Error on unbalanced quotes.
void for_each_csv_row(std::istream& in,
                      const std::function<void(const std::vector<std::string>&, std::size_t)>& row_fn);

// FNV-1a 64-bit digest of a file's bytes, as a 16-char lowercase hex string.
// Throws speechlen::Error when the file cannot be opened.
std::string fnv1a64_file(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace speechlen::io
