#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace nearcol {

/// A binary template: n bits packed into 64-bit words, word 0 holding
/// coordinates 1..64 with coordinate 1 in the most significant position of
/// the byte-order used by the hex file format (see TemplateDatabase).
struct Template {
  std::vector<std::uint64_t> words;

  static Template zeros(unsigned n) {
    return Template{std::vector<std::uint64_t>((n + 63) / 64, 0)};
  }

  bool get(unsigned bit) const {  // bit is 0-based here
    return (words[bit / 64] >> (bit % 64)) & 1u;
  }
  void set(unsigned bit, bool v) {
    if (v)
      words[bit / 64] |= std::uint64_t(1) << (bit % 64);
    else
      words[bit / 64] &= ~(std::uint64_t(1) << (bit % 64));
  }
  bool operator==(const Template& o) const = default;
};

unsigned hamming_distance(const Template& a, const Template& b);

/// An ordered database of N templates of common bit-length n.
struct TemplateDatabase {
  unsigned n = 0;
  std::vector<Template> templates;

  std::size_t size() const { return templates.size(); }

  void validate() const {
    const std::size_t words = (n + 63) / 64;
    for (const auto& t : templates)
      if (t.words.size() != words)
        throw std::invalid_argument("TemplateDatabase: template width mismatch");
  }

  bool all_distinct() const;
};

/// Parse error with 1-based line and byte offset within that line.
struct ParseError : std::runtime_error {
  int line;
  int offset;
  ParseError(std::string msg, int line_, int offset_)
      : std::runtime_error(std::move(msg)), line(line_), offset(offset_) {}
};

/// File format: header line "n=<int> N=<int>", then one template per line as
/// a hex string of ceil(n/8) bytes, big-endian bit order, highest bit of the
/// first byte = coordinate 1.
TemplateDatabase read_database(std::istream& in);
TemplateDatabase read_database_file(const std::string& path);
void write_database(std::ostream& out, const TemplateDatabase& db);

}  // namespace nearcol
