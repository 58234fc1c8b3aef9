#include "nearcol/template_db.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace nearcol {

unsigned hamming_distance(const Template& a, const Template& b) {
  unsigned d = 0;
  for (std::size_t i = 0; i < a.words.size(); ++i)
    d += std::popcount(a.words[i] ^ b.words[i]);
  return d;
}

bool TemplateDatabase::all_distinct() const {
  for (std::size_t i = 0; i < templates.size(); ++i)
    for (std::size_t j = i + 1; j < templates.size(); ++j)
      if (templates[i] == templates[j]) return false;
  return true;
}

namespace {

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

TemplateDatabase read_database(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError("missing header line", 1, 0);
  unsigned n = 0;
  unsigned long long count = 0;
  if (std::sscanf(header.c_str(), "n=%u N=%llu", &n, &count) != 2)
    throw ParseError("header must be \"n=<int> N=<int>\"", 1, 0);
  if (n < 1) throw ParseError("n must be >= 1", 1, 0);

  TemplateDatabase db;
  db.n = n;
  const unsigned bytes = (n + 7) / 8;
  std::string line;
  for (std::uint64_t i = 0; i < count; ++i) {
    const int line_no = static_cast<int>(i) + 2;
    if (!std::getline(in, line))
      throw ParseError("unexpected end of file", line_no, 0);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.size() != 2 * bytes)
      throw ParseError("expected " + std::to_string(2 * bytes) + " hex digits",
                       line_no, static_cast<int>(line.size()));
    Template t = Template::zeros(n);
    for (unsigned b = 0; b < bytes; ++b) {
      const int hi = hex_digit(line[2 * b]);
      const int lo = hex_digit(line[2 * b + 1]);
      if (hi < 0) throw ParseError("invalid hex digit", line_no, static_cast<int>(2 * b));
      if (lo < 0) throw ParseError("invalid hex digit", line_no, static_cast<int>(2 * b + 1));
      const unsigned byte = static_cast<unsigned>(hi) << 4 | static_cast<unsigned>(lo);
      // highest bit of byte b is coordinate 8b+1
      for (unsigned k = 0; k < 8; ++k) {
        const unsigned coord = 8 * b + k;  // 0-based
        if (coord >= n) {
          if ((byte >> (7 - k)) & 1u)
            throw ParseError("padding bits must be zero", line_no,
                             static_cast<int>(2 * b));
          continue;
        }
        t.set(coord, (byte >> (7 - k)) & 1u);
      }
    }
    db.templates.push_back(std::move(t));
  }
  return db;
}

TemplateDatabase read_database_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open database file: " + path);
  return read_database(in);
}

void write_database(std::ostream& out, const TemplateDatabase& db) {
  out << "n=" << db.n << " N=" << db.templates.size() << "\n";
  const unsigned bytes = (db.n + 7) / 8;
  static const char* kHex = "0123456789abcdef";
  for (const auto& t : db.templates) {
    std::string line(2 * bytes, '0');
    for (unsigned b = 0; b < bytes; ++b) {
      unsigned byte = 0;
      for (unsigned k = 0; k < 8; ++k) {
        const unsigned coord = 8 * b + k;
        if (coord < db.n && t.get(coord)) byte |= 1u << (7 - k);
      }
      line[2 * b] = kHex[byte >> 4];
      line[2 * b + 1] = kHex[byte & 0xF];
    }
    out << line << "\n";
  }
}

}  // namespace nearcol
