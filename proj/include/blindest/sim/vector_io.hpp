// Vector and matrix file formats.
//
// Text CSV: optional shape line "# D U" (matrices), then the header "re,im",
// then one complex entry per row; matrices are listed row-major.
// Binary: magic "BEV1", little-endian u64 D (and u64 U for matrices), then
// interleaved little-endian f64 re/im, row-major for matrices.
#pragma once

#include <algorithm>
#include <cstdlib>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "blindest/channel_pipeline.hpp"
#include "blindest/core.hpp"

namespace blindest::io {

enum class Format { csv, bin };

inline Format parse_format(std::string_view s) {
  if (s == "csv") return Format::csv;
  if (s == "bin") return Format::bin;
  throw ParameterError("unknown format '" + std::string(s) + "' (expected csv or bin)");
}

/// Shortest round-tripping decimal representation of a double ("%.17g").
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline constexpr char kMagic[4] = {'B', 'E', 'V', '1'};

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_number(const std::string& tok, std::size_t line) {
  const std::string t = trim(tok);
  if (t.empty()) throw DataError("line " + std::to_string(line) + ": empty field");
  // strtod rather than stod: stod rejects subnormals, which the writer can emit.
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end == t.c_str()) throw DataError("line " + std::to_string(line) + ": cannot parse number '" + t + "'");
  if (end != t.c_str() + t.size()) {
    throw DataError("line " + std::to_string(line) + ": trailing characters in '" + t + "'");
  }
  if (!std::isfinite(v)) throw DataError("line " + std::to_string(line) + ": non-finite value");
  return v;
}

struct CsvContent {
  bool has_shape = false;
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  ComplexVector entries;
};

inline CsvContent parse_csv(std::istream& in) {
  CsvContent out;
  std::string raw;
  std::size_t line = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty()) continue;
    if (!header_seen) {
      if (s[0] == '#') {
        if (out.has_shape) throw DataError("line " + std::to_string(line) + ": duplicate shape line");
        std::istringstream ss(s.substr(1));
        long long r = -1, c = -1;
        if (!(ss >> r >> c) || r < 1 || c < 1) {
          throw DataError("line " + std::to_string(line) + ": shape line must be '# D U' with positive sizes");
        }
        std::string extra;
        if (ss >> extra) throw DataError("line " + std::to_string(line) + ": trailing text in shape line");
        out.has_shape = true;
        out.rows = static_cast<std::uint64_t>(r);
        out.cols = static_cast<std::uint64_t>(c);
        continue;
      }
      std::string h = s;
      h.erase(std::remove_if(h.begin(), h.end(), [](char ch) { return ch == ' ' || ch == '\t'; }), h.end());
      if (h != "re,im") throw DataError("line " + std::to_string(line) + ": expected header 're,im'");
      header_seen = true;
      continue;
    }
    const auto comma = s.find(',');
    if (comma == std::string::npos || s.find(',', comma + 1) != std::string::npos) {
      throw DataError("line " + std::to_string(line) + ": expected exactly two fields 're,im'");
    }
    out.entries.emplace_back(parse_number(s.substr(0, comma), line), parse_number(s.substr(comma + 1), line));
  }
  if (!header_seen) throw DataError("line " + std::to_string(line) + ": missing header 're,im'");
  return out;
}

inline std::string read_all(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline std::uint64_t get_u64(const std::string& in, std::size_t off) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[off + i])) << (8 * i);
  return v;
}

inline void put_f64(std::string& out, double d) { put_u64(out, std::bit_cast<std::uint64_t>(d)); }
inline double get_f64(const std::string& in, std::size_t off) { return std::bit_cast<double>(get_u64(in, off)); }

inline ComplexVector decode_bin(const std::string& bytes, std::size_t header_words, std::uint64_t& d,
                                std::uint64_t& u) {
  const std::size_t header = 4 + 8 * header_words;
  if (bytes.size() < header || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw DataError("binary file: missing 'BEV1' header");
  }
  d = get_u64(bytes, 4);
  u = header_words == 2 ? get_u64(bytes, 12) : 1;
  if (d == 0 || u == 0) throw DataError("binary file: zero dimension");
  const std::uint64_t count = d * u;
  if (count > (bytes.size() - header) / 16 || bytes.size() != header + 16 * count) {
    throw DataError("binary file: size does not match declared dimensions");
  }
  ComplexVector out(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const double re = get_f64(bytes, header + 16 * i);
    const double im = get_f64(bytes, header + 16 * i + 8);
    if (!std::isfinite(re) || !std::isfinite(im)) throw DataError("binary file: non-finite entry " + std::to_string(i));
    out[i] = {re, im};
  }
  return out;
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot open '" + path + "' for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw DataError("write to '" + path + "' failed");
}

}  // namespace detail

inline std::string encode_vector(std::span<const cplx> v, Format fmt) {
  std::string out;
  if (fmt == Format::csv) {
    out = "re,im\n";
    for (const cplx& c : v) out += fmt_double(c.real()) + "," + fmt_double(c.imag()) + "\n";
  } else {
    out.append(detail::kMagic, 4);
    detail::put_u64(out, v.size());
    for (const cplx& c : v) {
      detail::put_f64(out, c.real());
      detail::put_f64(out, c.imag());
    }
  }
  return out;
}

inline ComplexVector decode_vector(const std::string& bytes, Format fmt) {
  if (fmt == Format::bin) {
    std::uint64_t d = 0, u = 0;
    return detail::decode_bin(bytes, 1, d, u);
  }
  std::istringstream in(bytes);
  auto c = detail::parse_csv(in);
  if (c.has_shape && c.cols != 1) throw DataError("vector file declares a matrix shape");
  if (c.entries.empty()) throw DataError("vector file has no entries");
  if (c.has_shape && c.rows != c.entries.size()) throw DataError("vector file: entry count does not match shape");
  return std::move(c.entries);
}

inline std::string encode_matrix(const ChannelMatrix& m, Format fmt) {
  std::string out;
  if (fmt == Format::csv) {
    out = "# " + std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\nre,im\n";
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) {
        out += fmt_double(m(r, c).real()) + "," + fmt_double(m(r, c).imag()) + "\n";
      }
    }
  } else {
    out.append(detail::kMagic, 4);
    detail::put_u64(out, m.rows());
    detail::put_u64(out, m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) {
        detail::put_f64(out, m(r, c).real());
        detail::put_f64(out, m(r, c).imag());
      }
    }
  }
  return out;
}

inline ChannelMatrix decode_matrix(const std::string& bytes, Format fmt, Domain domain = Domain::antenna) {
  std::uint64_t rows = 0, cols = 0;
  ComplexVector flat;
  if (fmt == Format::bin) {
    flat = detail::decode_bin(bytes, 2, rows, cols);
  } else {
    std::istringstream in(bytes);
    auto c = detail::parse_csv(in);
    if (!c.has_shape) throw DataError("matrix file: missing shape line '# D U'");
    rows = c.rows;
    cols = c.cols;
    if (c.entries.size() != rows * cols) {
      throw DataError("matrix file: expected " + std::to_string(rows * cols) + " entries, found " +
                      std::to_string(c.entries.size()));
    }
    flat = std::move(c.entries);
  }
  ChannelMatrix m(rows, cols, domain);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = flat[r * cols + c];
  }
  return m;
}

inline ComplexVector read_vector(const std::string& path, Format fmt) {
  return decode_vector(detail::read_all(path), fmt);
}
inline void write_vector(const std::string& path, std::span<const cplx> v, Format fmt) {
  detail::write_file(path, encode_vector(v, fmt));
}
inline ChannelMatrix read_matrix(const std::string& path, Format fmt) {
  return decode_matrix(detail::read_all(path), fmt);
}
inline void write_matrix(const std::string& path, const ChannelMatrix& m, Format fmt) {
  detail::write_file(path, encode_matrix(m, fmt));
}

}  // namespace blindest::io
