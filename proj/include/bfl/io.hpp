#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bfl/chaos.hpp"

namespace bfl {

enum class Repr { chaos, pointwise };

inline std::string_view repr_name(Repr r) {
  return r == Repr::chaos ? "chaos" : "pointwise";
}

/// Shortest decimal form that round-trips a double exactly.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct VectorFile {
  int n = 0;
  Repr repr = Repr::chaos;
  std::vector<double> data;
};

/// Vector file layout: a metadata preamble line, a column header, then one
/// row per index in order.
///
///   # n=<n> repr=<chaos|pointwise>
///   index,value
///   0,<value>
///   ...
inline std::string vector_file_string(int n, Repr repr,
                                      const std::vector<double>& data) {
  std::string out;
  out.reserve(data.size() * 24 + 64);
  out += "# n=" + std::to_string(n) + " repr=" + std::string(repr_name(repr)) + "\n";
  out += "index,value\n";
  for (std::size_t m = 0; m < data.size(); ++m) {
    out += std::to_string(m);
    out += ',';
    out += format_double(data[m]);
    out += '\n';
  }
  return out;
}

inline std::string vector_file_string(const ChaosVector& x) {
  return vector_file_string(x.n(), Repr::chaos, x.coeffs);
}

inline std::string vector_file_string(const PointwiseVector& v) {
  return vector_file_string(v.n(), Repr::pointwise, v.values);
}

inline void write_text_file(const std::filesystem::path& path,
                            std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out.write(content.data(), std::streamsize(content.size()));
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

inline VectorFile parse_vector_file(std::istream& in, const std::string& name) {
  auto fail = [&](const std::string& what) -> std::runtime_error {
    return std::runtime_error("vector file " + name + ": " + what);
  };
  std::string line;
  if (!std::getline(in, line)) throw fail("empty file");

  VectorFile vf;
  int n = -1;
  char repr_buf[16] = {0};
  if (std::sscanf(line.c_str(), "# n=%d repr=%15s", &n, repr_buf) != 2) {
    throw fail("bad preamble line, expected '# n=<n> repr=<chaos|pointwise>'");
  }
  if (n < 1 || n > kMaxSites) throw fail("n out of range [1," + std::to_string(kMaxSites) + "]");
  vf.n = n;
  const std::string repr(repr_buf);
  if (repr == "chaos") {
    vf.repr = Repr::chaos;
  } else if (repr == "pointwise") {
    vf.repr = Repr::pointwise;
  } else {
    throw fail("unknown repr '" + repr + "'");
  }

  if (!std::getline(in, line) || line != "index,value") {
    throw fail("missing 'index,value' header");
  }
  const std::size_t size = std::size_t(1) << n;
  vf.data.resize(size);
  for (std::size_t m = 0; m < size; ++m) {
    if (!std::getline(in, line)) {
      throw fail("expected " + std::to_string(size) + " rows, got " +
                 std::to_string(m));
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw fail("row " + std::to_string(m) + ": no comma");
    std::size_t idx_chars = 0;
    const unsigned long idx = std::stoul(line.substr(0, comma), &idx_chars);
    if (idx_chars != comma || idx != m) {
      throw fail("row " + std::to_string(m) + ": index mismatch");
    }
    std::size_t val_chars = 0;
    const std::string value_text = line.substr(comma + 1);
    vf.data[m] = std::stod(value_text, &val_chars);
    if (val_chars != value_text.size()) {
      throw fail("row " + std::to_string(m) + ": trailing characters after value");
    }
  }
  if (std::getline(in, line) && !line.empty()) {
    throw fail("unexpected content after " + std::to_string(size) + " rows");
  }
  return vf;
}

inline VectorFile read_vector_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open vector file: " + path.string());
  }
  return parse_vector_file(in, path.string());
}

/// Incremental CSV builder used by the command reports. Values are
/// rendered with round-trip precision so reruns are byte-identical.
class CsvBuilder {
 public:
  explicit CsvBuilder(std::string_view header) { text_ = std::string(header) + "\n"; }

  CsvBuilder& field(std::string_view s) {
    sep();
    text_ += s;
    return *this;
  }
  CsvBuilder& field(double v) { return field(format_double(v)); }
  CsvBuilder& field(int v) { return field(std::to_string(v)); }
  CsvBuilder& field(std::size_t v) { return field(std::to_string(v)); }
  CsvBuilder& field(bool v) { return field(v ? std::string_view("1") : std::string_view("0")); }

  void end_row() {
    text_ += '\n';
    row_open_ = false;
  }

  const std::string& str() const { return text_; }

 private:
  void sep() {
    if (row_open_) text_ += ',';
    row_open_ = true;
  }
  std::string text_;
  bool row_open_ = false;
};

}  // namespace bfl
