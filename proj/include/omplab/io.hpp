#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "omplab/errors.hpp"
#include "omplab/omp.hpp"
#include "omplab/types.hpp"

// Matrix/vector CSV and result JSON. The CSV layout is: a header line "n,N"
// followed by n lines of N comma-separated decimal floats. Values print in
// shortest round-trip form and parse back bit-exactly.

namespace omplab {

inline std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view field, const std::string& where) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw IoError(where + ": malformed number '" + std::string(field) + "'");
  }
  return value;
}

inline long long parse_int(std::string_view field, const std::string& where) {
  long long value = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw IoError(where + ": malformed integer '" + std::string(field) + "'");
  }
  return value;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

inline void write_matrix_csv(const DenseMatrix& m, std::ostream& os) {
  os << m.rows() << ',' << m.cols() << '\n';
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

inline void write_matrix_csv(const DenseMatrix& m, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError(path + ": cannot open for writing");
  write_matrix_csv(m, os);
  if (!os) throw IoError(path + ": write failed");
}

inline DenseMatrix read_matrix_csv(std::istream& is, const std::string& name) {
  std::string line;
  if (!std::getline(is, line)) throw IoError(name + ":1: missing header line 'n,N'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_fields(line);
  if (header.size() != 2) throw IoError(name + ":1: header must be 'n,N'");
  const long long n = parse_int(header[0], name + ":1");
  const long long N = parse_int(header[1], name + ":1");
  if (n < 1 || N < 1) throw IoError(name + ":1: dimensions must be >= 1");

  Vector entries;
  entries.reserve(static_cast<std::size_t>(n) * N);
  for (long long i = 0; i < n; ++i) {
    const std::string where = name + ":" + std::to_string(i + 2);
    if (!std::getline(is, line)) throw IoError(where + ": expected " + std::to_string(n) +
                                               " data rows, found " + std::to_string(i));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split_fields(line);
    if (static_cast<long long>(fields.size()) != N) {
      throw IoError(where + ": expected " + std::to_string(N) + " fields, got " +
                    std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const double v = parse_double(fields[j], where + " field " + std::to_string(j + 1));
      if (!std::isfinite(v)) throw IoError(where + ": non-finite entry");
      entries.push_back(v);
    }
  }
  long long extra = n + 2;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) {
      throw IoError(name + ":" + std::to_string(extra) + ": unexpected data after " +
                    std::to_string(n) + " rows");
    }
    ++extra;
  }
  return DenseMatrix(static_cast<int>(n), static_cast<int>(N), std::move(entries));
}

inline DenseMatrix read_matrix_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError(path + ": cannot open for reading");
  return read_matrix_csv(is, path);
}

/// Vector files are matrix files with a single column (or a single row).
inline Vector read_vector_csv(const std::string& path) {
  const DenseMatrix m = read_matrix_csv(path);
  if (m.cols() == 1) return m.column(0);
  if (m.rows() == 1) {
    Vector v(m.cols());
    for (int j = 0; j < m.cols(); ++j) v[j] = m(0, j);
    return v;
  }
  throw IoError(path + ": expected a vector (one row or one column), got " +
                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

inline void write_vector_csv(const Vector& v, const std::string& path) {
  if (v.empty()) throw ContractViolation("write_vector_csv: empty vector");
  DenseMatrix m(static_cast<int>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<int>(i), 0) = v[i];
  write_matrix_csv(m, path);
}

inline nlohmann::json to_json(const RecoveryResult& r) {
  return nlohmann::json{{"estimate", r.estimate},
                        {"selected", r.selected.indices()},
                        {"chosen_order", r.chosen_order},
                        {"residual_norms", r.residual_norms},
                        {"iterations_run", r.iterations_run},
                        {"stopped_early", r.stopped_early}};
}

inline void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError(path + ": cannot open for writing");
  os << j.dump(2) << '\n';
  if (!os) throw IoError(path + ": write failed");
}

inline nlohmann::json read_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError(path + ": cannot open for reading");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path + ": " + e.what());
  }
  return j;
}

}  // namespace omplab
