#include "kcontract/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <vector>

namespace kcontract {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& field, std::size_t line) {
  const std::string text = trim(field);
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  // from_chars rejects a leading '+', which CSV writers sometimes emit.
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ParseError("line " + std::to_string(line) + ": cannot parse '" + text + "' as a number");
  }
  if (!std::isfinite(value)) {
    throw ParseError("line " + std::to_string(line) + ": non-finite value '" + text + "'");
  }
  return value;
}

void write_json_value(std::ostream& out, const nlohmann::json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << '{' << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ',' << nl;
        first = false;
        out << pad << nlohmann::json(it.key()).dump() << (indent > 0 ? ": " : ":");
        write_json_value(out, it.value(), indent, depth + 1);
      }
      out << nl << close_pad << '}';
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      // Arrays of scalars stay on one line; nested structures are broken up.
      bool scalars = true;
      for (const auto& v : j) scalars = scalars && !v.is_structured();
      if (scalars) {
        out << '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out << (indent > 0 ? ", " : ",");
          write_json_value(out, j[i], indent, depth + 1);
        }
        out << ']';
        return;
      }
      out << '[' << nl;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << ',' << nl;
        out << pad;
        write_json_value(out, j[i], indent, depth + 1);
      }
      out << nl << close_pad << ']';
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      out << (std::isfinite(v) ? format_double(v) : std::string("null"));
      return;
    }
    default:
      out << j.dump();
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

Matrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) row.push_back(parse_double(field, line_no));
    if (!line.empty() && trim(line).back() == ',') {
      throw ParseError("line " + std::to_string(line_no) + ": trailing comma");
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(rows.front().size()) + " columns, found " +
                       std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("empty matrix");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return m;
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) entries.push_back(m(i, j));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("entries")) {
    throw ParseError("matrix JSON needs rows, cols and entries");
  }
  if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer() || !j["entries"].is_array()) {
    throw ParseError("matrix JSON has mistyped fields");
  }
  const auto rows = j["rows"].get<long long>();
  const auto cols = j["cols"].get<long long>();
  const auto& entries = j["entries"];
  if (rows < 1 || cols < 1 || static_cast<long long>(entries.size()) != rows * cols) {
    throw ParseError("matrix JSON: entries length does not equal rows*cols");
  }
  Matrix m(rows, cols);
  for (long long idx = 0; idx < rows * cols; ++idx) {
    const auto& v = entries[static_cast<std::size_t>(idx)];
    if (!v.is_number()) throw ParseError("matrix JSON: non-numeric entry");
    m(idx / cols, idx % cols) = v.get<double>();
  }
  if (!m.allFinite()) throw ParseError("matrix JSON: non-finite entry");
  return m;
}

Matrix read_matrix_json(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  return matrix_from_json(j);
}

void write_matrix_json(std::ostream& out, const Matrix& m) {
  write_json(out, matrix_to_json(m));
  out << '\n';
}

Matrix read_matrix(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::istringstream ss(text);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return read_matrix_json(ss);
  return read_matrix_csv(ss);
}

Matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_matrix(in);
}

void write_json(std::ostream& out, const nlohmann::json& j, int indent) {
  write_json_value(out, j, indent, 0);
}

}  // namespace kcontract
