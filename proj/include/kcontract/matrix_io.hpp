#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "kcontract/compounds.hpp"

namespace kcontract {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 17 significant digits ("%.17g"); the text parses back to the same double.
std::string format_double(double v);

/// Rows of comma-separated decimals; blank lines ignored. All rows must have
/// the same width.
Matrix read_matrix_csv(std::istream& in);
void write_matrix_csv(std::ostream& out, const Matrix& m);

/// {"rows": r, "cols": c, "entries": [row-major values]}
Matrix read_matrix_json(std::istream& in);
void write_matrix_json(std::ostream& out, const Matrix& m);

/// Dispatches on content: a leading '{' selects JSON, anything else CSV.
Matrix read_matrix(std::istream& in);
Matrix read_matrix_file(const std::string& path);

/// Serializes JSON with every floating-point value printed by format_double.
/// Object keys keep nlohmann's sorted order, so output is deterministic.
void write_json(std::ostream& out, const nlohmann::json& j, int indent = 2);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

}  // namespace kcontract
