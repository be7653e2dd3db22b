#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "fql/expansion.hpp"
#include "fql/matrix.hpp"
#include "fql/series.hpp"

namespace fql {

/// Plain-text serialization. A document is a field header line followed by
/// exactly one value:
///
///   field p=3 v=1 f=1 modulus=0,1
///   series e=1 prec=10/1
///   0/1 : 1
///   3/1 : 2
///
/// Matrices are "matrix <rows> <cols>" followed by row-major series blocks;
/// Carlitz expansions are "carlitz n=<N>" (optionally with law=<kind>
/// law.start=<n> law.offset=<r> law.rate=<r>) followed by N+1 series or
/// matrix blocks. Blank lines and lines starting with '#' are ignored.
/// Writing then parsing reproduces the value exactly.
using Value = std::variant<Series, SeriesMatrix, CarlitzCoeffs, CarlitzMatrixCoeffs>;

struct Document {
  FieldPtr field;
  Value value;
};

std::string to_text(const Series& s);
std::string to_text(const SeriesMatrix& m);
std::string to_text(const CarlitzCoeffs& c);
std::string to_text(const CarlitzMatrixCoeffs& c);
std::string to_text(const Value& v);

/// Throws ParseError carrying the offending line number.
Document parse_document(std::string_view text);
/// Parses a document that must hold the given alternative.
Series parse_series(std::string_view text);
SeriesMatrix parse_matrix(std::string_view text);
CarlitzCoeffs parse_carlitz(std::string_view text);
CarlitzMatrixCoeffs parse_carlitz_matrix(std::string_view text);

/// Parses "field p=.. v=.. f=.. [modulus=..]".
FieldPtr parse_field_header(std::string_view line, int line_no = 0);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace fql
