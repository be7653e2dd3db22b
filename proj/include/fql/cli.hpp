#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fql/series.hpp"

namespace fql::cli {

/// Exit codes of the command-line tool.
enum Exit : int { ok = 0, domain_failure = 1, usage = 2 };

/// Runs one command line (without the program name). Results go to `out`,
/// diagnostics to `err`; the return value is the process exit code.
///
/// Subcommands:
///   carlitz bracket|factorial|feval
///   solve model|system|euler2|euler-general|hypergeom
///   eval, classify, verify
///   replay <manifest>
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses an inline literal: an integer (read mod p) or a polynomial in x
/// with integer coefficients and rational exponents, e.g. "2*x^3 + x^(1/2) - 1".
/// Used for scalar options; anything else is read from a file given as @path.
Series parse_literal(const FieldPtr& field, const std::string& text);

/// 64-bit FNV-1a digest, hex encoded; used in manifests to pin inputs and outputs.
std::string digest(const std::string& bytes);

}  // namespace fql::cli
