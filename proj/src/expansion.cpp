#include "fql/expansion.hpp"

#include <stdexcept>

namespace fql {

namespace {

// (q^n - q^start)/(q - 1) as a rational, or nullopt on overflow.
std::optional<Rational> carlitz_gap(std::int64_t n, std::int64_t start, std::uint32_t q) {
  try {
    const std::int64_t a = checked_pow(q, static_cast<unsigned>(n));
    const std::int64_t b = checked_pow(q, static_cast<unsigned>(start));
    return Rational(a - b, static_cast<std::int64_t>(q) - 1);
  } catch (const std::overflow_error&) {
    return std::nullopt;
  }
}

}  // namespace

std::optional<Rational> ValuationLaw::valuation_at(std::int64_t n, std::uint32_t q) const {
  if (n < start) return std::nullopt;
  switch (kind) {
    case Kind::terminating:
      return Rational::infinity();
    case Kind::geometric:
      return offset + rate * Rational(n - start);
    case Kind::carlitz_exponential: {
      auto gap = carlitz_gap(n, start, q);
      if (!gap) return std::nullopt;
      return offset + rate * *gap;
    }
    default:
      return std::nullopt;
  }
}

std::optional<Rational> ValuationLaw::tail_lower_bound(std::int64_t from, std::uint32_t q) const {
  if (from < start) return std::nullopt;
  switch (kind) {
    case Kind::terminating:
      return Rational::infinity();
    case Kind::geometric:
    case Kind::decay_at_least:
      if (rate < Rational(0)) return std::nullopt;
      return offset + rate * Rational(from - start);
    case Kind::carlitz_exponential: {
      if (rate < Rational(0)) return std::nullopt;
      auto gap = carlitz_gap(from, start, q);
      if (!gap) return Rational::infinity();
      return offset + rate * *gap;
    }
    default:
      return std::nullopt;
  }
}

std::string ValuationLaw::kind_name() const {
  switch (kind) {
    case Kind::none:
      return "none";
    case Kind::terminating:
      return "terminating";
    case Kind::geometric:
      return "geometric";
    case Kind::carlitz_exponential:
      return "carlitz_exponential";
    case Kind::bounded_below:
      return "bounded_below";
    case Kind::decay_at_least:
      return "decay_at_least";
  }
  return "none";
}

ValuationLaw::Kind ValuationLaw::parse_kind(std::string_view name) {
  for (Kind k : {Kind::none, Kind::terminating, Kind::geometric, Kind::carlitz_exponential, Kind::bounded_below,
                 Kind::decay_at_least}) {
    if (ValuationLaw{k, 0, 0, 0}.kind_name() == name) return k;
  }
  throw std::invalid_argument("unknown valuation law '" + std::string(name) + "'");
}

}  // namespace fql
