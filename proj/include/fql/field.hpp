#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fql {

/// Element of F_Q, encoded as its F_p coordinates in the modulus basis
/// (1, y, y^2, ...) packed base p: code = sum coord_i * p^i. Zero has code 0.
struct FieldElem {
  std::uint32_t code = 0;

  constexpr bool is_zero() const { return code == 0; }
  friend constexpr bool operator==(FieldElem, FieldElem) = default;
  friend constexpr auto operator<=>(FieldElem, FieldElem) = default;
};

class FieldDesc;
using FieldPtr = std::shared_ptr<const FieldDesc>;

/// The coefficient field F_Q, Q = q^f with q = p^v, together with its
/// distinguished subfield F_q. Arithmetic runs through log/antilog tables
/// (and Zech logarithms for odd p), so Q is limited to kMaxOrder.
///
/// Instances are immutable and shared; create them with make().
class FieldDesc {
 public:
  static constexpr std::uint32_t kMaxOrder = 1u << 16;

  /// Builds F_{p^(v f)}. An empty modulus selects the smallest monic
  /// irreducible polynomial of degree v*f (coefficients ascending).
  static FieldPtr make(std::uint32_t p, std::uint32_t v = 1, std::uint32_t f = 1,
                       std::vector<std::uint32_t> modulus = {});

  std::uint32_t p() const { return p_; }
  std::uint32_t v() const { return v_; }
  std::uint32_t f() const { return f_; }
  /// Size of the distinguished subfield, q = p^v.
  std::uint32_t q() const { return q_; }
  /// Size of the coefficient field, Q = q^f.
  std::uint32_t order() const { return order_; }
  /// Degree of F_Q over F_p.
  std::uint32_t degree() const { return v_ * f_; }
  const std::vector<std::uint32_t>& modulus() const { return modulus_; }

  bool same_as(const FieldDesc& o) const {
    return this == &o || (p_ == o.p_ && v_ == o.v_ && f_ == o.f_ && modulus_ == o.modulus_);
  }

  FieldElem zero() const { return {}; }
  FieldElem one() const { return {1}; }
  FieldElem from_int(std::int64_t k) const;
  FieldElem from_coords(std::span<const std::uint32_t> coords) const;
  std::vector<std::uint32_t> coords(FieldElem a) const;

  FieldElem add(FieldElem a, FieldElem b) const;
  FieldElem neg(FieldElem a) const;
  FieldElem sub(FieldElem a, FieldElem b) const { return add(a, neg(b)); }
  FieldElem mul(FieldElem a, FieldElem b) const {
    if (a.code == 0 || b.code == 0) return {};
    std::uint32_t s = log_[a.code] + log_[b.code];
    if (s >= order_ - 1) s -= order_ - 1;
    return {exp_[s]};
  }
  FieldElem inv(FieldElem a) const;
  FieldElem div(FieldElem a, FieldElem b) const { return mul(a, inv(b)); }
  FieldElem pow(FieldElem a, std::int64_t n) const;

  /// a^(q^k) for any integer k; negative k applies the inverse automorphism.
  FieldElem frobenius(FieldElem a, std::int64_t k) const;
  /// a^p.
  FieldElem frobenius_p(FieldElem a) const { return pow(a, p_); }

  bool in_base_field(FieldElem a) const { return frobenius(a, 1) == a; }
  /// The q elements of F_q in increasing code order (zero first).
  const std::vector<FieldElem>& base_field() const { return base_; }

  /// Discrete logarithm with respect to the table generator; a must be nonzero.
  std::uint32_t log(FieldElem a) const;
  FieldElem exp(std::uint64_t k) const { return {exp_[k % (order_ - 1)]}; }
  FieldElem generator() const { return {exp_[order_ > 2 ? 1 : 0]}; }

  bool is_square(FieldElem a) const;
  /// Canonical square root (smaller discrete log of the two), if one exists.
  /// Requires odd p.
  std::optional<FieldElem> sqrt(FieldElem a) const;

  /// "2,0,1": coordinates ascending, comma separated.
  std::string coords_string(FieldElem a) const;
  /// "field p=.. v=.. f=.. modulus=.." header line (no newline).
  std::string header() const;

 private:
  FieldDesc(std::uint32_t p, std::uint32_t v, std::uint32_t f, std::vector<std::uint32_t> modulus);

  std::uint32_t p_, v_, f_, q_, order_;
  std::vector<std::uint32_t> modulus_;
  std::vector<std::uint32_t> exp_;   // exp_[k] = code of g^k, k < Q-1
  std::vector<std::uint32_t> log_;   // log_[code], undefined at 0
  std::vector<std::int32_t> zech_;   // log(1 + g^k) or -1 when 1 + g^k = 0 (odd p, degree > 1)
  std::uint32_t minus_one_log_ = 0;
  std::vector<FieldElem> base_;
};

/// True when the monic-normalized polynomial (coefficients ascending) over F_p
/// has no factor of degree 1..deg/2. Brute-force trial division.
bool is_irreducible_mod_p(std::span<const std::uint32_t> poly, std::uint32_t p);

bool is_prime(std::uint64_t n);

}  // namespace fql
