#include "fql/field.hpp"
#include "fql/error.hpp"

#include <stdexcept>

namespace fql {

namespace {

using Poly = std::vector<std::uint32_t>;

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

// Remainder of a modulo the polynomial m (leading coefficient invertible mod p).
Poly poly_mod(Poly a, const Poly& m, std::uint32_t p) {
  trim(a);
  const std::size_t dm = m.size() - 1;
  std::uint64_t lead_inv = 1;
  {
    // Fermat inverse of the leading coefficient.
    std::uint64_t base = m.back() % p, e = p - 2;
    while (e) {
      if (e & 1) lead_inv = lead_inv * base % p;
      base = base * base % p;
      e >>= 1;
    }
  }
  while (a.size() > dm) {
    const std::size_t shift = a.size() - 1 - dm;
    const std::uint64_t c = a.back() * lead_inv % p;
    for (std::size_t i = 0; i <= dm; ++i) {
      a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + p - c * m[i] % p) % p);
    }
    trim(a);
  }
  return a;
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& m, std::uint32_t p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      r[i + j] = static_cast<std::uint32_t>((r[i + j] + static_cast<std::uint64_t>(a[i]) * b[j]) % p);
  return poly_mod(std::move(r), m, p);
}

Poly code_to_poly(std::uint32_t code, std::uint32_t p) {
  Poly r;
  while (code) {
    r.push_back(code % p);
    code /= p;
  }
  return r;
}

std::uint32_t poly_to_code(const Poly& a, std::uint32_t p) {
  std::uint32_t code = 0;
  for (std::size_t i = a.size(); i-- > 0;) code = code * p + a[i];
  return code;
}

Poly poly_powmod(Poly base, std::uint64_t e, const Poly& m, std::uint32_t p) {
  Poly r{1};
  while (e) {
    if (e & 1) r = poly_mulmod(r, base, m, p);
    base = poly_mulmod(base, base, m, p);
    e >>= 1;
  }
  return r;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

bool is_irreducible_mod_p(std::span<const std::uint32_t> poly, std::uint32_t p) {
  Poly m(poly.begin(), poly.end());
  trim(m);
  if (m.size() < 2) return false;
  const std::size_t deg = m.size() - 1;
  // Every monic divisor candidate of degree d is encoded by its p^d lower coefficients.
  for (std::size_t d = 1; d <= deg / 2; ++d) {
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < d; ++i) count *= p;
    for (std::uint64_t c = 0; c < count; ++c) {
      Poly cand = code_to_poly(static_cast<std::uint32_t>(c), p);
      cand.resize(d, 0);
      cand.push_back(1);
      if (poly_mod(m, cand, p).empty()) return false;
    }
  }
  return true;
}

FieldPtr FieldDesc::make(std::uint32_t p, std::uint32_t v, std::uint32_t f, std::vector<std::uint32_t> modulus) {
  return FieldPtr(new FieldDesc(p, v, f, std::move(modulus)));
}

FieldDesc::FieldDesc(std::uint32_t p, std::uint32_t v, std::uint32_t f, std::vector<std::uint32_t> modulus)
    : p_(p), v_(v), f_(f) {
  if (!is_prime(p)) throw std::invalid_argument("field characteristic " + std::to_string(p) + " is not prime");
  if (v == 0 || f == 0) throw std::invalid_argument("field exponents v and f must be positive");
  std::uint64_t order = 1, q = 1;
  const std::uint32_t n = v * f;
  for (std::uint32_t i = 0; i < n; ++i) {
    order *= p;
    if (i < v) q *= p;
    if (order > kMaxOrder)
      throw std::invalid_argument("coefficient field of order " + std::to_string(p) + "^" + std::to_string(n) +
                                  " exceeds the table limit 2^16");
  }
  order_ = static_cast<std::uint32_t>(order);
  q_ = static_cast<std::uint32_t>(q);

  if (modulus.empty()) {
    for (std::uint32_t c = 0; c < order_; ++c) {
      Poly cand = code_to_poly(c, p);
      cand.resize(n, 0);
      cand.push_back(1);
      if (is_irreducible_mod_p(cand, p)) {
        modulus = std::move(cand);
        break;
      }
    }
  } else {
    for (auto c : modulus)
      if (c >= p) throw std::invalid_argument("modulus coefficient out of range for F_" + std::to_string(p));
    if (modulus.size() != n + 1 || modulus.back() != 1)
      throw std::invalid_argument("modulus must be monic of degree v*f = " + std::to_string(n));
    if (!is_irreducible_mod_p(modulus, p)) throw std::invalid_argument("modulus is reducible over F_p");
  }
  modulus_ = std::move(modulus);

  // Primitive element: smallest code whose order is Q-1.
  const std::uint64_t group = order_ - 1;
  const auto factors = prime_factors(group);
  Poly gen{1};
  for (std::uint32_t c = 1; c < order_; ++c) {
    Poly g = code_to_poly(c, p);
    bool primitive = true;
    for (auto r : factors) {
      if (poly_powmod(g, group / r, modulus_, p) == Poly{1}) {
        primitive = false;
        break;
      }
    }
    if (primitive) {
      gen = g;
      break;
    }
  }

  exp_.resize(group);
  log_.assign(order_, 0);
  Poly cur{1};
  for (std::uint64_t k = 0; k < group; ++k) {
    const std::uint32_t code = poly_to_code(cur, p);
    exp_[k] = code;
    log_[code] = static_cast<std::uint32_t>(k);
    cur = poly_mulmod(cur, gen, modulus_, p);
  }

  if (p_ != 2) {
    minus_one_log_ = static_cast<std::uint32_t>(group / 2);
    if (n > 1) {
      zech_.resize(group);
      for (std::uint64_t k = 0; k < group; ++k) {
        std::uint32_t code = exp_[k];
        const std::uint32_t d0 = code % p_;
        code = code - d0 + (d0 + 1) % p_;
        zech_[k] = code == 0 ? -1 : static_cast<std::int32_t>(log_[code]);
      }
    }
  }

  for (std::uint32_t c = 0; c < order_; ++c)
    if (in_base_field({c})) base_.push_back({c});
}

FieldElem FieldDesc::from_int(std::int64_t k) const {
  const std::int64_t r = ((k % static_cast<std::int64_t>(p_)) + p_) % p_;
  return {static_cast<std::uint32_t>(r)};
}

FieldElem FieldDesc::from_coords(std::span<const std::uint32_t> coords) const {
  if (coords.size() > degree()) throw std::invalid_argument("too many coordinates for field element");
  std::uint32_t code = 0;
  for (std::size_t i = coords.size(); i-- > 0;) {
    if (coords[i] >= p_) throw std::invalid_argument("field coordinate out of range");
    code = code * p_ + coords[i];
  }
  return {code};
}

std::vector<std::uint32_t> FieldDesc::coords(FieldElem a) const {
  std::vector<std::uint32_t> r(degree(), 0);
  std::uint32_t code = a.code;
  for (std::uint32_t i = 0; i < degree(); ++i) {
    r[i] = code % p_;
    code /= p_;
  }
  return r;
}

FieldElem FieldDesc::add(FieldElem a, FieldElem b) const {
  if (a.code == 0) return b;
  if (b.code == 0) return a;
  if (p_ == 2) return {a.code ^ b.code};
  if (degree() == 1) return {(a.code + b.code) % p_};
  const std::uint32_t group = order_ - 1;
  const std::uint32_t la = log_[a.code];
  const std::uint32_t lb = log_[b.code];
  const std::uint32_t d = lb >= la ? lb - la : lb + group - la;
  const std::int32_t z = zech_[d];
  if (z < 0) return {};
  std::uint32_t s = la + static_cast<std::uint32_t>(z);
  if (s >= group) s -= group;
  return {exp_[s]};
}

FieldElem FieldDesc::neg(FieldElem a) const {
  if (a.code == 0 || p_ == 2) return a;
  if (degree() == 1) return {p_ - a.code};
  std::uint32_t s = log_[a.code] + minus_one_log_;
  if (s >= order_ - 1) s -= order_ - 1;
  return {exp_[s]};
}

FieldElem FieldDesc::inv(FieldElem a) const {
  if (a.code == 0) throw std::domain_error("inverse of zero in F_Q");
  const std::uint32_t group = order_ - 1;
  return {exp_[(group - log_[a.code]) % group]};
}

FieldElem FieldDesc::pow(FieldElem a, std::int64_t n) const {
  if (a.code == 0) {
    if (n > 0) return {};
    if (n == 0) return one();
    throw std::domain_error("negative power of zero in F_Q");
  }
  const std::int64_t group = order_ - 1;
  const std::int64_t e = ((n % group) + group) % group;
  const std::uint64_t s = (static_cast<std::uint64_t>(log_[a.code]) * static_cast<std::uint64_t>(e)) % group;
  return {exp_[s]};
}

FieldElem FieldDesc::frobenius(FieldElem a, std::int64_t k) const {
  if (a.code == 0) return a;
  const std::int64_t kk = ((k % static_cast<std::int64_t>(f_)) + f_) % f_;
  const std::uint64_t group = order_ - 1;
  std::uint64_t e = 1;
  for (std::int64_t i = 0; i < kk; ++i) e = e * q_ % group;
  return {exp_[(static_cast<std::uint64_t>(log_[a.code]) * e) % group]};
}

std::uint32_t FieldDesc::log(FieldElem a) const {
  if (a.code == 0) throw std::domain_error("discrete log of zero");
  return log_[a.code];
}

bool FieldDesc::is_square(FieldElem a) const {
  if (a.code == 0 || p_ == 2) return true;
  return log_[a.code] % 2 == 0;
}

std::optional<FieldElem> FieldDesc::sqrt(FieldElem a) const {
  if (p_ == 2) throw DomainError("square roots are only supported for odd characteristic");
  if (a.code == 0) return a;
  const std::uint32_t la = log_[a.code];
  if (la % 2 != 0) return std::nullopt;
  return FieldElem{exp_[la / 2]};
}

std::string FieldDesc::coords_string(FieldElem a) const {
  std::string out;
  const auto c = coords(a);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(c[i]);
  }
  return out;
}

std::string FieldDesc::header() const {
  std::string out = "field p=" + std::to_string(p_) + " v=" + std::to_string(v_) + " f=" + std::to_string(f_) +
                    " modulus=";
  for (std::size_t i = 0; i < modulus_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(modulus_[i]);
  }
  return out;
}

}  // namespace fql
