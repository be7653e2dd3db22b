#pragma once

#include <cstddef>
#include <vector>

#include "fql/series.hpp"

namespace fql {

/// Dense row-major matrix over Series. |M| is the largest entry absolute
/// value, so valuation() is the least entry valuation.
class SeriesMatrix {
 public:
  /// rows x cols zero matrix at the given precision.
  SeriesMatrix(FieldPtr field, std::size_t rows, std::size_t cols, Rational prec = Rational::infinity());
  static SeriesMatrix identity(FieldPtr field, std::size_t m);
  static SeriesMatrix scalar(const Series& s, std::size_t m);
  /// Row-major entries; entries.size() must equal rows * cols.
  static SeriesMatrix from_entries(FieldPtr field, std::size_t rows, std::size_t cols, std::vector<Series> entries);

  const FieldPtr& field() const { return field_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  const Series& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  Series& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const std::vector<Series>& entries() const { return data_; }

  Rational valuation() const;
  Rational precision() const;
  bool is_zero() const;

  SeriesMatrix& operator+=(const SeriesMatrix& o);
  SeriesMatrix& operator-=(const SeriesMatrix& o);
  SeriesMatrix operator-() const;
  friend SeriesMatrix operator+(SeriesMatrix a, const SeriesMatrix& b) { return a += b; }
  friend SeriesMatrix operator-(SeriesMatrix a, const SeriesMatrix& b) { return a -= b; }
  friend SeriesMatrix operator*(const SeriesMatrix& a, const SeriesMatrix& b);
  friend SeriesMatrix operator*(const Series& s, const SeriesMatrix& m);

  SeriesMatrix frobenius(std::int64_t k) const;
  SeriesMatrix truncated(const Rational& prec) const;
  SeriesMatrix transposed() const;

  friend bool operator==(const SeriesMatrix& a, const SeriesMatrix& b);

 private:
  FieldPtr field_;
  std::size_t rows_, cols_;
  std::vector<Series> data_;
};

inline SeriesMatrix frobenius(const SeriesMatrix& m, std::int64_t k) { return m.frobenius(k); }

/// Solves A X = B by Gaussian elimination, pivoting in each column on the
/// entry of least valuation. Throws SingularError when every candidate pivot
/// is zero to its precision.
SeriesMatrix mat_solve(const SeriesMatrix& A, const SeriesMatrix& B);

/// A^(-1) via mat_solve against the identity.
SeriesMatrix inverse(const SeriesMatrix& A);

}  // namespace fql
