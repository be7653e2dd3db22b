#include "fql/matrix.hpp"

#include <stdexcept>
#include <utility>

#include "fql/error.hpp"

namespace fql {

SeriesMatrix::SeriesMatrix(FieldPtr field, std::size_t rows, std::size_t cols, Rational prec)
    : field_(std::move(field)), rows_(rows), cols_(cols) {
  data_.reserve(rows * cols);
  for (std::size_t i = 0; i < rows * cols; ++i) data_.push_back(Series::zero(field_, prec));
}

SeriesMatrix SeriesMatrix::identity(FieldPtr field, std::size_t m) {
  SeriesMatrix r(field, m, m);
  for (std::size_t i = 0; i < m; ++i) r(i, i) = Series::constant(field, field->one());
  return r;
}

SeriesMatrix SeriesMatrix::scalar(const Series& s, std::size_t m) {
  SeriesMatrix r(s.field(), m, m);
  for (std::size_t i = 0; i < m; ++i) r(i, i) = s;
  return r;
}

SeriesMatrix SeriesMatrix::from_entries(FieldPtr field, std::size_t rows, std::size_t cols,
                                        std::vector<Series> entries) {
  if (entries.size() != rows * cols) throw std::invalid_argument("matrix entry count mismatch");
  SeriesMatrix r(field, 0, 0);
  r.rows_ = rows;
  r.cols_ = cols;
  r.data_ = std::move(entries);
  for (const auto& s : r.data_) require_same_field(*field, s.desc());
  return r;
}

Rational SeriesMatrix::valuation() const {
  Rational v = Rational::infinity();
  for (const auto& s : data_) v = min(v, s.valuation());
  return v;
}

Rational SeriesMatrix::precision() const {
  Rational v = Rational::infinity();
  for (const auto& s : data_) v = min(v, s.precision());
  return v;
}

bool SeriesMatrix::is_zero() const {
  for (const auto& s : data_)
    if (!s.is_zero()) return false;
  return true;
}

namespace {
void require_shape(const SeriesMatrix& a, const SeriesMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("matrix shape mismatch");
}
}  // namespace

SeriesMatrix& SeriesMatrix::operator+=(const SeriesMatrix& o) {
  require_shape(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

SeriesMatrix& SeriesMatrix::operator-=(const SeriesMatrix& o) {
  require_shape(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

SeriesMatrix SeriesMatrix::operator-() const {
  SeriesMatrix r = *this;
  for (auto& s : r.data_) s = -s;
  return r;
}

SeriesMatrix operator*(const SeriesMatrix& a, const SeriesMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product shape mismatch");
  SeriesMatrix r(a.field(), a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Series acc = a(i, 0) * b(0, j);
      for (std::size_t l = 1; l < a.cols(); ++l) acc += a(i, l) * b(l, j);
      r(i, j) = std::move(acc);
    }
  }
  return r;
}

SeriesMatrix operator*(const Series& s, const SeriesMatrix& m) {
  SeriesMatrix r = m;
  for (auto& x : r.data_) x = s * x;
  return r;
}

SeriesMatrix SeriesMatrix::frobenius(std::int64_t k) const {
  SeriesMatrix r = *this;
  for (auto& s : r.data_) s = s.frobenius(k);
  return r;
}

SeriesMatrix SeriesMatrix::truncated(const Rational& prec) const {
  SeriesMatrix r = *this;
  for (auto& s : r.data_) s = s.truncated(prec);
  return r;
}

SeriesMatrix SeriesMatrix::transposed() const {
  SeriesMatrix r(field_, cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
  return r;
}

bool operator==(const SeriesMatrix& a, const SeriesMatrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

SeriesMatrix mat_solve(const SeriesMatrix& A, const SeriesMatrix& B) {
  if (!A.is_square()) throw std::invalid_argument("mat_solve: coefficient matrix must be square");
  if (A.rows() != B.rows()) throw std::invalid_argument("mat_solve: right-hand side row count mismatch");
  const std::size_t n = A.rows();
  const std::size_t m = B.cols();
  SeriesMatrix a = A;
  SeriesMatrix b = B;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = n;
    for (std::size_t r = col; r < n; ++r) {
      if (a(r, col).is_zero()) continue;
      if (piv == n || a(r, col).valuation() < a(piv, col).valuation()) piv = r;
    }
    if (piv == n)
      throw SingularError("singular to precision: no pivot distinguishable from 0 in column " + std::to_string(col));
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
      for (std::size_t j = 0; j < m; ++j) std::swap(b(piv, j), b(col, j));
    }
    const Series pivot = a(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      if (a(r, col).is_zero()) {
        a(r, col) = Series::zero(A.field(), a(r, col).precision());
        continue;
      }
      const Series factor = a(r, col) / pivot;
      for (std::size_t j = col; j < n; ++j) a(r, j) -= factor * a(col, j);
      for (std::size_t j = 0; j < m; ++j) b(r, j) -= factor * b(col, j);
    }
  }

  SeriesMatrix x(A.field(), n, m);
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t j = 0; j < m; ++j) {
      Series acc = b(ii, j);
      for (std::size_t l = ii + 1; l < n; ++l) acc -= a(ii, l) * x(l, j);
      x(ii, j) = acc / a(ii, ii);
    }
  }
  return x;
}

SeriesMatrix inverse(const SeriesMatrix& A) { return mat_solve(A, SeriesMatrix::identity(A.field(), A.rows())); }

}  // namespace fql
