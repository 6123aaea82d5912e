#include "rauzylab/bigmat.hpp"

#include <algorithm>
#include <sstream>

#include "rauzylab/errors.hpp"

namespace rauzylab {

BigMatrix BigMatrix::identity(std::size_t n) {
  BigMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

BigMatrix BigMatrix::operator*(const BigMatrix& o) const {
  if (cols_ != o.rows_) fail(ErrorKind::DimensionMismatch, "matrix product");
  BigMatrix r(rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const BigInt& x = at(i, k);
      if (x == 0) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) r.at(i, j) += x * o.at(k, j);
    }
  return r;
}

BigMatrix BigMatrix::operator+(const BigMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    fail(ErrorKind::DimensionMismatch, "matrix sum");
  BigMatrix r(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
  return r;
}

BigMatrix BigMatrix::operator-(const BigMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    fail(ErrorKind::DimensionMismatch, "matrix difference");
  BigMatrix r(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
  return r;
}

BigMatrix BigMatrix::transpose() const {
  BigMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
  return r;
}

std::vector<BigInt> BigMatrix::apply(const std::vector<BigInt>& v) const {
  if (v.size() != cols_) fail(ErrorKind::DimensionMismatch, "matrix apply");
  std::vector<BigInt> r(rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r[i] += at(i, j) * v[j];
  return r;
}

std::vector<double> BigMatrix::apply(const std::vector<double>& v) const {
  if (v.size() != cols_) fail(ErrorKind::DimensionMismatch, "matrix apply");
  std::vector<double> r(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      r[i] += static_cast<double>(at(i, j)) * v[j];
  return r;
}

namespace {

// fraction-free Gaussian elimination (Bareiss)
BigInt bareiss_det(BigMatrix m) {
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m.at(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m.at(p, k) == 0) ++p;
      if (p == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(p, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        BigInt num = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
        m.at(i, j) = num / prev;  // exact division by Bareiss
      }
    prev = m.at(k, k);
  }
  return sign * m.at(n - 1, n - 1);
}

}  // namespace

BigInt BigMatrix::det() const {
  if (rows_ != cols_) fail(ErrorKind::DimensionMismatch, "determinant");
  return bareiss_det(*this);
}

BigMatrix BigMatrix::unimodular_inverse() const {
  if (rows_ != cols_) fail(ErrorKind::DimensionMismatch, "inverse");
  const std::size_t n = rows_;
  // rational Gauss-Jordan; result must be integral for det = +-1
  std::vector<std::vector<BigRat>> w(n, std::vector<BigRat>(2 * n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) w[i][j] = BigRat(at(i, j));
    w[i][n + i] = 1;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && w[p][c] == 0) ++p;
    if (p == n) fail(ErrorKind::NonUnimodularForm, "singular matrix");
    std::swap(w[p], w[c]);
    BigRat piv = w[c][c];
    for (std::size_t j = 0; j < 2 * n; ++j) w[c][j] /= piv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || w[i][c] == 0) continue;
      BigRat f = w[i][c];
      for (std::size_t j = 0; j < 2 * n; ++j) w[i][j] -= f * w[c][j];
    }
  }
  BigMatrix r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const BigRat& x = w[i][n + j];
      if (denominator(x) != 1)
        fail(ErrorKind::NonUnimodularForm, "inverse is not integral");
      r.at(i, j) = numerator(x);
    }
  return r;
}

BigInt BigMatrix::linf_colsum_norm() const {
  BigInt best = 0;
  for (std::size_t j = 0; j < cols_; ++j) {
    BigInt s = 0;
    for (std::size_t i = 0; i < rows_; ++i) s += abs(at(i, j));
    best = std::max(best, s);
  }
  return best;
}

bool BigMatrix::is_identity() const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (at(i, j) != (i == j ? 1 : 0)) return false;
  return true;
}

bool BigMatrix::all_entries_at_least(const BigInt& bound) const {
  for (const auto& x : a_)
    if (x < bound) return false;
  return true;
}

std::string BigMatrix::to_text() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < rows_; ++i) {
    if (i) out << ';';
    for (std::size_t j = 0; j < cols_; ++j) {
      if (j) out << ',';
      out << at(i, j);
    }
  }
  return out.str();
}

BigMatrix BigMatrix::from_text(const std::string& text) {
  std::vector<std::vector<BigInt>> rows;
  std::stringstream ss(text);
  std::string row;
  while (std::getline(ss, row, ';')) {
    std::vector<BigInt> r;
    std::stringstream rs(row);
    std::string cell;
    while (std::getline(rs, cell, ',')) {
      if (cell.empty()) fail(ErrorKind::ParseError, "empty matrix entry");
      try {
        r.push_back(BigInt(cell));
      } catch (const std::exception&) {
        fail(ErrorKind::ParseError, "bad matrix entry '" + cell + "'");
      }
    }
    rows.push_back(std::move(r));
  }
  if (rows.empty()) fail(ErrorKind::ParseError, "empty matrix text");
  for (const auto& r : rows)
    if (r.size() != rows[0].size())
      fail(ErrorKind::ParseError, "ragged matrix text");
  BigMatrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m.at(i, j) = rows[i][j];
  return m;
}

SmithResult smith_normal_form(const BigMatrix& m) {
  SmithResult res;
  const std::size_t nr = m.rows(), nc = m.cols();
  res.u = BigMatrix::identity(nr);
  res.v = BigMatrix::identity(nc);
  res.d = m;
  BigMatrix& d = res.d;
  BigMatrix& u = res.u;
  BigMatrix& v = res.v;

  auto swap_rows = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < nc; ++j) std::swap(d.at(a, j), d.at(b, j));
    for (std::size_t j = 0; j < nr; ++j) std::swap(u.at(a, j), u.at(b, j));
  };
  auto swap_cols = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < nr; ++i) std::swap(d.at(i, a), d.at(i, b));
    for (std::size_t i = 0; i < nc; ++i) std::swap(v.at(i, a), v.at(i, b));
  };
  auto add_row = [&](std::size_t dst, std::size_t src, const BigInt& f) {
    for (std::size_t j = 0; j < nc; ++j) d.at(dst, j) += f * d.at(src, j);
    for (std::size_t j = 0; j < nr; ++j) u.at(dst, j) += f * u.at(src, j);
  };
  auto add_col = [&](std::size_t dst, std::size_t src, const BigInt& f) {
    for (std::size_t i = 0; i < nr; ++i) d.at(i, dst) += f * d.at(i, src);
    for (std::size_t i = 0; i < nc; ++i) v.at(i, dst) += f * v.at(i, src);
  };
  auto negate_row = [&](std::size_t a) {
    for (std::size_t j = 0; j < nc; ++j) d.at(a, j) = -d.at(a, j);
    for (std::size_t j = 0; j < nr; ++j) u.at(a, j) = -u.at(a, j);
  };

  std::size_t t = 0;
  while (t < nr && t < nc) {
    // find a pivot of minimal absolute value in the trailing block
    std::size_t pi = t, pj = t;
    BigInt best = 0;
    for (std::size_t i = t; i < nr; ++i)
      for (std::size_t j = t; j < nc; ++j) {
        BigInt a = abs(d.at(i, j));
        if (a != 0 && (best == 0 || a < best)) {
          best = a;
          pi = i;
          pj = j;
        }
      }
    if (best == 0) break;
    swap_rows(t, pi);
    swap_cols(t, pj);
    if (d.at(t, t) < 0) negate_row(t);

    bool clean = true;
    for (std::size_t i = t + 1; i < nr; ++i) {
      if (d.at(i, t) == 0) continue;
      BigInt q = d.at(i, t) / d.at(t, t);
      add_row(i, t, -q);
      if (d.at(i, t) != 0) clean = false;
    }
    for (std::size_t j = t + 1; j < nc; ++j) {
      if (d.at(t, j) == 0) continue;
      BigInt q = d.at(t, j) / d.at(t, t);
      add_col(j, t, -q);
      if (d.at(t, j) != 0) clean = false;
    }
    if (!clean) continue;  // a smaller remainder appeared; redo this pivot

    // enforce divisibility d(t,t) | d(i,j) for the trailing block
    bool divides_all = true;
    for (std::size_t i = t + 1; i < nr && divides_all; ++i)
      for (std::size_t j = t + 1; j < nc && divides_all; ++j)
        if (d.at(i, j) % d.at(t, t) != 0) {
          add_row(t, i, 1);
          divides_all = false;
        }
    if (!divides_all) continue;
    ++t;
  }
  res.rank = 0;
  for (std::size_t i = 0; i < std::min(nr, nc); ++i)
    if (d.at(i, i) != 0) ++res.rank;
  return res;
}

}  // namespace rauzylab
