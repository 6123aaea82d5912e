#ifndef RAUZYLAB_BIGMAT_HPP
#define RAUZYLAB_BIGMAT_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <string>
#include <vector>

namespace rauzylab {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

// Dense arbitrary-precision integer matrix. Exact arithmetic everywhere;
// cocycle products along long paths overflow machine words quickly.
class BigMatrix {
 public:
  BigMatrix() : rows_(0), cols_(0) {}
  BigMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols) {}

  static BigMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  BigInt& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const BigInt& at(std::size_t i, std::size_t j) const {
    return a_[i * cols_ + j];
  }

  bool operator==(const BigMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }
  bool operator!=(const BigMatrix& o) const { return !(*this == o); }

  BigMatrix operator*(const BigMatrix& o) const;
  BigMatrix operator+(const BigMatrix& o) const;
  BigMatrix operator-(const BigMatrix& o) const;
  BigMatrix transpose() const;

  std::vector<BigInt> apply(const std::vector<BigInt>& v) const;
  std::vector<double> apply(const std::vector<double>& v) const;

  BigInt det() const;

  // Exact inverse; requires det = +-1 (the only case we need).
  // Throws NonUnimodularForm otherwise.
  BigMatrix unimodular_inverse() const;

  // max over columns of the sum of absolute entries
  BigInt linf_colsum_norm() const;

  bool is_identity() const;
  bool all_entries_at_least(const BigInt& bound) const;

  std::string to_text() const;  // rows ';'-separated, entries ','-separated
  static BigMatrix from_text(const std::string& text);

 private:
  std::size_t rows_, cols_;
  std::vector<BigInt> a_;
};

struct SmithResult {
  BigMatrix u;  // unimodular row transform
  BigMatrix v;  // unimodular column transform
  BigMatrix d;  // u * m * v, diagonal with divisibility chain
  std::size_t rank = 0;
};

// Smith normal form with transforms (used for integer kernel / quotient
// basis extraction, not exposed as a general-purpose SNF library).
SmithResult smith_normal_form(const BigMatrix& m);

}  // namespace rauzylab

#endif
