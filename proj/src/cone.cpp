#include "rauzylab/cone.hpp"

#include <algorithm>
#include <numeric>

#include "rauzylab/errors.hpp"

namespace rauzylab {

std::vector<std::vector<int>> cone_inequalities(const PermutationPair& pair) {
  const std::size_t d = pair.size();
  std::vector<std::vector<int>> rows;
  rows.reserve(2 * (d - 1));
  for (std::size_t k = 1; k <= d - 1; ++k) {
    std::vector<int> row(d, 0);
    for (std::size_t pos = 0; pos < k; ++pos) row[pair.top_at(pos)] = 1;
    rows.push_back(std::move(row));
  }
  for (std::size_t k = 1; k <= d - 1; ++k) {
    std::vector<int> row(d, 0);
    for (std::size_t pos = 0; pos < k; ++pos) row[pair.bottom_at(pos)] = -1;
    rows.push_back(std::move(row));
  }
  return rows;
}

bool cone_contains(const PermutationPair& pair,
                   const std::vector<double>& tau) {
  if (tau.size() != pair.size())
    fail(ErrorKind::DimensionMismatch, "tau length");
  for (const auto& row : cone_inequalities(pair)) {
    double s = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) s += row[j] * tau[j];
    if (!(s > 0.0)) return false;
  }
  return true;
}

bool cone_contains_exact(const PermutationPair& pair,
                         const std::vector<BigInt>& tau) {
  if (tau.size() != pair.size())
    fail(ErrorKind::DimensionMismatch, "tau length");
  for (const auto& row : cone_inequalities(pair)) {
    BigInt s = 0;
    for (std::size_t j = 0; j < row.size(); ++j) s += row[j] * tau[j];
    if (s <= 0) return false;
  }
  return true;
}

namespace {

// one-dimensional rational kernel of a (d-1) x d integer matrix, or empty if
// the rank is below d-1
std::vector<BigInt> primitive_kernel(const std::vector<std::vector<int>>& m,
                                     std::size_t d) {
  std::vector<std::vector<BigRat>> w(m.size(), std::vector<BigRat>(d));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < d; ++j) w[i][j] = m[i][j];

  std::vector<std::size_t> pivot_col;
  std::size_t row = 0;
  for (std::size_t col = 0; col < d && row < w.size(); ++col) {
    std::size_t p = row;
    while (p < w.size() && w[p][col] == 0) ++p;
    if (p == w.size()) continue;
    std::swap(w[p], w[row]);
    BigRat piv = w[row][col];
    for (std::size_t j = 0; j < d; ++j) w[row][j] /= piv;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i == row || w[i][col] == 0) continue;
      BigRat f = w[i][col];
      for (std::size_t j = 0; j < d; ++j) w[i][j] -= f * w[row][j];
    }
    pivot_col.push_back(col);
    ++row;
  }
  if (pivot_col.size() != d - 1) return {};

  std::vector<bool> is_pivot(d, false);
  for (auto c : pivot_col) is_pivot[c] = true;
  std::size_t free_col = 0;
  while (is_pivot[free_col]) ++free_col;

  std::vector<BigRat> v(d, BigRat(0));
  v[free_col] = 1;
  for (std::size_t r = 0; r < pivot_col.size(); ++r)
    v[pivot_col[r]] = -w[r][free_col];

  BigInt lcm = 1;
  for (const auto& x : v) lcm = boost::multiprecision::lcm(lcm, denominator(x));
  std::vector<BigInt> out(d);
  for (std::size_t j = 0; j < d; ++j)
    out[j] = numerator(v[j]) * (lcm / denominator(v[j]));
  BigInt g = 0;
  for (const auto& x : out) g = boost::multiprecision::gcd(g, abs(x));
  if (g > 1)
    for (auto& x : out) x /= g;
  return out;
}

}  // namespace

std::vector<std::vector<BigInt>> cone_extreme_rays(
    const PermutationPair& pair) {
  const std::size_t d = pair.size();
  auto rows = cone_inequalities(pair);
  const std::size_t n = rows.size();

  auto satisfies_all = [&](const std::vector<BigInt>& v) {
    for (const auto& row : rows) {
      BigInt s = 0;
      for (std::size_t j = 0; j < d; ++j) s += row[j] * v[j];
      if (s < 0) return false;
    }
    return true;
  };

  std::vector<std::vector<BigInt>> rays;
  std::vector<std::size_t> subset(d - 1);
  std::iota(subset.begin(), subset.end(), 0);
  // iterate over all (d-1)-subsets of the constraint rows
  while (true) {
    std::vector<std::vector<int>> active;
    for (auto i : subset) active.push_back(rows[i]);
    auto v = primitive_kernel(active, d);
    if (!v.empty()) {
      bool keep = false;
      if (satisfies_all(v)) {
        keep = true;
      } else {
        for (auto& x : v) x = -x;
        keep = satisfies_all(v);
      }
      if (keep && std::find(rays.begin(), rays.end(), v) == rays.end())
        rays.push_back(v);
    }
    // next subset
    std::size_t i = d - 1;
    while (i > 0 && subset[i - 1] == n - (d - 1) + (i - 1)) --i;
    if (i == 0) break;
    ++subset[i - 1];
    for (std::size_t j = i; j < d - 1; ++j) subset[j] = subset[j - 1] + 1;
  }
  return rays;
}

}  // namespace rauzylab
