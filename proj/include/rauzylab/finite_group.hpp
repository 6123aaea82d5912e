#ifndef RAUZYLAB_FINITE_GROUP_HPP
#define RAUZYLAB_FINITE_GROUP_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "rauzylab/cocycle.hpp"

namespace rauzylab {

// An enumerated finite matrix group over Z/qZ, built by BFS closure from a
// generating set. Element 0 is the identity; the enumeration order is the
// BFS discovery order, deterministic given the generator list.
class FiniteGroup {
 public:
  static FiniteGroup generate(std::size_t genus, long long q,
                              const std::vector<SpElement>& generators,
                              std::uint64_t cap);

  std::size_t size() const { return elements_.size(); }
  std::size_t genus() const { return genus_; }
  long long modulus() const { return q_; }
  std::size_t dim() const { return 2 * genus_; }

  std::size_t identity() const { return 0; }
  std::size_t mul(std::size_t a, std::size_t b) const;
  std::size_t inv(std::size_t a) const { return inv_table_[a]; }

  SpElement element(std::size_t i) const;
  std::size_t index_of(const SpElement& e) const;
  bool contains(const SpElement& e) const;

  // dense id of the image of element i under reduction mod divisor (ids are
  // contiguous 0..n_cosets-1 in first-appearance order)
  std::vector<std::size_t> reduction_ids(long long divisor) const;

  const std::vector<std::size_t>& generator_indices() const {
    return generator_indices_;
  }

 private:
  std::size_t genus_ = 0;
  long long q_ = 0;
  std::vector<std::string> elements_;  // byte-encoded matrices
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::size_t> inv_table_;
  std::vector<std::size_t> generator_indices_;

  std::string mul_key(std::size_t a, std::size_t b) const;
};

std::string encode_mod_matrix(const BigMatrix& m, long long q);

}  // namespace rauzylab

#endif
