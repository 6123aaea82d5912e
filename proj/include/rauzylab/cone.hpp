#ifndef RAUZYLAB_CONE_HPP
#define RAUZYLAB_CONE_HPP

#include <vector>

#include "rauzylab/bigmat.hpp"
#include "rauzylab/rauzy.hpp"

namespace rauzylab {

// The suspension cone K_pi: tau with positive top partial sums and negative
// bottom partial sums, for all proper prefixes of the rows. Rows of the
// constraint matrix encode the 2(d-1) strict inequalities as "row . tau > 0".
std::vector<std::vector<int>> cone_inequalities(const PermutationPair& pair);

bool cone_contains(const PermutationPair& pair, const std::vector<double>& tau);
bool cone_contains_exact(const PermutationPair& pair,
                         const std::vector<BigInt>& tau);

// extreme rays of the closed cone, as primitive integer vectors
std::vector<std::vector<BigInt>> cone_extreme_rays(const PermutationPair& pair);

}  // namespace rauzylab

#endif
