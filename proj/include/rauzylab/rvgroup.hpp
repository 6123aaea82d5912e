#ifndef RAUZYLAB_RVGROUP_HPP
#define RAUZYLAB_RVGROUP_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rauzylab/cocycle.hpp"
#include "rauzylab/finite_group.hpp"
#include "rauzylab/rauzy.hpp"

namespace rauzylab {

struct RVGroupSpec {
  PermutationPair base;
  std::vector<std::pair<RauzyPath, SpElement>> generators;
  std::string label;
};

// Loop generators of the Rauzy-Veech group from a BFS out-tree: one loop
// P_src . arrow . Q_dst per class arrow, where P comes from the tree and Q is
// a shortest directed return path. Tree arrows contribute the P_v.Q_v loops
// that make the generated group equal to the full loop group.
std::vector<RauzyPath> spanning_tree_loops(const RauzyClass& cls,
                                           const PermutationPair& base);

RVGroupSpec make_rvgroup_spec(const RauzyClass& cls,
                              const PermutationPair& base,
                              const SymplecticBasis& basis);

// upsilon = upsilon0 plus the doubled loops; sigma is the difference set of
// the gamma0-prefixed cocycles, as induced 2g x 2g matrices
std::vector<BigMatrix> make_upsilon(PathSelection& selection,
                                    const SymplecticBasis& basis);

// BFS closure of the reduced generators; surjective iff the closure fills
// Sp_2g(Z/qZ)
std::pair<BigInt, bool> mod_q_closure(const std::vector<SpElement>& generators,
                                      std::size_t genus, long long q,
                                      std::uint64_t cap);

struct CayleyGap {
  long long q = 0;
  std::vector<SpElement> generating_set;  // symmetrized
  BigInt group_order;
  double lambda1 = 0.0;
  int iterations = 0;
};

// second-smallest eigenvalue of the normalized Cayley Laplacian, by power
// iteration on the complement of constants; residual tolerance 1e-8
CayleyGap cayley_gap(const std::vector<SpElement>& generators,
                     std::size_t genus, long long q, std::uint64_t seed,
                     std::uint64_t cap = 1000000);

// max over sigma of || g phi - phi ||_2 for the left regular action
double invariance_defect(const FiniteGroup& group,
                         const std::vector<double>& phi,
                         const std::vector<SpElement>& sigma);

}  // namespace rauzylab

#endif
