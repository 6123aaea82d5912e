#ifndef RAUZYLAB_COCYCLE_HPP
#define RAUZYLAB_COCYCLE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rauzylab/bigmat.hpp"
#include "rauzylab/rauzy.hpp"

namespace rauzylab {

// Theta of a single move: identity plus a single 1 in entry (loser, winner).
BigMatrix theta_of_move(const RauzyArrow& arrow);

// Theta_gamma, indexed so that the defining relation holds along the path:
//   QhatN(pi, lambda, tau) = (piN, (Theta_gamma^T)^-1 lambda, ...).
// Concatenation satisfies Theta*_{g1.g2} = Theta*_{g1} Theta*_{g2}.
BigMatrix theta_of_path(const RauzyPath& path);
BigMatrix theta_star_of_path(const RauzyPath& path);

// antisymmetric intersection matrix Omega_pi with entries in {-1,0,1}
BigMatrix omega(const PermutationPair& pair);

// Theta_{pi,e} Omega_pi Theta*_{pi,e} == Omega_pi', exact integer test
bool check_intertwining(const RauzyArrow& arrow);

struct SymplecticBasis {
  PermutationPair vertex;
  std::size_t genus = 0;
  BigMatrix lift;        // d x 2g, integral lift of the quotient basis
  BigMatrix projection;  // 2g x d, projection . lift = identity
  BigMatrix j0;          // 2g x 2g standard form, blocks [[0,1],[-1,0]]
};

BigMatrix standard_j0(std::size_t genus);

// integral symplectic basis of Z^A / ker(Omega|Z^A); quotient form equals j0
SymplecticBasis symplectic_basis(const PermutationPair& pair);

// symplectic matrix over Z (q == 0 stands for the integral case q = infinity)
struct SpElement {
  std::size_t genus = 0;
  long long q = 0;
  BigMatrix m;

  bool operator==(const SpElement& o) const {
    return genus == o.genus && q == o.q && m == o.m;
  }
  std::string to_text() const;  // "g=<g>;q=<q|inf>|<matrix>"
  static SpElement from_text(const std::string& text);
};

bool is_symplectic(const SpElement& e);

// induced action of Theta*_gamma on the homology quotient, for loops
SpElement induced_sp(const RauzyPath& loop, const SymplecticBasis& basis);
SpElement induced_sp(const BigMatrix& theta_star,
                     const SymplecticBasis& basis);

SpElement sp_identity(std::size_t genus, long long q);
SpElement reduce_mod(const SpElement& e, long long q);
SpElement sp_mul(const SpElement& a, const SpElement& b);
SpElement sp_inverse(const SpElement& e);

// |Sp_2g(Z/qZ)| via multiplicativity over prime powers
BigInt sp_order(std::size_t genus, long long q);

std::vector<std::pair<long long, int>> factorize(long long q);

}  // namespace rauzylab

#endif
