#ifndef RAUZYLAB_QUASIRANDOM_HPP
#define RAUZYLAB_QUASIRANDOM_HPP

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "rauzylab/finite_group.hpp"
#include "rauzylab/transfer.hpp"

namespace rauzylab {

// complex measure on an enumerated finite group; coefficients are aligned
// with the group enumeration
struct GroupMeasure {
  long long q = 0;
  std::size_t genus = 0;
  std::vector<std::complex<double>> a;

  static GroupMeasure zero(const FiniteGroup& group);
  static GroupMeasure delta(const FiniteGroup& group, std::size_t index);
};

GroupMeasure convolve(const FiniteGroup& group, const GroupMeasure& x,
                      const GroupMeasure& y);
GroupMeasure tilde(const FiniteGroup& group, const GroupMeasure& x);
double ell1(const GroupMeasure& x);
double ell2(const GroupMeasure& x);

// largest singular value of convolution by mu restricted to the subspace
double subspace_opnorm(const FiniteGroup& group, const GroupMeasure& mu,
                       FiberSubspace subspace);

struct FlatnessReport {
  double lhs = 0.0;  // |tilde(nu) * nu|_2
  double rhs = 0.0;  // |nu|_1^2 / sqrt(|G|) + |nu|_1 |nu|_{l2,0}
  bool holds = false;
};

FlatnessReport flatness_bound_check(const FiniteGroup& group,
                                    const GroupMeasure& nu);

// (|G| |tilde(mu) * mu|_2^2 / dmin)^{1/4}, an upper bound for the new-space
// operator norm with the trace-formula constant set to 1
double trace_formula_bound(const FiniteGroup& group, const GroupMeasure& mu,
                           std::size_t dmin);

// character table data from the class-algebra (Burnside/Dixon) method
struct CharacterTable {
  std::vector<std::size_t> class_size;
  std::vector<std::size_t> class_rep;          // element indices
  std::vector<long long> degrees;              // one per character
  // chi(g_j) / chi(1), indexed [character][class]
  std::vector<std::vector<std::complex<double>>> ratio;
};

CharacterTable character_table(const FiniteGroup& group,
                               std::uint64_t seed = 1);

// standard symplectic generators of Sp_2g(Z) reduced mod q, in the
// interleaved (a1 b1 a2 b2 ...) basis convention
std::vector<SpElement> sp_generators(std::size_t genus, long long q);

FiniteGroup sp_group(std::size_t genus, long long q,
                     std::uint64_t cap = 100000);

// sorted irreducible dimensions of Sp_2g(Z/qZ)
std::vector<long long> dixon_dims(long long q, std::size_t genus,
                                  std::uint64_t cap = 100000);

// smallest dimension among characters not factoring through any proper
// divisor level
long long min_new_dim(long long q, std::size_t genus,
                      std::uint64_t cap = 100000);

enum class DimBoundMethod { PrimeExact, PrimePowerOrbit, CrtComposite };

struct DimBound {
  long long q = 0;
  std::size_t genus = 0;
  BigRat bound;
  DimBoundMethod method = DimBoundMethod::PrimeExact;
};

DimBound min_dim_bound_prime(long long p, std::size_t genus);
DimBound min_dim_bound(long long q, std::size_t genus);

// element of the symplectic Lie algebra over Z/p^R Z
struct LieAlgebraElement {
  long long p = 0;
  int r = 1;
  std::size_t genus = 1;
  BigMatrix x;  // 2g x 2g residues; X^T J0 + J0 X = 0 mod p^R
};

LieAlgebraElement make_lie_element(long long p, int r, std::size_t genus,
                                   const BigMatrix& x);

BigInt adjoint_orbit_size(const LieAlgebraElement& x,
                          std::uint64_t cap = 100000);

// all of sl_2(Z/p^R) partitioned into adjoint orbits; returns orbit sizes of
// the elements that are nonzero mod p
std::vector<std::size_t> sl2_orbit_sizes(long long p, int r);

struct DecouplingReport {
  std::size_t length_l = 0;
  std::size_t blocks_k = 0;
  long long q = 0;
  std::size_t tuple_count = 0;
  double c_deviation = 0.0;   // max log deviation across tuples
  double prefactor = 1.0;     // exp(max(0, c_deviation))
  bool dominated = false;     // mu1 <= mu2 entrywise
  double ell1_mu1 = 0.0;
  double ell1_mu2 = 0.0;
  double measured_b = 0.0;    // (|mu2|_1 / |mu1|_1)^{1/K}
  double conv_rate = 0.0;     // measured mean-zero decay rate of mu2
  double block_rate = 0.0;    // max block operator-norm ratio
};

DecouplingReport decoupling_check(const TransferConfig& config,
                                  const RPFData& rpf,
                                  const FiniteGroup& group, std::size_t L,
                                  std::size_t K, std::uint64_t seed);

}  // namespace rauzylab

#endif
