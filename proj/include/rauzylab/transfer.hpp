#ifndef RAUZYLAB_TRANSFER_HPP
#define RAUZYLAB_TRANSFER_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "rauzylab/cocycle.hpp"
#include "rauzylab/finite_group.hpp"
#include "rauzylab/rauzy.hpp"

namespace rauzylab {

// Piecewise-linear functions on the standard (d-1)-simplex, on the lattice
// mu = z/n with a Kuhn triangulation taken in staircase coordinates
// w_k = sum_{i<=k} y_i (the monotone region is a union of Kuhn cells).
class SimplexGrid {
 public:
  SimplexGrid() = default;
  SimplexGrid(std::size_t dim, std::size_t subdivisions);

  std::size_t dim() const { return dim_; }
  std::size_t subdivisions() const { return n_; }
  std::size_t size() const { return verts_.size(); }

  std::vector<double> vertex_mu(std::size_t idx) const;

  struct Stencil {
    std::vector<std::size_t> index;
    std::vector<double> weight;  // nonnegative, sums to 1
  };
  Stencil locate(const std::vector<double>& mu) const;

  double interpolate(const Stencil& st, const std::vector<double>& f) const;
  std::complex<double> interpolate(const Stencil& st,
                                   const std::vector<std::complex<double>>& f)
      const;

 private:
  std::size_t dim_ = 0, n_ = 0;
  std::vector<std::vector<int>> verts_;   // z tuples, length dim-1
  std::vector<std::size_t> code_to_idx_;  // mixed-radix lookup
  std::size_t code_of(const std::vector<int>& z) const;
};

struct TransferBranch {
  RauzyPath path;         // gamma = gamma0 . gamma', gamma0-adapted
  BigMatrix theta_star;   // Theta*_gamma
  SpElement cocycle;      // induced on the homology quotient, integral
  // mu-coordinate data: the branch map is mu -> B mu / |B mu| with
  // B = Theta*_{gamma' . gamma0}
  BigMatrix branch_mu;
};

// all gamma0-adapted branches with |Theta*_gamma|_col <= cutoff
std::vector<TransferBranch> enumerate_branches(const PathSelection& selection,
                                               const SymplecticBasis& basis,
                                               double cutoff);

struct TransferConfig {
  PathSelection selection;
  SymplecticBasis basis;
  SimplexGrid grid;
  std::vector<TransferBranch> branches;
  double cutoff = 0.0;
  double sigma = 0.0;
  double t_imag = 0.0;
  std::vector<double> basepoint_o;  // mu coordinates (simplex center)

  // per branch, per grid vertex: the roof value r(alpha_gamma(y_i)) and the
  // interpolation stencil of the image point, flattened (stencils have
  // exactly d nodes): entry (g, i, k) sits at (g * grid.size() + i) * d + k
  std::vector<double> roof;
  std::vector<std::uint32_t> image_index;
  std::vector<double> image_weight;
  std::vector<double> roof_at_o;

  double roof_entry(std::size_t g, std::size_t i) const {
    return roof[g * grid.size() + i];
  }

  double enumerated_mass = 0.0;  // sum of weights at o, sigma = config sigma
  double tail_bound = 0.0;       // dyadic-shell estimate of the excluded mass
};

TransferConfig make_transfer_config(const PathSelection& selection,
                                    std::size_t grid_n, double cutoff,
                                    double sigma, double t_imag = 0.0);

// branch weight |Theta*_gamma y|^{-(s+d)} at a point y of Xi (l1 norm 1)
std::complex<double> branch_weight(const TransferBranch& branch,
                                   const std::vector<double>& y,
                                   std::complex<double> s);

// scalar transfer operator on grid functions
std::vector<std::complex<double>> transfer_apply_scalar(
    const TransferConfig& config,
    const std::vector<std::complex<double>>& f);

struct RPFData {
  double sigma = 0.0;
  double lambda_sigma = 0.0;
  std::vector<double> h_sigma;  // positive, grid-quadrature normalized
  double residual = 0.0;
  int iterations = 0;
};

RPFData rpf_leading(const TransferConfig& config, double sigma);

// max over grid vertices of |sum_gamma e^{R_sigma} - 1| for the normalized
// operator built from the RPF data
double markoff_defect(const TransferConfig& config, const RPFData& rpf,
                      double sigma);

// fiber-valued grid function: outer index grid vertex, inner the group fiber
using FiberField = std::vector<std::vector<std::complex<double>>>;

FiberField normalized_apply(const TransferConfig& config, const RPFData& rpf,
                            const FiniteGroup& group, const FiberField& field);

enum class FiberSubspace { Full, MeanZero, New };

struct DecayReport {
  std::vector<double> norms;  // sup over grid of fiber l2 norms, k = 0..kmax
  double rate = 0.0;          // fitted geometric ratio
  double rpf_residual = 0.0;
  double tail_bound = 0.0;
  long long q = 0;
};

DecayReport twisted_radius(const TransferConfig& config, const RPFData& rpf,
                           const FiniteGroup& group, std::size_t k_max,
                           FiberSubspace subspace, std::uint64_t seed);

// fiberwise projection onto the subspace
void project_fiber(const FiniteGroup& group, FiberSubspace subspace,
                   FiberField& field);

}  // namespace rauzylab

#endif
