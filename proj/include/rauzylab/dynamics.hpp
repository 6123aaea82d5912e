#ifndef RAUZYLAB_DYNAMICS_HPP
#define RAUZYLAB_DYNAMICS_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "rauzylab/cocycle.hpp"
#include "rauzylab/cone.hpp"
#include "rauzylab/finite_group.hpp"
#include "rauzylab/rauzy.hpp"
#include "rauzylab/rng.hpp"

namespace rauzylab {

struct SuspensionDatum {
  PermutationPair pair;
  std::vector<double> lambda;  // positive lengths
  std::vector<double> tau;     // suspension heights, tau in K_pi
};

double l1_norm(const std::vector<double>& v);

// area of the zippered rectangles: <lambda, -Omega tau>
double area(const SuspensionDatum& datum);

MoveType step_type(const PermutationPair& pair,
                   const std::vector<double>& lambda);

std::pair<SuspensionDatum, RauzyArrow> induction_step(
    const SuspensionDatum& datum);

SuspensionDatum teich_flow(const SuspensionDatum& datum, double t);

// reconstruct the unique incoming arrow of the given type, if the inverse
// induction step is defined at the datum
bool inverse_step_defined(const SuspensionDatum& datum);

bool in_fundamental_domain(const SuspensionDatum& datum);

struct SectionPoint {
  SuspensionDatum datum;  // |lambda|_1 = 1, itinerary begins with gamma0
};

struct ReturnRecord {
  RauzyPath path;       // gamma0-adapted return word
  double roof = 0.0;    // -log |(Theta_gamma^*)^{-1} lambda|_1
  SpElement cocycle;    // induced_sp(path), integral or reduced mod q
  SectionPoint endpoint;
};

// Precomputed data for the accelerated return dynamics over one gamma0.
struct FlowSystem {
  PermutationPair base;
  RauzyClass cls;
  RauzyPath gamma0;
  SymplecticBasis basis;
  BigMatrix theta0_star;
  BigMatrix theta0_star_inv;
  std::vector<std::vector<double>> cone_rays;  // K_base extreme rays, l1 = 1
  double min_colsum = 0.0;                     // rejection envelope
  // counted in single Rauzy moves; d=2 processes whole move runs at once,
  // so the default is generous (torus run lengths are continued-fraction
  // digits with a log-divergent mean)
  long long step_budget = 10000000;
};

FlowSystem make_flow_system(const PathSelection& selection);

SectionPoint sample_section_point(const FlowSystem& system, Rng& rng);

ReturnRecord return_map(const SectionPoint& point, const FlowSystem& system);

// n successive returns from a seeded start; cocycles reduced mod q when
// q >= 2 (q = 0 keeps them integral)
std::vector<ReturnRecord> sample_orbit(std::uint64_t seed,
                                       std::size_t n_returns,
                                       const FlowSystem& system, long long q);

// streaming form of sample_orbit
void orbit_run(std::uint64_t seed, std::size_t n_returns,
               const FlowSystem& system,
               const std::function<void(const ReturnRecord&)>& sink);

struct TailFit {
  double slope = 0.0;
  double r2 = 0.0;
  double min_roof = 0.0;
  std::size_t n = 0;
};

// least squares on log-survival over [median, 99th percentile]
TailFit roof_tail_stats(std::vector<double> roofs);

struct CocycleHistogram {
  std::vector<std::uint64_t> counts;  // aligned with the group enumeration
  double chi2 = 0.0;
  std::size_t dof = 0;
  double p_value = 0.0;
};

// occupancy of the running mod-q cocycle product along one orbit
CocycleHistogram cocycle_distribution(std::uint64_t seed, std::size_t n,
                                      const FlowSystem& system, long long q);

using FiberObservable =
    std::function<double(const SectionPoint&, std::size_t group_index)>;

// Monte Carlo estimate of int u . (v o T_t) over the suspension with fiber
double correlation_estimate(const FiberObservable& u, const FiberObservable& v,
                            double t, std::uint64_t seed, std::size_t n,
                            const FlowSystem& system, long long q);

double hilbert_distance(const std::vector<double>& x,
                        const std::vector<double>& y);

// the finite fiber group of the system at level q, generated by the class
// loop cocycles (requires surjectivity)
FiniteGroup fiber_group(const FlowSystem& system, long long q,
                        std::uint64_t cap = 1000000);

}  // namespace rauzylab

#endif
