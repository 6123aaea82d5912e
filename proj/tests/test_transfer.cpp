#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "rauzylab/dynamics.hpp"
#include "rauzylab/errors.hpp"
#include "rauzylab/rvgroup.hpp"
#include "rauzylab/transfer.hpp"

using namespace rauzylab;

namespace {

const PermutationPair torus = make_pair("AB", "BA");

PathSelection short_selection() {
  RauzyClass cls = rauzy_class(torus);
  return build_gamma0(cls, torus, {});
}

TransferConfig base_config(std::size_t grid_n = 64, double cutoff = 600.0,
                           double sigma = 0.0) {
  return make_transfer_config(short_selection(), grid_n, cutoff, sigma);
}

FiniteGroup group_mod(long long q) {
  RauzyClass cls = rauzy_class(torus);
  SymplecticBasis basis = symplectic_basis(torus);
  std::vector<SpElement> gens;
  for (auto& loop : spanning_tree_loops(cls, torus))
    gens.push_back(induced_sp(loop, basis));
  return FiniteGroup::generate(1, q, gens, 1 << 20);
}

}  // namespace

TEST_CASE("simplex grid interpolation reproduces linear functions") {
  Rng rng(2);
  for (std::size_t d : {2u, 3u, 4u, 5u}) {
    SimplexGrid grid(d, 7);
    // random linear functional sampled at the vertices
    std::vector<double> coeff(d);
    for (auto& c : coeff) c = rng.uniform(-2.0, 2.0);
    std::vector<double> f(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      auto mu = grid.vertex_mu(i);
      double v = 0.0;
      for (std::size_t k = 0; k < d; ++k) v += coeff[k] * mu[k];
      f[i] = v;
    }
    for (int trial = 0; trial < 300; ++trial) {
      std::vector<double> mu = rng.simplex(d);
      auto st = grid.locate(mu);
      double wsum = 0.0;
      for (double w : st.weight) {
        CHECK(w >= -1e-12);
        wsum += w;
      }
      CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
      double expect = 0.0;
      for (std::size_t k = 0; k < d; ++k) expect += coeff[k] * mu[k];
      CHECK(grid.interpolate(st, f) == doctest::Approx(expect).epsilon(1e-10));
    }
  }
}

TEST_CASE("branch enumeration matches enumerate_adapted on short paths") {
  PathSelection sel = short_selection();
  SymplecticBasis basis = symplectic_basis(torus);
  auto branches = enumerate_branches(sel, basis, 40.0);
  CHECK(branches.size() >= 3);
  // every enumerated branch is gamma0-adapted and within the cutoff
  for (const auto& b : branches) {
    CHECK(static_cast<double>(b.theta_star.linf_colsum_norm()) <= 40.0);
    RauzyPath doubled = concat(b.path, sel.gamma0);
    auto occ = contains_subpath(doubled, sel.gamma0);
    REQUIRE(occ.size() == 2);
    CHECK(occ[0] == 0);
    CHECK(occ[1] == b.path.length());
    CHECK(b.cocycle == induced_sp(b.path, basis));
  }
  // adapted loops of length <= L with matrices within the cutoff coincide
  auto adapted = enumerate_adapted(sel, 8);
  std::size_t expected = 0;
  for (const auto& g : adapted)
    if (static_cast<double>(theta_star_of_path(g).linf_colsum_norm()) <= 40.0)
      ++expected;
  std::size_t found = 0;
  for (const auto& b : branches)
    if (b.path.length() <= 8) ++found;
  CHECK(found == expected);
}

TEST_CASE("branch weight closed form vs finite-difference Jacobian") {
  // J(alpha_gamma)(y) = |Theta* y|^{-d}: check against the determinant of
  // the (d-1)-dimensional coordinate map of the projective action
  PathSelection sel = short_selection();
  SymplecticBasis basis = symplectic_basis(torus);
  auto branches = enumerate_branches(sel, basis, 50.0);
  Rng rng(3);
  for (const auto& b : branches) {
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> y = rng.simplex(2);
      double w = branch_weight(b, y, std::complex<double>(0.0, 0.0)).real();
      // finite differences in the single simplex coordinate u = y_0
      auto image0 = [&](double u) {
        std::vector<double> p{u, 1.0 - u};
        std::vector<double> v = b.theta_star.apply(p);
        return v[0] / (v[0] + v[1]);
      };
      double eps = 1e-6;
      double fd =
          std::abs(image0(y[0] + eps) - image0(y[0] - eps)) / (2.0 * eps);
      CHECK(fd == doctest::Approx(w).epsilon(1e-5));
    }
  }
}

TEST_CASE("roof consistency: -log|(Theta*)^{-1} lambda| at the image") {
  PathSelection sel = short_selection();
  SymplecticBasis basis = symplectic_basis(torus);
  auto branches = enumerate_branches(sel, basis, 50.0);
  Rng rng(4);
  for (const auto& b : branches) {
    BigMatrix inv = b.theta_star.unimodular_inverse();
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> y = rng.simplex(2);
      std::vector<double> img = b.theta_star.apply(y);
      double n1 = img[0] + img[1];
      for (auto& x : img) x /= n1;
      // r(alpha_gamma y) = log |Theta* y|
      double direct = std::log(n1);
      std::vector<double> back = inv.apply(img);
      double back_norm = std::abs(back[0]) + std::abs(back[1]);
      CHECK(-std::log(back_norm) == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("identity-like branch weight is 1 at s=0") {
  TransferBranch stub;
  stub.theta_star = BigMatrix::identity(2);
  std::vector<double> y{0.3, 0.7};
  CHECK(branch_weight(stub, y, {0.0, 0.0}).real() ==
        doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("scalar transfer operator basics") {
  TransferConfig cfg = base_config(32, 300.0);
  const std::size_t nv = cfg.grid.size();

  std::vector<std::complex<double>> zero(nv, 0.0);
  auto out = transfer_apply_scalar(cfg, zero);
  for (const auto& x : out) CHECK(std::abs(x) == 0.0);

  // linearity
  Rng rng(5);
  std::vector<std::complex<double>> f(nv), g(nv);
  for (auto& x : f) x = {rng.gaussian(), rng.gaussian()};
  for (auto& x : g) x = {rng.gaussian(), rng.gaussian()};
  auto lf = transfer_apply_scalar(cfg, f);
  auto lg = transfer_apply_scalar(cfg, g);
  std::vector<std::complex<double>> fg(nv);
  for (std::size_t i = 0; i < nv; ++i) fg[i] = 2.0 * f[i] - 3.0 * g[i];
  auto lfg = transfer_apply_scalar(cfg, fg);
  for (std::size_t i = 0; i < nv; ++i)
    CHECK(std::abs(lfg[i] - (2.0 * lf[i] - 3.0 * lg[i])) < 1e-10);

  // L_0[1] is within the truncation tail of the RPF relation
  std::vector<std::complex<double>> one(nv, 1.0);
  auto lone = transfer_apply_scalar(cfg, one);
  for (const auto& x : lone) {
    CHECK(x.real() > 0.8);
    CHECK(x.real() < 1.2);
    CHECK(std::abs(x.imag()) < 1e-14);
  }
}

TEST_CASE("rpf leading eigenvalue near 1 and refinement improves it") {
  TransferConfig coarse = base_config(32, 300.0);
  RPFData rc = rpf_leading(coarse, 0.0);
  CHECK(std::abs(rc.lambda_sigma - 1.0) < 0.05);
  for (double h : rc.h_sigma) CHECK(h > 0.0);

  TransferConfig fine = base_config(64, 4000.0);
  RPFData rf = rpf_leading(fine, 0.0);
  CHECK(std::abs(rf.lambda_sigma - 1.0) < 0.01);
  CHECK(rf.residual < rc.residual + 1e-12);
}

TEST_CASE("lambda_sigma is monotone and h stays positive over the window") {
  TransferConfig cfg = base_config(40, 400.0);
  double prev = -1.0;
  for (double sigma : {-0.2, -0.1, 0.0, 0.1, 0.2}) {
    RPFData r = rpf_leading(cfg, sigma);
    for (double h : r.h_sigma) CHECK(h > 0.0);
    if (prev > 0.0) CHECK(r.lambda_sigma < prev);  // decreasing in sigma
    prev = r.lambda_sigma;
  }
}

TEST_CASE("markoff defect small for sigma in {-0.1, 0, 0.1}") {
  TransferConfig cfg = base_config(48, 600.0);
  for (double sigma : {-0.1, 0.0, 0.1}) {
    RPFData r = rpf_leading(cfg, sigma);
    CHECK(markoff_defect(cfg, r, sigma) < 0.05);
  }
}

TEST_CASE("normalized operator fixes constants (Markoff property)") {
  TransferConfig cfg = base_config(48, 600.0);
  RPFData r = rpf_leading(cfg, 0.0);
  FiniteGroup triv = group_mod(2);  // any group; constants stay constants
  const std::size_t nv = cfg.grid.size();
  FiberField constant(nv, std::vector<std::complex<double>>(triv.size(), 1.0));
  FiberField out = normalized_apply(cfg, r, triv, constant);
  for (const auto& fiber : out)
    for (const auto& x : fiber) {
      CHECK(x.real() == doctest::Approx(1.0).epsilon(0.02));
      CHECK(std::abs(x.imag()) < 1e-12);
    }
}

TEST_CASE("twisted operator on the trivial fiber equals the scalar one") {
  TransferConfig cfg = base_config(32, 300.0);
  RPFData r = rpf_leading(cfg, 0.0);
  FiniteGroup group = group_mod(3);
  const std::size_t nv = cfg.grid.size();

  Rng rng(6);
  std::vector<std::complex<double>> scalar(nv);
  for (auto& x : scalar) x = {rng.gaussian(), rng.gaussian()};

  FiberField lifted(nv);
  for (std::size_t i = 0; i < nv; ++i)
    lifted[i].assign(group.size(), scalar[i]);
  FiberField out = normalized_apply(cfg, r, group, lifted);

  // normalized scalar application: (1 / (lambda h)) L[h f]
  std::vector<std::complex<double>> hf(nv);
  for (std::size_t i = 0; i < nv; ++i) hf[i] = scalar[i] * r.h_sigma[i];
  auto lhf = transfer_apply_scalar(cfg, hf);
  for (std::size_t i = 0; i < nv; ++i) {
    std::complex<double> expect =
        lhf[i] / (r.lambda_sigma * r.h_sigma[i]);
    for (const auto& x : out[i]) CHECK(std::abs(x - expect) < 1e-10);
  }
}

TEST_CASE("fiber norm of the twisted image is dominated by the scalar one") {
  TransferConfig cfg = base_config(32, 300.0);
  RPFData r = rpf_leading(cfg, 0.0);
  FiniteGroup group = group_mod(3);
  const std::size_t nv = cfg.grid.size();
  Rng rng(7);
  FiberField field(nv, std::vector<std::complex<double>>(group.size()));
  for (auto& fiber : field)
    for (auto& x : fiber) x = {rng.gaussian(), rng.gaussian()};
  FiberField out = normalized_apply(cfg, r, group, field);

  // pointwise: |out(y)| <= scalar normalized operator applied to |field|
  std::vector<std::complex<double>> norms(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    double s = 0.0;
    for (const auto& x : field[i]) s += std::norm(x);
    norms[i] = std::sqrt(s) * r.h_sigma[i];
  }
  auto lnorm = transfer_apply_scalar(cfg, norms);
  for (std::size_t i = 0; i < nv; ++i) {
    double lhs = 0.0;
    for (const auto& x : out[i]) lhs += std::norm(x);
    lhs = std::sqrt(lhs);
    double rhs = lnorm[i].real() / (r.lambda_sigma * r.h_sigma[i]);
    CHECK(lhs <= rhs + 1e-9);
  }
}

TEST_CASE("twisted radius: constants do not decay, mean-zero does") {
  TransferConfig cfg = base_config(40, 500.0);
  RPFData r = rpf_leading(cfg, 0.0);
  FiniteGroup g3 = group_mod(3);

  SUBCASE("full subspace with constants") {
    const std::size_t nv = cfg.grid.size();
    FiberField constant(nv,
                        std::vector<std::complex<double>>(g3.size(), 1.0));
    // one application leaves constants in place up to the markoff defect
    FiberField once = normalized_apply(cfg, r, g3, constant);
    double dev = 0.0;
    for (const auto& fiber : once)
      for (const auto& x : fiber) dev = std::max(dev, std::abs(x - 1.0));
    CHECK(dev < 0.05);
  }

  SUBCASE("mean-zero decays, uniformly over q") {
    DecayReport r3 = twisted_radius(cfg, r, g3, 12, FiberSubspace::MeanZero, 9);
    CHECK(r3.rate < 1.0);
    CHECK(r3.rate > 0.0);

    FiniteGroup g5 = group_mod(5);
    DecayReport r5 = twisted_radius(cfg, r, g5, 12, FiberSubspace::MeanZero, 9);
    CHECK(r5.rate < 1.0);
    double hi = std::max(r3.rate, r5.rate), lo = std::min(r3.rate, r5.rate);
    CHECK(hi <= 1.3 * lo);
  }

  SUBCASE("prime modulus: new and mean-zero projections agree") {
    Rng rng(10);
    FiberField field(4, std::vector<std::complex<double>>(g3.size()));
    for (auto& fiber : field)
      for (auto& x : fiber) x = {rng.gaussian(), rng.gaussian()};
    FiberField a = field, b = field;
    project_fiber(g3, FiberSubspace::MeanZero, a);
    project_fiber(g3, FiberSubspace::New, b);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t x = 0; x < a[i].size(); ++x)
        CHECK(std::abs(a[i][x] - b[i][x]) < 1e-12);
  }
}

TEST_CASE("tail bound is reported and shrinks with the cutoff") {
  TransferConfig small = base_config(16, 150.0);
  TransferConfig big = base_config(16, 1200.0);
  CHECK(small.tail_bound > 0.0);
  CHECK(big.tail_bound < small.tail_bound);
  CHECK(small.enumerated_mass > 0.8);
  CHECK(big.enumerated_mass > small.enumerated_mass);
}
