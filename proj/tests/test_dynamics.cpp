#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rauzylab/dynamics.hpp"
#include "rauzylab/errors.hpp"
#include "rauzylab/rvgroup.hpp"

using namespace rauzylab;

namespace {

const PermutationPair torus = make_pair("AB", "BA");

FlowSystem torus_system() {
  RauzyClass cls = rauzy_class(torus);
  auto loops = spanning_tree_loops(cls, torus);
  PathSelection sel = build_gamma0(cls, torus, loops);
  return make_flow_system(sel);
}

// gamma0 = [t, b]: the shortest strongly positive neat loop; returns are
// frequent and roofs small, which keeps float orbits exactly comparable
// with the rational oracle
FlowSystem torus_system_short() {
  RauzyClass cls = rauzy_class(torus);
  PathSelection sel = build_gamma0(cls, torus, {});
  return make_flow_system(sel);
}

SuspensionDatum torus_datum(double la, double lb, double ta, double tb) {
  return SuspensionDatum{torus, {la, lb}, {ta, tb}};
}

}  // namespace

TEST_CASE("cone membership") {
  CHECK(cone_contains(torus, {1.0, -1.0}));
  CHECK_FALSE(cone_contains(torus, {-1.0, 1.0}));
  CHECK_FALSE(cone_contains(torus, {0.0, 0.0}));  // strict inequalities
}

TEST_CASE("area formula by hand") {
  // heights h = Omega tau = (1, 1) for tau = (1,-1); area = <lambda, h> = 1
  SuspensionDatum x = torus_datum(0.5, 0.5, 1.0, -1.0);
  CHECK(area(x) == doctest::Approx(1.0).epsilon(1e-15));

  // bilinearity: scaling lambda scales the area
  SuspensionDatum y = x;
  for (auto& v : y.lambda) v *= 3.0;
  CHECK(area(y) == doctest::Approx(3.0 * area(x)).epsilon(1e-12));
}

TEST_CASE("area is positive on the suspension cone") {
  Rng rng(33);
  for (const auto& pair :
       {torus, make_pair("ABC", "CBA"), make_pair("ABCD", "DCBA")}) {
    auto rays = cone_extreme_rays(pair);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> w = rng.simplex(rays.size());
      std::vector<double> tau(pair.size(), 0.0);
      for (std::size_t r = 0; r < rays.size(); ++r)
        for (std::size_t i = 0; i < pair.size(); ++i)
          tau[i] += w[r] * static_cast<double>(rays[r][i]);
      if (!cone_contains(pair, tau)) continue;
      SuspensionDatum x{pair, rng.simplex(pair.size()), tau};
      CHECK(area(x) > 0.0);
    }
  }
}

TEST_CASE("step type and ties") {
  CHECK(step_type(torus, {0.3, 0.7}) == MoveType::Top);     // lambda_B wins
  CHECK(step_type(torus, {0.7, 0.3}) == MoveType::Bottom);  // lambda_A wins
  CHECK_THROWS_AS(step_type(torus, {0.5, 0.5}), Error);
}

TEST_CASE("induction step: lambda update, cone and area preservation") {
  SuspensionDatum x = torus_datum(0.3, 0.7, 1.0, -1.0);
  REQUIRE(cone_contains(torus, x.tau));
  auto [next, arrow] = induction_step(x);
  CHECK(next.lambda[0] == doctest::Approx(0.3));
  CHECK(next.lambda[1] == doctest::Approx(0.4));
  CHECK(area(next) == doctest::Approx(area(x)).epsilon(1e-12));
  CHECK(cone_contains(next.pair, next.tau));

  // winner keeps a positive length
  CHECK(next.lambda[arrow.winner] > 0.0);
}

TEST_CASE("random induction steps preserve area and cone") {
  Rng rng(21);
  FlowSystem sys = torus_system();
  for (int trial = 0; trial < 2000; ++trial) {
    SectionPoint p = sample_section_point(sys, rng);
    SuspensionDatum x = p.datum;
    for (int k = 0; k < 5; ++k) {
      double before = area(x);
      auto [next, arrow] = induction_step(x);
      CHECK(std::abs(area(next) - before) < 1e-12 * std::max(1.0, before));
      CHECK(cone_contains(next.pair, next.tau));
      x = next;
    }
  }
}

TEST_CASE("teich_flow scaling laws") {
  SuspensionDatum x = torus_datum(0.3, 0.7, 1.0, -1.0);
  SuspensionDatum same = teich_flow(x, 0.0);
  CHECK(same.lambda[0] == doctest::Approx(x.lambda[0]));
  CHECK(area(teich_flow(x, 0.37)) == doctest::Approx(area(x)).epsilon(1e-12));
  SuspensionDatum ab = teich_flow(teich_flow(x, 0.2), 0.3);
  SuspensionDatum once = teich_flow(x, 0.5);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(ab.lambda[i] == doctest::Approx(once.lambda[i]).epsilon(1e-12));
    CHECK(ab.tau[i] == doctest::Approx(once.tau[i]).epsilon(1e-12));
  }
}

TEST_CASE("flow commutes with induction") {
  Rng rng(4);
  FlowSystem sys = torus_system();
  for (int trial = 0; trial < 200; ++trial) {
    SectionPoint p = sample_section_point(sys, rng);
    double t = rng.uniform(-0.2, 0.2);
    auto [a, arrow_a] = induction_step(teich_flow(p.datum, t));
    SuspensionDatum b = teich_flow(induction_step(p.datum).first, t);
    REQUIRE(a.pair == b.pair);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(a.lambda[i] == doctest::Approx(b.lambda[i]).epsilon(1e-12));
      CHECK(a.tau[i] == doctest::Approx(b.tau[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("fundamental domain predicate on the torus") {
  // |lambda| = 1.3 >= 1 and the step drops below 1
  CHECK(in_fundamental_domain(torus_datum(0.6, 0.7, 1.0, -1.0)));
  // small lambda with an invertible induction history
  CHECK_FALSE(in_fundamental_domain(torus_datum(0.2, 0.3, 2.0, -1.0)));
  // large lambda whose image stays above norm 1
  CHECK_FALSE(in_fundamental_domain(torus_datum(2.0, 3.0, 1.0, -1.0)));
}

TEST_CASE("section sampling lands in the cylinder") {
  FlowSystem sys = torus_system();
  Rng rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    SectionPoint p = sample_section_point(sys, rng);
    CHECK(l1_norm(p.datum.lambda) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(area(p.datum) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(cone_contains(p.datum.pair, p.datum.tau));
    // the forward itinerary starts with gamma0
    SuspensionDatum x = p.datum;
    for (std::size_t k = 0; k < sys.gamma0.length(); ++k) {
      auto [next, arrow] = induction_step(x);
      CHECK(arrow.move == sys.gamma0.moves[k]);
      x = next;
    }
  }
}

namespace {

// exact-rational per-step oracle: the first j >= 1 where the trailing
// window spells gamma0 from the base vertex, plus the exact roof
struct ExactReturn {
  std::size_t j = 0;
  double roof = 0.0;
  std::vector<MoveType> moves;
};

ExactReturn exact_return_oracle(const SectionPoint& p, const FlowSystem& sys,
                                std::size_t max_steps) {
  const std::size_t l0 = sys.gamma0.length();
  std::vector<BigRat> lam(p.datum.lambda.size());
  for (std::size_t i = 0; i < lam.size(); ++i)
    lam[i] = BigRat(p.datum.lambda[i]);  // doubles are exact rationals
  BigRat start_norm = 0;
  for (const auto& v : lam) start_norm += v;

  PermutationPair pair = p.datum.pair;
  std::vector<MoveType> moves;
  std::vector<PermutationPair> verts{pair};
  ExactReturn out;
  for (std::size_t step = 0; step < max_steps; ++step) {
    const BigRat& la = lam[pair.last_top()];
    const BigRat& lb = lam[pair.last_bottom()];
    // dyadic-rational starting data eventually reaches an exact tie (the
    // subtractive Euclid algorithm terminates); give up well before that
    if (la == lb) return out;
    MoveType m = la > lb ? MoveType::Top : MoveType::Bottom;
    RauzyArrow arrow = apply_move(pair, m);
    lam[arrow.winner] -= lam[arrow.loser];
    pair = arrow.target;
    moves.push_back(m);
    verts.push_back(pair);
    if (moves.size() >= 2 * l0) {
      bool match = true;
      for (std::size_t k = 0; k < l0 && match; ++k)
        match = moves[moves.size() - l0 + k] == sys.gamma0.moves[k];
      if (match && verts[moves.size() - l0] == sys.base) {
        out.j = moves.size() - l0;
        out.moves.assign(moves.begin(), moves.begin() + out.j);
        // replay to get the exact norm at j
        std::vector<BigRat> lam2(p.datum.lambda.size());
        for (std::size_t i = 0; i < lam2.size(); ++i)
          lam2[i] = BigRat(p.datum.lambda[i]);
        PermutationPair pr = p.datum.pair;
        for (std::size_t k = 0; k < out.j; ++k) {
          RauzyArrow a = apply_move(pr, out.moves[k]);
          lam2[a.winner] -= lam2[a.loser];
          pr = a.target;
        }
        BigRat norm = 0;
        for (const auto& v : lam2) norm += v;
        out.roof = -std::log(static_cast<double>(norm / start_norm));
        return out;
      }
    }
  }
  return out;  // j = 0: not found within max_steps
}

}  // namespace

TEST_CASE("return map on the long gamma0: adaptedness and consistency") {
  FlowSystem sys = torus_system();
  Rng rng(77);
  for (int trial = 0; trial < 5; ++trial) {
    SectionPoint p = sample_section_point(sys, rng);
    ReturnRecord rec = return_map(p, sys);
    CHECK(rec.roof > 0.0);
    CHECK(rec.path.length() >= sys.gamma0.length());
    RauzyPath doubled = concat(rec.path, sys.gamma0);
    auto occ = contains_subpath(doubled, sys.gamma0);
    REQUIRE(occ.size() == 2);
    CHECK(occ[0] == 0);
    CHECK(occ[1] == rec.path.length());
    CHECK(rec.cocycle == induced_sp(rec.path, sys.basis));
  }
}

TEST_CASE("return map against the exact-rational oracle") {
  FlowSystem sys = torus_system_short();
  Rng rng(77);
  int compared = 0;
  for (int trial = 0; trial < 60; ++trial) {
    SectionPoint p = sample_section_point(sys, rng);
    ExactReturn exact = exact_return_oracle(p, sys, 4000);
    // floats and exact arithmetic agree while the contraction stays far
    // above double precision
    if (exact.j == 0 || exact.roof > 18.0) continue;
    ++compared;

    ReturnRecord rec = return_map(p, sys);
    CHECK(rec.roof > 0.0);
    CHECK(rec.path.length() == exact.j);
    CHECK(rec.roof == doctest::Approx(exact.roof).epsilon(1e-9));
    for (std::size_t k = 0; k < exact.j; ++k)
      CHECK(rec.path.moves[k] == exact.moves[k]);

    // gamma is gamma0-adapted: occurrences in gamma.gamma0 are exactly the
    // prefix and the suffix
    RauzyPath doubled = concat(rec.path, sys.gamma0);
    auto occ = contains_subpath(doubled, sys.gamma0);
    REQUIRE(occ.size() == 2);
    CHECK(occ[0] == 0);
    CHECK(occ[1] == rec.path.length());

    // cocycle equals the induced matrix of the recorded path
    CHECK(rec.cocycle == induced_sp(rec.path, sys.basis));
    // endpoint lambda = (Theta*)^{-1} lambda_start, renormalized
    BigMatrix inv = theta_star_of_path(rec.path).unimodular_inverse();
    std::vector<double> mapped = inv.apply(p.datum.lambda);
    double n1 = l1_norm(mapped);
    for (std::size_t i = 0; i < mapped.size(); ++i)
      CHECK(rec.endpoint.datum.lambda[i] ==
            doctest::Approx(mapped[i] / n1).epsilon(1e-9));
  }
  CHECK(compared >= 10);
}

TEST_CASE("roof additivity over multiple returns") {
  // the N-fold return roof telescopes: the sum of single-return roofs equals
  // -log |(Theta*_whole)^{-1} lambda|. Floats track the exact orbit only
  // while the cumulative contraction stays above double precision, so the
  // window is capped at e^-18.
  FlowSystem sys = torus_system_short();
  bool done = false;
  for (std::uint64_t seed = 300; seed < 330 && !done; ++seed) {
    Rng rng(seed);
    SectionPoint start = sample_section_point(sys, rng);
    SectionPoint point = start;
    RauzyPath whole{sys.base, {}};
    double roof_sum = 0.0;
    std::size_t taken = 0;
    for (int i = 0; i < 8; ++i) {
      ReturnRecord rec = return_map(point, sys);
      if (roof_sum + rec.roof > 12.0) break;
      whole = concat(whole, rec.path);
      roof_sum += rec.roof;
      point = rec.endpoint;
      ++taken;
    }
    if (taken < 2) continue;
    done = true;
    BigMatrix inv = theta_star_of_path(whole).unimodular_inverse();
    std::vector<double> mapped = inv.apply(start.datum.lambda);
    CHECK(roof_sum ==
          doctest::Approx(-std::log(l1_norm(mapped))).epsilon(1e-9));
  }
  CHECK(done);
}

TEST_CASE("roof tail statistics on synthetic data") {
  Rng rng(5);
  SUBCASE("exponential tails recover the rate") {
    for (double theta : {0.7, 1.3}) {
      std::vector<double> samples;
      for (int i = 0; i < 100000; ++i)
        samples.push_back(rng.exponential(theta));
      TailFit fit = roof_tail_stats(samples);
      CHECK(std::abs(fit.slope + theta) < 0.05 * theta);
      CHECK(fit.r2 > 0.99);
    }
  }
  SUBCASE("heavy tails degrade the fit") {
    std::vector<double> samples;
    for (int i = 0; i < 100000; ++i)
      samples.push_back(std::pow(rng.uniform(), -1.2) - 1.0);  // Pareto-ish
    TailFit fit = roof_tail_stats(samples);
    CHECK(fit.r2 < 0.9);
  }
  SUBCASE("too few samples") {
    std::vector<double> tiny(10, 1.0);
    CHECK_THROWS_AS(roof_tail_stats(tiny), Error);
  }
}

TEST_CASE("torus roof tails look exponential") {
  FlowSystem sys = torus_system();
  std::vector<double> roofs;
  orbit_run(11, 20000, sys,
            [&](const ReturnRecord& r) { roofs.push_back(r.roof); });
  TailFit fit = roof_tail_stats(roofs);
  CHECK(fit.min_roof > 0.0);
  CHECK(fit.slope < 0.0);
  CHECK(fit.r2 > 0.95);
}

TEST_CASE("mean roof matches a long-orbit ergodic average") {
  FlowSystem sys = torus_system();
  double sum = 0.0;
  std::size_t n = 20000;
  orbit_run(29, n, sys, [&](const ReturnRecord& r) { sum += r.roof; });
  double mean_roof = sum / static_cast<double>(n);

  // oracle: one long raw orbit; total flow time / section hits
  Rng rng(57);
  SectionPoint p = sample_section_point(sys, rng);
  SuspensionDatum x = p.datum;
  const std::size_t l0 = sys.gamma0.length();
  std::vector<MoveType> moves;
  std::vector<PermutationPair> verts{x.pair};
  double logsum = 0.0;
  std::size_t hits = 0;
  double hit_logsum = 0.0;
  for (std::size_t step = 0; step < 1000000; ++step) {
    auto [next, arrow] = induction_step(x);
    double n1 = l1_norm(next.lambda);
    logsum += std::log(n1);
    moves.push_back(arrow.move);
    verts.push_back(next.pair);
    x = next;
    x.lambda[0] /= n1;
    x.lambda[1] /= n1;
    if (moves.size() >= 2 * l0) {
      bool match = true;
      for (std::size_t k = 0; k < l0 && match; ++k)
        match = moves[moves.size() - l0 + k] == sys.gamma0.moves[k];
      if (match && verts[moves.size() - l0] == sys.base) {
        // count a section hit at offset moves.size() - l0; the flow time to
        // that hit is the partial log sum up to it, recovered by replaying
        // the last l0 norms -- approximate by crediting at detection time
        ++hits;
        hit_logsum = logsum;
      }
    }
  }
  REQUIRE(hits > 100);
  double oracle_mean = -hit_logsum / static_cast<double>(hits);
  CHECK(std::abs(mean_roof - oracle_mean) < 0.02 * oracle_mean);
}

TEST_CASE("cocycle distribution is uniform-ish mod 3") {
  FlowSystem sys = torus_system();
  CocycleHistogram hist = cocycle_distribution(13, 20000, sys, 3);
  CHECK(hist.counts.size() == 24);
  CHECK(hist.dof == 23);
  CHECK(hist.p_value > 0.01);

  SUBCASE("zero returns give an all-zero histogram") {
    CocycleHistogram empty = cocycle_distribution(13, 0, sys, 3);
    for (auto c : empty.counts) CHECK(c == 0);
  }
}

TEST_CASE("mod-q histograms push forward along divisors") {
  FlowSystem sys = torus_system();
  // same seed: the lambda stream is identical, so reducing the mod-6
  // products mod 3 must reproduce the mod-3 histogram
  auto rec6 = sample_orbit(99, 500, sys, 6);
  auto rec3 = sample_orbit(99, 500, sys, 3);
  REQUIRE(rec6.size() == rec3.size());
  for (std::size_t i = 0; i < rec6.size(); ++i) {
    SpElement pushed = reduce_mod(SpElement{1, 0, rec6[i].cocycle.m}, 3);
    CHECK(pushed.m == rec3[i].cocycle.m);
  }
}

TEST_CASE("mod-q cocycle product is the reduction of the integral product") {
  FlowSystem sys = torus_system();
  auto recs = sample_orbit(41, 30, sys, 0);
  SpElement prod = sp_identity(1, 0);
  for (const auto& r : recs) prod = sp_mul(prod, r.cocycle);
  SpElement prod5 = sp_identity(1, 5);
  for (const auto& r : recs)
    prod5 = sp_mul(prod5, reduce_mod(r.cocycle, 5));
  CHECK(reduce_mod(prod, 5) == prod5);
}

TEST_CASE("correlation estimates") {
  FlowSystem sys = torus_system();
  FiberObservable one = [](const SectionPoint&, std::size_t) { return 1.0; };
  double total = correlation_estimate(one, one, 0.7, 3, 2000, sys, 3);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

  // mean-zero fiber indicator
  FiniteGroup group = fiber_group(sys, 3);
  const double inv_n = 1.0 / static_cast<double>(group.size());
  FiberObservable ind = [inv_n](const SectionPoint&, std::size_t g) {
    return (g == 0 ? 1.0 : 0.0) - inv_n;
  };
  double at0 = correlation_estimate(ind, ind, 0.0, 3, 4000, sys, 3);
  double expect = inv_n * (1.0 - inv_n);  // |u|^2 under uniform fiber
  CHECK(at0 == doctest::Approx(expect).epsilon(0.25));

  double at_large = correlation_estimate(ind, ind, 6.0, 3, 4000, sys, 3);
  CHECK(std::abs(at_large) < std::abs(at0));
}

TEST_CASE("hilbert distance") {
  std::vector<double> x{0.5, 0.5}, y{0.25, 0.75};
  CHECK(hilbert_distance(x, x) == doctest::Approx(0.0));
  CHECK(hilbert_distance(x, y) == doctest::Approx(hilbert_distance(y, x)));
  CHECK_THROWS_AS(hilbert_distance({1.0, 0.0}, {0.5, 0.5}), Error);

  // inverse branches of the return map contract the Hilbert metric
  FlowSystem sys = torus_system();
  BigMatrix b = theta_star_of_path(sys.gamma0);
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> p = rng.simplex(2), q = rng.simplex(2);
    auto push = [&](const std::vector<double>& v) {
      std::vector<double> w = b.apply(v);
      double n1 = l1_norm(w);
      for (auto& t : w) t /= n1;
      return w;
    };
    double before = hilbert_distance(p, q);
    double after = hilbert_distance(push(p), push(q));
    if (before > 1e-12) CHECK(after < before);
  }
}
