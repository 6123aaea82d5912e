// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exit code = number of
// failures.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <sstream>
#include <vector>

#include "rauzylab/dynamics.hpp"
#include "rauzylab/quasirandom.hpp"
#include "rauzylab/rvgroup.hpp"
#include "rauzylab/transfer.hpp"

using namespace rauzylab;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what,
            const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL",
              criterion, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

const PermutationPair torus = make_pair("AB", "BA");
const PermutationPair hyp3 = make_pair("ABC", "CBA");
const PermutationPair hyp4 = make_pair("ABCD", "DCBA");

std::vector<SpElement> class_generators(const PermutationPair& base) {
  RauzyClass cls = rauzy_class(base);
  SymplecticBasis basis = symplectic_basis(base);
  std::vector<SpElement> gens;
  for (auto& loop : spanning_tree_loops(cls, base))
    gens.push_back(induced_sp(loop, basis));
  return gens;
}

FlowSystem torus_flow() {
  RauzyClass cls = rauzy_class(torus);
  PathSelection sel = build_gamma0(cls, torus, {});
  return make_flow_system(sel);
}

// exact dense Cayley Laplacian gap for the oracle comparison
double dense_gap(const std::vector<SpElement>& generators, std::size_t genus,
                 long long q) {
  FiniteGroup group = FiniteGroup::generate(genus, q, generators, 1 << 21);
  const std::size_t n = group.size();
  std::vector<std::size_t> gens;
  for (std::size_t i : group.generator_indices())
    if (std::find(gens.begin(), gens.end(), i) == gens.end()) gens.push_back(i);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t s : gens)
    for (std::size_t x = 0; x < n; ++x)
      a(group.mul(s, x), x) += 1.0 / static_cast<double>(gens.size());
  Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(n, n) - a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
  return solver.eigenvalues()(1);
}

void criterion_1() {
  auto start = std::chrono::steady_clock::now();
  RauzyClass c2 = rauzy_class(torus);
  RauzyClass c3 = rauzy_class(hyp3);
  RauzyClass c4 = rauzy_class(hyp4);
  double secs = seconds_since(start);
  bool pass = c2.vertices.size() == 1 && c2.arrows.size() == 2 &&
              c3.vertices.size() == 3 && c4.vertices.size() == 7 &&
              secs < 1.0;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "sizes %zu/%zu/%zu, %.3fs",
                c2.vertices.size(), c3.vertices.size(), c4.vertices.size(),
                secs);
  report(1, pass, "combinatorial exactness of the small Rauzy classes", buf);
}

void criterion_2() {
  auto start = std::chrono::steady_clock::now();
  std::size_t checked = 0, good = 0;
  for (std::size_t d = 2; d <= 5; ++d)
    for (const auto& rep : all_class_representatives(d)) {
      RauzyClass cls = rauzy_class(rep);
      for (const auto& arrow : cls.arrows) {
        ++checked;
        if (check_intertwining(arrow)) ++good;
      }
    }
  double secs = seconds_since(start);
  bool pass = checked > 0 && good == checked && secs < 10.0;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%zu/%zu arrows exact, %.2fs", good,
                checked, secs);
  report(2, pass, "intertwining identity on all classes with d <= 5", buf);
}

void criterion_3() {
  bool pass = true;
  std::string detail;
  struct Case {
    PermutationPair pair;
    std::size_t genus;
  };
  for (const auto& c : {Case{torus, 1}, Case{hyp3, 1}, Case{hyp4, 2}}) {
    RauzyClass cls = rauzy_class(c.pair);
    for (const auto& v : cls.vertices) {
      SymplecticBasis basis = symplectic_basis(v);
      if (basis.genus != c.genus) pass = false;
    }
    detail += c.pair.short_text() + " g=" + std::to_string(c.genus) + " ";
  }
  report(3, pass, "genus from rank(Omega)/2, constant across classes",
         detail);
}

void criterion_4() {
  auto start = std::chrono::steady_clock::now();
  bool pass = true;
  std::string detail;

  auto gens4 = class_generators(hyp4);
  auto [size4, surj4] = mod_q_closure(gens4, 2, 3, 1 << 20);
  pass = pass && size4 == 51840 && surj4;
  detail += "Sp4(Z/3)=" + size4.str() + " ";

  auto gens2 = class_generators(torus);
  const long long expected[] = {6, 24, 48, 120};
  int i = 0;
  for (long long q : {2, 3, 4, 5}) {
    auto [size, surj] = mod_q_closure(gens2, 1, q, 1 << 20);
    pass = pass && size == expected[i++] && surj;
    detail += "SL2(Z/" + std::to_string(q) + ")=" + size.str() + " ";
  }
  double secs = seconds_since(start);
  pass = pass && secs < 300.0;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2fs", secs);
  report(4, pass, "Zorich desk check: mod-q surjectivity", detail + buf);
}

void criterion_5() {
  auto start = std::chrono::steady_clock::now();
  bool pass = true;
  std::string detail;
  for (const auto& base : {torus, hyp4}) {
    RauzyClass cls = rauzy_class(base);
    auto upsilon0 = spanning_tree_loops(cls, base);
    PathSelection sel = build_gamma0(cls, base, upsilon0);
    bool sp = is_strongly_positive(sel.gamma0);
    bool neat = is_neat(sel.gamma0);
    bool avoided = true;
    for (const auto& g : sel.upsilon)
      if (!contains_subpath(g, sel.gamma0).empty()) avoided = false;
    pass = pass && sp && neat && avoided;
    detail += base.short_text() + " len=" +
              std::to_string(sel.gamma0.length()) + " ";
  }
  double secs = seconds_since(start);
  pass = pass && secs < 60.0;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2fs", secs);
  report(5, pass, "gamma0 builder passes all three predicates", detail + buf);
}

void criterion_6() {
  FlowSystem sys = torus_flow();
  Rng rng(2024);
  double worst_step = 0.0, worst_flow = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    SectionPoint p = sample_section_point(sys, rng);
    SuspensionDatum x = p.datum;
    double a0 = area(x);
    auto [next, arrow] = induction_step(x);
    worst_step = std::max(worst_step, std::abs(area(next) - a0));
    double t = rng.uniform(-1.0, 1.0);
    worst_flow = std::max(worst_flow, std::abs(area(teich_flow(x, t)) - a0));
  }
  bool pass = worst_step < 1e-12 && worst_flow < 1e-12;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "max |dA| step=%.2e flow=%.2e", worst_step,
                worst_flow);
  report(6, pass, "area conservation over 1e4 random steps", buf);
}

void criterion_7() {
  FlowSystem sys = torus_flow();
  std::vector<double> roofs;
  roofs.reserve(100000);
  orbit_run(7001, 100000, sys,
            [&](const ReturnRecord& rec) { roofs.push_back(rec.roof); });
  TailFit fit = roof_tail_stats(std::move(roofs));
  bool pass = fit.slope < 0.0 && fit.r2 > 0.95 && fit.min_roof > 0.0;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "slope=%.4f r2=%.4f min_roof=%.4g n=%zu",
                fit.slope, fit.r2, fit.min_roof, fit.n);
  report(7, pass, "roof tails over 1e5 sampled torus returns", buf);
}

void criterion_8() {
  RauzyClass cls = rauzy_class(torus);
  PathSelection sel = build_gamma0(cls, torus, {});
  TransferConfig base = make_transfer_config(sel, 32, 1000.0, 0.0);
  RPFData rb = rpf_leading(base, 0.0);
  TransferConfig fine = make_transfer_config(sel, 64, 4000.0, 0.0);
  RPFData rf = rpf_leading(fine, 0.0);
  bool positive = true;
  for (double h : rb.h_sigma) positive = positive && h > 0.0;
  for (double h : rf.h_sigma) positive = positive && h > 0.0;
  bool pass = std::abs(rb.lambda_sigma - 1.0) < 0.05 &&
              std::abs(rf.lambda_sigma - 1.0) < 0.01 && positive;
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "base lambda=%.5f (cut 1000), refined lambda=%.5f (cut 4000)",
                rb.lambda_sigma, rf.lambda_sigma);
  report(8, pass, "truncated RPF eigenvalue near 1, h positive", buf);
}

void criterion_9() {
  RauzyClass cls = rauzy_class(torus);
  PathSelection sel = build_gamma0(cls, torus, {});
  TransferConfig cfg = make_transfer_config(sel, 48, 1000.0, 0.0);
  bool pass = true;
  std::string detail;
  for (double sigma : {-0.1, 0.0, 0.1}) {
    RPFData rpf = rpf_leading(cfg, sigma);
    double defect = markoff_defect(cfg, rpf, sigma);
    pass = pass && defect < 0.05;
    char buf[48];
    std::snprintf(buf, sizeof(buf), "s=%+.1f d=%.4f ", sigma, defect);
    detail += buf;
  }
  report(9, pass, "Markoff normalization pointwise within tolerance",
         detail);
}

void criterion_10() {
  bool pass = true;
  std::string detail;
  struct Case {
    std::size_t genus;
    long long q;
    const char* name;
  };
  for (const auto& c : {Case{1, 3, "SL2(F3)"}, Case{2, 2, "Sp4(F2)"}}) {
    FiniteGroup group = sp_group(c.genus, c.q);
    Rng rng(42);
    int holds = 0;
    for (int trial = 0; trial < 100; ++trial) {
      GroupMeasure nu = GroupMeasure::zero(group);
      for (auto& x : nu.a) x = {rng.gaussian(), rng.gaussian()};
      if (flatness_bound_check(group, nu).holds) ++holds;
    }
    pass = pass && holds == 100;
    detail += std::string(c.name) + " " + std::to_string(holds) + "/100 ";
  }
  report(10, pass, "convolution flatness bound on random measures", detail);
}

void criterion_11() {
  bool pass = true;
  std::string detail;
  for (long long q : {3, 5, 7, 9, 15}) {
    DimBound bound = min_dim_bound(q, 1);
    long long dixon = min_new_dim(q, 1);
    bool ok = BigRat(dixon) >= bound.bound;
    pass = pass && ok;
    std::ostringstream item;
    item << "q=" << q << ":" << bound.bound << "<=" << dixon << " ";
    detail += item.str();
  }
  pass = pass && min_dim_bound(5, 1).bound == BigRat(2) &&
         min_new_dim(5, 1) == 2;
  report(11, pass, "quasirandomness bound below the Dixon minimum", detail);
}

void criterion_12() {
  auto start = std::chrono::steady_clock::now();
  bool pass = true;
  std::string detail;
  struct Case {
    long long p;
    int r;
  };
  for (const auto& c : {Case{3, 1}, Case{3, 2}, Case{5, 1}}) {
    long long pr = 1;
    for (int i = 0; i < c.r; ++i) pr *= c.p;
    auto sizes = sl2_orbit_sizes(c.p, c.r);
    std::size_t min_size = static_cast<std::size_t>(-1);
    for (std::size_t s : sizes) min_size = std::min(min_size, s);
    pass = pass && !sizes.empty() &&
           min_size >= static_cast<std::size_t>(pr);
    detail += "p^R=" + std::to_string(pr) +
              " min=" + std::to_string(min_size) + " ";
  }
  BigMatrix nil(2, 2);
  nil.at(0, 1) = 1;
  BigInt nilsize = adjoint_orbit_size(make_lie_element(3, 1, 1, nil));
  pass = pass && nilsize == 4;
  detail += "nilpotent(3,1)=" + nilsize.str();
  double secs = seconds_since(start);
  pass = pass && secs < 60.0;
  char buf[32];
  std::snprintf(buf, sizeof(buf), " %.2fs", secs);
  report(12, pass, "adjoint orbits exhaustive lower bound p^R", detail + buf);
}

void criterion_13() {
  FiniteGroup g3 = sp_group(1, 3);
  long long dmin = min_new_dim(3, 1);
  Rng rng(4242);
  int dominated = 0;
  for (int trial = 0; trial < 100; ++trial) {
    GroupMeasure mu = GroupMeasure::zero(g3);
    for (auto& x : mu.a) x = {rng.gaussian(), rng.gaussian()};
    double bound = trace_formula_bound(g3, mu, dmin);
    double exact = subspace_opnorm(g3, mu, FiberSubspace::New);
    if (bound + 1e-9 >= exact) ++dominated;
  }
  bool pass = dominated == 100;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "dmin=%lld, %d/100 dominated", dmin,
                dominated);
  report(13, pass, "trace-formula bound dominates the new-space norm", buf);
}

void criterion_14() {
  RauzyClass cls = rauzy_class(torus);
  PathSelection sel = build_gamma0(cls, torus, {});
  TransferConfig cfg = make_transfer_config(sel, 32, 10.0, 0.0);
  RPFData rpf = rpf_leading(cfg, 0.0);
  FiniteGroup g3 = sp_group(1, 3);
  bool pass = true;
  std::string detail;
  for (std::size_t k : {1u, 2u, 3u}) {
    DecouplingReport rep = decoupling_check(cfg, rpf, g3, 2, k, 77);
    pass = pass && rep.dominated && (k == 1 || rep.block_rate < 1.0);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "K=%zu dom=%d rate=%.3f ", k,
                  rep.dominated ? 1 : 0, rep.block_rate);
    detail += buf;
  }
  report(14, pass, "decoupling majorization mu1 <= mu2 on the torus model",
         detail);
}

void criterion_15() {
  FlowSystem sys = torus_flow();
  CocycleHistogram hist = cocycle_distribution(1501, 100000, sys, 3);
  bool chi_ok = hist.p_value > 0.01;

  RauzyClass cls = rauzy_class(torus);
  PathSelection sel = build_gamma0(cls, torus, {});
  TransferConfig cfg = make_transfer_config(sel, 40, 500.0, 0.0);
  RPFData rpf = rpf_leading(cfg, 0.0);
  FiniteGroup g3 = sp_group(1, 3);
  FiniteGroup g5 = sp_group(1, 5);
  DecayReport r3 = twisted_radius(cfg, rpf, g3, 12, FiberSubspace::MeanZero,
                                  9);
  DecayReport r5 = twisted_radius(cfg, rpf, g5, 12, FiberSubspace::MeanZero,
                                  9);
  double hi = std::max(r3.rate, r5.rate), lo = std::min(r3.rate, r5.rate);
  bool rate_ok = r3.rate < 1.0 && r5.rate < 1.0 && hi <= 1.3 * lo;
  bool pass = chi_ok && rate_ok;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "chi2 p=%.4f, rates q3=%.4f q5=%.4f",
                hist.p_value, r3.rate, r5.rate);
  report(15, pass, "fiber equidistribution and uniform twisted decay", buf);
}

void criterion_16() {
  auto gens = class_generators(torus);
  bool pass = true;
  std::string detail;
  for (long long q : {3, 5, 7}) {
    CayleyGap gap = cayley_gap(gens, 1, q, 17);
    pass = pass && gap.lambda1 > 0.0;
    char buf[48];
    std::snprintf(buf, sizeof(buf), "q=%lld l1=%.6f ", q, gap.lambda1);
    detail += buf;
  }
  for (long long q : {2, 3}) {
    CayleyGap gap = cayley_gap(gens, 1, q, 17);
    double exact = dense_gap(gens, 1, q);
    pass = pass && std::abs(gap.lambda1 - exact) < 1e-8;
  }
  report(16, pass, "Cayley gaps positive; q=2,3 match dense to 1e-8",
         detail);
}

}  // namespace

int main() {
  std::printf("rauzylab acceptance suite\n");
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();
  criterion_13();
  criterion_14();
  criterion_15();
  criterion_16();
  std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
