#include "rauzylab/dynamics.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <deque>

#include "rauzylab/errors.hpp"
#include "rauzylab/rvgroup.hpp"

namespace rauzylab {

double l1_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double area(const SuspensionDatum& datum) {
  // <lambda, h> with heights h = Omega tau; h is positive on K_pi, so the
  // area of a genuine suspension datum is positive
  BigMatrix om = omega(datum.pair);
  const std::size_t d = datum.pair.size();
  double total = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < d; ++j)
      row += static_cast<double>(om.at(i, j)) * datum.tau[j];
    total += datum.lambda[i] * row;
  }
  return total;
}

MoveType step_type(const PermutationPair& pair,
                   const std::vector<double>& lambda) {
  double la = lambda[pair.last_top()];
  double lb = lambda[pair.last_bottom()];
  if (la == lb) fail(ErrorKind::TieUndefined, "lambda tie at the last letters");
  return la > lb ? MoveType::Top : MoveType::Bottom;
}

std::pair<SuspensionDatum, RauzyArrow> induction_step(
    const SuspensionDatum& datum) {
  MoveType m = step_type(datum.pair, datum.lambda);
  RauzyArrow arrow = apply_move(datum.pair, m);
  SuspensionDatum next;
  next.pair = arrow.target;
  next.lambda = datum.lambda;
  next.tau = datum.tau;
  // (Theta*)^{-1} subtracts the loser coordinate from the winner slot
  next.lambda[arrow.winner] -= next.lambda[arrow.loser];
  next.tau[arrow.winner] -= next.tau[arrow.loser];
  return {std::move(next), std::move(arrow)};
}

SuspensionDatum teich_flow(const SuspensionDatum& datum, double t) {
  SuspensionDatum next = datum;
  double et = std::exp(t);
  for (auto& x : next.lambda) x *= et;
  for (auto& x : next.tau) x /= et;
  return next;
}

namespace {

// unique incoming arrow of the given type, reconstructed from the target
RauzyArrow incoming_arrow(const PermutationPair& pair, MoveType move) {
  const std::size_t d = pair.size();
  std::vector<std::uint8_t> top(d), bottom(d);
  for (std::size_t i = 0; i < d; ++i) {
    top[i] = pair.top_at(i);
    bottom[i] = pair.bottom_at(i);
  }
  if (move == MoveType::Top) {
    std::uint8_t alpha = pair.last_top();
    auto it = std::find(bottom.begin(), bottom.end(), alpha);
    if (it + 1 == bottom.end())
      fail(ErrorKind::ValidationError, "no incoming top arrow");
    std::uint8_t beta = *(it + 1);
    bottom.erase(it + 1);
    bottom.push_back(beta);
  } else {
    std::uint8_t beta = pair.last_bottom();
    auto it = std::find(top.begin(), top.end(), beta);
    if (it + 1 == top.end())
      fail(ErrorKind::ValidationError, "no incoming bottom arrow");
    std::uint8_t alpha = *(it + 1);
    top.erase(it + 1);
    top.push_back(alpha);
  }
  PermutationPair source(pair.alphabet(), std::move(top), std::move(bottom));
  RauzyArrow arrow = apply_move(source, move);
  if (!(arrow.target == pair))
    fail(ErrorKind::ValidationError, "inverse reconstruction mismatch");
  return arrow;
}

}  // namespace

bool inverse_step_defined(const SuspensionDatum& datum) {
  for (MoveType m : {MoveType::Top, MoveType::Bottom}) {
    RauzyArrow arrow;
    try {
      arrow = incoming_arrow(datum.pair, m);
    } catch (const Error&) {
      continue;
    }
    // previous tau = Theta* tau adds the loser coordinate onto the winner
    std::vector<double> tau = datum.tau;
    tau[arrow.winner] += tau[arrow.loser];
    if (cone_contains(arrow.source, tau)) return true;
  }
  return false;
}

bool in_fundamental_domain(const SuspensionDatum& datum) {
  double n1 = l1_norm(datum.lambda);
  bool forward_defined =
      datum.lambda[datum.pair.last_top()] !=
      datum.lambda[datum.pair.last_bottom()];
  if (forward_defined) {
    auto [next, arrow] = induction_step(datum);
    if (l1_norm(next.lambda) < 1.0 && 1.0 <= n1) return true;
  } else if (1.0 <= n1) {
    return true;
  }
  if (!inverse_step_defined(datum) && n1 < 1.0) return true;
  return false;
}

FlowSystem make_flow_system(const PathSelection& selection) {
  FlowSystem sys;
  sys.gamma0 = selection.gamma0;
  sys.base = selection.gamma0.start;
  if (!is_loop(sys.gamma0)) fail(ErrorKind::NotALoop, "gamma0 must be a loop");
  sys.cls = rauzy_class(sys.base);
  sys.basis = symplectic_basis(sys.base);
  sys.theta0_star = theta_star_of_path(sys.gamma0);
  sys.theta0_star_inv = sys.theta0_star.unimodular_inverse();

  for (const auto& ray : cone_extreme_rays(sys.base)) {
    std::vector<double> r(ray.size());
    double norm = 0.0;
    for (std::size_t i = 0; i < ray.size(); ++i) {
      r[i] = static_cast<double>(ray[i]);
      norm += std::abs(r[i]);
    }
    for (auto& x : r) x /= norm;
    sys.cone_rays.push_back(std::move(r));
  }

  const std::size_t d = sys.base.size();
  double min_col = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      col += static_cast<double>(sys.theta0_star.at(i, j));
    if (j == 0 || col < min_col) min_col = col;
  }
  sys.min_colsum = min_col;
  return sys;
}

SectionPoint sample_section_point(const FlowSystem& system, Rng& rng) {
  const std::size_t d = system.base.size();
  SectionPoint point;
  point.datum.pair = system.base;

  // lambda: uniform on the cylinder Y_gamma0 meet the simplex, by rejection
  // through the Theta parametrization (Jacobian envelope: min column sum)
  while (true) {
    std::vector<double> mu = rng.simplex(d);
    std::vector<double> v = system.theta0_star.apply(mu);
    double n1 = l1_norm(v);
    double accept = std::pow(system.min_colsum / n1, static_cast<double>(d));
    if (rng.uniform() <= accept) {
      for (auto& x : v) x /= n1;
      point.datum.lambda = std::move(v);
      break;
    }
  }

  // tau: positive mixture of the extreme rays of K_base, pushed into
  // K_gamma0, scaled to unit area
  while (true) {
    std::vector<double> weights = rng.simplex(system.cone_rays.size());
    std::vector<double> mix(d, 0.0);
    for (std::size_t r = 0; r < system.cone_rays.size(); ++r)
      for (std::size_t i = 0; i < d; ++i)
        mix[i] += weights[r] * system.cone_rays[r][i];
    if (!cone_contains(system.base, mix)) continue;
    std::vector<double> tau = system.theta0_star_inv.apply(mix);
    point.datum.tau = std::move(tau);
    double a = area(point.datum);
    if (!(a > 0.0)) continue;
    for (auto& x : point.datum.tau) x /= a;
    break;
  }
  return point;
}

namespace {

struct StepState {
  PermutationPair pair;
  std::vector<double> lambda;
  std::vector<double> tau;
  double cumlog = 0.0;  // sum of log per-step norms (negative)
};

ReturnRecord finish_record(const FlowSystem& system,
                           std::vector<MoveType> moves, const StepState& at_j,
                           const BigMatrix& theta_star) {
  ReturnRecord rec;
  rec.path.start = system.base;
  rec.path.moves = std::move(moves);
  rec.roof = -at_j.cumlog;
  rec.cocycle = induced_sp(theta_star, system.basis);
  rec.endpoint.datum.pair = at_j.pair;
  rec.endpoint.datum.lambda = at_j.lambda;
  // Zhat rescales tau by the norm contraction factor
  double scale = std::exp(at_j.cumlog);
  rec.endpoint.datum.tau = at_j.tau;
  for (auto& x : rec.endpoint.datum.tau) x *= scale;
  return rec;
}

// generic per-move simulation, used for d > 2
ReturnRecord return_map_steps(const SectionPoint& point,
                              const FlowSystem& system) {
  const RauzyPath& g0 = system.gamma0;
  const std::size_t l0 = g0.length();

  StepState cur{point.datum.pair, point.datum.lambda, point.datum.tau, 0.0};
  {
    double n = l1_norm(cur.lambda);
    for (auto& x : cur.lambda) x /= n;
  }

  std::vector<MoveType> itinerary;
  std::deque<StepState> recent;  // states at the last l0+1 step counts
  recent.push_back(cur);

  for (long long total = 0; total < system.step_budget; ++total) {
    MoveType m = step_type(cur.pair, cur.lambda);
    RauzyArrow arrow = apply_move(cur.pair, m);
    cur.lambda[arrow.winner] -= cur.lambda[arrow.loser];
    cur.tau[arrow.winner] -= cur.tau[arrow.loser];
    double n = l1_norm(cur.lambda);
    for (auto& x : cur.lambda) x /= n;
    cur.cumlog += std::log(n);
    cur.pair = arrow.target;
    itinerary.push_back(m);
    recent.push_back(cur);
    if (recent.size() > l0 + 1) recent.pop_front();

    std::size_t steps = itinerary.size();
    if (steps < 2 * l0) continue;
    // candidate return at j = steps - l0: trailing window must spell gamma0
    bool match = true;
    for (std::size_t k = 0; k < l0 && match; ++k)
      match = itinerary[steps - l0 + k] == g0.moves[k];
    if (!match) continue;
    const StepState& at_j = recent.front();
    if (!(at_j.pair == system.base)) continue;

    std::size_t j = steps - l0;
    std::vector<MoveType> moves(itinerary.begin(), itinerary.begin() + j);
    RauzyPath path{system.base, moves};
    return finish_record(system, std::move(moves), at_j,
                         theta_star_of_path(path));
  }
  fail(ErrorKind::StepBudgetExceeded, "no return within the step budget");
}

struct RleBlock {
  MoveType type;
  long long len;
};

std::vector<RleBlock> rle_of(const std::vector<MoveType>& moves) {
  std::vector<RleBlock> blocks;
  for (MoveType m : moves) {
    if (!blocks.empty() && blocks.back().type == m)
      ++blocks.back().len;
    else
      blocks.push_back({m, 1});
  }
  return blocks;
}

// d = 2 fast path: whole runs of a repeated move are processed with one
// division (the run lengths are the continued fraction digits), and the
// gamma0 window is matched on the run-length encoding
ReturnRecord return_map_runs(const SectionPoint& point,
                             const FlowSystem& system) {
  const std::vector<RleBlock> pattern = rle_of(system.gamma0.moves);
  const std::size_t m = pattern.size();
  const PermutationPair& base = system.base;

  // winner/loser letter indices per move type at the unique vertex
  const std::size_t top_w = base.last_top();
  const std::size_t top_l = base.last_bottom();
  auto winner_of = [&](MoveType t) {
    return t == MoveType::Top ? top_w : top_l;
  };
  auto loser_of = [&](MoveType t) { return t == MoveType::Top ? top_l : top_w; };

  struct Run {
    MoveType type;
    long long len;
    long long start;
    StepState at_start;  // lambda normalized to l1 = 1
  };

  StepState cur{base, point.datum.lambda, point.datum.tau, 0.0};
  {
    double n = l1_norm(cur.lambda);
    for (auto& x : cur.lambda) x /= n;
  }

  // runs strictly before the sliding window, already materialized
  std::vector<MoveType> prefix_moves;
  BigMatrix prefix_theta = BigMatrix::identity(2);
  auto fold_run = [&](MoveType t, long long len) {
    if (len <= 0) return;
    prefix_moves.insert(prefix_moves.end(), static_cast<std::size_t>(len), t);
    BigMatrix block = BigMatrix::identity(2);
    block.at(winner_of(t), loser_of(t)) = len;  // (I + E)^n = I + nE
    prefix_theta = prefix_theta * block;
  };

  std::deque<Run> recent;
  long long pos = 0;
  while (true) {
    double lw = cur.lambda[top_w], ll = cur.lambda[top_l];
    if (lw == ll) fail(ErrorKind::TieUndefined, "lambda tie");
    MoveType type = lw > ll ? MoveType::Top : MoveType::Bottom;
    std::size_t w = winner_of(type), l = loser_of(type);
    long long n = static_cast<long long>(cur.lambda[w] / cur.lambda[l]);
    // float division can land one past the subtraction count near integers
    while (n > 1 && cur.lambda[w] - static_cast<double>(n) * cur.lambda[l] <= 0.0)
      --n;
    if (cur.lambda[w] - static_cast<double>(n) * cur.lambda[l] <= 0.0)
      fail(ErrorKind::TieUndefined, "lambda ratio is an exact integer");

    if (recent.size() == m) {
      // the run leaving the window can no longer host the return start
      const Run& out = recent.front();
      if (static_cast<long long>(prefix_moves.size()) + out.len >
          system.step_budget)
        fail(ErrorKind::StepBudgetExceeded,
             "no return within the step budget");
      fold_run(out.type, out.len);
      recent.pop_front();
    }
    recent.push_back({type, n, pos, cur});

    // advance through the whole run
    cur.lambda[w] -= static_cast<double>(n) * cur.lambda[l];
    cur.tau[w] -= static_cast<double>(n) * cur.tau[l];
    double s = cur.lambda[0] + cur.lambda[1];
    cur.cumlog += std::log(s);
    cur.lambda[0] /= s;
    cur.lambda[1] /= s;
    pos += n;

    // try the alignment that uses the runs in `recent` as the m blocks
    if (recent.size() < m) continue;
    bool ok = recent.front().type == pattern.front().type &&
              recent.front().len >= pattern.front().len;
    for (std::size_t i = 1; i + 1 < m && ok; ++i)
      ok = recent[i].type == pattern[i].type &&
           recent[i].len == pattern[i].len;
    if (ok)
      ok = recent.back().type == pattern.back().type &&
           recent.back().len >= pattern.back().len;
    if (!ok) continue;

    const Run& first = recent.front();
    long long o = first.len - pattern.front().len;
    long long j = first.start + o;
    if (j == 0) continue;  // the section point's own gamma0 prefix
    if (j > system.step_budget)
      fail(ErrorKind::StepBudgetExceeded, "return exceeds the step budget");

    // state at offset o inside the first matched run
    std::size_t fw = winner_of(first.type), fl = loser_of(first.type);
    StepState at_j = first.at_start;
    at_j.lambda[fw] -= static_cast<double>(o) * at_j.lambda[fl];
    at_j.tau[fw] -= static_cast<double>(o) * at_j.tau[fl];
    double sj = at_j.lambda[0] + at_j.lambda[1];
    at_j.cumlog += std::log(sj);
    at_j.lambda[0] /= sj;
    at_j.lambda[1] /= sj;

    std::vector<MoveType> moves = prefix_moves;
    BigMatrix theta_star = prefix_theta;
    if (o > 0) {
      moves.insert(moves.end(), static_cast<std::size_t>(o), first.type);
      BigMatrix block = BigMatrix::identity(2);
      block.at(fw, fl) = o;
      theta_star = theta_star * block;
    }
    return finish_record(system, std::move(moves), at_j, theta_star);
  }
}

}  // namespace

ReturnRecord return_map(const SectionPoint& point, const FlowSystem& system) {
  if (system.base.size() == 2 && rle_of(system.gamma0.moves).size() >= 2)
    return return_map_runs(point, system);
  return return_map_steps(point, system);
}

void orbit_run(std::uint64_t seed, std::size_t n_returns,
               const FlowSystem& system,
               const std::function<void(const ReturnRecord&)>& sink) {
  Rng rng(seed);
  SectionPoint point = sample_section_point(system, rng);
  for (std::size_t i = 0; i < n_returns; ++i) {
    ReturnRecord rec = return_map(point, system);
    point = rec.endpoint;
    sink(rec);
  }
}

std::vector<ReturnRecord> sample_orbit(std::uint64_t seed,
                                       std::size_t n_returns,
                                       const FlowSystem& system, long long q) {
  std::vector<ReturnRecord> records;
  records.reserve(n_returns);
  orbit_run(seed, n_returns, system, [&](const ReturnRecord& rec) {
    records.push_back(rec);
    if (q >= 2) records.back().cocycle = reduce_mod(rec.cocycle, q);
  });
  return records;
}

TailFit roof_tail_stats(std::vector<double> roofs) {
  if (roofs.size() < 1000)
    fail(ErrorKind::TooFewSamples, "need at least 1000 roof samples");
  std::sort(roofs.begin(), roofs.end());
  const std::size_t n = roofs.size();
  TailFit fit;
  fit.n = n;
  fit.min_roof = roofs.front();

  double lo = roofs[n / 2];
  double hi = roofs[static_cast<std::size_t>(0.99 * (n - 1))];

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double t = roofs[i];
    if (t < lo || t > hi) continue;
    std::size_t above = n - 1 - i;
    if (above == 0) continue;
    double x = t;
    double y = std::log(static_cast<double>(above) / static_cast<double>(n));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    ++m;
  }
  if (m < 10) fail(ErrorKind::TooFewSamples, "degenerate roof range");
  double dm = static_cast<double>(m);
  double cov = sxy - sx * sy / dm;
  double varx = sxx - sx * sx / dm;
  double vary = syy - sy * sy / dm;
  fit.slope = cov / varx;
  fit.r2 = vary > 0 ? (cov * cov) / (varx * vary) : 1.0;
  return fit;
}

FiniteGroup fiber_group(const FlowSystem& system, long long q,
                        std::uint64_t cap) {
  std::vector<SpElement> gens;
  for (auto& loop : spanning_tree_loops(system.cls, system.base))
    gens.push_back(induced_sp(loop, system.basis));
  FiniteGroup group =
      FiniteGroup::generate(system.basis.genus, q, gens, cap);
  if (BigInt(group.size()) != sp_order(system.basis.genus, q))
    fail(ErrorKind::NotSurjective, "class cocycles do not fill Sp_2g(Z/qZ)");
  return group;
}

CocycleHistogram cocycle_distribution(std::uint64_t seed, std::size_t n,
                                      const FlowSystem& system, long long q) {
  FiniteGroup group = fiber_group(system, q);
  CocycleHistogram hist;
  hist.counts.assign(group.size(), 0);
  std::size_t cur = group.identity();
  orbit_run(seed, n, system, [&](const ReturnRecord& rec) {
    std::size_t g = group.index_of(reduce_mod(rec.cocycle, q));
    cur = group.mul(cur, g);
    ++hist.counts[cur];
  });

  hist.dof = group.size() - 1;
  if (n == 0) {
    hist.p_value = 1.0;
    return hist;
  }
  double expected = static_cast<double>(n) / static_cast<double>(group.size());
  for (auto c : hist.counts) {
    double diff = static_cast<double>(c) - expected;
    hist.chi2 += diff * diff / expected;
  }
  boost::math::chi_squared dist(static_cast<double>(hist.dof));
  hist.p_value = boost::math::cdf(boost::math::complement(dist, hist.chi2));
  return hist;
}

double correlation_estimate(const FiberObservable& u, const FiberObservable& v,
                            double t, std::uint64_t seed, std::size_t n,
                            const FlowSystem& system, long long q) {
  FiniteGroup group = fiber_group(system, q);
  Rng rng(seed);
  double num = 0.0, den = 0.0;
  for (std::size_t trial = 0; trial < n; ++trial) {
    SectionPoint x = sample_section_point(system, rng);
    ReturnRecord first = return_map(x, system);
    double r0 = first.roof;
    double s = rng.uniform() * r0;
    std::size_t g = rng.below(group.size());

    double ux = u(x, g);

    // flow forward by t: hop returns while the remaining time clears the roof
    double total = s + t;
    SectionPoint y = x;
    ReturnRecord rec = first;
    std::size_t fiber = g;
    while (total >= rec.roof) {
      total -= rec.roof;
      // left transport by h_gamma = (cocycle mod q)^{-1}
      std::size_t h =
          group.inv(group.index_of(reduce_mod(rec.cocycle, q)));
      fiber = group.mul(h, fiber);
      y = rec.endpoint;
      rec = return_map(y, system);
    }
    double vy = v(y, fiber);

    num += r0 * ux * vy;
    den += r0;
  }
  if (den == 0.0) fail(ErrorKind::ValidationError, "degenerate sampling");
  return num / den;
}

double hilbert_distance(const std::vector<double>& x,
                        const std::vector<double>& y) {
  if (x.size() != y.size())
    fail(ErrorKind::DimensionMismatch, "simplex points");
  double max_ratio = 0.0, max_inv = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      fail(ErrorKind::BoundaryPoint, "simplex point touches the boundary");
    max_ratio = std::max(max_ratio, x[i] / y[i]);
    max_inv = std::max(max_inv, y[i] / x[i]);
  }
  return std::log(max_ratio * max_inv);
}

}  // namespace rauzylab
