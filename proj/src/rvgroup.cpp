#include "rauzylab/rvgroup.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>

#include "rauzylab/errors.hpp"
#include "rauzylab/rng.hpp"

namespace rauzylab {

namespace {

struct TreePaths {
  // move sequences base -> v and v -> base
  std::vector<std::vector<MoveType>> out;
  std::vector<std::vector<MoveType>> back;
};

TreePaths tree_paths(const RauzyClass& cls, const PermutationPair& base) {
  const std::size_t nv = cls.vertices.size();
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nv; ++i) index[cls.vertices[i].key()] = i;
  const std::size_t base_idx = index.at(base.key());

  std::vector<std::array<std::size_t, 2>> succ(nv);
  for (std::size_t v = 0; v < nv; ++v)
    for (MoveType m : {MoveType::Top, MoveType::Bottom})
      succ[v][m == MoveType::Bottom ? 1 : 0] =
          index.at(cls.out_arrow(v, m).target.key());

  TreePaths tp;
  tp.out.assign(nv, {});
  tp.back.assign(nv, {});

  // forward BFS out-tree
  {
    std::vector<bool> seen(nv, false);
    std::deque<std::size_t> queue{base_idx};
    seen[base_idx] = true;
    while (!queue.empty()) {
      std::size_t v = queue.front();
      queue.pop_front();
      for (MoveType m : {MoveType::Top, MoveType::Bottom}) {
        std::size_t t = succ[v][m == MoveType::Bottom ? 1 : 0];
        if (seen[t]) continue;
        seen[t] = true;
        tp.out[t] = tp.out[v];
        tp.out[t].push_back(m);
        queue.push_back(t);
      }
    }
  }
  // reverse BFS gives shortest v -> base paths
  {
    std::vector<std::vector<std::pair<std::size_t, MoveType>>> pred(nv);
    for (std::size_t v = 0; v < nv; ++v)
      for (MoveType m : {MoveType::Top, MoveType::Bottom})
        pred[succ[v][m == MoveType::Bottom ? 1 : 0]].emplace_back(v, m);
    std::vector<bool> seen(nv, false);
    std::deque<std::size_t> queue{base_idx};
    seen[base_idx] = true;
    while (!queue.empty()) {
      std::size_t v = queue.front();
      queue.pop_front();
      for (auto [p, m] : pred[v]) {
        if (seen[p]) continue;
        seen[p] = true;
        tp.back[p] = {m};
        tp.back[p].insert(tp.back[p].end(), tp.back[v].begin(),
                          tp.back[v].end());
        queue.push_back(p);
      }
    }
  }
  return tp;
}

}  // namespace

std::vector<RauzyPath> spanning_tree_loops(const RauzyClass& cls,
                                           const PermutationPair& base) {
  TreePaths tp = tree_paths(cls, base);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < cls.vertices.size(); ++i)
    index[cls.vertices[i].key()] = i;

  std::vector<RauzyPath> loops;
  std::vector<std::string> seen;
  for (const auto& a : cls.arrows) {
    std::size_t src = index.at(a.source.key());
    std::size_t dst = index.at(a.target.key());
    RauzyPath loop{base, tp.out[src]};
    loop.moves.push_back(a.move);
    loop.moves.insert(loop.moves.end(), tp.back[dst].begin(),
                      tp.back[dst].end());
    std::string text = loop.to_text();
    if (std::find(seen.begin(), seen.end(), text) != seen.end()) continue;
    seen.push_back(text);
    loops.push_back(std::move(loop));
  }
  return loops;
}

RVGroupSpec make_rvgroup_spec(const RauzyClass& cls,
                              const PermutationPair& base,
                              const SymplecticBasis& basis) {
  RVGroupSpec spec;
  spec.base = base;
  spec.label = base.short_text();
  for (auto& loop : spanning_tree_loops(cls, base)) {
    SpElement e = induced_sp(loop, basis);
    spec.generators.emplace_back(std::move(loop), std::move(e));
  }
  return spec;
}

std::vector<BigMatrix> make_upsilon(PathSelection& selection,
                                    const SymplecticBasis& basis) {
  selection.upsilon = selection.upsilon0;
  for (const auto& g : selection.upsilon0)
    selection.upsilon.push_back(concat(g, g));

  std::vector<BigMatrix> prefixed;
  for (const auto& g : selection.upsilon) {
    RauzyPath path = concat(selection.gamma0, g);
    prefixed.push_back(induced_sp(path, basis).m);
  }
  std::vector<BigMatrix> sigma;
  for (const auto& a : prefixed)
    for (const auto& b : prefixed) {
      BigMatrix diff = a * b.unimodular_inverse();
      if (std::find(sigma.begin(), sigma.end(), diff) == sigma.end())
        sigma.push_back(std::move(diff));
    }
  selection.sigma_set = sigma;
  return sigma;
}

std::pair<BigInt, bool> mod_q_closure(const std::vector<SpElement>& generators,
                                      std::size_t genus, long long q,
                                      std::uint64_t cap) {
  BigInt order = sp_order(genus, q);
  if (order > cap)
    fail(ErrorKind::CapExceeded, "sp_order(g,q) exceeds the closure cap");
  FiniteGroup g = FiniteGroup::generate(genus, q, generators, cap);
  BigInt size(g.size());
  return {size, size == order};
}

CayleyGap cayley_gap(const std::vector<SpElement>& generators,
                     std::size_t genus, long long q, std::uint64_t seed,
                     std::uint64_t cap) {
  BigInt order = sp_order(genus, q);
  if (order > cap) fail(ErrorKind::CapExceeded, "group order exceeds cap");

  FiniteGroup group = FiniteGroup::generate(genus, q, generators, cap);
  if (BigInt(group.size()) != order)
    fail(ErrorKind::NotSurjective, "generators do not fill Sp_2g(Z/qZ)");

  // symmetrized generating set, duplicates removed
  std::vector<std::size_t> gens;
  for (std::size_t i : group.generator_indices())
    if (std::find(gens.begin(), gens.end(), i) == gens.end())
      gens.push_back(i);

  CayleyGap result;
  result.q = q;
  result.group_order = order;
  for (std::size_t i : gens) result.generating_set.push_back(group.element(i));

  const std::size_t n = group.size();
  std::vector<std::vector<std::size_t>> perm(gens.size(),
                                             std::vector<std::size_t>(n));
  for (std::size_t s = 0; s < gens.size(); ++s)
    for (std::size_t x = 0; x < n; ++x) perm[s][x] = group.mul(gens[s], x);

  auto deflate = [&](std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(n);
    for (double& x : v) x -= mean;
  };
  auto norm = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };

  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  deflate(v);
  double nv = norm(v);
  for (auto& x : v) x /= nv;

  // power iteration on (A + I)/2 restricted to mean-zero vectors
  std::vector<double> w(n);
  double rayleigh = 0.0;
  int iter = 0;
  const int max_iter = 100000;
  for (; iter < max_iter; ++iter) {
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t s = 0; s < gens.size(); ++s)
      for (std::size_t x = 0; x < n; ++x) w[x] += v[perm[s][x]];
    for (std::size_t x = 0; x < n; ++x)
      w[x] = 0.5 * (w[x] / static_cast<double>(gens.size()) + v[x]);
    deflate(w);
    rayleigh = 0.0;
    for (std::size_t x = 0; x < n; ++x) rayleigh += w[x] * v[x];
    double resid = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      double r = w[x] - rayleigh * v[x];
      resid += r * r;
    }
    resid = std::sqrt(resid);
    if (resid < 1e-8) {
      ++iter;
      break;
    }
    double nw = norm(w);
    if (nw < 1e-300) {
      // landed in the kernel of (A+I)/2; restart from fresh noise
      for (auto& x : v) x = rng.uniform(-1.0, 1.0);
      deflate(v);
      double nv2 = norm(v);
      for (auto& x : v) x /= nv2;
      continue;
    }
    for (std::size_t x = 0; x < n; ++x) v[x] = w[x] / nw;
  }
  if (iter >= max_iter)
    fail(ErrorKind::NoConvergence, "cayley gap power iteration");

  result.lambda1 = 2.0 * (1.0 - rayleigh);
  result.iterations = iter;
  return result;
}

double invariance_defect(const FiniteGroup& group,
                         const std::vector<double>& phi,
                         const std::vector<SpElement>& sigma) {
  const std::size_t n = group.size();
  if (phi.size() != n) fail(ErrorKind::DimensionMismatch, "phi length");
  double mean = 0.0;
  for (double x : phi) mean += x;
  if (std::abs(mean) > 1e-9 * static_cast<double>(n))
    fail(ErrorKind::ValidationError, "phi must be orthogonal to constants");

  double worst = 0.0;
  for (const auto& raw : sigma) {
    SpElement g = raw.q == group.modulus()
                      ? raw
                      : reduce_mod(SpElement{raw.genus, 0, raw.m},
                                   group.modulus());
    std::size_t gi = group.index_of(g);
    std::size_t ginv = group.inv(gi);
    double acc = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      double moved = phi[group.mul(ginv, x)];  // (g phi)(x) = phi(g^{-1} x)
      double diff = moved - phi[x];
      acc += diff * diff;
    }
    worst = std::max(worst, std::sqrt(acc));
  }
  return worst;
}

}  // namespace rauzylab
