#include "rauzylab/transfer.hpp"
#include <functional>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rauzylab/errors.hpp"
#include "rauzylab/rng.hpp"

namespace rauzylab {

SimplexGrid::SimplexGrid(std::size_t dim, std::size_t subdivisions)
    : dim_(dim), n_(subdivisions) {
  if (dim < 2 || subdivisions < 1)
    fail(ErrorKind::ValidationError, "grid needs dim >= 2 and n >= 1");
  std::vector<int> z(dim - 1, 0);
  std::size_t radix = 1;
  for (std::size_t i = 0; i + 1 < dim; ++i) radix *= (n_ + 1);
  code_to_idx_.assign(radix, static_cast<std::size_t>(-1));
  // lexicographic enumeration of z >= 0 with sum <= n
  while (true) {
    int sum = std::accumulate(z.begin(), z.end(), 0);
    if (sum <= static_cast<int>(n_)) {
      code_to_idx_[code_of(z)] = verts_.size();
      verts_.push_back(z);
    }
    std::size_t i = z.size();
    while (i > 0 && z[i - 1] == static_cast<int>(n_)) z[--i] = 0;
    if (i == 0) break;
    ++z[i - 1];
  }
}

std::size_t SimplexGrid::code_of(const std::vector<int>& z) const {
  std::size_t code = 0;
  for (std::size_t i = 0; i < z.size(); ++i)
    code = code * (n_ + 1) + static_cast<std::size_t>(z[i]);
  return code;
}

std::vector<double> SimplexGrid::vertex_mu(std::size_t idx) const {
  const auto& z = verts_[idx];
  std::vector<double> mu(dim_);
  int sum = 0;
  for (std::size_t i = 0; i + 1 < dim_; ++i) {
    mu[i] = static_cast<double>(z[i]) / static_cast<double>(n_);
    sum += z[i];
  }
  mu[dim_ - 1] = static_cast<double>(static_cast<int>(n_) - sum) /
                 static_cast<double>(n_);
  return mu;
}

SimplexGrid::Stencil SimplexGrid::locate(const std::vector<double>& mu) const {
  if (mu.size() != dim_) fail(ErrorKind::DimensionMismatch, "mu length");
  const std::size_t m = dim_ - 1;
  // staircase coordinates: w_k = n * (mu_0 + ... + mu_k), monotone in k
  std::vector<double> w(m);
  double acc = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    acc += mu[k];
    w[k] = static_cast<double>(n_) * std::min(1.0, std::max(0.0, acc));
  }
  std::vector<int> b(m);
  std::vector<double> f(m);
  for (std::size_t k = 0; k < m; ++k) {
    double fl = std::floor(w[k]);
    int bk = static_cast<int>(fl);
    if (bk >= static_cast<int>(n_)) bk = static_cast<int>(n_) - 1;
    if (bk < 0) bk = 0;
    b[k] = bk;
    f[k] = w[k] - static_cast<double>(bk);
  }
  // order of fraction descent; ties broken toward the later coordinate so
  // chain vertices stay monotone
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
    if (f[a] != f[c]) return f[a] > f[c];
    return a > c;
  });

  Stencil st;
  st.index.reserve(m + 1);
  st.weight.reserve(m + 1);
  auto push_vertex = [&](const std::vector<int>& wv, double weight) {
    // back to z coordinates: z_k = w_k - w_{k-1}
    std::vector<int> z(m);
    int prev = 0;
    for (std::size_t k = 0; k < m; ++k) {
      z[k] = wv[k] - prev;
      prev = wv[k];
    }
    std::size_t idx = code_to_idx_[code_of(z)];
    if (idx == static_cast<std::size_t>(-1))
      fail(ErrorKind::ValidationError, "interpolation left the simplex");
    st.index.push_back(idx);
    st.weight.push_back(weight);
  };

  std::vector<int> chain = b;
  push_vertex(chain, 1.0 - (m ? f[order[0]] : 0.0));
  for (std::size_t j = 0; j < m; ++j) {
    chain[order[j]] += 1;
    double weight =
        j + 1 < m ? f[order[j]] - f[order[j + 1]] : f[order[m - 1]];
    push_vertex(chain, weight);
  }
  return st;
}

double SimplexGrid::interpolate(const Stencil& st,
                                const std::vector<double>& f) const {
  double v = 0.0;
  for (std::size_t i = 0; i < st.index.size(); ++i)
    v += st.weight[i] * f[st.index[i]];
  return v;
}

std::complex<double> SimplexGrid::interpolate(
    const Stencil& st, const std::vector<std::complex<double>>& f) const {
  std::complex<double> v = 0.0;
  for (std::size_t i = 0; i < st.index.size(); ++i)
    v += st.weight[i] * f[st.index[i]];
  return v;
}

namespace {

// KMP failure table for the gamma0 move word
std::vector<std::size_t> kmp_failure(const std::vector<MoveType>& word) {
  std::vector<std::size_t> fail_tbl(word.size(), 0);
  for (std::size_t i = 1; i < word.size(); ++i) {
    std::size_t k = fail_tbl[i - 1];
    while (k > 0 && word[i] != word[k]) k = fail_tbl[k - 1];
    if (word[i] == word[k]) ++k;
    fail_tbl[i] = k;
  }
  return fail_tbl;
}

}  // namespace

namespace {

// shared DFS over adapted loops gamma0 . gamma' with the norm cutoff and
// KMP pruning; `sink` receives Theta*_gamma and the move tail of gamma'
void adapted_loop_scan(
    const PathSelection& selection, double cutoff,
    const std::function<void(const BigMatrix&, const std::vector<MoveType>&)>&
        sink) {
  const RauzyPath& g0 = selection.gamma0;
  const PermutationPair base = g0.start;

  BigMatrix theta0 = theta_star_of_path(g0);
  std::vector<std::size_t> fail_tbl = kmp_failure(g0.moves);

  RauzyClass cls = rauzy_class(base);
  std::unordered_map<std::string, std::size_t> vindex;
  for (std::size_t i = 0; i < cls.vertices.size(); ++i)
    vindex[cls.vertices[i].key()] = i;
  const std::size_t base_idx = vindex.at(base.key());
  std::vector<std::array<std::size_t, 2>> succ(cls.vertices.size());
  std::vector<std::array<BigMatrix, 2>> theta_move(cls.vertices.size());
  for (std::size_t v = 0; v < cls.vertices.size(); ++v)
    for (MoveType m : {MoveType::Top, MoveType::Bottom}) {
      const RauzyArrow& a = cls.out_arrow(v, m);
      std::size_t slot = m == MoveType::Bottom ? 1 : 0;
      succ[v][slot] = vindex.at(a.target.key());
      theta_move[v][slot] = theta_of_move(a).transpose();
    }

  // depth-first over gamma0 . gamma'. For a neat gamma0 the adapted branches
  // are exactly those whose gamma' avoids gamma0, so a completed KMP match
  // prunes the whole subtree; the column-sum norm grows monotonically along
  // extensions, which makes the cutoff prune sound as well. Explicit stack:
  // path lengths reach the cutoff scale.
  struct Frame {
    std::size_t vertex;
    std::size_t kmp;
    BigMatrix theta;
    int next_move;  // 0 = Top pending, 1 = Bottom pending, 2 = done
  };
  std::vector<MoveType> tail;
  std::vector<Frame> stack;
  stack.push_back({base_idx, 0, theta0, 0});
  auto emit = [&](const Frame& f) {
    if (f.vertex == base_idx) sink(f.theta, tail);
  };
  if (static_cast<double>(stack.back().theta.linf_colsum_norm()) <= cutoff)
    emit(stack.back());
  else
    stack.pop_back();
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_move >= 2) {
      stack.pop_back();
      if (!tail.empty()) tail.pop_back();
      continue;
    }
    MoveType m = f.next_move == 0 ? MoveType::Top : MoveType::Bottom;
    ++f.next_move;
    std::size_t k = f.kmp;
    while (k > 0 && g0.moves[k] != m) k = fail_tbl[k - 1];
    if (g0.moves[k] == m) ++k;
    if (k == g0.moves.size()) continue;  // gamma' would contain gamma0
    std::size_t slot = m == MoveType::Bottom ? 1 : 0;
    BigMatrix next_theta = f.theta * theta_move[f.vertex][slot];
    if (static_cast<double>(next_theta.linf_colsum_norm()) > cutoff) continue;
    tail.push_back(m);
    stack.push_back({succ[f.vertex][slot], k, std::move(next_theta), 0});
    emit(stack.back());
  }
}

}  // namespace

std::vector<TransferBranch> enumerate_branches(const PathSelection& selection,
                                               const SymplecticBasis& basis,
                                               double cutoff) {
  const RauzyPath& g0 = selection.gamma0;
  BigMatrix theta0 = theta_star_of_path(g0);
  BigMatrix theta0_inv = theta0.unimodular_inverse();

  std::vector<TransferBranch> out;
  adapted_loop_scan(
      selection, cutoff,
      [&](const BigMatrix& theta, const std::vector<MoveType>& tail) {
        TransferBranch b;
        b.path.start = g0.start;
        b.path.moves = g0.moves;
        b.path.moves.insert(b.path.moves.end(), tail.begin(), tail.end());
        b.theta_star = theta;
        b.cocycle = induced_sp(theta, basis);
        // Theta*_{gamma' . gamma0} = Theta0^{-1} Theta*_gamma Theta0
        b.branch_mu = theta0_inv * theta * theta0;
        out.push_back(std::move(b));
      });

  std::sort(out.begin(), out.end(),
            [](const TransferBranch& a, const TransferBranch& b) {
              if (a.path.length() != b.path.length())
                return a.path.length() < b.path.length();
              return a.path.moves < b.path.moves;
            });
  return out;
}

namespace {

// log |M mu|_1 for a nonnegative integer matrix and simplex point
double log_image_norm(const BigMatrix& m, const std::vector<double>& mu) {
  std::vector<double> v = m.apply(mu);
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return std::log(s);
}

std::vector<double> normalized_image(const BigMatrix& m,
                                     const std::vector<double>& mu) {
  std::vector<double> v = m.apply(mu);
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  for (auto& x : v) x /= s;
  return v;
}

}  // namespace

std::complex<double> branch_weight(const TransferBranch& branch,
                                   const std::vector<double>& y,
                                   std::complex<double> s) {
  const double d = static_cast<double>(y.size());
  double r = log_image_norm(branch.theta_star, y);
  // |Theta* y|^{-(s+d)} = exp(-(sigma+d) r) * exp(-i t r)
  return std::exp(-(s + d) * r);
}

TransferConfig make_transfer_config(const PathSelection& selection,
                                    std::size_t grid_n, double cutoff,
                                    double sigma, double t_imag) {
  TransferConfig cfg;
  cfg.selection = selection;
  cfg.basis = symplectic_basis(selection.gamma0.start);
  const std::size_t d = selection.gamma0.start.size();
  cfg.grid = SimplexGrid(d, grid_n);
  cfg.cutoff = cutoff;
  cfg.sigma = sigma;
  cfg.t_imag = t_imag;
  cfg.basepoint_o.assign(d, 1.0 / static_cast<double>(d));

  cfg.branches = enumerate_branches(selection, cfg.basis, cutoff);

  BigMatrix theta0 = theta_star_of_path(selection.gamma0);
  double log_norm0_at_o = log_image_norm(theta0, cfg.basepoint_o);
  const double expo = sigma + static_cast<double>(d);

  // measure the excluded tail by scanning two dyadic shells past the cutoff
  // (lightweight pass, nothing stored)
  double shell1 = 0.0, shell2 = 0.0;
  adapted_loop_scan(
      selection, 4.0 * cutoff,
      [&](const BigMatrix& theta, const std::vector<MoveType>&) {
        double norm = static_cast<double>(theta.linf_colsum_norm());
        if (norm <= cutoff) return;
        double ro = log_image_norm(theta * theta0, cfg.basepoint_o) -
                    log_norm0_at_o;
        double w = std::exp(-expo * ro);
        if (norm <= 2.0 * cutoff)
          shell1 += w;
        else
          shell2 += w;
      });
  for (const auto& b : cfg.branches) {
    double ro = log_image_norm(b.theta_star * theta0, cfg.basepoint_o) -
                log_norm0_at_o;
    cfg.enumerated_mass += std::exp(-expo * ro);
  }
  double ratio = shell1 > 0.0 ? shell2 / shell1 : 0.0;
  cfg.tail_bound = shell1 + shell2;
  if (ratio > 0.0 && ratio < 1.0)
    cfg.tail_bound += shell2 * ratio / (1.0 - ratio);
  else if (shell2 > 0.0)
    cfg.tail_bound = std::numeric_limits<double>::infinity();

  // cache roofs and image stencils per branch and grid vertex
  const std::size_t nv = cfg.grid.size();
  const std::size_t nb = cfg.branches.size();
  cfg.roof.resize(nb * nv);
  cfg.image_index.resize(nb * nv * d);
  cfg.image_weight.resize(nb * nv * d);
  cfg.roof_at_o.resize(nb);
  std::vector<std::vector<double>> vertex_mu(nv);
  std::vector<double> log_norm0(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    vertex_mu[i] = cfg.grid.vertex_mu(i);
    log_norm0[i] = log_image_norm(theta0, vertex_mu[i]);
  }
  for (std::size_t g = 0; g < nb; ++g) {
    const TransferBranch& b = cfg.branches[g];
    BigMatrix full = b.theta_star * theta0;  // Theta*_{gamma gamma0}
    for (std::size_t i = 0; i < nv; ++i) {
      cfg.roof[g * nv + i] =
          log_image_norm(full, vertex_mu[i]) - log_norm0[i];
      SimplexGrid::Stencil st =
          cfg.grid.locate(normalized_image(b.branch_mu, vertex_mu[i]));
      for (std::size_t k = 0; k < d; ++k) {
        cfg.image_index[(g * nv + i) * d + k] =
            static_cast<std::uint32_t>(st.index[k]);
        cfg.image_weight[(g * nv + i) * d + k] = st.weight[k];
      }
    }
    cfg.roof_at_o[g] =
        log_image_norm(full, cfg.basepoint_o) - log_norm0_at_o;
  }
  return cfg;
}

std::vector<std::complex<double>> transfer_apply_scalar(
    const TransferConfig& config,
    const std::vector<std::complex<double>>& f) {
  const std::size_t nv = config.grid.size();
  if (f.size() != nv) fail(ErrorKind::DimensionMismatch, "grid function size");
  const std::complex<double> s(config.sigma, config.t_imag);
  const std::size_t d = config.selection.gamma0.start.size();
  std::vector<std::complex<double>> out(nv, 0.0);
  for (std::size_t g = 0; g < config.branches.size(); ++g)
    for (std::size_t i = 0; i < nv; ++i) {
      std::complex<double> w =
          std::exp(-(s + static_cast<double>(d)) * config.roof[g * nv + i]);
      std::complex<double> v = 0.0;
      for (std::size_t k = 0; k < d; ++k)
        v += config.image_weight[(g * nv + i) * d + k] *
             f[config.image_index[(g * nv + i) * d + k]];
      out[i] += w * v;
    }
  return out;
}

namespace {

std::vector<double> apply_scalar_real(const TransferConfig& config,
                                      double sigma,
                                      const std::vector<double>& f) {
  const std::size_t nv = config.grid.size();
  const std::size_t d = config.selection.gamma0.start.size();
  const double expo = sigma + static_cast<double>(d);
  std::vector<double> out(nv, 0.0);
  for (std::size_t g = 0; g < config.branches.size(); ++g)
    for (std::size_t i = 0; i < nv; ++i) {
      double v = 0.0;
      for (std::size_t k = 0; k < d; ++k)
        v += config.image_weight[(g * nv + i) * d + k] *
             f[config.image_index[(g * nv + i) * d + k]];
      out[i] += std::exp(-expo * config.roof[g * nv + i]) * v;
    }
  return out;
}

double grid_mean(const std::vector<double>& f) {
  double s = 0.0;
  for (double x : f) s += x;
  return s / static_cast<double>(f.size());
}

}  // namespace

RPFData rpf_leading(const TransferConfig& config, double sigma) {
  const std::size_t nv = config.grid.size();
  RPFData data;
  data.sigma = sigma;
  std::vector<double> h(nv, 1.0);
  double lambda = 1.0;
  double prev = 0.0;
  int iter = 0;
  const int max_iter = 20000;
  for (; iter < max_iter; ++iter) {
    std::vector<double> lh = apply_scalar_real(config, sigma, h);
    lambda = grid_mean(lh) / grid_mean(h);
    // positivity projection: the exact operator preserves positive cones
    double floor_val = 0.0;
    for (auto& x : lh) x = std::max(x, floor_val);
    double scale = grid_mean(lh);
    for (auto& x : lh) x /= scale;
    double diff = std::abs(lambda - prev);
    prev = lambda;
    h = std::move(lh);
    if (iter > 30 && diff < 1e-14 * std::max(1.0, std::abs(lambda))) {
      ++iter;
      break;
    }
  }
  if (iter >= max_iter)
    fail(ErrorKind::NoConvergence, "rpf power iteration stalled");
  data.iterations = iter;
  data.lambda_sigma = lambda;
  data.h_sigma = h;
  std::vector<double> lh = apply_scalar_real(config, sigma, h);
  double resid = 0.0, hmax = 0.0;
  for (std::size_t i = 0; i < nv; ++i) {
    resid = std::max(resid, std::abs(lh[i] - lambda * h[i]));
    hmax = std::max(hmax, std::abs(h[i]));
  }
  data.residual = resid / hmax;
  for (double x : h)
    if (!(x > 0.0))
      fail(ErrorKind::NoConvergence, "rpf eigenfunction touches zero");
  return data;
}

double markoff_defect(const TransferConfig& config, const RPFData& rpf,
                      double sigma) {
  const std::size_t nv = config.grid.size();
  const std::size_t d = config.selection.gamma0.start.size();
  const double expo = sigma + static_cast<double>(d);
  double worst = 0.0;
  for (std::size_t i = 0; i < nv; ++i) {
    double sum = 0.0;
    for (std::size_t g = 0; g < config.branches.size(); ++g) {
      double w = std::exp(-expo * config.roof[g * nv + i]);
      double h_im = 0.0;
      for (std::size_t k = 0; k < d; ++k)
        h_im += config.image_weight[(g * nv + i) * d + k] *
                rpf.h_sigma[config.image_index[(g * nv + i) * d + k]];
      sum += w * h_im / (rpf.lambda_sigma * rpf.h_sigma[i]);
    }
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

void project_fiber(const FiniteGroup& group, FiberSubspace subspace,
                   FiberField& field) {
  if (subspace == FiberSubspace::Full) return;
  const std::size_t n = group.size();
  for (auto& fiber : field) {
    if (fiber.size() != n)
      fail(ErrorKind::DimensionMismatch, "fiber dimension");
    if (subspace == FiberSubspace::MeanZero) {
      std::complex<double> mean = 0.0;
      for (const auto& x : fiber) mean += x;
      mean /= static_cast<double>(n);
      for (auto& x : fiber) x -= mean;
    } else {
      // new subspace: apply prod_p (I - P_{q/p}) with coset averaging
      for (auto [p, e] : factorize(group.modulus())) {
        long long divisor = group.modulus() / p;
        auto ids = group.reduction_ids(divisor);
        std::size_t classes = 0;
        for (auto id : ids) classes = std::max(classes, id + 1);
        std::vector<std::complex<double>> mean(classes, 0.0);
        std::vector<std::size_t> count(classes, 0);
        for (std::size_t x = 0; x < n; ++x) {
          mean[ids[x]] += fiber[x];
          ++count[ids[x]];
        }
        for (std::size_t c = 0; c < classes; ++c)
          mean[c] /= static_cast<double>(count[c]);
        for (std::size_t x = 0; x < n; ++x) fiber[x] -= mean[ids[x]];
      }
    }
  }
}

FiberField normalized_apply(const TransferConfig& config, const RPFData& rpf,
                            const FiniteGroup& group,
                            const FiberField& field) {
  const std::size_t nv = config.grid.size();
  const std::size_t n = group.size();
  if (field.size() != nv)
    fail(ErrorKind::DimensionMismatch, "fiber field grid size");
  const std::complex<double> s(config.sigma, config.t_imag);
  const double d = static_cast<double>(config.selection.gamma0.start.size());

  // permutation action per branch: (rho(h_gamma) v)(x) = v(Theta*_gamma x)
  std::vector<std::vector<std::size_t>> perm(config.branches.size());
  for (std::size_t g = 0; g < config.branches.size(); ++g) {
    std::size_t tg =
        group.index_of(reduce_mod(config.branches[g].cocycle,
                                  group.modulus()));
    perm[g].resize(n);
    for (std::size_t x = 0; x < n; ++x) perm[g][x] = group.mul(tg, x);
  }

  // h_sigma . F is interpolated jointly, so the restriction to fiber
  // constants reproduces the scalar normalized operator exactly
  const std::size_t dd = config.selection.gamma0.start.size();
  FiberField out(nv, std::vector<std::complex<double>>(n, 0.0));
  std::vector<std::complex<double>> interp(n);
  for (std::size_t g = 0; g < config.branches.size(); ++g) {
    for (std::size_t i = 0; i < nv; ++i) {
      const std::size_t off = (g * nv + i) * dd;
      std::complex<double> weight =
          std::exp(-(s + d) * config.roof[g * nv + i]) /
          (rpf.lambda_sigma * rpf.h_sigma[i]);
      for (std::size_t x = 0; x < n; ++x) {
        std::complex<double> v = 0.0;
        for (std::size_t k = 0; k < dd; ++k)
          v += config.image_weight[off + k] *
               rpf.h_sigma[config.image_index[off + k]] *
               field[config.image_index[off + k]][x];
        interp[x] = v;
      }
      auto& dst = out[i];
      for (std::size_t x = 0; x < n; ++x)
        dst[x] += weight * interp[perm[g][x]];
    }
  }
  return out;
}

DecayReport twisted_radius(const TransferConfig& config, const RPFData& rpf,
                           const FiniteGroup& group, std::size_t k_max,
                           FiberSubspace subspace, std::uint64_t seed) {
  const std::size_t nv = config.grid.size();
  const std::size_t n = group.size();

  DecayReport report;
  report.q = group.modulus();
  report.rpf_residual = rpf.residual;
  report.tail_bound = config.tail_bound;

  Rng rng(seed);
  FiberField field(nv, std::vector<std::complex<double>>(n));
  for (auto& fiber : field)
    for (auto& x : fiber) x = {rng.gaussian(), rng.gaussian()};
  project_fiber(group, subspace, field);

  auto sup_norm = [&](const FiberField& f) {
    double best = 0.0;
    for (const auto& fiber : f) {
      double s = 0.0;
      for (const auto& x : fiber) s += std::norm(x);
      best = std::max(best, std::sqrt(s));
    }
    return best;
  };

  double n0 = sup_norm(field);
  if (n0 > 0)
    for (auto& fiber : field)
      for (auto& x : fiber) x /= n0;
  report.norms.push_back(1.0);
  for (std::size_t k = 1; k <= k_max; ++k) {
    field = normalized_apply(config, rpf, group, field);
    project_fiber(group, subspace, field);
    report.norms.push_back(sup_norm(field));
  }

  // geometric fit of log norms against k (skip k = 0 transients)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t k = 1; k < report.norms.size(); ++k) {
    if (report.norms[k] <= 0.0) break;
    double x = static_cast<double>(k), y = std::log(report.norms[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m >= 2) {
    double dm = static_cast<double>(m);
    double slope = (sxy - sx * sy / dm) / (sxx - sx * sx / dm);
    report.rate = std::exp(slope);
  } else {
    report.rate = 0.0;
  }
  return report;
}

}  // namespace rauzylab
