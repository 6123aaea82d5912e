#include "rauzylab/quasirandom.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "rauzylab/errors.hpp"
#include "rauzylab/rng.hpp"

namespace rauzylab {

GroupMeasure GroupMeasure::zero(const FiniteGroup& group) {
  GroupMeasure m;
  m.q = group.modulus();
  m.genus = group.genus();
  m.a.assign(group.size(), 0.0);
  return m;
}

GroupMeasure GroupMeasure::delta(const FiniteGroup& group, std::size_t index) {
  GroupMeasure m = zero(group);
  m.a[index] = 1.0;
  return m;
}

namespace {

void check_measure(const FiniteGroup& group, const GroupMeasure& x) {
  if (x.q != group.modulus() || x.genus != group.genus() ||
      x.a.size() != group.size())
    fail(ErrorKind::ModulusMismatch, "measure does not match the group");
}

}  // namespace

GroupMeasure convolve(const FiniteGroup& group, const GroupMeasure& x,
                      const GroupMeasure& y) {
  check_measure(group, x);
  check_measure(group, y);
  GroupMeasure out = GroupMeasure::zero(group);
  const std::size_t n = group.size();
  for (std::size_t h = 0; h < n; ++h) {
    if (x.a[h] == 0.0) continue;
    for (std::size_t k = 0; k < n; ++k) {
      if (y.a[k] == 0.0) continue;
      out.a[group.mul(h, k)] += x.a[h] * y.a[k];
    }
  }
  return out;
}

GroupMeasure tilde(const FiniteGroup& group, const GroupMeasure& x) {
  check_measure(group, x);
  GroupMeasure out = GroupMeasure::zero(group);
  for (std::size_t g = 0; g < group.size(); ++g)
    out.a[g] = std::conj(x.a[group.inv(g)]);
  return out;
}

double ell1(const GroupMeasure& x) {
  double s = 0.0;
  for (const auto& v : x.a) s += std::abs(v);
  return s;
}

double ell2(const GroupMeasure& x) {
  double s = 0.0;
  for (const auto& v : x.a) s += std::norm(v);
  return std::sqrt(s);
}

namespace {

// left translation table: row h holds the indices h^{-1} x
std::vector<std::vector<std::uint32_t>> translation_table(
    const FiniteGroup& group) {
  const std::size_t n = group.size();
  std::vector<std::vector<std::uint32_t>> t(n,
                                            std::vector<std::uint32_t>(n));
  for (std::size_t h = 0; h < n; ++h) {
    std::size_t hinv = group.inv(h);
    for (std::size_t x = 0; x < n; ++x)
      t[h][x] = static_cast<std::uint32_t>(group.mul(hinv, x));
  }
  return t;
}

void project_vec(const FiniteGroup& group, FiberSubspace subspace,
                 std::vector<std::complex<double>>& v) {
  FiberField wrap(1);
  wrap[0] = std::move(v);
  project_fiber(group, subspace, wrap);
  v = std::move(wrap[0]);
}

}  // namespace

double subspace_opnorm(const FiniteGroup& group, const GroupMeasure& mu,
                       FiberSubspace subspace) {
  check_measure(group, mu);
  const std::size_t n = group.size();
  auto table = translation_table(group);
  GroupMeasure mu_t = tilde(group, mu);

  auto apply = [&](const GroupMeasure& m,
                   const std::vector<std::complex<double>>& v) {
    std::vector<std::complex<double>> out(n, 0.0);
    for (std::size_t h = 0; h < n; ++h) {
      if (m.a[h] == 0.0) continue;
      const auto& row = table[h];
      for (std::size_t x = 0; x < n; ++x) out[x] += m.a[h] * v[row[x]];
    }
    return out;
  };

  Rng rng(12);
  std::vector<std::complex<double>> v(n);
  for (auto& x : v) x = {rng.gaussian(), rng.gaussian()};
  project_vec(group, subspace, v);
  double nv = 0.0;
  for (const auto& x : v) nv += std::norm(x);
  if (nv == 0.0) return 0.0;
  for (auto& x : v) x /= std::sqrt(nv);

  double rayleigh = 0.0;
  for (int iter = 0; iter < 2000; ++iter) {
    std::vector<std::complex<double>> w = apply(mu_t, apply(mu, v));
    project_vec(group, subspace, w);
    std::complex<double> dot = 0.0;
    double nw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dot += std::conj(v[i]) * w[i];
      nw += std::norm(w[i]);
    }
    double next = dot.real();
    nw = std::sqrt(nw);
    if (nw < 1e-280) return 0.0;  // mu annihilates the subspace
    double resid = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      resid += std::norm(w[i] - next * v[i]);
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
    bool settled = std::sqrt(resid) < 1e-12 * std::max(1.0, std::abs(next));
    rayleigh = next;
    if (settled && iter > 10) break;
  }
  return std::sqrt(std::max(0.0, rayleigh));
}

FlatnessReport flatness_bound_check(const FiniteGroup& group,
                                    const GroupMeasure& nu) {
  FlatnessReport rep;
  rep.lhs = ell2(convolve(group, tilde(group, nu), nu));
  double n1 = ell1(nu);
  rep.rhs = n1 * n1 / std::sqrt(static_cast<double>(group.size())) +
            n1 * subspace_opnorm(group, nu, FiberSubspace::MeanZero);
  rep.holds = rep.lhs <= rep.rhs + 1e-9 * std::max(1.0, rep.rhs);
  return rep;
}

double trace_formula_bound(const FiniteGroup& group, const GroupMeasure& mu,
                           std::size_t dmin) {
  if (dmin < 1) fail(ErrorKind::ValidationError, "dmin must be positive");
  double flat = ell2(convolve(group, tilde(group, mu), mu));
  double val = static_cast<double>(group.size()) * flat * flat /
               static_cast<double>(dmin);
  return std::pow(val, 0.25);
}

CharacterTable character_table(const FiniteGroup& group, std::uint64_t seed) {
  const std::size_t n = group.size();
  // conjugacy classes by orbit closure under generator conjugation
  std::vector<int> class_of(n, -1);
  CharacterTable table;
  std::vector<std::size_t> gens;
  for (std::size_t g : group.generator_indices()) gens.push_back(g);
  for (std::size_t x = 0; x < n; ++x) {
    if (class_of[x] >= 0) continue;
    int cls = static_cast<int>(table.class_rep.size());
    table.class_rep.push_back(x);
    std::vector<std::size_t> stack{x};
    class_of[x] = cls;
    std::size_t count = 0;
    while (!stack.empty()) {
      std::size_t y = stack.back();
      stack.pop_back();
      ++count;
      for (std::size_t g : gens) {
        std::size_t z = group.mul(group.mul(g, y), group.inv(g));
        if (class_of[z] < 0) {
          class_of[z] = cls;
          stack.push_back(z);
        }
      }
    }
    table.class_size.push_back(count);
  }
  const std::size_t k = table.class_rep.size();

  // members per class for the structure constants
  std::vector<std::vector<std::uint32_t>> members(k);
  for (std::size_t x = 0; x < n; ++x)
    members[class_of[x]].push_back(static_cast<std::uint32_t>(x));

  // class algebra matrices: (M_i)_{l j} = #{x in C_i : x^{-1} z_j in C_l}
  std::vector<Eigen::MatrixXd> cls_mat(k, Eigen::MatrixXd::Zero(k, k));
  for (std::size_t j = 0; j < k; ++j) {
    std::size_t zj = table.class_rep[j];
    for (std::size_t i = 0; i < k; ++i)
      for (std::uint32_t x : members[i]) {
        std::size_t y = group.mul(group.inv(x), zj);
        cls_mat[i](class_of[y], j) += 1.0;
      }
  }

  Rng rng(seed);
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::MatrixXd combo = Eigen::MatrixXd::Zero(k, k);
    for (std::size_t i = 0; i < k; ++i)
      combo += rng.uniform(0.25, 1.0) * cls_mat[i];
    Eigen::EigenSolver<Eigen::MatrixXd> solver(combo);
    if (solver.info() != Eigen::Success) continue;
    Eigen::MatrixXcd vecs = solver.eigenvectors();

    std::size_t id_class = static_cast<std::size_t>(class_of[0]);
    bool good = true;
    std::vector<long long> degrees(k);
    std::vector<std::vector<std::complex<double>>> ratio(
        k, std::vector<std::complex<double>>(k));
    long long sumsq = 0;
    for (std::size_t c = 0; c < k && good; ++c) {
      Eigen::VectorXcd v = vecs.col(c);
      if (std::abs(v(id_class)) < 1e-9) {
        good = false;
        break;
      }
      v /= v(id_class);
      // central characters omega_j = |C_j| chi(g_j) / chi(1)
      double inv_sum = 0.0;
      for (std::size_t j = 0; j < k; ++j)
        inv_sum += std::norm(v(j)) / static_cast<double>(table.class_size[j]);
      double deg = std::sqrt(static_cast<double>(n) / inv_sum);
      long long deg_int = std::llround(deg);
      if (deg_int < 1 || std::abs(deg - static_cast<double>(deg_int)) > 1e-4) {
        good = false;
        break;
      }
      degrees[c] = deg_int;
      sumsq += deg_int * deg_int;
      for (std::size_t j = 0; j < k; ++j)
        ratio[c][j] = v(j) / static_cast<double>(table.class_size[j]);
    }
    if (!good || sumsq != static_cast<long long>(n)) continue;
    table.degrees = std::move(degrees);
    table.ratio = std::move(ratio);
    return table;
  }
  fail(ErrorKind::NoConvergence, "class algebra eigenvectors degenerate");
}

std::vector<SpElement> sp_generators(std::size_t genus, long long q) {
  const std::size_t g = genus;
  const std::size_t n = 2 * g;
  // block-convention generators (a_1..a_g, b_1..b_g): J and the unipotents
  // [[I, B], [0, I]] over a basis of symmetric B
  std::vector<BigMatrix> block;
  {
    BigMatrix j(n, n);
    for (std::size_t i = 0; i < g; ++i) {
      j.at(i, g + i) = 1;
      j.at(g + i, i) = -1;
    }
    block.push_back(std::move(j));
    for (std::size_t i = 0; i <= g - 1; ++i)
      for (std::size_t l = i; l < g; ++l) {
        BigMatrix u = BigMatrix::identity(n);
        u.at(i, g + l) += 1;
        u.at(l, g + i) += 1;
        if (i == l) u.at(i, g + i) -= 1;  // E_ii added once
        block.push_back(std::move(u));
      }
  }
  // permute into the interleaved convention a1 b1 a2 b2 ...
  BigMatrix perm(n, n);
  for (std::size_t i = 0; i < g; ++i) {
    perm.at(2 * i, i) = 1;          // a_i: block slot i -> interleaved 2i
    perm.at(2 * i + 1, g + i) = 1;  // b_i: block slot g+i -> 2i+1
  }
  BigMatrix perm_inv = perm.unimodular_inverse();

  std::vector<SpElement> out;
  for (const auto& m : block) {
    SpElement e;
    e.genus = genus;
    e.q = 0;
    e.m = perm * m * perm_inv;
    if (!is_symplectic(e))
      fail(ErrorKind::NotSymplectic, "generator construction broke the form");
    out.push_back(reduce_mod(e, q));
  }
  return out;
}

FiniteGroup sp_group(std::size_t genus, long long q, std::uint64_t cap) {
  if (sp_order(genus, q) > cap)
    fail(ErrorKind::CapExceeded, "Sp_2g(Z/qZ) exceeds the cap");
  FiniteGroup group =
      FiniteGroup::generate(genus, q, sp_generators(genus, q), cap);
  if (BigInt(group.size()) != sp_order(genus, q))
    fail(ErrorKind::NotSurjective,
         "symplectic generators failed to fill the group");
  return group;
}

std::vector<long long> dixon_dims(long long q, std::size_t genus,
                                  std::uint64_t cap) {
  FiniteGroup group = sp_group(genus, q, cap);
  CharacterTable table = character_table(group);
  std::vector<long long> dims = table.degrees;
  std::sort(dims.begin(), dims.end());
  return dims;
}

long long min_new_dim(long long q, std::size_t genus, std::uint64_t cap) {
  FiniteGroup group = sp_group(genus, q, cap);
  CharacterTable table = character_table(group);
  const std::size_t k = table.class_rep.size();

  // per prime p | q: the classes inside the kernel of reduction mod q/p
  std::vector<std::vector<std::size_t>> kernel_classes;
  for (auto [p, e] : factorize(q)) {
    long long divisor = q / p;
    auto ids = group.reduction_ids(divisor);
    std::size_t id_coset = ids[group.identity()];
    std::vector<std::size_t> classes;
    for (std::size_t c = 0; c < k; ++c)
      if (ids[table.class_rep[c]] == id_coset) classes.push_back(c);
    kernel_classes.push_back(std::move(classes));
  }

  long long best = -1;
  for (std::size_t c = 0; c < k; ++c) {
    bool is_new = true;
    for (const auto& classes : kernel_classes) {
      bool nontrivial_there = false;
      for (std::size_t j : classes)
        if (std::abs(table.ratio[c][j] - std::complex<double>(1.0, 0.0)) >
            1e-6) {
          nontrivial_there = true;
          break;
        }
      if (!nontrivial_there) {
        is_new = false;
        break;
      }
    }
    if (is_new && (best < 0 || table.degrees[c] < best))
      best = table.degrees[c];
  }
  if (best < 0)
    fail(ErrorKind::ValidationError, "no new character found");
  return best;
}

DimBound min_dim_bound_prime(long long p, std::size_t genus) {
  if (p < 3 || p % 2 == 0) fail(ErrorKind::EvenPrime, "p must be odd");
  DimBound b;
  b.q = p;
  b.genus = genus;
  BigInt pg = boost::multiprecision::pow(BigInt(p),
                                         static_cast<unsigned>(genus));
  b.bound = BigRat(pg - 1, 2);
  b.method = DimBoundMethod::PrimeExact;
  return b;
}

DimBound min_dim_bound(long long q, std::size_t genus) {
  if (q < 3 || q % 2 == 0)
    fail(ErrorKind::EvenModulus, "composite bound needs odd q");
  DimBound b;
  b.q = q;
  b.genus = genus;
  b.bound = 1;
  auto factors = factorize(q);
  for (auto [p, r] : factors) {
    if (r == 1) {
      b.bound *= min_dim_bound_prime(p, genus).bound;
    } else {
      // prime power: p^{floor(r/2)} adjoint-orbit bound with e = 1
      b.bound *= BigRat(boost::multiprecision::pow(
          BigInt(p), static_cast<unsigned>(r / 2)));
    }
  }
  b.method = factors.size() == 1 && factors[0].second == 1
                 ? DimBoundMethod::PrimeExact
                 : (factors.size() == 1 ? DimBoundMethod::PrimePowerOrbit
                                        : DimBoundMethod::CrtComposite);
  return b;
}

LieAlgebraElement make_lie_element(long long p, int r, std::size_t genus,
                                   const BigMatrix& x) {
  if (p < 3 || p % 2 == 0) fail(ErrorKind::EvenPrime, "p must be an odd prime");
  LieAlgebraElement e;
  e.p = p;
  e.r = r;
  e.genus = genus;
  e.x = x;
  long long mod = 1;
  for (int i = 0; i < r; ++i) mod *= p;
  BigMatrix j0 = standard_j0(genus);
  BigMatrix cond = x.transpose() * j0 + j0 * x;
  for (std::size_t i = 0; i < cond.rows(); ++i)
    for (std::size_t jj = 0; jj < cond.cols(); ++jj)
      if (cond.at(i, jj) % mod != 0)
        fail(ErrorKind::ValidationError,
             "matrix is not in the symplectic Lie algebra");
  for (std::size_t i = 0; i < e.x.rows(); ++i)
    for (std::size_t jj = 0; jj < e.x.cols(); ++jj) {
      BigInt v = e.x.at(i, jj) % mod;
      if (v < 0) v += mod;
      e.x.at(i, jj) = v;
    }
  return e;
}

namespace {

std::string encode_mod(const BigMatrix& m, long long mod) {
  std::string key(m.rows() * m.cols(), '\0');
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      long long v = static_cast<long long>(m.at(i, j) % mod);
      if (v < 0) v += mod;
      key[i * m.cols() + j] = static_cast<char>(v);
    }
  return key;
}

BigMatrix mod_reduce(BigMatrix m, long long mod) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      BigInt v = m.at(i, j) % mod;
      if (v < 0) v += mod;
      m.at(i, j) = v;
    }
  return m;
}

}  // namespace

BigInt adjoint_orbit_size(const LieAlgebraElement& x, std::uint64_t cap) {
  long long mod = 1;
  for (int i = 0; i < x.r; ++i) mod *= x.p;
  // X must be nonzero mod p
  bool nonzero = false;
  for (std::size_t i = 0; i < x.x.rows() && !nonzero; ++i)
    for (std::size_t j = 0; j < x.x.cols() && !nonzero; ++j)
      if (x.x.at(i, j) % x.p != 0) nonzero = true;
  if (!nonzero) fail(ErrorKind::ZeroModP, "X vanishes mod p");

  std::vector<SpElement> gens = sp_generators(x.genus, mod);
  std::vector<std::pair<BigMatrix, BigMatrix>> conj;
  for (const auto& g : gens) {
    conj.emplace_back(g.m, sp_inverse(g).m);
    conj.emplace_back(sp_inverse(g).m, g.m);
  }

  std::unordered_map<std::string, bool> seen;
  std::vector<BigMatrix> stack{mod_reduce(x.x, mod)};
  seen[encode_mod(stack[0], mod)] = true;
  std::size_t count = 0;
  while (!stack.empty()) {
    BigMatrix y = std::move(stack.back());
    stack.pop_back();
    ++count;
    if (count > cap) fail(ErrorKind::CapExceeded, "orbit exceeds the cap");
    for (const auto& [g, ginv] : conj) {
      BigMatrix z = mod_reduce(g * y * ginv, mod);
      auto [it, inserted] = seen.try_emplace(encode_mod(z, mod), true);
      if (inserted) stack.push_back(std::move(z));
    }
  }
  return BigInt(count);
}

std::vector<std::size_t> sl2_orbit_sizes(long long p, int r) {
  long long mod = 1;
  for (int i = 0; i < r; ++i) mod *= p;
  std::vector<std::size_t> sizes;
  std::unordered_map<std::string, bool> assigned;
  for (long long a = 0; a < mod; ++a)
    for (long long b = 0; b < mod; ++b)
      for (long long c = 0; c < mod; ++c) {
        if (a % p == 0 && b % p == 0 && c % p == 0) continue;
        BigMatrix x(2, 2);
        x.at(0, 0) = a;
        x.at(0, 1) = b;
        x.at(1, 0) = c;
        x.at(1, 1) = mod - a == mod ? 0 : mod - a;  // -a mod p^r
        if (assigned.count(encode_mod(x, mod))) continue;
        LieAlgebraElement e = make_lie_element(p, r, 1, x);
        // mark the whole orbit
        std::vector<SpElement> gens = sp_generators(1, mod);
        std::vector<std::pair<BigMatrix, BigMatrix>> conj;
        for (const auto& g : gens) {
          conj.emplace_back(g.m, sp_inverse(g).m);
          conj.emplace_back(sp_inverse(g).m, g.m);
        }
        std::vector<BigMatrix> stack{e.x};
        assigned[encode_mod(e.x, mod)] = true;
        std::size_t count = 0;
        while (!stack.empty()) {
          BigMatrix y = std::move(stack.back());
          stack.pop_back();
          ++count;
          for (const auto& [g, ginv] : conj) {
            BigMatrix z = mod_reduce(g * y * ginv, mod);
            auto [it, inserted] = assigned.try_emplace(encode_mod(z, mod),
                                                       true);
            if (inserted) stack.push_back(std::move(z));
          }
        }
        sizes.push_back(count);
      }
  return sizes;
}

namespace {

// branch maps in mu coordinates with the normalized transfer weights
// e^{R_sigma}; the roof telescopes through log|B mu| and log|Theta0* mu|
struct DecoupleCtx {
  const TransferConfig& cfg;
  const RPFData& rpf;
  double log_lambda;
  std::size_t d;
  std::vector<std::vector<double>> theta0;  // Theta*_{gamma0} as doubles

  DecoupleCtx(const TransferConfig& c, const RPFData& r)
      : cfg(c),
        rpf(r),
        log_lambda(std::log(r.lambda_sigma)),
        d(c.selection.gamma0.start.size()) {
    BigMatrix t0 = theta_star_of_path(c.selection.gamma0);
    theta0.assign(d, std::vector<double>(d));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        theta0[i][j] = static_cast<double>(t0.at(i, j));
  }

  // alpha_gamma in mu coordinates; returns the image and log |B mu|_1
  std::pair<std::vector<double>, double> map(
      std::size_t branch, const std::vector<double>& mu) const {
    std::vector<double> v = cfg.branches[branch].branch_mu.apply(mu);
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    for (auto& x : v) x /= s;
    return {std::move(v), std::log(s)};
  }
  double log_theta0_norm(const std::vector<double>& mu) const {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < d; ++j) row += theta0[i][j] * mu[j];
      s += std::abs(row);
    }
    return std::log(s);
  }
  double log_h(const std::vector<double>& mu) const {
    auto st = cfg.grid.locate(mu);
    return std::log(cfg.grid.interpolate(st, rpf.h_sigma));
  }
  // R_sigma at alpha_branch(mu); log_bm = log |B mu| from map()
  double weight_log(const std::vector<double>& mu,
                    const std::vector<double>& image, double log_bm) const {
    double roof = log_bm + log_theta0_norm(image) - log_theta0_norm(mu);
    return -(cfg.sigma + static_cast<double>(d)) * roof + log_h(image) -
           log_h(mu) - log_lambda;
  }
};

}  // namespace

DecouplingReport decoupling_check(const TransferConfig& config,
                                  const RPFData& rpf,
                                  const FiniteGroup& group, std::size_t L,
                                  std::size_t K, std::uint64_t seed) {
  if (config.branches.empty())
    fail(ErrorKind::EmptyBranchSet, "decoupling needs a truncated branch set");
  if (L < 1 || K < 1)
    fail(ErrorKind::ValidationError, "L and K must be positive");
  const std::size_t nb = config.branches.size();
  const std::size_t len = L * K;
  const std::size_t n = group.size();
  if (std::pow(static_cast<double>(nb), static_cast<double>(len)) > 2.0e6)
    fail(ErrorKind::CapExceeded, "tuple space too large");

  DecoupleCtx ctx(config, rpf);

  // h_gamma = (cocycle mod q)^{-1} per branch
  std::vector<std::size_t> hidx(nb);
  for (std::size_t b = 0; b < nb; ++b)
    hidx[b] = group.inv(
        group.index_of(reduce_mod(config.branches[b].cocycle,
                                  group.modulus())));

  DecouplingReport rep;
  rep.length_l = L;
  rep.blocks_k = K;
  rep.q = group.modulus();

  // enumerate tuples (positions 1..LK, rightmost first) accumulating the
  // exact weights into mu1 and recording the per-tuple block deviations
  std::vector<double> mu1(n, 0.0);
  std::vector<std::size_t> tup(len, 0);
  double max_dev = 0.0;
  std::size_t count = 0;

  // beta_j for a tuple: window positions (j-1)L .. (j+1)L-2 (0-based), the
  // last block's window ends at KL-1; R is summed over the first L peels
  auto beta_log = [&](const std::vector<std::size_t>& t, std::size_t j) {
    std::size_t lo = (j - 1) * L;
    std::size_t hi = j < K ? (j + 1) * L - 2 : K * L - 1;
    std::vector<std::vector<double>> chain(hi - lo + 2);
    std::vector<double> lognorm(hi - lo + 1, 0.0);
    chain[hi - lo + 1] = config.basepoint_o;
    for (std::size_t idx = hi + 1; idx-- > lo;) {
      auto [img, lb] = ctx.map(t[idx], chain[idx - lo + 1]);
      chain[idx - lo] = std::move(img);
      lognorm[idx - lo] = lb;
      if (idx == lo) break;
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < L; ++k)
      sum += ctx.weight_log(chain[k + 1], chain[k], lognorm[k]);
    return sum;
  };

  auto rec = [&](auto&& self, std::size_t pos,
                 const std::vector<double>& point, double logw,
                 std::size_t word) -> void {
    if (pos == 0) {
      ++count;
      mu1[word] += std::exp(logw);
      double blocks = 0.0;
      for (std::size_t j = 1; j <= K; ++j) blocks += beta_log(tup, j);
      max_dev = std::max(max_dev, std::abs(logw - blocks));
      return;
    }
    for (std::size_t b = 0; b < nb; ++b) {
      tup[pos - 1] = b;
      auto [image, log_bm] = ctx.map(b, point);
      double w = ctx.weight_log(point, image, log_bm);
      self(self, pos - 1, image, logw + w,
           pos == len ? hidx[b] : group.mul(word, hidx[b]));
    }
  };
  rec(rec, len, config.basepoint_o, 0.0, group.identity());
  rep.tuple_count = count;
  rep.c_deviation = max_dev;
  rep.prefactor = std::exp(std::max(0.0, max_dev));

  // mu2: sum over block assignments of the iterated convolution of eta_j
  std::vector<double> mu2(n, 0.0);
  const std::size_t free_per_block = L - 1;
  const std::size_t n_fixed = free_per_block * K;
  std::vector<std::size_t> fixed(n_fixed, 0);
  std::vector<std::size_t> full(len, 0);
  auto block_pass = [&]() {
    // scatter fixed vars into the tuple: block j occupies positions
    // (j-1)L .. jL-2 (0-based), the free var sits at jL-1
    std::size_t fi = 0;
    for (std::size_t j = 0; j < K; ++j)
      for (std::size_t k = 0; k < free_per_block; ++k)
        full[j * L + k] = fixed[fi++];
    // eta_j as sparse measures over the free variable
    std::vector<std::vector<std::pair<std::size_t, double>>> eta(K);
    for (std::size_t j = 1; j <= K; ++j) {
      for (std::size_t b = 0; b < nb; ++b) {
        full[j * L - 1] = b;
        double beta = std::exp(beta_log(full, j));
        // word of block j: positions (j-1)L .. jL-1, product of h's with
        // later positions on the left
        std::size_t w = group.identity();
        for (std::size_t k = (j - 1) * L; k < j * L; ++k)
          w = group.mul(hidx[full[k]], w);
        eta[j - 1].emplace_back(w, beta);
      }
    }
    // convolution eta_K * ... * eta_1 (delta_a * delta_b = delta_{ab})
    std::vector<std::pair<std::size_t, double>> acc = eta[K - 1];
    for (std::size_t j = K - 1; j-- > 0;) {
      std::vector<double> dense(n, 0.0);
      for (const auto& [ga, wa] : acc)
        for (const auto& [gb, wb] : eta[j])
          dense[group.mul(ga, gb)] += wa * wb;
      acc.clear();
      for (std::size_t g = 0; g < n; ++g)
        if (dense[g] != 0.0) acc.emplace_back(g, dense[g]);
    }
    for (const auto& [g, w] : acc) mu2[g] += w;
  };
  // odometer over the fixed block variables
  if (n_fixed == 0) {
    block_pass();
  } else {
    while (true) {
      block_pass();
      std::size_t i = n_fixed;
      while (i > 0 && fixed[i - 1] == nb - 1) fixed[--i] = 0;
      if (i == 0) break;
      ++fixed[i - 1];
    }
  }
  for (auto& x : mu2) x *= rep.prefactor;

  rep.dominated = true;
  for (std::size_t g = 0; g < n; ++g)
    if (mu1[g] > mu2[g] + 1e-9 * std::max(1.0, mu2[g])) rep.dominated = false;
  for (std::size_t g = 0; g < n; ++g) {
    rep.ell1_mu1 += mu1[g];
    rep.ell1_mu2 += mu2[g];
  }
  rep.measured_b =
      std::pow(rep.ell1_mu2 / rep.ell1_mu1, 1.0 / static_cast<double>(K));

  // measured decay rate of mu2 on mean-zero vectors
  {
    GroupMeasure m = GroupMeasure::zero(group);
    for (std::size_t g = 0; g < n; ++g) m.a[g] = mu2[g];
    double op = subspace_opnorm(group, m, FiberSubspace::MeanZero);
    rep.conv_rate =
        std::pow(op / rep.ell1_mu2, 1.0 / static_cast<double>(K));
  }

  // max block operator-norm ratio over a deterministic sample of blocks
  {
    Rng rng(seed);
    double worst = 0.0;
    for (int trial = 0; trial < 24; ++trial) {
      for (auto& f : fixed) f = rng.below(nb);
      std::size_t fi = 0;
      for (std::size_t j = 0; j < K; ++j)
        for (std::size_t k = 0; k < free_per_block; ++k)
          full[j * L + k] = fixed[fi++];
      std::size_t j = 1 + rng.below(K);
      GroupMeasure eta = GroupMeasure::zero(group);
      for (std::size_t b = 0; b < nb; ++b) {
        full[j * L - 1] = b;
        double beta = std::exp(beta_log(full, j));
        std::size_t w = group.identity();
        for (std::size_t k = (j - 1) * L; k < j * L; ++k)
          w = group.mul(hidx[full[k]], w);
        eta.a[w] += beta;
      }
      double op = subspace_opnorm(group, eta, FiberSubspace::MeanZero);
      worst = std::max(worst, op / ell1(eta));
      if (n_fixed == 0) break;  // blocks carry no fixed variables
    }
    rep.block_rate = worst;
  }
  return rep;
}

}  // namespace rauzylab
