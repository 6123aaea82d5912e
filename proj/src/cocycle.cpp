#include "rauzylab/cocycle.hpp"

#include <algorithm>
#include <sstream>

#include "rauzylab/cone.hpp"
#include "rauzylab/errors.hpp"

namespace rauzylab {

BigMatrix theta_of_move(const RauzyArrow& arrow) {
  const std::size_t d = arrow.source.size();
  BigMatrix m = BigMatrix::identity(d);
  m.at(arrow.loser, arrow.winner) += 1;
  return m;
}

BigMatrix theta_star_of_path(const RauzyPath& path) {
  const std::size_t d = path.start.size();
  BigMatrix m = BigMatrix::identity(d);
  for (const auto& a : path_arrows(path))
    m = m * theta_of_move(a).transpose();
  return m;
}

BigMatrix theta_of_path(const RauzyPath& path) {
  return theta_star_of_path(path).transpose();
}

BigMatrix omega(const PermutationPair& pair) {
  const std::size_t d = pair.size();
  BigMatrix m(d, d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      if (a == b) continue;
      auto ta = pair.top_pos(static_cast<std::uint8_t>(a));
      auto tb = pair.top_pos(static_cast<std::uint8_t>(b));
      auto ba = pair.bottom_pos(static_cast<std::uint8_t>(a));
      auto bb = pair.bottom_pos(static_cast<std::uint8_t>(b));
      if (ta > tb && ba < bb)
        m.at(a, b) = 1;
      else if (ta < tb && ba > bb)
        m.at(a, b) = -1;
    }
  return m;
}

bool check_intertwining(const RauzyArrow& arrow) {
  BigMatrix theta = theta_of_move(arrow);
  BigMatrix lhs = theta * omega(arrow.source) * theta.transpose();
  return lhs == omega(arrow.target);
}

BigMatrix standard_j0(std::size_t genus) {
  BigMatrix j(2 * genus, 2 * genus);
  for (std::size_t i = 0; i < genus; ++i) {
    j.at(2 * i, 2 * i + 1) = 1;
    j.at(2 * i + 1, 2 * i) = -1;
  }
  return j;
}

namespace {

// integral symplectic Gram-Schmidt: finds unimodular P with P^T G P = J0.
// Throws NonUnimodularForm when the pairing cannot reach 1.
BigMatrix symplectic_reduce(const BigMatrix& form) {
  const std::size_t r = form.rows();
  std::vector<std::vector<BigInt>> vecs(r, std::vector<BigInt>(r));
  for (std::size_t i = 0; i < r; ++i) vecs[i][i] = 1;

  auto pairing = [&](const std::vector<BigInt>& u,
                     const std::vector<BigInt>& w) {
    BigInt s = 0;
    for (std::size_t i = 0; i < r; ++i) {
      if (u[i] == 0) continue;
      for (std::size_t j = 0; j < r; ++j)
        if (form.at(i, j) != 0) s += u[i] * form.at(i, j) * w[j];
    }
    return s;
  };

  std::vector<std::vector<BigInt>> basis;  // a1, b1, a2, b2, ...
  std::vector<std::size_t> live(r);
  for (std::size_t i = 0; i < r; ++i) live[i] = i;

  while (!live.empty()) {
    // minimal nonzero pairing among live vectors
    std::size_t bi = 0, bj = 0;
    BigInt best = 0;
    for (std::size_t x = 0; x < live.size(); ++x)
      for (std::size_t y = x + 1; y < live.size(); ++y) {
        BigInt p = abs(pairing(vecs[live[x]], vecs[live[y]]));
        if (p != 0 && (best == 0 || p < best)) {
          best = p;
          bi = x;
          bj = y;
        }
      }
    if (best == 0)
      fail(ErrorKind::NonUnimodularForm, "degenerate pairing block");
    if (pairing(vecs[live[bi]], vecs[live[bj]]) < 0) std::swap(bi, bj);

    bool reduced_all = false;
    while (!reduced_all) {
      reduced_all = true;
      BigInt m = pairing(vecs[live[bi]], vecs[live[bj]]);
      for (std::size_t x = 0; x < live.size(); ++x) {
        if (x == bi || x == bj) continue;
        auto& vk = vecs[live[x]];
        BigInt a = pairing(vk, vecs[live[bj]]);
        BigInt qa = a >= 0 ? BigInt(a / m) : BigInt(-((-a + m - 1) / m));
        if (qa != 0)
          for (std::size_t t = 0; t < r; ++t)
            vk[t] -= qa * vecs[live[bi]][t];
        if (pairing(vk, vecs[live[bj]]) != 0) reduced_all = false;
        BigInt b = pairing(vk, vecs[live[bi]]);
        BigInt qb = b >= 0 ? BigInt(b / m) : BigInt(-((-b + m - 1) / m));
        if (qb != 0)
          for (std::size_t t = 0; t < r; ++t)
            vk[t] += qb * vecs[live[bj]][t];
        if (pairing(vk, vecs[live[bi]]) != 0) reduced_all = false;
      }
      if (!reduced_all) {
        // a strictly smaller pairing appeared; restart pair selection
        BigInt nbest = 0;
        for (std::size_t x = 0; x < live.size(); ++x)
          for (std::size_t y = x + 1; y < live.size(); ++y) {
            BigInt p = abs(pairing(vecs[live[x]], vecs[live[y]]));
            if (p != 0 && (nbest == 0 || p < nbest)) {
              nbest = p;
              bi = x;
              bj = y;
            }
          }
        if (pairing(vecs[live[bi]], vecs[live[bj]]) < 0) std::swap(bi, bj);
      }
    }
    BigInt m = pairing(vecs[live[bi]], vecs[live[bj]]);
    if (m != 1) fail(ErrorKind::NonUnimodularForm, "pairing gcd exceeds 1");
    basis.push_back(vecs[live[bi]]);
    basis.push_back(vecs[live[bj]]);
    std::vector<std::size_t> next;
    for (std::size_t x = 0; x < live.size(); ++x)
      if (x != bi && x != bj) next.push_back(live[x]);
    live = std::move(next);
  }

  BigMatrix p(r, r);
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t i = 0; i < r; ++i) p.at(i, j) = basis[j][i];
  return p;
}

}  // namespace

SymplecticBasis symplectic_basis(const PermutationPair& pair) {
  const std::size_t d = pair.size();
  BigMatrix om = omega(pair);
  SmithResult snf = smith_normal_form(om);
  if (snf.rank % 2 != 0)
    fail(ErrorKind::OddRank, "intersection form has odd rank");
  const std::size_t r = snf.rank;

  BigMatrix lift0(d, r);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < r; ++j) lift0.at(i, j) = snf.v.at(i, j);
  BigMatrix vinv = snf.v.unimodular_inverse();
  BigMatrix proj0(r, d);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < d; ++j) proj0.at(i, j) = vinv.at(i, j);

  // quotient pairing  w(u, v) = <u, -Omega v>
  BigMatrix form(r, r);
  {
    BigMatrix tmp = lift0.transpose() * om * lift0;
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) form.at(i, j) = -tmp.at(i, j);
  }
  BigMatrix p = symplectic_reduce(form);
  BigMatrix pinv = p.unimodular_inverse();

  SymplecticBasis basis;
  basis.vertex = pair;
  basis.genus = r / 2;
  basis.lift = lift0 * p;
  basis.projection = pinv * proj0;
  basis.j0 = standard_j0(basis.genus);

  BigMatrix check = p.transpose() * form * p;
  if (check != basis.j0)
    fail(ErrorKind::NonUnimodularForm, "reduced form is not J0");
  if (!(basis.projection * basis.lift).is_identity())
    fail(ErrorKind::NonUnimodularForm, "projection/lift mismatch");
  return basis;
}

std::string SpElement::to_text() const {
  std::ostringstream out;
  out << "g=" << genus << ";q=";
  if (q == 0)
    out << "inf";
  else
    out << q;
  out << "|" << m.to_text();
  return out.str();
}

SpElement SpElement::from_text(const std::string& text) {
  auto bar = text.find('|');
  if (bar == std::string::npos || text.rfind("g=", 0) != 0)
    fail(ErrorKind::ParseError, "expected 'g=<g>;q=<q>|<matrix>'");
  auto semi = text.find(';');
  if (semi == std::string::npos || semi > bar ||
      text.compare(semi + 1, 2, "q=") != 0)
    fail(ErrorKind::ParseError, "expected 'q=' header field");
  SpElement e;
  e.genus = std::stoul(text.substr(2, semi - 2));
  std::string qs = text.substr(semi + 3, bar - semi - 3);
  e.q = qs == "inf" ? 0 : std::stoll(qs);
  e.m = BigMatrix::from_text(text.substr(bar + 1));
  if (e.m.rows() != 2 * e.genus || e.m.cols() != 2 * e.genus)
    fail(ErrorKind::ParseError, "matrix size disagrees with genus");
  return e;
}

bool is_symplectic(const SpElement& e) {
  BigMatrix j0 = standard_j0(e.genus);
  BigMatrix lhs = e.m.transpose() * j0 * e.m;
  if (e.q == 0) return lhs == j0;
  for (std::size_t i = 0; i < lhs.rows(); ++i)
    for (std::size_t j = 0; j < lhs.cols(); ++j)
      if ((lhs.at(i, j) - j0.at(i, j)) % e.q != 0) return false;
  return true;
}

SpElement induced_sp(const BigMatrix& theta_star,
                     const SymplecticBasis& basis) {
  SpElement e;
  e.genus = basis.genus;
  e.q = 0;
  e.m = basis.projection * theta_star * basis.lift;
  if (!is_symplectic(e))
    fail(ErrorKind::NotSymplectic, "induced matrix breaks the form");
  return e;
}

SpElement induced_sp(const RauzyPath& loop, const SymplecticBasis& basis) {
  if (!(loop.start == basis.vertex))
    fail(ErrorKind::NotSymplectic, "path does not start at basis vertex");
  if (!is_loop(loop)) fail(ErrorKind::NotALoop, loop.to_text());
  return induced_sp(theta_star_of_path(loop), basis);
}

SpElement sp_identity(std::size_t genus, long long q) {
  return SpElement{genus, q, BigMatrix::identity(2 * genus)};
}

SpElement reduce_mod(const SpElement& e, long long q) {
  if (q < 2) fail(ErrorKind::ValidationError, "modulus must be >= 2");
  SpElement r;
  r.genus = e.genus;
  r.q = q;
  r.m = e.m;
  for (std::size_t i = 0; i < r.m.rows(); ++i)
    for (std::size_t j = 0; j < r.m.cols(); ++j) {
      BigInt v = r.m.at(i, j) % q;
      if (v < 0) v += q;
      r.m.at(i, j) = v;
    }
  return r;
}

SpElement sp_mul(const SpElement& a, const SpElement& b) {
  if (a.genus != b.genus || a.q != b.q)
    fail(ErrorKind::ModulusMismatch, "mismatched symplectic elements");
  SpElement r;
  r.genus = a.genus;
  r.q = a.q;
  r.m = a.m * b.m;
  if (a.q != 0) {
    for (std::size_t i = 0; i < r.m.rows(); ++i)
      for (std::size_t j = 0; j < r.m.cols(); ++j) {
        BigInt v = r.m.at(i, j) % a.q;
        if (v < 0) v += a.q;
        r.m.at(i, j) = v;
      }
  }
  return r;
}

SpElement sp_inverse(const SpElement& e) {
  // M^-1 = -J0 M^T J0 for symplectic M
  BigMatrix j0 = standard_j0(e.genus);
  SpElement r;
  r.genus = e.genus;
  r.q = e.q;
  BigMatrix m = j0 * e.m.transpose() * j0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) m.at(i, j) = -m.at(i, j);
  r.m = std::move(m);
  if (e.q != 0) r = reduce_mod(SpElement{r.genus, 0, r.m}, e.q);
  return r;
}

std::vector<std::pair<long long, int>> factorize(long long q) {
  std::vector<std::pair<long long, int>> f;
  for (long long p = 2; p * p <= q; ++p) {
    if (q % p) continue;
    int e = 0;
    while (q % p == 0) {
      q /= p;
      ++e;
    }
    f.emplace_back(p, e);
  }
  if (q > 1) f.emplace_back(q, 1);
  return f;
}

BigInt sp_order(std::size_t genus, long long q) {
  if (q < 2) fail(ErrorKind::ValidationError, "modulus must be >= 2");
  BigInt total = 1;
  for (auto [p, r] : factorize(q)) {
    BigInt pp(p);
    BigInt block = 1;
    // |Sp_2g(F_p)| = p^{g^2} prod_{i=1}^{g} (p^{2i} - 1)
    block *= boost::multiprecision::pow(pp, static_cast<unsigned>(genus * genus));
    for (std::size_t i = 1; i <= genus; ++i)
      block *= boost::multiprecision::pow(pp, static_cast<unsigned>(2 * i)) - 1;
    // lift through Z/p^r: factor p^{(r-1) g(2g+1)}
    block *= boost::multiprecision::pow(
        pp, static_cast<unsigned>((r - 1) * genus * (2 * genus + 1)));
    total *= block;
  }
  return total;
}

bool is_strongly_positive(const RauzyPath& path) {
  if (!is_loop(path)) fail(ErrorKind::NotALoop, path.to_text());
  BigMatrix theta = theta_of_path(path);
  if (!theta.all_entries_at_least(1)) return false;
  // (Theta*)^{-1} must map every extreme ray of the closed cone strictly
  // inside K_pi
  BigMatrix inv = theta.transpose().unimodular_inverse();
  for (const auto& ray : cone_extreme_rays(path.start)) {
    std::vector<BigInt> image = inv.apply(ray);
    if (!cone_contains_exact(path.start, image)) return false;
  }
  return true;
}

}  // namespace rauzylab
