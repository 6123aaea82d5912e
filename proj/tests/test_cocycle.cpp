#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "rauzylab/cocycle.hpp"
#include "rauzylab/errors.hpp"
#include "rauzylab/rauzy.hpp"
#include "rauzylab/rng.hpp"

using namespace rauzylab;

namespace {

const PermutationPair torus = make_pair("AB", "BA");
const PermutationPair hyp4 = make_pair("ABCD", "DCBA");

RauzyPath path_of(const PermutationPair& start, const std::string& moves) {
  RauzyPath p{start, {}};
  for (char c : moves) p.moves.push_back(move_from_char(c));
  return p;
}

BigMatrix mat2(long long a, long long b, long long c, long long d) {
  BigMatrix m(2, 2);
  m.at(0, 0) = a;
  m.at(0, 1) = b;
  m.at(1, 0) = c;
  m.at(1, 1) = d;
  return m;
}

}  // namespace

TEST_CASE("theta of single torus moves") {
  RauzyArrow top = apply_move(torus, MoveType::Top);
  CHECK(theta_of_move(top) == mat2(1, 1, 0, 1));  // I + E_{A,B}
  RauzyArrow bottom = apply_move(torus, MoveType::Bottom);
  CHECK(theta_of_move(bottom) == mat2(1, 0, 1, 1));
  CHECK(theta_of_move(top).det() == 1);
  CHECK(theta_of_move(bottom).det() == 1);
}

TEST_CASE("theta determinant is 1 for arbitrary arrows") {
  for (const auto& rep : all_class_representatives(4)) {
    RauzyClass cls = rauzy_class(rep);
    for (const auto& a : cls.arrows) CHECK(theta_of_move(a).det() == 1);
  }
}

TEST_CASE("theta_of_path order convention pinned operationally") {
  // iterate single-step inverse-transpose actions on lambda and compare with
  // (Theta_gamma^*)^{-1} lambda
  Rng rng(7);
  for (const auto& start : {torus, hyp4}) {
    for (int trial = 0; trial < 20; ++trial) {
      RauzyPath p{start, {}};
      for (int i = 0; i < 9; ++i)
        p.moves.push_back(rng.bits() & 1 ? MoveType::Bottom : MoveType::Top);
      std::vector<double> lambda = rng.simplex(start.size());
      std::vector<double> stepped = lambda;
      for (const auto& a : path_arrows(p)) {
        // (Theta*_{pi,e})^{-1} subtracts the loser entry from the winner slot
        stepped[a.winner] -= stepped[a.loser];
      }
      BigMatrix inv = theta_star_of_path(p).unimodular_inverse();
      std::vector<double> direct = inv.apply(lambda);
      for (std::size_t i = 0; i < lambda.size(); ++i)
        CHECK(direct[i] == doctest::Approx(stepped[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("theta_of_path concatenation and powers") {
  CHECK(theta_of_path(RauzyPath{torus, {}}).is_identity());
  RauzyPath tn{torus, std::vector<MoveType>(5, MoveType::Top)};
  CHECK(theta_of_path(tn) == mat2(1, 5, 0, 1));

  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    RauzyPath a{hyp4, {}};
    for (int i = 0; i < 6; ++i)
      a.moves.push_back(rng.bits() & 1 ? MoveType::Bottom : MoveType::Top);
    RauzyPath b{end_vertex(a), {}};
    for (int i = 0; i < 6; ++i)
      b.moves.push_back(rng.bits() & 1 ? MoveType::Bottom : MoveType::Top);
    CHECK(theta_star_of_path(concat(a, b)) ==
          theta_star_of_path(a) * theta_star_of_path(b));
  }
}

TEST_CASE("omega values") {
  BigMatrix om = omega(torus);
  CHECK(om == mat2(0, -1, 1, 0));

  // bottom row reverses the top row: entries are sign(pos_t(a) - pos_t(b))
  BigMatrix om4 = omega(hyp4);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) {
      int expect = a == b ? 0 : (a > b ? 1 : -1);
      CHECK(om4.at(a, b) == expect);
    }

  for (const auto& rep : all_class_representatives(4)) {
    BigMatrix om_rep = omega(rep);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        CHECK(om_rep.at(i, j) == -om_rep.at(j, i));  // antisymmetric
  }
}

TEST_CASE("intertwining for torus arrows by hand") {
  CHECK(check_intertwining(apply_move(torus, MoveType::Top)));
  CHECK(check_intertwining(apply_move(torus, MoveType::Bottom)));
}

TEST_CASE("intertwining across the whole d=4 class") {
  RauzyClass cls = rauzy_class(hyp4);
  CHECK(cls.arrows.size() == 14);
  for (const auto& a : cls.arrows) CHECK(check_intertwining(a));
}

TEST_CASE("rank of omega is constant across a class") {
  for (const auto& rep : all_class_representatives(4)) {
    RauzyClass cls = rauzy_class(rep);
    std::size_t rank = smith_normal_form(omega(rep)).rank;
    for (const auto& v : cls.vertices)
      CHECK(smith_normal_form(omega(v)).rank == rank);
  }
}

TEST_CASE("symplectic basis genus values") {
  SymplecticBasis b2 = symplectic_basis(torus);
  CHECK(b2.genus == 1);

  SymplecticBasis b3 = symplectic_basis(make_pair("ABC", "CBA"));
  CHECK(b3.genus == 1);  // rank 2, one-dimensional kernel

  SymplecticBasis b4 = symplectic_basis(hyp4);
  CHECK(b4.genus == 2);

  // the quotient pairing equals J0 exactly
  for (const auto& basis : {b2, b3, b4}) {
    BigMatrix om = omega(basis.vertex);
    BigMatrix tmp = basis.lift.transpose() * om * basis.lift;
    BigMatrix neg(tmp.rows(), tmp.cols());
    for (std::size_t i = 0; i < tmp.rows(); ++i)
      for (std::size_t j = 0; j < tmp.cols(); ++j)
        neg.at(i, j) = -tmp.at(i, j);
    CHECK(neg == basis.j0);
    CHECK((basis.projection * basis.lift).is_identity());
  }
}

TEST_CASE("induced_sp on torus loops") {
  SymplecticBasis basis = symplectic_basis(torus);
  SpElement empty = induced_sp(RauzyPath{torus, {}}, basis);
  CHECK(empty.m.is_identity());

  SpElement t = induced_sp(path_of(torus, "t"), basis);
  CHECK(is_symplectic(t));
  CHECK(t.m.det() == 1);
  // elementary up to the fixed basis convention: unipotent with a single 1
  BigMatrix diff = t.m - BigMatrix::identity(2);
  int nonzero = 0;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      if (diff.at(i, j) != 0) ++nonzero;
  CHECK(nonzero == 1);

  Rng rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    RauzyPath p{torus, {}};
    for (int i = 0; i < 8; ++i)
      p.moves.push_back(rng.bits() & 1 ? MoveType::Bottom : MoveType::Top);
    SpElement e = induced_sp(p, basis);
    CHECK(e.m.det() == 1);
    CHECK(is_symplectic(e));
  }
}

TEST_CASE("induced_sp respects concatenation") {
  SymplecticBasis basis = symplectic_basis(hyp4);
  RauzyClass cls = rauzy_class(hyp4);
  RauzyPath loop = find_complete_loop(cls, hyp4);
  RauzyPath loop2 = concat(loop, loop);
  SpElement a = induced_sp(loop, basis);
  SpElement b = induced_sp(loop2, basis);
  CHECK(sp_mul(a, a) == b);
}

TEST_CASE("reduce_mod") {
  SymplecticBasis basis = symplectic_basis(torus);
  SpElement e = induced_sp(RauzyPath{torus, {}}, basis);
  CHECK(reduce_mod(e, 5).m.is_identity());

  SpElement t{1, 0, mat2(1, 1, 0, 1)};
  CHECK(reduce_mod(t, 2).m == mat2(1, 1, 0, 1));
  SpElement five{1, 0, mat2(1, 5, 0, 1)};
  CHECK(reduce_mod(five, 5).m.is_identity());

  // negative entries land in [0, q)
  SpElement neg{1, 0, mat2(1, -1, 0, 1)};
  CHECK(reduce_mod(neg, 3).m == mat2(1, 2, 0, 1));
  CHECK(is_symplectic(reduce_mod(neg, 3)));
}

TEST_CASE("sp_order against brute-force enumeration") {
  // SL2(F2): all invertible 2x2 over F2 with det 1
  auto brute_sl2 = [](int q) {
    int count = 0;
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b)
        for (int c = 0; c < q; ++c)
          for (int d = 0; d < q; ++d)
            if (((a * d - b * c) % q + q) % q == 1) ++count;
    return count;
  };
  CHECK(sp_order(1, 2) == brute_sl2(2));  // 6
  CHECK(sp_order(1, 3) == brute_sl2(3));  // 24
  CHECK(sp_order(1, 4) == brute_sl2(4));  // 48
  CHECK(sp_order(1, 5) == brute_sl2(5));  // 120

  // Sp4(F2) = 720, enumerated over all 2^16 matrices
  BigMatrix j0 = standard_j0(2);
  int count = 0;
  for (std::uint32_t code = 0; code < (1u << 16); ++code) {
    BigMatrix m(4, 4);
    for (std::size_t i = 0; i < 16; ++i)
      m.at(i / 4, i % 4) = (code >> i) & 1;
    BigMatrix prod = m.transpose() * j0 * m;
    bool ok = true;
    for (std::size_t i = 0; i < 4 && ok; ++i)
      for (std::size_t j = 0; j < 4 && ok; ++j)
        ok = (prod.at(i, j) - j0.at(i, j)) % 2 == 0;
    if (ok) ++count;
  }
  CHECK(sp_order(2, 2) == count);  // 720

  CHECK(sp_order(2, 3) == 51840);
  CHECK(sp_order(1, 15) == sp_order(1, 3) * sp_order(1, 5));
}

TEST_CASE("SpElement text round trip") {
  SpElement t{1, 0, mat2(1, 1, 0, 1)};
  CHECK(t.to_text() == "g=1;q=inf|1,1;0,1");
  CHECK(SpElement::from_text(t.to_text()) == t);
  SpElement r = reduce_mod(t, 7);
  CHECK(SpElement::from_text(r.to_text()) == r);
  CHECK_THROWS_AS(SpElement::from_text("nonsense"), Error);
}

TEST_CASE("matrix text round trip") {
  BigMatrix m = mat2(12, -7, 0, 3);
  CHECK(BigMatrix::from_text(m.to_text()) == m);
  CHECK(m.to_text() == "12,-7;0,3");
  CHECK_THROWS_AS(BigMatrix::from_text("1,2;3"), Error);
}

TEST_CASE("strongly positive cone condition matches hand computation") {
  // Theta*_{tb} = [[1,1],[1,2]]; inverse [[2,-1],[-1,1]] maps the rays
  // (1,0) and (0,-1) strictly inside the cone
  RauzyPath tb = path_of(torus, "tb");
  BigMatrix ts = theta_star_of_path(tb);
  CHECK(ts == mat2(1, 1, 1, 2));
  CHECK(is_strongly_positive(tb));
}
