#include <random>

#include "affhecke/conjugacy.hpp"
#include "affhecke/hecke.hpp"
#include "doctest.h"
#include "gen.hpp"

using namespace ahk;

TEST_CASE("Laurent polynomials") {
  LaurentPoly xi = LaurentPoly::xi();
  CHECK(xi.str() == "v - v^-1");
  CHECK((xi * xi).str() == "v^2 - 2 + v^-2");
  CHECK(xi.times_xi() == xi * xi);
  CHECK((xi - xi).is_zero());
  CHECK(xi.eval(Q(2)) == Q(3, 2));
  CHECK(LaurentPoly::from_json(xi.to_json()) == xi);
  XiPoly p{{1, 0, 2}};  // 1 + 2 xi^2
  CHECK(p.to_laurent() == LaurentPoly::constant(1) + (xi * xi) * LaurentPoly::constant(2));
  CHECK(p.nonnegative());
  CHECK(p.degree() == 2);
}

TEST_CASE("quadratic relation and braid relations") {
  for (auto id : {"GL3", "C2", "G2"}) {
    CAPTURE(id);
    Engine E(preset(id));
    Hecke H(E);
    for (int s = 0; s < E.num_S(); ++s) {
      // T_s^2 = xi T_s + 1
      HeckeElt sq = H.mul(H.T(E.S(s)), H.T(E.S(s)));
      HeckeElt want = add(scale(H.T(E.S(s)), LaurentPoly::xi()), H.one());
      CHECK(equal(sq, want));
    }
    // T_x T_y = T_xy when lengths add
    std::mt19937_64 rng(4);
    auto els = elements_up_to(E, 3);
    for (int it = 0; it < 60; ++it) {
      Elt x = gen::pick(rng, els), y = gen::pick(rng, els);
      Elt xy = E.mul(x, y);
      if (E.length(xy) == E.length(x) + E.length(y)) CHECK(equal(H.mul(H.T(x), H.T(y)), H.T(xy)));
    }
  }
}

TEST_CASE("associativity and inverses") {
  std::mt19937_64 rng(5);
  for (auto id : {"GL3", "A2ad", "C2", "G2"}) {
    CAPTURE(id);
    Engine E(preset(id));
    Hecke H(E);
    auto els = elements_up_to(E, 3);
    for (int it = 0; it < 25; ++it) {
      Elt a = gen::pick(rng, els), b = gen::pick(rng, els), c = gen::pick(rng, els);
      CHECK(equal(H.mul(H.mul(H.T(a), H.T(b)), H.T(c)), H.mul(H.T(a), H.mul(H.T(b), H.T(c)))));
      CHECK(equal(H.mul(H.T(a), H.inv_basis(a)), H.one()));
      CHECK(equal(H.mul(H.inv_basis(a), H.T(a)), H.one()));
    }
  }
}

TEST_CASE("theta elements") {
  std::mt19937_64 rng(6);
  for (auto id : {"GL3", "A2ad", "C2", "G2"}) {
    CAPTURE(id);
    Engine E(preset(id));
    Hecke H(E);
    const int n = E.rank();
    for (int it = 0; it < 15; ++it) {
      IVec x = gen::vec(rng, n, -2, 2), y = gen::vec(rng, n, -2, 2), s(n);
      for (int i = 0; i < n; ++i) s[i] = x[i] + y[i];
      CHECK(equal(H.mul(H.theta(x), H.theta(y)), H.theta(s)));
      CHECK(equal(H.mul(H.theta(x), H.theta(y)), H.mul(H.theta(y), H.theta(x))));
      // any dominant split gives the same element
      auto [chi, chip] = H.dominant_split(x);
      IVec bump = H.phis()[it % H.phis().size()], chi2(n), chip2(n);
      for (int i = 0; i < n; ++i) {
        chi2[i] = chi[i] + bump[i];
        chip2[i] = chip[i] + bump[i];
      }
      CHECK(equal(H.theta_split(chi2, chip2), H.theta(x)));
    }
    // theta of a dominant vector is the basis element
    IVec dom = H.phis()[0];
    CHECK(equal(H.theta(dom), H.T(E.translation(dom))));
  }
}

TEST_CASE("Bernstein relation and central elements") {
  std::mt19937_64 rng(7);
  for (auto id : {"GL3", "C2", "G2", "SL3"}) {
    CAPTURE(id);
    Engine E(preset(id));
    Hecke H(E);
    const int n = E.rank();
    int zero = 0, one = 0;
    for (int it = 0; it < 12; ++it) {
      IVec x = gen::vec(rng, n, -2, 2);
      for (int i = 0; i < E.datum().num_simples(); ++i) {
        int64_t m = E.datum().pair(x, E.datum().simples[i]);
        zero += m == 0;
        one += m == 1;
        CHECK(H.bernstein_comm_check(x, i));
      }
    }
    // <chi, alpha^vee> = 0 commutes, = 1 gives xi theta_chi
    IVec z(n, 0);
    for (int i = 0; i < E.datum().num_simples(); ++i) {
      auto cs = H.bernstein_sides(z, i);
      CHECK(cs.lhs.empty());
      CHECK(cs.rhs.empty());
    }
    auto els = elements_up_to(E, 3);
    for (const auto& lam : H.phis()) {
      HeckeElt zl = H.central_z(lam);
      for (int it = 0; it < 8; ++it) {
        Elt a = gen::pick(rng, els);
        CHECK(equal(H.mul(zl, H.T(a)), H.mul(H.T(a), zl)));
      }
    }
  }
  Engine E(preset("GL3"));
  Hecke H(E);
  IVec chi = {1, 0, 0};  // <chi, alpha_1^vee> = 1
  auto cs = H.bernstein_sides(chi, 0);
  CHECK(equal(cs.rhs, scale(H.theta(chi), LaurentPoly::xi())));
  CHECK(equal(cs.lhs, cs.rhs));
}

TEST_CASE("theta basis rank on a finite grid") {
  Engine E(preset("C2"));
  Hecke H(E);
  // theta_lambda T_w over a box of lambda and all w in W0 are independent
  std::vector<HeckeElt> hs;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int g = 0; g < E.group_size(); ++g) hs.push_back(H.mul(H.theta({a, b}), H.T(E.from_g(g))));
  CHECK(rank_at(hs, Q(2)) == static_cast<int>(hs.size()));
  CHECK(rank_at(hs, Q(3, 2)) == static_cast<int>(hs.size()));
}

TEST_CASE("parabolic embedding of the GL8 special form") {
  Engine E(preset("GL8"));
  Hecke H(E);
  ConjugacyLab lab(E);
  Elt w = E.parse("t[1,1,1,1,1,0,0,0]*(1 6 3)(2 7 4 8 5)");
  BernsteinDatum b = bernstein_datum(lab, lab.class_id(w));
  SpecialForm f = special_form(lab, b);
  HeckeElt es = H.embed_special(f.lambda, f.w1, f.x1, b.J);
  auto P = make_parabolic(E, b.J);
  CHECK(equal(H.embed_parabolic(*P, P->to_J(f.w1t)), es));
  CHECK(equal(H.from_json(H.to_json(es)), es));
}
