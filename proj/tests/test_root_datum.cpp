#include <random>

#include "affhecke/root_datum.hpp"
#include "doctest.h"
#include "gen.hpp"

using namespace ahk;

TEST_CASE("presets are valid") {
  for (auto id : {"GL1", "GL3", "GL8", "SL2", "SL4", "A2ad", "C2", "G2"}) {
    CAPTURE(id);
    RootDatum d = preset(id);
    CHECK(validate(d).empty());
  }
  CHECK(preset("GL8").num_roots() == 56);
  CHECK(preset("C2").num_roots() == 8);
  CHECK(preset("G2").num_roots() == 12);
  CHECK_THROWS_AS(preset("E8"), std::invalid_argument);
}

TEST_CASE("validate names the broken pairing") {
  RootDatum d = preset("GL3");
  d.coroots[0] = {2, -2, 0};
  auto errs = validate(d);
  REQUIRE_FALSE(errs.empty());
  bool found = false;
  for (const auto& e : errs) found = found || e.find("2") != std::string::npos;
  CHECK(found);
}

TEST_CASE("json round trip keeps the hash") {
  for (auto id : {"GL3", "C2", "G2"}) {
    RootDatum d = preset(id);
    RootDatum e = datum_from_json_text(datum_to_json(d));
    finalize(e);
    CHECK(datum_hash(d) == datum_hash(e));
  }
  CHECK(datum_hash(preset("GL3")) != datum_hash(preset("A2ad")));
  RootDatum tw = datum_from_json_text(gen::kTwistedGL3);
  finalize(tw);
  CHECK(validate(tw).empty());
  CHECK(gamma_group(tw).size() == 2);
}

TEST_CASE("subdatum") {
  RootDatum d = preset("GL8");
  // brute force: roots in the span of the chosen simples
  std::vector<int> J = {0, 1, 3, 5, 6};
  auto P = subdatum(d, J);
  int brute = 0;
  for (int a = 0; a < d.num_roots(); ++a) {
    bool in = true;
    for (int i = 0; i < d.num_simples(); ++i)
      if (d.simple_coeffs[a][i] != 0 && std::find(J.begin(), J.end(), i) == J.end()) in = false;
    brute += in;
  }
  CHECK(brute == 14);  // A2 x A1 x A2
  CHECK(static_cast<int>(P.rootsJ.size()) == brute);
  CHECK(validate(P.datum).empty());
  CHECK(subdatum(d, {}).rootsJ.empty());
  CHECK(subdatum(d, {0, 1, 2, 3, 4, 5, 6}).rootsJ.size() == 56);
  // stable under repetition inside the induced datum
  std::vector<int> all(P.datum.num_simples());
  std::iota(all.begin(), all.end(), 0);
  CHECK(subdatum(P.datum, all).rootsJ.size() == P.rootsJ.size());
}

TEST_CASE("kottwitz group") {
  auto k = kottwitz_group(preset("GL3"));
  CHECK(k.free_rank == 1);
  CHECK(k.torsion.empty());
  CHECK(kottwitz_group(preset("SL3")).is_trivial());
  for (auto id : {"GL3", "A2ad", "C2", "G2", "GL8"}) {
    RootDatum d = preset(id);
    auto kg = kottwitz_group(d);
    for (const auto& r : d.roots) {
      IVec p = kg.project(r);
      for (size_t i = 0; i < p.size(); ++i) CHECK(p[i] == 0);
    }
    // homomorphism on random pairs
    std::mt19937_64 rng(11);
    for (int it = 0; it < 50; ++it) {
      IVec x = gen::vec(rng, d.rank, -5, 5), y = gen::vec(rng, d.rank, -5, 5), s(d.rank);
      for (int i = 0; i < d.rank; ++i) s[i] = x[i] + y[i];
      IVec px = kg.project(x), py = kg.project(y), ps = kg.project(s);
      for (size_t i = 0; i < ps.size(); ++i) {
        int64_t v = px[i] + py[i];
        if (i < kg.torsion.size()) v = ((v % kg.torsion[i]) + kg.torsion[i]) % kg.torsion[i];
        CHECK(ps[i] == v);
      }
    }
  }
}

TEST_CASE("dominant_rep") {
  RootDatum d = preset("GL8");
  QVec v(8);
  std::vector<int> a = {0, 2, 5};
  for (int i = 0; i < 8; ++i) v[i] = Q(3, 5);
  for (int i : a) v[i] = Q(2, 3);
  auto r = dominant_rep(d, v);
  QVec want = {Q(2, 3), Q(2, 3), Q(2, 3), Q(3, 5), Q(3, 5), Q(3, 5), Q(3, 5), Q(3, 5)};
  CHECK(r.vec == want);
  auto r2 = dominant_rep(d, r.vec);
  CHECK(r2.vec == r.vec);
  CHECK(r2.w == identity(8));
  CHECK(dominant_rep(d, QVec(8, Q(0))).vec == QVec(8, Q(0)));

  // W0-orbit scan at rank 2: the dominant representative pairs nonnegatively with every positive coroot
  std::mt19937_64 rng(5);
  for (auto id : {"C2", "G2", "A2ad"}) {
    RootDatum e = preset(id);
    for (int it = 0; it < 40; ++it) {
      IVec x = gen::vec(rng, e.rank, -6, 6);
      auto dr = dominant_rep(e, to_q(x));
      for (int p : e.pos_roots) {
        Q s = 0;
        for (int i = 0; i < e.rank; ++i) s += dr.vec[i] * Q(static_cast<long>(e.cocov[p][i]));
        CHECK(s >= 0);
      }
      QVec back(e.rank, Q(0));
      for (int i = 0; i < e.rank; ++i)
        for (int j = 0; j < e.rank; ++j) back[i] += Q(static_cast<long>(dr.w[i][j])) * Q(static_cast<long>(x[j]));
      CHECK(back == dr.vec);
    }
  }
}
