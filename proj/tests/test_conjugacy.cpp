#include <random>

#include "affhecke/conjugacy.hpp"
#include "doctest.h"
#include "gen.hpp"

using namespace ahk;

TEST_CASE("class ids are conjugation invariant and reductions end at minima") {
  std::mt19937_64 rng(21);
  for (auto id : {"GL3", "A2ad", "C2", "G2"}) {
    CAPTURE(id);
    Engine E(preset(id));
    ConjugacyLab lab(E);
    auto els = elements_up_to(E, 5);
    for (const auto& w : els) {
      int c = lab.class_id(w);
      Elt x = gen::elt(rng, E, -2, 2);
      CHECK(lab.class_id(E.conj(x, w)) == c);
      ReductionPath p = lab.reduce_to_min(w);
      CHECK(path_valid(E, p));
      CHECK(E.length(p.end) == lab.min_length(c));
      CHECK(lab.class_id(p.end) == c);
    }
    CHECK(lab.audit_keys(els).empty());
    // minimal sets consist of minimal elements of one class, sorted
    for (int c = 0; c < lab.num_classes(); ++c) {
      auto mins = lab.class_mins(c);
      REQUIRE_FALSE(mins.empty());
      CHECK(lab.key(c).canonical_min == mins.front());
      for (const auto& m : mins) {
        CHECK(E.length(m) == lab.min_length(c));
        CHECK(lab.class_id(m) == c);
      }
    }
  }
}

TEST_CASE("find_pivot exists exactly off the minimal elements") {
  Engine E(preset("C2"));
  ConjugacyLab lab(E);
  std::mt19937_64 rng(3);
  for (const auto& w : elements_up_to(E, 6)) {
    auto pv = lab.find_pivot(w, nullptr, nullptr);
    CHECK(pv.has_value() == !lab.is_minimal(w));
    if (pv) {
      CHECK(E.length(pv->w1) == E.length(w));
      CHECK(E.length(E.sconj(pv->s, pv->w1)) < E.length(w));
      CHECK(lab.class_id(pv->w1) == lab.class_id(w));
    }
    auto rp = lab.find_pivot(w, &rng, nullptr);
    CHECK(rp.has_value() == pv.has_value());
  }
}

TEST_CASE("partial conjugation scans") {
  for (auto id : {"GL3", "C2", "G2"}) {
    CAPTURE(id);
    Engine E(preset(id));
    ConjugacyLab lab(E);
    ScanReport p = scan_partial(E, 4);
    CHECK(p.checked > 0);
    CHECK(p.failures == 0);
    ScanReport f = scan_fact(lab, 4);
    CHECK(f.checked > 0);
    CHECK(f.failures == 0);
    ScanReport m = scan_min_in_wj(lab);
    CHECK(m.checked > 0);
    CHECK(m.failures == 0);
  }
}

TEST_CASE("I(J, w) and W_K membership") {
  Engine E(preset("GL3"));
  CHECK(I_of(E, {0, 1}, E.identity()) == std::vector<int>{0, 1});
  CHECK_THROWS(I_of(E, {0, 1}, E.parse("(1 3)")));
  CHECK(I_of(E, {0}, E.parse("(2 3)")).empty());
  CHECK(in_W_K(E, E.parse("(1 2)"), {0}));
  CHECK_FALSE(in_W_K(E, E.parse("(2 3)"), {0}));
  CHECK(WJ_group(E, {0, 1}).size() == 6);
}

TEST_CASE("GL8 example: key, datum and special form") {
  Engine E(preset("GL8"));
  ConjugacyLab lab(E);
  Elt w = E.parse("t[1,1,1,1,1,0,0,0]*(1 6 3)(2 7 4 8 5)");
  ReductionPath p = lab.reduce_to_min(w);
  CHECK(p.steps.empty());
  CHECK(p.end == w);
  CHECK(lab.is_minimal(w));
  ConjClassKey k = lab.class_key(w);
  QVec want = {Q(2, 3), Q(2, 3), Q(2, 3), Q(3, 5), Q(3, 5), Q(3, 5), Q(3, 5), Q(3, 5)};
  CHECK(k.nu == want);
  CHECK(to_string(k.kappa) == "5");
  CHECK(k.min_len == 1);

  BernsteinDatum b = bernstein_datum(lab, k.id);
  CHECK(b.J == std::vector<int>{0, 1, 3, 4, 5, 6});
  CHECK(b.lJ_w0 == 0);
  CHECK(b.lJ_minimal);
  CHECK(b.elliptic);
  SpecialForm f = special_form(lab, b);
  CHECK(f.audit_failures.empty());
  CHECK(f.lambda == IVec{1, 1, 0, 1, 1, 1, 0, 0});
  // the same permutation as (3 2 1)(7 5 8 6 4)
  CHECK(f.w1 == E.parse("(3 2 1)(7 5 8 6 4)"));
  CHECK(f.x1 == E.identity());
}

TEST_CASE("Bernstein data across small classes") {
  for (auto id : {"GL3", "C2", "G2"}) {
    CAPTURE(id);
    Engine E(preset(id));
    ConjugacyLab lab(E);
    for (const auto& w : elements_up_to(E, 5)) lab.class_id(w);
    for (int c = 0; c < lab.num_classes(); ++c) {
      BernsteinDatum b = bernstein_datum(lab, c);
      CHECK(b.lJ_minimal);
      CHECK(b.elliptic);
      CHECK(special_form(lab, b).audit_failures.empty());
    }
  }
}

TEST_CASE("ellipticity") {
  Engine E(preset("GL3"));
  CHECK(is_elliptic(E, E.parse("(1 2 3)"), {0, 1}));
  CHECK_FALSE(is_elliptic(E, E.parse("(1 2)"), {0, 1}));
  CHECK(is_elliptic(E, E.identity(), {}));
}
