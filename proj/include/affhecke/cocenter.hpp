#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "affhecke/conjugacy.hpp"
#include "affhecke/hecke.hpp"
#include "json.hpp"

namespace ahk {

// class id (inside one ConjugacyLab) -> polynomial in xi
using ClassPolys = std::map<int, XiPoly>;
// class id -> Laurent coefficient; the image of a Hecke element in the cocenter
using CocenterVector = std::map<int, LaurentPoly>;

CocenterVector to_cocenter(const ClassPolys& f);
// entries ordered by canonical minimal element, so output does not depend on id order
nlohmann::json classpolys_json(ConjugacyLab& lab, const ClassPolys& f);
nlohmann::json cocenter_json(ConjugacyLab& lab, const CocenterVector& v);

class Cocenter {
 public:
  // pivot_seed == 0 picks the first pivot in BFS order; otherwise pivots are drawn at random
  explicit Cocenter(ConjugacyLab& lab, uint64_t pivot_seed = 0);
  ~Cocenter();
  ConjugacyLab& lab() { return lab_; }
  const Engine& engine() const { return lab_.engine(); }
  const Hecke& hecke() const { return H_; }

  ClassPolys class_polynomials(const Elt& w);
  CocenterVector reduce_T(const HeckeElt& h);

  // same recursion inside W~_J; w given in W~ coordinates, keys are W~_J class ids
  Cocenter& parabolic(const std::vector<int>& J);
  const Parabolic& parabolic_data(const std::vector<int>& J) { return *lab_.parabolic(J).P; }
  ClassPolys class_polynomials_J(const Elt& w, const std::vector<int>& J);

  // memo access for the disk cache
  std::vector<std::pair<Elt, ClassPolys>> memo_entries() const;
  void seed_memo(const Elt& w, const ClassPolys& f) { memo_.emplace(w, f); }
  size_t memo_size() const { return memo_.size(); }

 private:
  ConjugacyLab& lab_;
  Hecke H_;
  std::unique_ptr<std::mt19937_64> rng_;
  absl::flat_hash_map<Elt, ClassPolys> memo_;
  std::map<std::vector<int>, std::unique_ptr<Cocenter>> par_;
};

struct TheoremAReport {
  Elt w;
  std::vector<int> J;
  int z = 0;
  Elt y;  // z w z^-1
  HeckeElt witness;
  CocenterVector lhs, rhs;  // reduce_T(T_w), reduce_T(witness)
  bool pass = false;
  std::vector<std::string> failures;
};
struct TheoremBReport {
  BernsteinDatum datum;
  SpecialForm form;
  HeckeElt bernstein_side;
  CocenterVector lhs, rhs;  // reduce_T(T_{w_O}), reduce_T(bernstein side)
  bool embed_agrees = false;  // parabolic embedding of T^J_{w1~} equals the special form
  bool pass = false;
  std::vector<std::string> failures;
};
struct TheoremCReport {
  Elt w;
  std::vector<int> J;
  int z = 0;
  Elt y;
  ClassPolys lhs;  // f_{w, O}
  ClassPolys rhs;  // sum over O' in O of f^J_{y, O'}
  std::vector<std::pair<int, XiPoly>> j_side;  // (W~_J class id, f^J)
  bool pass = false;
  std::vector<std::string> failures;
};

// throws std::invalid_argument unless w is a (J, z)-alcove element with z in ^J W0
TheoremAReport verify_theorem_A(Cocenter& cc, const Elt& w, const std::vector<int>& J, int z);
TheoremBReport verify_theorem_B(Cocenter& cc, int class_id);
TheoremCReport verify_theorem_C(Cocenter& cc, const Elt& w, const std::vector<int>& J, int z);

nlohmann::json report_json(Cocenter& cc, const TheoremAReport& r);
nlohmann::json report_json(Cocenter& cc, const TheoremBReport& r);
nlohmann::json report_json(Cocenter& cc, const TheoremCReport& r);

struct PAlcoveTriple {
  Elt w;
  std::vector<int> J;
  int z = 0;
};
// (w, J, z) with w from elements_up_to(E, max_len), J a subset of the simples, z in ^J W0
std::vector<PAlcoveTriple> palcove_triples(const Engine& E, int max_len, bool proper_only);

}  // namespace ahk
