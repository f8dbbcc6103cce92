#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "affhecke/linalg.hpp"

namespace ahk {

constexpr int kMaxRank = 8;

// Based root datum (X, R, Y, R^vee, F0) with a group of diagram automorphisms.
// X = Y = Z^rank in coordinates; <x, y> = x^T * pairing * y.
struct RootDatum {
  std::string name;
  int rank = 0;
  IMat roots;
  IMat coroots;
  IMat pairing;
  std::vector<int> simples;  // indices into roots
  std::vector<IMat> gammas;  // generators of Gamma, acting on X

  // Derived data, filled by finalize().
  IMat cocov;                   // cocov[a] = pairing * coroot[a], so <x, a^vee> = x . cocov[a]
  std::vector<char> positive;   // per root
  std::vector<int> pos_roots;   // indices of positive roots
  std::vector<int> negation;    // index of -a
  IMat simple_coeffs;           // coefficients of each root in the simple roots
  bool type_a_standard = false; // X = Z^n, roots e_i - e_j, identity pairing

  int64_t pair(const IVec& x, int root) const { return dot(x, cocov[root]); }
  int num_roots() const { return static_cast<int>(roots.size()); }
  int num_simples() const { return static_cast<int>(simples.size()); }
  int find_root(const IVec& v) const;
};

// Computes derived fields. Throws std::invalid_argument if the datum is not valid.
void finalize(RootDatum& d);

// Violations of the datum invariants, each naming the invariant and a witness.
std::vector<std::string> validate(const RootDatum& d);

RootDatum preset(const std::string& id);  // "GL3", "SL4", "A2ad", "C2", "G2"
RootDatum load_datum(const std::string& spec);  // "preset:GL8" or a JSON file path
RootDatum datum_from_json_text(const std::string& text);
std::string datum_to_json(const RootDatum& d);
uint64_t datum_hash(const RootDatum& d);
uint64_t fnv1a(std::string_view s);

// Closure of the gamma generators; index 0 is the identity.
std::vector<IMat> gamma_group(const RootDatum& d);

struct ParabolicSubdatum {
  const RootDatum* parent = nullptr;
  std::vector<int> J;       // positions in parent->simples
  std::vector<int> rootsJ;  // indices into parent->roots
  std::vector<IMat> gammasJ;
  RootDatum datum;          // the based root datum (X, R_J, Y, R_J^vee, J)
};
ParabolicSubdatum subdatum(const RootDatum& d, const std::vector<int>& J);

struct KottwitzGroup {
  std::vector<int64_t> torsion;  // invariant factors > 1
  int free_rank = 0;
  IMat proj;                     // rows: torsion rows first, then free rows
  std::vector<IMat> gamma_elems; // Gamma, same order as gamma_group
  IVec project(const IVec& x) const;
  bool is_trivial() const { return torsion.empty() && free_rank == 0 && gamma_elems.size() <= 1; }
};
KottwitzGroup kottwitz_group(const RootDatum& d);

struct KottwitzValue {
  IVec coords;
  int gamma = 0;
  bool operator==(const KottwitzValue&) const = default;
  auto operator<=>(const KottwitzValue&) const = default;
};
std::string to_string(const KottwitzValue& k);

struct DominantResult {
  QVec vec;
  IMat w;  // finite Weyl element with w(v) = vec
};
DominantResult dominant_rep(const RootDatum& d, const QVec& v);

}  // namespace ahk
