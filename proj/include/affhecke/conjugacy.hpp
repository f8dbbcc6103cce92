#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <absl/container/flat_hash_map.h>
#include <absl/container/flat_hash_set.h>

#include "affhecke/engine.hpp"
#include "json.hpp"

namespace ahk {

struct ReductionStep {
  int s;       // index into Engine::S
  Elt result;  // s * previous * s
};

struct ReductionPath {
  Elt start;
  std::vector<ReductionStep> steps;
  Elt end;
};
nlohmann::json path_json(const Engine& E, const ReductionPath& p);
// replays the steps and checks lengths never increase
bool path_valid(const Engine& E, const ReductionPath& p);

// Complete conjugacy invariant: g is the least index in the W0 x| Gamma class of p(w)
// and nf the normal form of the translation part modulo (1 - g)X and the centralizer.
struct ExactKey {
  int g = 0;
  Vec8 nf{};
  bool operator==(const ExactKey& o) const { return g == o.g && nf == o.nf; }
  template <typename H>
  friend H AbslHashValue(H h, const ExactKey& k) {
    return H::combine(std::move(h), k.g, k.nf);
  }
};

struct ConjClassKey {
  int id = -1;  // registry index inside one ConjugacyLab
  QVec nu;      // dominant Newton point
  KottwitzValue kappa;
  Elt canonical_min;
  int min_len = 0;
};
nlohmann::json key_json(const Engine& E, const ConjClassKey& k);

struct ConjOptions {
  int strong_bound = 6;  // B: length bound for elementary strong conjugation
  size_t orbit_cap = 4000000;
};

class ConjugacyLab;

struct ParabolicCtx {
  std::unique_ptr<Parabolic> P;
  std::unique_ptr<ConjugacyLab> lab;
};

class ConjugacyLab {
 public:
  explicit ConjugacyLab(const Engine& E, ConjOptions opt = {});
  ~ConjugacyLab();
  const Engine& engine() const { return E_; }
  const ConjOptions& options() const { return opt_; }

  ExactKey exact_key(const Elt& w) const;
  bool conjugate(const Elt& a, const Elt& b) const { return exact_key(a) == exact_key(b); }

  ReductionPath reduce_to_min(const Elt& w) const;
  // length-preserving simple conjugations, optionally with Omega-conjugation
  std::vector<Elt> approx_orbit(const Elt& w, bool with_omega) const;
  std::vector<Elt> min_set(const Elt& wmin) const;  // sorted by Engine::less
  const std::vector<Elt>& strong_ball() const;     // elements of W with 2 <= l <= B

  int class_id(const Elt& w);
  ConjClassKey key(int id);  // fills canonical_min on first use
  ConjClassKey class_key(const Elt& w) { return key(class_id(w)); }
  std::vector<Elt> class_mins(int id);  // the computed minimal-length set
  int min_length(int id) const;
  ExactKey exact_key_of(int id) const;
  bool is_minimal(const Elt& w) { return E_.length(w) == min_length(class_id(w)); }
  int num_classes() const;

  // (w1, s) with w1 reachable from w by length-preserving simple and Omega conjugation
  // and l(s w1 s) < l(w1). visited gets the part of the orbit explored.
  struct Pivot {
    Elt w1;
    int s = -1;
  };
  std::optional<Pivot> find_pivot(const Elt& w, std::mt19937_64* rng, std::vector<Elt>* visited) const;

  // Recomputes min_set from each minimal element reached by the inputs and compares with
  // the registered class; returns one line per disagreement.
  std::vector<std::string> audit_keys(const std::vector<Elt>& ws);
  std::vector<std::string> audit_log() const;

  ParabolicCtx& parabolic(const std::vector<int>& J);

 private:
  struct GClass {
    int rep = -1;
    int conj = 0;  // h with h g h^-1 = rep
  };
  struct ClassInfo {
    ExactKey key;
    int min_len = 0;
    Elt seed_min;
    QVec nu;
    KottwitzValue kappa;
    bool have_set = false;
    std::vector<Elt> mins;
    absl::flat_hash_set<Elt> minset;
  };
  void ensure_gclass(int g) const;
  const std::vector<int>& centralizer(int rep) const;
  const IMat& coimage_hnf(int rep) const;
  Vec8 dominant_int(Vec8 x) const;

  const Engine& E_;
  ConjOptions opt_;
  mutable std::mutex mu_;
  mutable std::vector<GClass> gclass_;
  mutable absl::flat_hash_map<int, std::vector<int>> cent_;
  mutable absl::flat_hash_map<int, IMat> hnf_;
  mutable std::vector<Elt> ball_;
  mutable bool ball_done_ = false;
  absl::flat_hash_map<ExactKey, int> ids_;
  std::deque<ClassInfo> classes_;
  std::vector<std::string> audit_;
  std::mutex par_mu_;
  absl::flat_hash_map<uint64_t, std::unique_ptr<ParabolicCtx>> par_;
};

// all x * delta with x in W, l(x) <= L, delta in Engine::omega_reps(); sorted by Engine::less
std::vector<Elt> elements_up_to(const Engine& E, int L);

// ---- partial conjugation; J, I, K are index sets into Engine::S with W_J finite ----

std::vector<Elt> WJ_group(const Engine& E, const std::vector<int>& J);
bool in_W_K(const Engine& E, const Elt& x, const std::vector<int>& K);
std::vector<int> I_of(const Engine& E, const std::vector<int>& J, const Elt& w);

struct PartialResult {
  Elt u;  // in ^J W~
  Elt x;  // in W_{I(J,u)}, end = x * u
  std::vector<int> I;
  ReductionPath path;  // J-steps only
};
PartialResult partial_min(const Engine& E, const Elt& w, const std::vector<int>& J);
// every u in ^J W~ with (W_J-orbit of w) meeting W_{I(J,u)} u; uniqueness means size 1
std::vector<Elt> partial_coset_elements(const Engine& E, const Elt& w, const std::vector<int>& J);
bool is_min_in_WJ_orbit(const Engine& E, const Elt& w, const std::vector<int>& J);

// h in ^{I(J,u)} W_J ^I with h I h^-1 inside I(J,u) and h w h^-1 = u
std::optional<Elt> fact_h_search(const Engine& E, const std::vector<int>& I, const std::vector<int>& J,
                                 const Elt& w, const Elt& u);

struct ScanReport {
  long checked = 0;
  long failures = 0;
  std::vector<std::string> witnesses;  // first few failures
};
ScanReport scan_fact(ConjugacyLab& lab, int max_len);
ScanReport scan_min_in_wj(ConjugacyLab& lab);
ScanReport scan_partial(const Engine& E, int max_len);

// ---- ellipticity, (J, C)-pairs, Bernstein datum; J index sets into datum().simples ----

bool is_elliptic(const Engine& E, const Elt& w, const std::vector<int>& J);

// C given by a representative in W~_J with dominant Newton point; returns x when
// (J, C) ~ (J', C').
std::optional<int> pair_equivalent(ConjugacyLab& lab, const std::vector<int>& J, const Elt& rep,
                                   const std::vector<int>& Jp, const Elt& repp);

struct BernsteinDatum {
  ConjClassKey cls;
  Elt w_prime;
  QVec e_prime;  // regular point of V_{w'} in the closure of C0
  QVec nu_prime;  // Newton point of w'
  QVec v;
  int z = 0;
  std::vector<int> J;
  Elt w0;
  int lJ_w0 = 0;
  bool lJ_minimal = false;
  bool elliptic = false;
};
nlohmann::json bernstein_json(const Engine& E, const BernsteinDatum& b);
BernsteinDatum bernstein_datum(ConjugacyLab& lab, int class_id);

// w1~ = t^lambda w1 x1 inside the W_{J_e}-class of w0 (the shape used for the Bernstein side)
struct SpecialForm {
  QVec e;
  std::vector<int> Je;
  std::vector<int> I;  // I(J_e, t^lambda w1)
  Elt w1t;
  IVec lambda;
  Elt w1;
  Elt x1;
  std::vector<std::string> audit_failures;
};
SpecialForm special_form(ConjugacyLab& lab, const BernsteinDatum& b);

int64_t pair_2rho(const RootDatum& d, const IVec& x);             // <x, 2 rho^vee>
int64_t pair_2rho_J(const RootDatum& d, const IVec& x, const std::vector<int>& J);
Q pair_2rho(const RootDatum& d, const QVec& x);
std::vector<int> roots_in_J(const RootDatum& d, const std::vector<int>& J);  // positive roots of R_J

}  // namespace ahk
