#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <absl/container/flat_hash_map.h>
#include <absl/hash/hash.h>

#include "affhecke/root_datum.hpp"

namespace ahk {

using Vec8 = std::array<int64_t, kMaxRank>;

// t^lam * g, where g indexes the finite group W0 x| Gamma enumerated by the engine.
struct Elt {
  Vec8 lam{};
  int32_t g = 0;
  bool operator==(const Elt& o) const { return g == o.g && lam == o.lam; }
  bool operator!=(const Elt& o) const { return !(*this == o); }
  template <typename H>
  friend H AbslHashValue(H h, const Elt& e) {
    return H::combine(std::move(h), e.lam, e.g);
  }
};

struct AffineSubspace {
  QVec base;
  QMat dirs;  // reduced row echelon form
  bool contains(const QVec& p) const;
  int dim() const { return static_cast<int>(dirs.size()); }
};

struct KVec {
  std::vector<int64_t> k;  // indexed by root index, all roots
};

struct OmegaDecomp {
  Elt omega;
  std::vector<int> word;  // x = s_word[0] ... s_word[n-1], with w = omega * x
};

struct ReducedWord {
  std::vector<int> word;  // s_word[0] ... s_word[n-1] * omega = w
  Elt omega;
};

enum class Region { AlcoveClosure, ChamberClosure };

class Engine {
 public:
  explicit Engine(RootDatum d);
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  const RootDatum& datum() const { return d_; }
  int rank() const { return d_.rank; }

  // finite group W0 x| Gamma
  int group_size() const { return static_cast<int>(mats_.size()); }
  int gamma_size() const { return static_cast<int>(gamma_mats_.size()); }
  int weyl_size() const { return group_size() / gamma_size(); }
  int gamma_of(int g) const { return g % gamma_size(); }
  int weyl_of(int g) const { return g - g % gamma_size(); }
  int gmul(int a, int b) const;
  int ginv(int a) const { return ginv_[a]; }
  int gorder(int a) const;
  int groot(int g, int root) const { return rootperm_[static_cast<size_t>(g) * nroots_ + root]; }
  IMat gmatrix(int g) const;
  std::optional<int> glookup(const IMat& m) const;
  int simple_g(int i) const { return simple_g_[i]; }  // i-th finite simple reflection
  const std::vector<int>& gamma_gen_g() const { return gamma_gen_g_; }
  Vec8 gact(int g, const Vec8& x) const;
  // ordering rank for canonical comparisons (identity first)
  int gorder_rank(int g) const { return grank_[g]; }
  // finite simple-reflection word for the W0 part of g (left to right), and Gamma generator word
  std::vector<int> weyl_word(int g) const;
  std::vector<int> gamma_word(int g) const;
  int finite_length(int g) const;

  // elements
  Elt identity() const { return Elt{}; }
  Elt translation(const IVec& lam) const;
  Elt from_g(int g) const;
  Elt mul(const Elt& a, const Elt& b) const;
  Elt inv(const Elt& a) const;
  Elt conj(const Elt& x, const Elt& w) const { return mul(mul(x, w), inv(x)); }
  IVec lam_vec(const Elt& e) const;
  QVec act(const Elt& e, const QVec& v) const;
  int ptau(const Elt& e) const { return gamma_of(e.g); }

  // simple reflections of W: finite ones first, then one affine per irreducible component
  int num_S() const { return static_cast<int>(S_.size()); }
  int num_finite_S() const { return d_.num_simples(); }
  const Elt& S(int i) const { return S_[i]; }
  Elt smul_left(int s, const Elt& e) const;
  Elt smul_right(const Elt& e, int s) const;
  Elt sconj(int s, const Elt& e) const { return smul_right(smul_left(s, e), s); }
  bool right_descent(const Elt& e, int s) const;  // l(e s) < l(e)
  bool left_descent(int s, const Elt& e) const;   // l(s e) < l(e)
  int component_count() const { return static_cast<int>(theta_.size()); }
  int highest_root(int comp) const { return theta_[comp]; }

  int length(const Elt& e) const;
  int length_oracle(const Elt& e) const;
  KVec alcove_k(const Elt& e) const;
  // k computed from an arbitrary interior point scaled by den (for independence checks)
  KVec alcove_k_at(const Elt& e, const IVec& point, int64_t den) const;
  const IVec& p0() const { return p0_; }
  int64_t p0_den() const { return p0_den_; }

  ReducedWord reduced_word(const Elt& e) const;
  OmegaDecomp omega_decompose(const Elt& e) const;
  const std::vector<Elt>& omega_gens() const { return omega_gens_; }
  // Omega modulo W0-invariant translations (finite); identity first
  std::vector<Elt> omega_reps() const;
  // generators of Omega and their inverses; closing a set under these gives Omega-orbits
  std::vector<Elt> omega_conjugators() const;
  // t^mu g with mu reduced modulo (1 - g)D, D the W0-invariant lattice; conjugate to the input
  // by a length-zero translation. Only moves anything when Gamma acts nontrivially on D.
  Elt omega_normalize(const Elt& e) const;
  bool is_central_translation(const Elt& e) const;
  KottwitzValue kappa(const Elt& e) const;
  const KottwitzGroup& kottwitz() const { return kott_; }

  QVec newton_point(const Elt& e) const;
  QVec newton_dominant(const Elt& e) const;
  AffineSubspace fixed_space(const Elt& e) const;
  QMat fixed_dirs(int g) const;  // basis of V^{g}
  std::optional<QVec> regular_point(const AffineSubspace& E, Region region) const;
  bool is_regular_in(const QVec& p, const AffineSubspace& E, Region region) const;

  // parabolic pieces, J = positions in datum().simples
  bool in_WJ(int g, const std::vector<int>& J) const;        // g in W_J x| Gamma_J
  bool in_WJ_weyl(int g, const std::vector<int>& J) const;   // g in W_J
  bool in_tilde_WJ(const Elt& e, const std::vector<int>& J) const { return in_WJ(e.g, J); }
  std::vector<int> WJ_elements(const std::vector<int>& J) const;  // W_J (no Gamma)
  bool is_p_alcove(const Elt& e, const std::vector<int>& J, int z) const;
  Elt coset_min(const Elt& e, const std::vector<int>& J, bool left) const;
  bool in_min_coset(const Elt& e, const std::vector<int>& J, bool left) const;
  std::vector<int> min_coset_reps_W0(const std::vector<int>& J, bool left) const;  // ^J W0 or W0^J

  // text notation
  std::string format(const Elt& e) const;
  Elt parse(const std::string& s) const;

  // total order used for canonical representatives
  bool less(const Elt& a, const Elt& b) const;

 private:
  void build_group();
  void build_affine();
  void build_omega();
  int lookup_mat(const int64_t* m) const;  // -1 if absent

  RootDatum d_;
  int n_ = 0;
  int nroots_ = 0;
  std::vector<std::array<int64_t, kMaxRank * kMaxRank>> mats_;
  absl::flat_hash_map<std::array<int8_t, kMaxRank * kMaxRank>, int> index_;
  std::vector<IMat> gamma_mats_;
  std::vector<int> ginv_, grank_, rootperm_, simple_g_, gamma_gen_g_;
  std::vector<int> wlen_, wparent_, wparent_s_;  // by Weyl index (g / |Gamma|)
  std::vector<int> gparent_, gparent_gen_;       // BFS tree of Gamma
  // reflection of s in S: x -> x - (<x, beta^vee> - c) beta
  std::vector<Elt> S_;
  std::vector<int> s_beta_, s_g_;
  std::vector<std::vector<int>> s_lmul_, s_rmul_;  // per s, table over g
  std::vector<int64_t> s_c_;
  // affine root positive on C0 whose wall is fixed by s: (root, constant)
  std::vector<int> s_root_;
  std::vector<int64_t> s_k_;
  std::vector<int> theta_;
  std::vector<int> comp_of_simple_;
  IVec p0_;
  int64_t p0_den_ = 1;
  std::vector<Elt> omega_gens_;
  std::vector<IMat> dnorm_;  // per g, HNF of (1 - g)D; empty when Gamma is trivial
  KottwitzGroup kott_;
  mutable std::mutex mu_;
  mutable std::vector<int> gorder_;
  mutable absl::flat_hash_map<uint64_t, std::vector<char>> wj_cache_, wjw_cache_;
};

// W~_J = X x| (W_J x| Gamma_J) as a standalone engine, with element transport.
struct Parabolic {
  const Engine* parent = nullptr;
  std::vector<int> J;
  ParabolicSubdatum sub;
  std::unique_ptr<Engine> E;
  std::vector<int> to_j;    // parent g -> J-engine g, -1 outside W_J x| Gamma_J
  std::vector<int> from_j;  // J-engine g -> parent g
  bool contains(const Elt& e) const { return to_j[e.g] >= 0; }
  Elt to_J(const Elt& e) const;
  Elt from_J(const Elt& e) const;
};
std::unique_ptr<Parabolic> make_parabolic(const Engine& E, const std::vector<int>& J);

Vec8 to_vec8(const IVec& v);
std::string qvec_str(const QVec& v);

}  // namespace ahk
