#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "affhecke/engine.hpp"
#include "json.hpp"

namespace ahk {

// Laurent polynomial in v with integer coefficients, dense between lo and lo + c.size() - 1.
class LaurentPoly {
 public:
  LaurentPoly() = default;
  static LaurentPoly constant(int64_t a) { return monomial(0, a); }
  static LaurentPoly monomial(int e, int64_t a);
  static LaurentPoly xi();  // v - v^-1

  bool is_zero() const { return c_.empty(); }
  int lo() const { return lo_; }
  int hi() const { return lo_ + static_cast<int>(c_.size()) - 1; }
  int64_t coeff(int e) const;
  const std::vector<int64_t>& coeffs() const { return c_; }

  LaurentPoly& operator+=(const LaurentPoly& o);
  LaurentPoly& operator-=(const LaurentPoly& o);
  LaurentPoly operator+(const LaurentPoly& o) const { return LaurentPoly(*this) += o; }
  LaurentPoly operator-(const LaurentPoly& o) const { return LaurentPoly(*this) -= o; }
  LaurentPoly operator-() const;
  LaurentPoly operator*(const LaurentPoly& o) const;
  LaurentPoly times_xi() const;
  bool operator==(const LaurentPoly& o) const { return lo_ == o.lo_ && c_ == o.c_; }
  bool operator!=(const LaurentPoly& o) const { return !(*this == o); }

  Q eval(const Q& v) const;
  std::string str() const;
  nlohmann::json to_json() const;  // {"exp": coeff}
  static LaurentPoly from_json(const nlohmann::json& j);

 private:
  void trim();
  int lo_ = 0;
  std::vector<int64_t> c_;
};

// polynomial in xi = v - v^-1, coefficients lowest degree first
struct XiPoly {
  std::vector<int64_t> c;
  bool is_zero() const { return c.empty(); }
  int degree() const { return static_cast<int>(c.size()) - 1; }
  XiPoly& operator+=(const XiPoly& o);
  XiPoly times_xi() const;
  bool operator==(const XiPoly& o) const = default;
  LaurentPoly to_laurent() const;
  bool nonnegative() const;
  void trim();
};

using HeckeElt = absl::flat_hash_map<Elt, LaurentPoly>;

void add_to(HeckeElt& h, const Elt& w, const LaurentPoly& p);
HeckeElt add(const HeckeElt& a, const HeckeElt& b);
HeckeElt sub(const HeckeElt& a, const HeckeElt& b);
HeckeElt scale(const HeckeElt& a, const LaurentPoly& p);
bool equal(const HeckeElt& a, const HeckeElt& b);
HeckeElt unit_elt(const Elt& w);

// Iwahori-Matsumoto basis arithmetic over one engine, equal parameters.
class Hecke {
 public:
  explicit Hecke(const Engine& E);
  const Engine& engine() const { return E_; }

  HeckeElt T(const Elt& w) const { return unit_elt(w); }
  HeckeElt one() const { return unit_elt(E_.identity()); }
  HeckeElt mul(const HeckeElt& a, const HeckeElt& b) const;
  HeckeElt mul_T(const HeckeElt& a, const Elt& w) const;  // a * T_w
  HeckeElt mul_s(const HeckeElt& a, int s) const;         // a * T_s
  HeckeElt inv_basis(const Elt& w) const;                 // T_w^-1

  // dominant split lambda = chi - chi', chi' = sum c_i phi_i with phi_i the basic dominant vectors
  const std::vector<IVec>& phis() const { return phi_; }
  std::pair<IVec, IVec> dominant_split(const IVec& lam) const;
  HeckeElt theta_split(const IVec& chi, const IVec& chip) const;  // T_{t^chi} T_{t^chi'}^-1
  HeckeElt theta(const IVec& lam) const;
  HeckeElt central_z(const IVec& lam) const;
  bool is_dominant(const IVec& lam) const;
  // both sides of the Bernstein relation for chi and the simple root alpha_i
  struct CommSides {
    HeckeElt lhs, rhs;
  };
  CommSides bernstein_sides(const IVec& chi, int i) const;
  bool bernstein_comm_check(const IVec& chi, int i) const;

  // theta_lambda T_{w1^-1}^-1 T_{x1}; lambda J-dominant (J positions in simples)
  HeckeElt embed_special(const IVec& lam, const Elt& w1, const Elt& x1, const std::vector<int>& J) const;
  // image in H of T^J_y for y in the parabolic engine P (P->parent must be this engine)
  HeckeElt embed_parabolic(const Parabolic& P, const Elt& yJ) const;

  nlohmann::json to_json(const HeckeElt& h) const;
  HeckeElt from_json(const nlohmann::json& j) const;

 private:
  const Engine& E_;
  std::vector<IVec> phi_;
};

struct ParabolicAlgebra {
  std::unique_ptr<Parabolic> P;
  std::unique_ptr<Hecke> H;
};
ParabolicAlgebra parabolic_engine(const Engine& E, const std::vector<int>& J);

// rank over Q of the IM-coordinate matrix of the given elements evaluated at v
int rank_at(const std::vector<HeckeElt>& hs, const Q& v);

}  // namespace ahk
