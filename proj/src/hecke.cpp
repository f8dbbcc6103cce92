#include "affhecke/hecke.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace ahk {

// ---- LaurentPoly ----

LaurentPoly LaurentPoly::monomial(int e, int64_t a) {
  LaurentPoly p;
  if (a != 0) {
    p.lo_ = e;
    p.c_ = {a};
  }
  return p;
}

LaurentPoly LaurentPoly::xi() {
  LaurentPoly p;
  p.lo_ = -1;
  p.c_ = {-1, 0, 1};
  return p;
}

int64_t LaurentPoly::coeff(int e) const {
  if (c_.empty() || e < lo_ || e > hi()) return 0;
  return c_[e - lo_];
}

void LaurentPoly::trim() {
  size_t b = 0;
  while (b < c_.size() && c_[b] == 0) ++b;
  if (b == c_.size()) {
    c_.clear();
    lo_ = 0;
    return;
  }
  size_t e = c_.size();
  while (c_[e - 1] == 0) --e;
  if (b > 0 || e < c_.size()) c_ = std::vector<int64_t>(c_.begin() + b, c_.begin() + e);
  lo_ += static_cast<int>(b);
}

LaurentPoly& LaurentPoly::operator+=(const LaurentPoly& o) {
  if (o.c_.empty()) return *this;
  if (c_.empty()) return *this = o;
  int nlo = std::min(lo_, o.lo_), nhi = std::max(hi(), o.hi());
  if (nlo != lo_ || nhi != hi()) {
    std::vector<int64_t> c(nhi - nlo + 1, 0);
    for (size_t i = 0; i < c_.size(); ++i) c[lo_ - nlo + i] = c_[i];
    c_ = std::move(c);
    lo_ = nlo;
  }
  for (size_t i = 0; i < o.c_.size(); ++i) c_[o.lo_ - lo_ + i] = add_ck(c_[o.lo_ - lo_ + i], o.c_[i]);
  trim();
  return *this;
}

LaurentPoly LaurentPoly::operator-() const {
  LaurentPoly p = *this;
  for (auto& x : p.c_) x = -x;
  return p;
}

LaurentPoly& LaurentPoly::operator-=(const LaurentPoly& o) { return *this += -o; }

LaurentPoly LaurentPoly::operator*(const LaurentPoly& o) const {
  if (c_.empty() || o.c_.empty()) return {};
  LaurentPoly p;
  p.lo_ = lo_ + o.lo_;
  p.c_.assign(c_.size() + o.c_.size() - 1, 0);
  for (size_t i = 0; i < c_.size(); ++i)
    if (c_[i] != 0)
      for (size_t j = 0; j < o.c_.size(); ++j) p.c_[i + j] = add_ck(p.c_[i + j], mul_ck(c_[i], o.c_[j]));
  p.trim();
  return p;
}

LaurentPoly LaurentPoly::times_xi() const {
  if (c_.empty()) return {};
  LaurentPoly p;
  p.lo_ = lo_ - 1;
  p.c_.assign(c_.size() + 2, 0);
  for (size_t i = 0; i < c_.size(); ++i) {
    p.c_[i] = sub_ck(p.c_[i], c_[i]);
    p.c_[i + 2] = add_ck(p.c_[i + 2], c_[i]);
  }
  p.trim();
  return p;
}

Q LaurentPoly::eval(const Q& v) const {
  Q s = 0;
  for (size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    int e = lo_ + static_cast<int>(i);
    Q pw = 1;
    Q base = e >= 0 ? v : Q(1) / v;
    for (int k = 0; k < std::abs(e); ++k) pw *= base;
    s += pw * Q(static_cast<long>(c_[i]));
  }
  return s;
}

std::string LaurentPoly::str() const {
  if (c_.empty()) return "0";
  std::string out;
  for (int i = static_cast<int>(c_.size()) - 1; i >= 0; --i) {
    int64_t a = c_[i];
    if (a == 0) continue;
    int e = lo_ + i;
    if (!out.empty()) out += a > 0 ? " + " : " - ";
    else if (a < 0) out += "-";
    int64_t m = std::abs(a);
    if (e == 0) out += fmt::format("{}", m);
    else {
      if (m != 1) out += fmt::format("{}", m);
      out += e == 1 ? "v" : fmt::format("v^{}", e);
    }
  }
  return out;
}

nlohmann::json LaurentPoly::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (size_t i = 0; i < c_.size(); ++i)
    if (c_[i] != 0) j[std::to_string(lo_ + static_cast<int>(i))] = c_[i];
  return j;
}

LaurentPoly LaurentPoly::from_json(const nlohmann::json& j) {
  LaurentPoly p;
  for (auto it = j.begin(); it != j.end(); ++it) p += monomial(std::stoi(it.key()), it.value().get<int64_t>());
  return p;
}

// ---- XiPoly ----

void XiPoly::trim() {
  while (!c.empty() && c.back() == 0) c.pop_back();
}

XiPoly& XiPoly::operator+=(const XiPoly& o) {
  if (o.c.size() > c.size()) c.resize(o.c.size(), 0);
  for (size_t i = 0; i < o.c.size(); ++i) c[i] = add_ck(c[i], o.c[i]);
  trim();
  return *this;
}

XiPoly XiPoly::times_xi() const {
  if (c.empty()) return {};
  XiPoly p;
  p.c.assign(c.size() + 1, 0);
  std::copy(c.begin(), c.end(), p.c.begin() + 1);
  return p;
}

LaurentPoly XiPoly::to_laurent() const {
  LaurentPoly acc, pw = LaurentPoly::constant(1);
  for (size_t k = 0; k < c.size(); ++k) {
    if (c[k] != 0) acc += pw * LaurentPoly::constant(c[k]);
    pw = pw.times_xi();
  }
  return acc;
}

bool XiPoly::nonnegative() const {
  return std::all_of(c.begin(), c.end(), [](int64_t x) { return x >= 0; });
}

// ---- HeckeElt helpers ----

void add_to(HeckeElt& h, const Elt& w, const LaurentPoly& p) {
  if (p.is_zero()) return;
  auto it = h.find(w);
  if (it == h.end()) {
    h.emplace(w, p);
    return;
  }
  it->second += p;
  if (it->second.is_zero()) h.erase(it);
}

HeckeElt add(const HeckeElt& a, const HeckeElt& b) {
  HeckeElt r = a;
  for (const auto& [w, p] : b) add_to(r, w, p);
  return r;
}

HeckeElt sub(const HeckeElt& a, const HeckeElt& b) {
  HeckeElt r = a;
  for (const auto& [w, p] : b) add_to(r, w, -p);
  return r;
}

HeckeElt scale(const HeckeElt& a, const LaurentPoly& p) {
  HeckeElt r;
  if (p.is_zero()) return r;
  for (const auto& [w, q] : a) add_to(r, w, q * p);
  return r;
}

bool equal(const HeckeElt& a, const HeckeElt& b) {
  if (a.size() != b.size()) return false;
  for (const auto& [w, p] : a) {
    auto it = b.find(w);
    if (it == b.end() || it->second != p) return false;
  }
  return true;
}

HeckeElt unit_elt(const Elt& w) {
  HeckeElt h;
  h.emplace(w, LaurentPoly::constant(1));
  return h;
}

// ---- Hecke ----

Hecke::Hecke(const Engine& E) : E_(E) {
  const RootDatum& d = E_.datum();
  const int n = E_.rank();
  // central lattice, used to make each phi_i canonical
  IMat all;
  for (int j = 0; j < d.num_simples(); ++j) all.push_back(d.cocov[d.simples[j]]);
  IMat central = hnf_rows(all.empty() ? ahk::identity(n) : int_kernel(all, n), n);
  for (int i = 0; i < d.num_simples(); ++i) {
    IMat others;
    for (int j = 0; j < d.num_simples(); ++j)
      if (j != i) others.push_back(d.cocov[d.simples[j]]);
    IMat K = others.empty() ? ahk::identity(n) : int_kernel(others, n);
    IVec x(n, 0);
    int64_t g = 0;
    for (const auto& k : K) {
      int64_t vk = dot(k, d.cocov[d.simples[i]]);
      if (vk == 0) continue;
      // extended gcd of (g, vk)
      int64_t a0 = g, b0 = vk, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
      while (b0 != 0) {
        int64_t q = floor_div(a0, b0);
        std::tie(a0, b0) = std::make_pair(b0, a0 - q * b0);
        std::tie(s0, s1) = std::make_pair(s1, s0 - q * s1);
        std::tie(t0, t1) = std::make_pair(t1, t0 - q * t1);
      }
      for (int c = 0; c < n; ++c) x[c] = add_ck(mul_ck(s0, x[c]), mul_ck(t0, k[c]));
      g = a0;
    }
    if (g < 0) {
      for (auto& c : x) c = -c;
      g = -g;
    }
    if (g == 0) throw std::logic_error("no dominant vector isolates a simple coroot");
    phi_.push_back(central.empty() ? x : reduce_mod(central, x));
  }
}

bool Hecke::is_dominant(const IVec& lam) const {
  const RootDatum& d = E_.datum();
  for (int s : d.simples)
    if (d.pair(lam, s) < 0) return false;
  return true;
}

HeckeElt Hecke::mul_s(const HeckeElt& a, int s) const {
  HeckeElt out;
  out.reserve(a.size() * 2);
  for (const auto& [w, p] : a) {
    Elt ws = E_.smul_right(w, s);
    if (E_.right_descent(w, s)) {
      add_to(out, ws, p);
      add_to(out, w, p.times_xi());
    } else {
      add_to(out, ws, p);
    }
  }
  return out;
}

HeckeElt Hecke::mul_T(const HeckeElt& a, const Elt& w) const {
  ReducedWord rw = E_.reduced_word(w);
  HeckeElt h = a;
  for (int s : rw.word) h = mul_s(h, s);
  if (rw.omega != E_.identity()) {
    HeckeElt r;
    r.reserve(h.size());
    for (const auto& [x, p] : h) r.emplace(E_.mul(x, rw.omega), p);
    h = std::move(r);
  }
  return h;
}

HeckeElt Hecke::mul(const HeckeElt& a, const HeckeElt& b) const {
  if (a.empty() || b.empty()) return {};
  HeckeElt acc;
  // cheaper side drives the word recursion
  for (const auto& [w, q] : b) {
    HeckeElt part = mul_T(a, w);
    for (const auto& [x, p] : part) add_to(acc, x, p * q);
  }
  return acc;
}

HeckeElt Hecke::inv_basis(const Elt& w) const {
  ReducedWord rw = E_.reduced_word(w);
  HeckeElt h = unit_elt(E_.inv(rw.omega));
  for (int k = static_cast<int>(rw.word.size()) - 1; k >= 0; --k) {
    HeckeElt hs = mul_s(h, rw.word[k]);
    for (const auto& [x, p] : h) add_to(hs, x, -p.times_xi());
    h = std::move(hs);
  }
  return h;
}

std::pair<IVec, IVec> Hecke::dominant_split(const IVec& lam) const {
  const RootDatum& d = E_.datum();
  const int n = E_.rank();
  IVec chip(n, 0);
  for (int i = 0; i < d.num_simples(); ++i) {
    int64_t p = d.pair(lam, d.simples[i]);
    if (p >= 0) continue;
    int64_t c = ceil_div(-p, d.pair(phi_[i], d.simples[i]));
    for (int k = 0; k < n; ++k) chip[k] = add_ck(chip[k], mul_ck(c, phi_[i][k]));
  }
  IVec chi(n);
  for (int k = 0; k < n; ++k) chi[k] = add_ck(lam[k], chip[k]);
  return {chi, chip};
}

HeckeElt Hecke::theta_split(const IVec& chi, const IVec& chip) const {
  if (!is_dominant(chi) || !is_dominant(chip)) throw std::invalid_argument("theta split needs dominant vectors");
  Elt tc = E_.translation(chi);
  if (std::all_of(chip.begin(), chip.end(), [](int64_t x) { return x == 0; })) return unit_elt(tc);
  return mul(unit_elt(tc), inv_basis(E_.translation(chip)));
}

HeckeElt Hecke::theta(const IVec& lam) const {
  auto [chi, chip] = dominant_split(lam);
  return theta_split(chi, chip);
}

HeckeElt Hecke::central_z(const IVec& lam) const {
  if (!is_dominant(lam)) throw std::invalid_argument("central_z needs a dominant vector");
  std::vector<Vec8> orbit;
  Vec8 l8 = to_vec8(lam);
  for (int g = 0; g < E_.group_size(); g += E_.gamma_size()) {
    Vec8 x = E_.gact(g, l8);
    if (std::find(orbit.begin(), orbit.end(), x) == orbit.end()) orbit.push_back(x);
  }
  HeckeElt z;
  for (const auto& x : orbit) z = add(z, theta(IVec(x.begin(), x.begin() + E_.rank())));
  return z;
}

Hecke::CommSides Hecke::bernstein_sides(const IVec& chi, int i) const {
  const RootDatum& d = E_.datum();
  const int n = E_.rank();
  const int a = d.simples.at(i);
  if (std::all_of(d.coroots[a].begin(), d.coroots[a].end(), [](int64_t x) { return x % 2 == 0; }))
    throw std::invalid_argument("alpha^vee lies in 2Y; the relation is not covered");
  const IVec& alpha = d.roots[a];
  int64_t m = d.pair(chi, a);
  IVec schi(n);
  for (int k = 0; k < n; ++k) schi[k] = chi[k] - m * alpha[k];
  HeckeElt Ts = unit_elt(E_.S(i));
  CommSides cs;
  cs.lhs = sub(mul(theta(chi), Ts), mul(Ts, theta(schi)));
  HeckeElt sum;
  auto shifted = [&](int64_t k) {
    IVec x(n);
    for (int c = 0; c < n; ++c) x[c] = chi[c] + k * alpha[c];
    return theta(x);
  };
  if (m > 0)
    for (int64_t k = 0; k < m; ++k) sum = add(sum, shifted(-k));
  else
    for (int64_t k = 1; k <= -m; ++k) sum = sub(sum, shifted(k));
  cs.rhs = scale(sum, LaurentPoly::xi());
  return cs;
}

bool Hecke::bernstein_comm_check(const IVec& chi, int i) const {
  CommSides cs = bernstein_sides(chi, i);
  return equal(cs.lhs, cs.rhs);
}

HeckeElt Hecke::embed_special(const IVec& lam, const Elt& w1, const Elt& x1, const std::vector<int>& J) const {
  const RootDatum& d = E_.datum();
  for (int j : J)
    if (d.pair(lam, d.simples[j]) < 0) throw std::invalid_argument("lambda is not J-dominant");
  HeckeElt h = mul(theta(lam), inv_basis(E_.inv(w1)));
  return mul_T(h, x1);
}

HeckeElt Hecke::embed_parabolic(const Parabolic& P, const Elt& yJ) const {
  if (P.parent != &E_) throw std::invalid_argument("parabolic engine belongs to another algebra");
  const Engine& EJ = *P.E;
  ReducedWord rw = EJ.reduced_word(yJ);
  HeckeElt h = one();
  for (int t : rw.word) {
    if (t < EJ.num_finite_S()) {
      h = mul_s(h, P.J[t]);
      continue;
    }
    // affine simple reflection t^theta s_theta of W~_J
    Elt te = P.from_J(EJ.S(t));
    IVec th = E_.lam_vec(te);
    Elt sth = E_.from_g(te.g);
    if (EJ.length(EJ.translation(th)) != 1 + E_.finite_length(te.g))
      throw std::logic_error("l_J(t^theta) is not l_J(t^theta s_theta) + l(s_theta)");
    h = mul(h, mul(theta(th), inv_basis(sth)));
  }
  Elt om = P.from_J(rw.omega);
  if (om != E_.identity()) {
    IVec mu = E_.lam_vec(om);
    Elt w = E_.from_g(om.g);
    h = mul(h, mul(theta(mu), inv_basis(E_.inv(w))));
  }
  return h;
}

nlohmann::json Hecke::to_json(const HeckeElt& h) const {
  std::vector<Elt> keys;
  for (const auto& [w, p] : h) keys.push_back(w);
  std::sort(keys.begin(), keys.end(), [this](const Elt& a, const Elt& b) { return E_.less(a, b); });
  nlohmann::json out = nlohmann::json::array();
  for (const auto& w : keys) out.push_back({{"elt", E_.format(w)}, {"coeff", h.at(w).to_json()}});
  return out;
}

HeckeElt Hecke::from_json(const nlohmann::json& j) const {
  HeckeElt h;
  for (const auto& e : j) add_to(h, E_.parse(e.at("elt").get<std::string>()), LaurentPoly::from_json(e.at("coeff")));
  return h;
}

ParabolicAlgebra parabolic_engine(const Engine& E, const std::vector<int>& J) {
  ParabolicAlgebra a;
  a.P = make_parabolic(E, J);
  a.H = std::make_unique<Hecke>(*a.P->E);
  return a;
}

int rank_at(const std::vector<HeckeElt>& hs, const Q& v) {
  absl::flat_hash_map<Elt, int> col;
  for (const auto& h : hs)
    for (const auto& [w, p] : h)
      if (!col.contains(w)) col.emplace(w, static_cast<int>(col.size()));
  QMat m(hs.size(), QVec(col.size(), Q(0)));
  for (size_t r = 0; r < hs.size(); ++r)
    for (const auto& [w, p] : hs[r]) m[r][col[w]] = p.eval(v);
  return rank_q(m);
}

}  // namespace ahk
