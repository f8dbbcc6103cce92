#include "affhecke/conjugacy.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace ahk {

namespace {

int64_t pair8(const Vec8& x, const IVec& cov, int n) {
  int64_t s = 0;
  for (int i = 0; i < n; ++i) s = add_ck(s, mul_ck(x[i], cov[i]));
  return s;
}

Q qpair(const QVec& v, const IVec& cov) {
  Q s = 0;
  for (size_t i = 0; i < v.size(); ++i)
    if (cov[i] != 0) s += v[i] * Q(static_cast<long>(cov[i]));
  return s;
}

uint64_t mask_of(const std::vector<int>& J) {
  uint64_t m = 0;
  for (int j : J) m |= uint64_t{1} << j;
  return m;
}

std::string qstr(const Q& q) { return q.get_str(); }

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

}  // namespace

nlohmann::json path_json(const Engine& E, const ReductionPath& p) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& st : p.steps)
    steps.push_back({{"s", st.s}, {"result", E.format(st.result)}, {"length", E.length(st.result)}});
  return {{"start", E.format(p.start)}, {"end", E.format(p.end)}, {"steps", steps}};
}

bool path_valid(const Engine& E, const ReductionPath& p) {
  Elt cur = p.start;
  int len = E.length(cur);
  for (const auto& st : p.steps) {
    Elt nx = E.sconj(st.s, cur);
    if (nx != st.result) return false;
    int l2 = E.length(nx);
    if (l2 > len) return false;
    cur = nx;
    len = l2;
  }
  return cur == p.end;
}

nlohmann::json key_json(const Engine& E, const ConjClassKey& k) {
  nlohmann::json nu = nlohmann::json::array();
  for (const auto& q : k.nu) nu.push_back(qstr(q));
  return {{"nu", nu}, {"kappa", to_string(k.kappa)}, {"min_rep", E.format(k.canonical_min)}};
}

ConjugacyLab::ConjugacyLab(const Engine& E, ConjOptions opt) : E_(E), opt_(opt) {
  gclass_.assign(E_.group_size(), GClass{});
}

ConjugacyLab::~ConjugacyLab() = default;

void ConjugacyLab::ensure_gclass(int g) const {
  if (gclass_[g].rep >= 0) return;
  std::vector<int> gens;
  for (int i = 0; i < E_.num_finite_S(); ++i) gens.push_back(E_.simple_g(i));
  for (int t : E_.gamma_gen_g()) {
    gens.push_back(t);
    gens.push_back(E_.ginv(t));
  }
  std::vector<int> members{g};
  absl::flat_hash_map<int, int> h{{g, 0}};
  for (size_t q = 0; q < members.size(); ++q) {
    int m = members[q];
    for (int c : gens) {
      int m2 = E_.gmul(E_.gmul(c, m), E_.ginv(c));
      if (h.contains(m2)) continue;
      h[m2] = E_.gmul(c, h[m]);
      members.push_back(m2);
    }
  }
  int rep = *std::min_element(members.begin(), members.end());
  int hr = h[rep];
  for (int m : members) gclass_[m] = GClass{rep, E_.gmul(hr, E_.ginv(h[m]))};
}

const std::vector<int>& ConjugacyLab::centralizer(int rep) const {
  auto it = cent_.find(rep);
  if (it != cent_.end()) return it->second;
  std::vector<int> c;
  for (int x = 0; x < E_.group_size(); ++x)
    if (E_.gmul(x, rep) == E_.gmul(rep, x)) c.push_back(x);
  return cent_.emplace(rep, std::move(c)).first->second;
}

const IMat& ConjugacyLab::coimage_hnf(int rep) const {
  auto it = hnf_.find(rep);
  if (it != hnf_.end()) return it->second;
  const int n = E_.rank();
  IMat rows;
  for (int j = 0; j < n; ++j) {
    Vec8 e{};
    e[j] = 1;
    Vec8 ge = E_.gact(rep, e);
    IVec r(n);
    for (int i = 0; i < n; ++i) r[i] = e[i] - ge[i];
    rows.push_back(r);
  }
  return hnf_.emplace(rep, hnf_rows(rows, n)).first->second;
}

Vec8 ConjugacyLab::dominant_int(Vec8 x) const {
  const RootDatum& d = E_.datum();
  const int n = E_.rank();
  for (bool changed = true; changed;) {
    changed = false;
    for (int i = 0; i < d.num_simples(); ++i) {
      int a = d.simples[i];
      int64_t p = pair8(x, d.cocov[a], n);
      if (p < 0) {
        for (int k = 0; k < n; ++k) x[k] = sub_ck(x[k], mul_ck(p, d.roots[a][k]));
        changed = true;
      }
    }
  }
  return x;
}

ExactKey ConjugacyLab::exact_key(const Elt& w) const {
  std::lock_guard<std::mutex> lock(mu_);
  ensure_gclass(w.g);
  const GClass gc = gclass_[w.g];
  Vec8 lam = E_.gact(gc.conj, w.lam);
  ExactKey k;
  k.g = gc.rep;
  if (gc.rep == 0) {
    bool first = true;
    for (int t = 0; t < E_.gamma_size(); ++t) {
      Vec8 c = dominant_int(E_.gact(t, lam));
      if (first || c < k.nf) k.nf = c;
      first = false;
    }
    return k;
  }
  const IMat& H = coimage_hnf(gc.rep);
  bool first = true;
  const int n = E_.rank();
  for (int c : centralizer(gc.rep)) {
    Vec8 x = E_.gact(c, lam);
    IVec r = reduce_mod(H, IVec(x.begin(), x.begin() + n));
    Vec8 v = to_vec8(r);
    if (first || v < k.nf) k.nf = v;
    first = false;
  }
  return k;
}

ReductionPath ConjugacyLab::reduce_to_min(const Elt& w) const {
  ReductionPath path;
  path.start = w;
  Elt cur = w;
  for (;;) {
    const int L = E_.length(cur);
    std::vector<Elt> nodes{cur};
    std::vector<int> parent{-1}, via{-1};
    absl::flat_hash_map<Elt, int> seen{{cur, 0}};
    int found = -1, found_s = -1;
    Elt found_elt;
    for (size_t q = 0; q < nodes.size() && found < 0; ++q) {
      for (int s = 0; s < E_.num_S(); ++s) {
        Elt y = E_.sconj(s, nodes[q]);
        int l = E_.length(y);
        if (l < L) {
          found = static_cast<int>(q);
          found_s = s;
          found_elt = y;
          break;
        }
        if (l == L && !seen.contains(y)) {
          seen[y] = static_cast<int>(nodes.size());
          nodes.push_back(y);
          parent.push_back(static_cast<int>(q));
          via.push_back(s);
          if (nodes.size() > opt_.orbit_cap) throw std::runtime_error("length-preserving orbit exceeds the cap");
        }
      }
    }
    if (found < 0) break;
    std::vector<ReductionStep> seg;
    for (int q = found; parent[q] >= 0; q = parent[q]) seg.push_back({via[q], nodes[q]});
    std::reverse(seg.begin(), seg.end());
    for (auto& st : seg) path.steps.push_back(st);
    path.steps.push_back({found_s, found_elt});
    cur = found_elt;
  }
  path.end = cur;
  return path;
}

std::vector<Elt> ConjugacyLab::approx_orbit(const Elt& w, bool with_omega) const {
  const int L = E_.length(w);
  std::vector<Elt> omegas;
  if (with_omega) omegas = E_.omega_conjugators();
  std::vector<Elt> out{w};
  absl::flat_hash_set<Elt> seen{w};
  for (size_t q = 0; q < out.size(); ++q) {
    Elt y = out[q];
    for (int s = 0; s < E_.num_S(); ++s) {
      Elt y2 = E_.omega_normalize(E_.sconj(s, y));
      if (E_.length(y2) == L && seen.insert(y2).second) out.push_back(y2);
    }
    for (size_t k = 0; k < omegas.size(); ++k) {
      Elt y2 = E_.omega_normalize(E_.conj(omegas[k], y));
      if (seen.insert(y2).second) out.push_back(y2);
    }
    if (out.size() > opt_.orbit_cap) throw std::runtime_error("length-preserving orbit exceeds the cap");
  }
  return out;
}

const std::vector<Elt>& ConjugacyLab::strong_ball() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (ball_done_) return ball_;
  std::vector<Elt> level{E_.identity()};
  absl::flat_hash_set<Elt> seen{E_.identity()};
  for (int len = 1; len <= opt_.strong_bound; ++len) {
    std::vector<Elt> next;
    for (const auto& x : level)
      for (int s = 0; s < E_.num_S(); ++s) {
        if (E_.right_descent(x, s)) continue;
        Elt y = E_.smul_right(x, s);
        if (seen.insert(y).second) next.push_back(y);
      }
    if (len >= 2) ball_.insert(ball_.end(), next.begin(), next.end());
    level = std::move(next);
  }
  ball_done_ = true;
  return ball_;
}

std::vector<Elt> ConjugacyLab::min_set(const Elt& wmin) const {
  const int L = E_.length(wmin);
  std::vector<Elt> omegas = E_.omega_conjugators();
  const std::vector<Elt>& ball = strong_ball();
  std::vector<int> ball_len;
  std::vector<Elt> ball_inv;
  for (const auto& x : ball) {
    ball_len.push_back(E_.length(x));
    ball_inv.push_back(E_.inv(x));
  }
  const Elt start = E_.omega_normalize(wmin);
  std::vector<Elt> out{start};
  absl::flat_hash_set<Elt> seen{start};
  auto add = [&](const Elt& y0) {
    Elt y = E_.omega_normalize(y0);
    if (seen.insert(y).second) out.push_back(y);
    if (out.size() > opt_.orbit_cap) throw std::runtime_error("minimal-length set exceeds the cap");
  };
  for (size_t q = 0; q < out.size(); ++q) {
    const Elt y = out[q];
    for (int s = 0; s < E_.num_S(); ++s) {
      Elt y2 = E_.sconj(s, y);
      if (E_.length(y2) == L) add(y2);
    }
    for (size_t k = 0; k < omegas.size(); ++k) add(E_.conj(omegas[k], y));
    for (size_t b = 0; b < ball.size(); ++b) {
      Elt xy = E_.mul(ball[b], y);
      Elt y2 = E_.mul(xy, ball_inv[b]);
      if (seen.contains(E_.omega_normalize(y2)) || E_.length(y2) != L) continue;
      bool additive = E_.length(xy) == ball_len[b] + L ||
                      E_.length(E_.mul(y, ball_inv[b])) == ball_len[b] + L;
      if (additive) add(y2);
    }
  }
  std::sort(out.begin(), out.end(), [this](const Elt& a, const Elt& b) { return E_.less(a, b); });
  return out;
}

int ConjugacyLab::class_id(const Elt& w) {
  ExactKey k = exact_key(w);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = ids_.find(k);
    if (it != ids_.end()) return it->second;
  }
  // the seed depends only on the class, so the registered data does too
  Elt seed{k.nf, k.g};
  Elt m = reduce_to_min(seed).end;
  ClassInfo info;
  info.key = k;
  info.min_len = E_.length(m);
  info.seed_min = m;
  info.nu = E_.newton_dominant(m);
  info.kappa = E_.kappa(m);
  std::lock_guard<std::mutex> lock(mu_);
  auto it = ids_.find(k);
  if (it != ids_.end()) return it->second;
  int id = static_cast<int>(classes_.size());
  classes_.push_back(std::move(info));
  ids_[k] = id;
  return id;
}

std::vector<Elt> ConjugacyLab::class_mins(int id) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (classes_.at(id).have_set) return classes_[id].mins;
  }
  Elt seed;
  {
    std::lock_guard<std::mutex> lock(mu_);
    seed = classes_.at(id).seed_min;
  }
  std::vector<Elt> mins = min_set(seed);
  std::lock_guard<std::mutex> lock(mu_);
  ClassInfo& c = classes_[id];
  if (!c.have_set) {
    c.mins = mins;
    c.minset = absl::flat_hash_set<Elt>(mins.begin(), mins.end());
    c.have_set = true;
  }
  return c.mins;
}

ConjClassKey ConjugacyLab::key(int id) {
  std::vector<Elt> mins = class_mins(id);
  std::lock_guard<std::mutex> lock(mu_);
  const ClassInfo& c = classes_.at(id);
  ConjClassKey k;
  k.id = id;
  k.nu = c.nu;
  k.kappa = c.kappa;
  k.canonical_min = mins.front();
  k.min_len = c.min_len;
  return k;
}

int ConjugacyLab::min_length(int id) const {
  std::lock_guard<std::mutex> lock(mu_);
  return classes_.at(id).min_len;
}

ExactKey ConjugacyLab::exact_key_of(int id) const {
  std::lock_guard<std::mutex> lock(mu_);
  return classes_.at(id).key;
}

int ConjugacyLab::num_classes() const {
  std::lock_guard<std::mutex> lock(mu_);
  return static_cast<int>(classes_.size());
}

std::optional<ConjugacyLab::Pivot> ConjugacyLab::find_pivot(const Elt& w, std::mt19937_64* rng,
                                                           std::vector<Elt>* visited) const {
  const int L = E_.length(w);
  const std::vector<Elt> omegas = E_.omega_conjugators();
  std::vector<Elt> out{w};
  absl::flat_hash_set<Elt> seen{w};
  std::vector<Pivot> cands;
  for (size_t q = 0; q < out.size(); ++q) {
    const Elt y = out[q];
    for (int s = 0; s < E_.num_S(); ++s) {
      if (!E_.left_descent(s, y)) {
        Elt y2 = E_.omega_normalize(E_.sconj(s, y));
        if (E_.length(y2) == L && seen.insert(y2).second) out.push_back(y2);
        continue;
      }
      Elt y2 = E_.omega_normalize(E_.sconj(s, y));
      int l2 = E_.length(y2);
      if (l2 < L) {
        cands.push_back({y, s});
        if (!rng) {
          if (visited) *visited = std::move(out);
          return cands.front();
        }
      } else if (l2 == L && seen.insert(y2).second) {
        out.push_back(y2);
      }
    }
    for (size_t k = 0; k < omegas.size(); ++k) {
      Elt y2 = E_.omega_normalize(E_.conj(omegas[k], y));
      if (seen.insert(y2).second) out.push_back(y2);
    }
    if (out.size() > opt_.orbit_cap) throw std::runtime_error("length-preserving orbit exceeds the cap");
  }
  if (visited) *visited = std::move(out);
  if (cands.empty()) return std::nullopt;
  std::uniform_int_distribution<size_t> pick(0, cands.size() - 1);
  return cands[pick(*rng)];
}

std::vector<std::string> ConjugacyLab::audit_keys(const std::vector<Elt>& ws) {
  std::vector<std::string> found;
  for (const auto& w : ws) {
    int id = class_id(w);
    Elt m = reduce_to_min(w).end;
    int ml = min_length(id);
    if (E_.length(m) != ml) {
      found.push_back(fmt::format("{}: reduction stopped at length {} above the class minimum {}", E_.format(w),
                                  E_.length(m), ml));
      continue;
    }
    class_mins(id);
    bool in;
    {
      std::lock_guard<std::mutex> lock(mu_);
      in = classes_[id].minset.contains(m);
    }
    if (in) continue;
    std::vector<Elt> other = min_set(m);
    found.push_back(fmt::format("{}: minimal set from {} has {} elements, registered set differs (canonical {})",
                                E_.format(w), E_.format(m), other.size(), E_.format(key(id).canonical_min)));
  }
  std::lock_guard<std::mutex> lock(mu_);
  audit_.insert(audit_.end(), found.begin(), found.end());
  return found;
}

std::vector<std::string> ConjugacyLab::audit_log() const {
  std::lock_guard<std::mutex> lock(mu_);
  return audit_;
}

ParabolicCtx& ConjugacyLab::parabolic(const std::vector<int>& J) {
  std::lock_guard<std::mutex> lock(par_mu_);
  uint64_t m = mask_of(J);
  auto it = par_.find(m);
  if (it != par_.end()) return *it->second;
  auto ctx = std::make_unique<ParabolicCtx>();
  ctx->P = make_parabolic(E_, J);
  ctx->lab = std::make_unique<ConjugacyLab>(*ctx->P->E, opt_);
  return *par_.emplace(m, std::move(ctx)).first->second;
}

std::vector<Elt> elements_up_to(const Engine& E, int L) {
  std::vector<Elt> out = E.omega_reps();
  absl::flat_hash_set<Elt> seen(out.begin(), out.end());
  for (size_t q = 0; q < out.size(); ++q) {
    Elt y = out[q];
    int l = E.length(y);
    if (l >= L) continue;
    for (int s = 0; s < E.num_S(); ++s) {
      if (E.left_descent(s, y)) continue;
      Elt y2 = E.smul_left(s, y);
      if (seen.insert(y2).second) out.push_back(y2);
    }
  }
  std::sort(out.begin(), out.end(), [&E](const Elt& a, const Elt& b) { return E.less(a, b); });
  return out;
}

// ---- partial conjugation ----

std::vector<Elt> WJ_group(const Engine& E, const std::vector<int>& J) {
  std::vector<Elt> out{E.identity()};
  absl::flat_hash_set<Elt> seen{E.identity()};
  for (size_t q = 0; q < out.size(); ++q)
    for (int j : J) {
      Elt y = E.smul_right(out[q], j);
      if (seen.insert(y).second) out.push_back(y);
      if (out.size() > 500000) throw std::invalid_argument("W_J is not finite");
    }
  std::sort(out.begin(), out.end(), [&E](const Elt& a, const Elt& b) { return E.less(a, b); });
  return out;
}

bool in_W_K(const Engine& E, const Elt& x, const std::vector<int>& K) {
  return E.coset_min(x, K, true) == E.identity();
}

std::vector<int> I_of(const Engine& E, const std::vector<int>& J, const Elt& w) {
  if (!E.in_min_coset(w, J, true)) throw std::invalid_argument("I(J, w) needs w in ^J W~");
  std::vector<int> K = J;
  for (;;) {
    std::vector<int> K2;
    for (int s : K) {
      Elt c = E.conj(w, E.S(s));
      for (int t : K)
        if (E.S(t) == c) {
          K2.push_back(s);
          break;
        }
    }
    if (K2.size() == K.size()) return K;
    K = std::move(K2);
  }
}

namespace {
struct Decomp {
  bool ok = false;
  Elt u, x;
  std::vector<int> I;
};
Decomp decompose(const Engine& E, const Elt& y, const std::vector<int>& J) {
  Decomp d;
  d.u = E.coset_min(y, J, true);
  d.x = E.mul(y, E.inv(d.u));
  d.I = I_of(E, J, d.u);
  d.ok = in_W_K(E, d.x, d.I);
  return d;
}
}  // namespace

PartialResult partial_min(const Engine& E, const Elt& w, const std::vector<int>& J) {
  std::vector<Elt> nodes{w};
  std::vector<int> parent{-1}, via{-1};
  absl::flat_hash_set<Elt> seen{w};
  int best = -1, best_len = 0;
  Decomp best_d;
  for (size_t q = 0; q < nodes.size(); ++q) {
    const Elt y = nodes[q];
    const int l = E.length(y);
    Decomp d = decompose(E, y, J);
    if (d.ok && (best < 0 || l < best_len)) {
      best = static_cast<int>(q);
      best_len = l;
      best_d = d;
    }
    for (int s : J) {
      Elt y2 = E.sconj(s, y);
      if (E.length(y2) <= l && seen.insert(y2).second) {
        nodes.push_back(y2);
        parent.push_back(static_cast<int>(q));
        via.push_back(s);
      }
    }
  }
  if (best < 0) throw std::logic_error("no element of the form x u reachable by J-conjugation");
  PartialResult r;
  r.u = best_d.u;
  r.x = best_d.x;
  r.I = best_d.I;
  r.path.start = w;
  for (int q = best; parent[q] >= 0; q = parent[q]) r.path.steps.push_back({via[q], nodes[q]});
  std::reverse(r.path.steps.begin(), r.path.steps.end());
  r.path.end = nodes[best];
  return r;
}

std::vector<Elt> partial_coset_elements(const Engine& E, const Elt& w, const std::vector<int>& J) {
  std::vector<Elt> us;
  for (const auto& h : WJ_group(E, J)) {
    Decomp d = decompose(E, E.conj(h, w), J);
    if (d.ok && std::find(us.begin(), us.end(), d.u) == us.end()) us.push_back(d.u);
  }
  return us;
}

bool is_min_in_WJ_orbit(const Engine& E, const Elt& w, const std::vector<int>& J) {
  const int l = E.length(w);
  for (const auto& h : WJ_group(E, J))
    if (E.length(E.conj(h, w)) < l) return false;
  return true;
}

std::optional<Elt> fact_h_search(const Engine& E, const std::vector<int>& I, const std::vector<int>& J,
                                 const Elt& w, const Elt& u) {
  std::vector<int> K = I_of(E, J, u);
  for (const auto& h : WJ_group(E, J)) {
    if (!E.in_min_coset(h, K, true) || !E.in_min_coset(h, I, false)) continue;
    bool into = true;
    for (int s : I) {
      Elt c = E.conj(h, E.S(s));
      bool hit = false;
      for (int t : K) hit = hit || E.S(t) == c;
      if (!hit) into = false;
    }
    if (into && E.conj(h, w) == u) return h;
  }
  return std::nullopt;
}

namespace {
// subsets of S generating a finite W_J: each component keeps at least one generator out
std::vector<std::vector<int>> finite_subsets(const Engine& E) {
  const int nS = E.num_S();
  std::vector<std::vector<int>> out;
  for (uint32_t m = 0; m < (1u << nS); ++m) {
    std::vector<int> J;
    for (int i = 0; i < nS; ++i)
      if (m >> i & 1) J.push_back(i);
    bool finite = true;
    try {
      WJ_group(E, J);
    } catch (const std::invalid_argument&) {
      finite = false;
    }
    if (finite) out.push_back(J);
  }
  return out;
}

std::vector<std::vector<int>> subsets_of(const std::vector<int>& J) {
  std::vector<std::vector<int>> out;
  for (uint32_t m = 0; m < (1u << J.size()); ++m) {
    std::vector<int> I;
    for (size_t i = 0; i < J.size(); ++i)
      if (m >> i & 1) I.push_back(J[i]);
    out.push_back(I);
  }
  return out;
}

void note(ScanReport& r, const std::string& s) {
  ++r.failures;
  if (r.witnesses.size() < 10) r.witnesses.push_back(s);
}
}  // namespace

ScanReport scan_fact(ConjugacyLab& lab, int max_len) {
  const Engine& E = lab.engine();
  ScanReport rep;
  auto Js = finite_subsets(E);
  for (const auto& w : elements_up_to(E, max_len)) {
    for (const auto& J : Js) {
      if (J.empty() || !is_min_in_WJ_orbit(E, w, J)) continue;
      std::vector<Elt> orbit;
      for (const auto& h : WJ_group(E, J)) orbit.push_back(E.conj(h, w));
      std::vector<Elt> us;
      for (const auto& y : orbit)
        if (E.length(y) == E.length(w) && E.in_min_coset(y, J, true) &&
            std::find(us.begin(), us.end(), y) == us.end())
          us.push_back(y);
      for (const auto& I : subsets_of(J)) {
        if (!E.in_min_coset(w, I, true)) continue;
        if (I_of(E, I, w).size() != I.size()) continue;  // w I w^-1 = I
        for (const auto& u : us) {
          ++rep.checked;
          if (!fact_h_search(E, I, J, w, u))
            note(rep, fmt::format("w={} u={} I={} J={}", E.format(w), E.format(u), fmt::join(I, ","),
                                  fmt::join(J, ",")));
        }
      }
    }
  }
  return rep;
}

ScanReport scan_min_in_wj(ConjugacyLab& lab) {
  const Engine& E = lab.engine();
  ScanReport rep;
  const auto omegas = E.omega_reps();
  for (const auto& I : finite_subsets(E)) {
    if (static_cast<int>(I.size()) == E.num_S()) continue;
    const auto WI = WJ_group(E, I);
    for (const auto& d : omegas) {
      bool normalizes = true;
      for (int s : I) {
        Elt c = E.conj(d, E.S(s));
        bool hit = false;
        for (int t : I) hit = hit || E.S(t) == c;
        if (!hit) normalizes = false;
      }
      if (!normalizes) continue;
      for (const auto& x : WI) {
        Elt w = E.mul(x, d);
        int l = E.length(w);
        bool wi_min = true;
        for (const auto& h : WI)
          if (E.length(E.conj(h, w)) < l) wi_min = false;
        if (!wi_min) continue;
        ++rep.checked;
        if (!lab.is_minimal(w)) note(rep, fmt::format("w={} I={}", E.format(w), fmt::join(I, ",")));
      }
    }
  }
  return rep;
}

ScanReport scan_partial(const Engine& E, int max_len) {
  ScanReport rep;
  const int n0 = E.num_finite_S();
  std::vector<int> S0(n0);
  for (int i = 0; i < n0; ++i) S0[i] = i;
  for (const auto& w : elements_up_to(E, max_len))
    for (const auto& J : subsets_of(S0)) {
      ++rep.checked;
      PartialResult r = partial_min(E, w, J);
      std::string where = fmt::format("w={} J={}", E.format(w), fmt::join(J, ","));
      if (!path_valid(E, r.path)) note(rep, where + ": path invalid");
      for (const auto& st : r.path.steps)
        if (!contains(J, st.s)) note(rep, where + ": step outside J");
      if (E.mul(r.x, r.u) != r.path.end) note(rep, where + ": end is not x u");
      if (!E.in_min_coset(r.u, J, true)) note(rep, where + ": u not in ^J W");
      if (!in_W_K(E, r.x, r.I)) note(rep, where + ": x not in W_I");
      if (!is_min_in_WJ_orbit(E, r.path.end, J)) note(rep, where + ": end not minimal in its W_J-orbit");
      auto us = partial_coset_elements(E, w, J);
      if (us.size() != 1 || us[0] != r.u) note(rep, where + fmt::format(": {} coset elements", us.size()));
    }
  return rep;
}

// ---- ellipticity and the Bernstein datum ----

bool is_elliptic(const Engine& E, const Elt& w, const std::vector<int>& J) {
  if (!E.in_WJ(w.g, J)) throw std::invalid_argument("p(w) is not in W_J x| Gamma_J");
  const RootDatum& d = E.datum();
  for (const auto& v : E.fixed_dirs(w.g))
    for (int j : J)
      if (qpair(v, d.cocov[d.simples[j]]) != 0) return false;
  return true;
}

std::optional<int> pair_equivalent(ConjugacyLab& lab, const std::vector<int>& J, const Elt& rep,
                                   const std::vector<int>& Jp, const Elt& repp) {
  const Engine& E = lab.engine();
  const RootDatum& d = E.datum();
  if (J.size() != Jp.size()) return std::nullopt;
  QVec nu = E.newton_point(rep);
  if (nu != E.newton_point(repp)) return std::nullopt;
  if (dominant_rep(d, nu).vec != nu) throw std::invalid_argument("Newton point is not dominant");
  if (!E.in_WJ(rep.g, J) || !E.in_WJ(repp.g, Jp)) throw std::invalid_argument("representative outside W~_J");
  std::vector<int> K;
  for (int i = 0; i < d.num_simples(); ++i)
    if (qpair(nu, d.cocov[d.simples[i]]) == 0) K.push_back(i);
  ParabolicCtx& pc = lab.parabolic(Jp);
  ExactKey target = pc.lab->exact_key(pc.P->to_J(repp));
  for (int x = 0; x < E.group_size(); ++x) {
    if (!E.in_WJ(x, K)) continue;
    bool maps = true;
    for (int j : J) {
      int r = E.groot(x, d.simples[j]);
      bool hit = false;
      for (int i : Jp) hit = hit || d.simples[i] == r;
      if (!hit) maps = false;
    }
    if (!maps) continue;
    Elt y = E.conj(E.from_g(x), rep);
    if (pc.P->contains(y) && pc.lab->exact_key(pc.P->to_J(y)) == target) return x;
  }
  return std::nullopt;
}

std::vector<int> roots_in_J(const RootDatum& d, const std::vector<int>& J) {
  std::vector<int> out;
  for (int a : d.pos_roots) {
    bool in = true;
    for (int k = 0; k < d.num_simples(); ++k)
      if (d.simple_coeffs[a][k] != 0 && !contains(J, k)) in = false;
    if (in) out.push_back(a);
  }
  return out;
}

int64_t pair_2rho(const RootDatum& d, const IVec& x) {
  int64_t s = 0;
  for (int a : d.pos_roots) s += d.pair(x, a);
  return s;
}

int64_t pair_2rho_J(const RootDatum& d, const IVec& x, const std::vector<int>& J) {
  int64_t s = 0;
  for (int a : roots_in_J(d, J)) s += d.pair(x, a);
  return s;
}

Q pair_2rho(const RootDatum& d, const QVec& x) {
  Q s = 0;
  for (int a : d.pos_roots) s += qpair(x, d.cocov[a]);
  return s;
}

nlohmann::json bernstein_json(const Engine& E, const BernsteinDatum& b) {
  auto qv = [](const QVec& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& q : v) a.push_back(q.get_str());
    return a;
  };
  return {{"class", key_json(E, b.cls)},
          {"w_prime", E.format(b.w_prime)},
          {"e_prime", qv(b.e_prime)},
          {"nu_prime", qv(b.nu_prime)},
          {"v", qv(b.v)},
          {"z", E.format(E.from_g(b.z))},
          {"J", b.J},
          {"w0", E.format(b.w0)},
          {"lJ_w0", b.lJ_w0},
          {"lJ_minimal", b.lJ_minimal},
          {"elliptic", b.elliptic}};
}

BernsteinDatum bernstein_datum(ConjugacyLab& lab, int class_id) {
  const Engine& E = lab.engine();
  const RootDatum& d = E.datum();
  const int n = E.rank();
  BernsteinDatum b;
  b.cls = lab.key(class_id);
  bool found = false;
  for (const auto& w : lab.class_mins(class_id)) {
    auto e = E.regular_point(E.fixed_space(w), Region::AlcoveClosure);
    if (e) {
      b.w_prime = w;
      b.e_prime = *e;
      found = true;
      break;
    }
  }
  if (!found)
    throw std::runtime_error("no minimal element has a regular point of V_w in the closure of C0 (search bound too small?)");
  b.nu_prime = E.newton_point(b.w_prime);

  // v = nu' + eps r with r regular in V^{p(w')}; eps small enough that v only refines nu'
  QMat dirs = E.fixed_dirs(b.w_prime.g);
  QVec r(n, Q(0));
  for (int k = 2;; ++k) {
    r.assign(n, Q(0));
    Q c = 1;
    for (const auto& dv : dirs) {
      for (int i = 0; i < n; ++i) r[i] += c * dv[i];
      c *= k;
    }
    bool regular = true;
    for (int a = 0; a < d.num_roots() && regular; ++a) {
      if (qpair(r, d.cocov[a]) != 0) continue;
      for (const auto& dv : dirs)
        if (qpair(dv, d.cocov[a]) != 0) regular = false;
    }
    if (regular) break;
    if (k > 1000) throw std::logic_error("no regular direction found");
  }
  Q eps = 1;
  for (int a = 0; a < d.num_roots(); ++a) {
    Q x = qpair(b.nu_prime, d.cocov[a]), y = qpair(r, d.cocov[a]);
    if (x != 0 && y != 0) {
      Q bound = abs(x) / (2 * abs(y));
      if (bound < eps) eps = bound;
    }
  }
  b.v = b.nu_prime;
  for (int i = 0; i < n; ++i) b.v[i] += eps * r[i];

  QVec vb = b.v;
  int z = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (int i = 0; i < d.num_simples(); ++i) {
      int a = d.simples[i];
      Q p = qpair(vb, d.cocov[a]);
      if (p < 0) {
        for (int k = 0; k < n; ++k) vb[k] -= p * Q(static_cast<long>(d.roots[a][k]));
        z = E.gmul(E.simple_g(i), z);
        changed = true;
      }
    }
  }
  b.z = z;
  QVec znu = E.act(E.from_g(z), b.nu_prime);
  if (znu != b.cls.nu) throw std::logic_error("z does not carry the Newton point of w' to nu_O");
  for (int i = 0; i < d.num_simples(); ++i) {
    int a = d.simples[i];
    if (qpair(vb, d.cocov[a]) == 0 && qpair(znu, d.cocov[a]) == 0) b.J.push_back(i);
  }
  b.w0 = E.conj(E.from_g(z), b.w_prime);
  if (!E.in_WJ(b.w0.g, b.J)) throw std::logic_error("z w' z^-1 is not in W~_J");
  ParabolicCtx& pc = lab.parabolic(b.J);
  Elt y = pc.P->to_J(b.w0);
  b.lJ_w0 = pc.P->E->length(y);
  b.lJ_minimal = b.lJ_w0 == pc.lab->min_length(pc.lab->class_id(y));
  b.elliptic = is_elliptic(E, b.w0, b.J);
  return b;
}

SpecialForm special_form(ConjugacyLab& lab, const BernsteinDatum& b) {
  const Engine& E = lab.engine();
  const RootDatum& d = E.datum();
  const int n = E.rank();
  SpecialForm f;
  auto fail = [&](const std::string& s) { f.audit_failures.push_back(s); };
  f.e = E.act(E.from_g(b.z), b.e_prime);
  for (int i : b.J)
    if (qpair(f.e, d.cocov[d.simples[i]]) == 0) f.Je.push_back(i);

  const auto RJ = roots_in_J(d, b.J);
  const auto RJe = roots_in_J(d, f.Je);
  for (int a = 0; a < d.num_roots(); ++a) {
    Q p = qpair(f.e, d.cocov[a]);
    if (abs(p) > 1) fail(fmt::format("|<e, a^vee>| > 1 for root {}", a));
    if (p == 0 && d.positive[a] && !contains(RJe, a)) fail(fmt::format("e vanishes on root {} outside R_Je", a));
  }
  for (int a : RJ)
    if (qpair(f.e, d.cocov[a]) < 0) fail(fmt::format("<e, a^vee> < 0 for a in R_J^+ ({})", a));

  const Elt& w0 = b.w0;
  bool have = false;
  Decomp best;
  Elt best_y;
  for (const auto& h : WJ_group(E, f.Je)) {
    Elt y = E.conj(h, w0);
    Decomp dd = decompose(E, y, f.Je);
    if (!dd.ok) continue;
    if (!have || E.less(y, best_y)) {
      have = true;
      best = dd;
      best_y = y;
    }
  }
  if (!have) throw std::logic_error("no element of the form u x1 in the W_Je-class of w0");
  const Elt u = best.u;
  f.I = best.I;
  f.w1t = best_y;
  f.lambda = E.lam_vec(u);
  f.w1 = E.from_g(u.g);
  f.x1 = E.mul(E.mul(E.inv(u), best.x), u);
  if (E.mul(u, f.x1) != f.w1t || !in_W_K(E, f.x1, f.I)) fail("w1~ is not t^lambda w1 x1 with x1 in W_I");
  if (!E.in_WJ(u.g, b.J)) fail("w1 is not in W_J x| Gamma_J");
  if (!E.in_min_coset(u, b.J, true)) fail("t^lambda w1 is not in ^J W~");

  QVec nuO = b.cls.nu;
  QVec w1e = E.act(f.w1t, f.e);
  for (int a : d.pos_roots) {
    int64_t la = d.pair(f.lambda, a);
    if (qpair(w1e, d.cocov[a]) <= -1) fail(fmt::format("<w1~(e), a^vee> <= -1 for root {}", a));
    if (la < -1) fail(fmt::format("<lambda, a^vee> < -1 for root {}", a));
    if (contains(RJ, a) && la < 0) fail(fmt::format("<lambda, a^vee> < 0 on R_J^+ root {}", a));
    if (la == -1 && qpair(f.e, d.cocov[a]) >= 0) fail(fmt::format("<lambda, a^vee> = -1 but <e, a^vee> >= 0 ({})", a));
  }

  ParabolicCtx& pc = lab.parabolic(b.J);
  Elt yJ = pc.P->to_J(f.w1t);
  if (pc.P->E->length(yJ) != pc.lab->min_length(pc.lab->class_id(yJ))) fail("w1~ is not l_J-minimal");

  Elt zi = E.from_g(E.ginv(b.z));
  Elt zz = E.from_g(b.z);
  Q base = pair_2rho(d, nuO) + Q(static_cast<long>(pair_2rho_J(d, f.lambda, b.J))) -
           Q(E.finite_length(f.w1.g));
  if (Q(E.length(E.mul(E.mul(zi, u), zz))) != base) fail("length formula for z^-1 t^lambda w1 z fails");
  if (Q(E.length(E.mul(E.mul(zi, f.w1t), zz))) != base + Q(E.length(f.x1)))
    fail("length formula for z^-1 t^lambda w1 x1 z fails");
  (void)n;
  return f;
}

}  // namespace ahk
