#include "affhecke/cocenter.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace ahk {

namespace {

nlohmann::json xi_json(const XiPoly& p) { return nlohmann::json(p.c); }

template <typename V, typename F>
nlohmann::json entries_json(ConjugacyLab& lab, const V& m, F&& poly) {
  const Engine& E = lab.engine();
  std::vector<std::pair<ConjClassKey, const typename V::mapped_type*>> rows;
  for (const auto& [id, p] : m) rows.emplace_back(lab.key(id), &p);
  std::sort(rows.begin(), rows.end(),
            [&E](const auto& a, const auto& b) { return E.less(a.first.canonical_min, b.first.canonical_min); });
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [k, p] : rows) out.push_back(poly(key_json(E, k), *p));
  return {{"entries", out}};
}

std::string ids_str(const std::vector<int>& J) { return fmt::format("[{}]", fmt::join(J, ",")); }

void check_palcove(const Engine& E, const Elt& w, const std::vector<int>& J, int z) {
  for (int j : J)
    if (j < 0 || j >= E.num_finite_S()) throw std::invalid_argument("J must index simple roots");
  if (z < 0 || z >= E.group_size() || E.gamma_of(z) != 0) throw std::invalid_argument("z must lie in W0");
  auto reps = E.min_coset_reps_W0(J, true);
  if (std::find(reps.begin(), reps.end(), z) == reps.end())
    throw std::invalid_argument("z is not minimal in W_J z");
  if (!E.is_p_alcove(w, J, z))
    throw std::invalid_argument(fmt::format("{} is not a (J, z)-alcove element for J={}", E.format(w), ids_str(J)));
}

}  // namespace

CocenterVector to_cocenter(const ClassPolys& f) {
  CocenterVector v;
  for (const auto& [id, p] : f) v[id] = p.to_laurent();
  return v;
}

nlohmann::json classpolys_json(ConjugacyLab& lab, const ClassPolys& f) {
  return entries_json(lab, f, [](nlohmann::json k, const XiPoly& p) {
    return nlohmann::json{{"class", std::move(k)}, {"poly_xi", xi_json(p)}};
  });
}

nlohmann::json cocenter_json(ConjugacyLab& lab, const CocenterVector& v) {
  return entries_json(lab, v, [](nlohmann::json k, const LaurentPoly& p) {
    return nlohmann::json{{"class", std::move(k)}, {"poly_v", p.to_json()}};
  });
}

Cocenter::Cocenter(ConjugacyLab& lab, uint64_t pivot_seed) : lab_(lab), H_(lab.engine()) {
  if (pivot_seed != 0) rng_ = std::make_unique<std::mt19937_64>(pivot_seed);
}

Cocenter::~Cocenter() = default;

ClassPolys Cocenter::class_polynomials(const Elt& w) {
  if (auto it = memo_.find(w); it != memo_.end()) return it->second;
  const Engine& E = engine();
  std::vector<Elt> visited;
  auto pv = lab_.find_pivot(w, rng_.get(), &visited);
  ClassPolys f;
  if (!pv) {
    f[lab_.class_id(w)] = XiPoly{{1}};
  } else {
    Elt sw = E.smul_left(pv->s, pv->w1);
    Elt sws = E.smul_right(sw, pv->s);
    f = class_polynomials(sws);
    for (const auto& [id, p] : class_polynomials(sw)) {
      f[id] += p.times_xi();
      if (f[id].is_zero()) f.erase(id);
    }
  }
  memo_.emplace(w, f);
  // every element of the explored orbit has the same image in the cocenter
  if (!rng_)
    for (const auto& v : visited) memo_.emplace(v, f);
  return f;
}

CocenterVector Cocenter::reduce_T(const HeckeElt& h) {
  CocenterVector out;
  for (const auto& [w, p] : h) {
    for (const auto& [id, xp] : class_polynomials(w)) {
      out[id] += p * xp.to_laurent();
      if (out[id].is_zero()) out.erase(id);
    }
  }
  return out;
}

Cocenter& Cocenter::parabolic(const std::vector<int>& J) {
  std::vector<int> key = J;
  std::sort(key.begin(), key.end());
  auto it = par_.find(key);
  if (it != par_.end()) return *it->second;
  ConjugacyLab& pl = *lab_.parabolic(key).lab;
  return *par_.emplace(key, std::make_unique<Cocenter>(pl)).first->second;
}

ClassPolys Cocenter::class_polynomials_J(const Elt& w, const std::vector<int>& J) {
  const Parabolic& P = parabolic_data(J);
  if (!P.contains(w)) throw std::invalid_argument(fmt::format("{} is not in W~_J", engine().format(w)));
  return parabolic(J).class_polynomials(P.to_J(w));
}

std::vector<std::pair<Elt, ClassPolys>> Cocenter::memo_entries() const {
  std::vector<std::pair<Elt, ClassPolys>> out(memo_.begin(), memo_.end());
  const Engine& E = engine();
  std::sort(out.begin(), out.end(), [&E](const auto& a, const auto& b) { return E.less(a.first, b.first); });
  return out;
}

TheoremAReport verify_theorem_A(Cocenter& cc, const Elt& w, const std::vector<int>& J, int z) {
  const Engine& E = cc.engine();
  check_palcove(E, w, J, z);
  TheoremAReport r;
  r.w = w;
  r.J = J;
  r.z = z;
  Elt ze = E.from_g(z);
  r.y = E.conj(ze, w);
  const Parabolic& P = cc.parabolic_data(J);
  Cocenter& cj = cc.parabolic(J);
  for (const auto& [id, p] : cj.class_polynomials(P.to_J(r.y))) {
    Elt rep = cj.lab().key(id).canonical_min;
    HeckeElt img = cc.hecke().embed_parabolic(P, rep);
    for (const auto& [x, c] : img) add_to(r.witness, x, c * p.to_laurent());
  }
  r.lhs = cc.reduce_T(cc.hecke().T(w));
  r.rhs = cc.reduce_T(r.witness);
  r.pass = r.lhs == r.rhs;
  if (!r.pass) r.failures.push_back("reduce_T(T_w) differs from reduce_T(witness)");
  return r;
}

TheoremBReport verify_theorem_B(Cocenter& cc, int class_id) {
  ConjugacyLab& lab = cc.lab();
  TheoremBReport r;
  r.datum = bernstein_datum(lab, class_id);
  if (!r.datum.lJ_minimal) r.failures.push_back("w0 is not l_J-minimal");
  if (!r.datum.elliptic) r.failures.push_back("w0 is not elliptic in W~_J");
  r.form = special_form(lab, r.datum);
  for (const auto& f : r.form.audit_failures) r.failures.push_back(f);
  const Hecke& H = cc.hecke();
  r.bernstein_side = H.embed_special(r.form.lambda, r.form.w1, r.form.x1, r.datum.J);
  const Parabolic& P = cc.parabolic_data(r.datum.J);
  r.embed_agrees = equal(H.embed_parabolic(P, P.to_J(r.form.w1t)), r.bernstein_side);
  if (!r.embed_agrees) r.failures.push_back("embedding of T^J_{w1~} differs from the special form");
  r.lhs = cc.reduce_T(H.T(lab.key(class_id).canonical_min));
  r.rhs = cc.reduce_T(r.bernstein_side);
  if (r.lhs != r.rhs) r.failures.push_back("cocenter images differ");
  r.pass = r.failures.empty();
  return r;
}

TheoremCReport verify_theorem_C(Cocenter& cc, const Elt& w, const std::vector<int>& J, int z) {
  const Engine& E = cc.engine();
  check_palcove(E, w, J, z);
  TheoremCReport r;
  r.w = w;
  r.J = J;
  r.z = z;
  r.y = E.conj(E.from_g(z), w);
  r.lhs = cc.class_polynomials(w);
  const Parabolic& P = cc.parabolic_data(J);
  Cocenter& cj = cc.parabolic(J);
  for (const auto& [id, p] : cj.class_polynomials(P.to_J(r.y))) {
    r.j_side.emplace_back(id, p);
    int parent = cc.lab().class_id(P.from_J(cj.lab().key(id).canonical_min));
    r.rhs[parent] += p;
    if (r.rhs[parent].is_zero()) r.rhs.erase(parent);
  }
  r.pass = r.lhs == r.rhs;
  if (!r.pass) r.failures.push_back("f_{w,O} differs from the sum of f^J over O' in O");
  return r;
}

nlohmann::json report_json(Cocenter& cc, const TheoremAReport& r) {
  const Engine& E = cc.engine();
  return {{"theorem", "A"},          {"w", E.format(r.w)},
          {"J", r.J},                {"z", E.format(E.from_g(r.z))},
          {"y", E.format(r.y)},      {"witness", cc.hecke().to_json(r.witness)},
          {"lhs", cocenter_json(cc.lab(), r.lhs)}, {"rhs", cocenter_json(cc.lab(), r.rhs)},
          {"pass", r.pass},          {"failures", r.failures}};
}

nlohmann::json report_json(Cocenter& cc, const TheoremBReport& r) {
  const Engine& E = cc.engine();
  return {{"theorem", "B"},
          {"datum", bernstein_json(E, r.datum)},
          {"e", qvec_str(r.form.e)},
          {"J_e", r.form.Je},
          {"w1_tilde", E.format(r.form.w1t)},
          {"lambda", r.form.lambda},
          {"w1", E.format(r.form.w1)},
          {"x1", E.format(r.form.x1)},
          {"bernstein_side", cc.hecke().to_json(r.bernstein_side)},
          {"lhs", cocenter_json(cc.lab(), r.lhs)},
          {"rhs", cocenter_json(cc.lab(), r.rhs)},
          {"embed_agrees", r.embed_agrees},
          {"pass", r.pass},
          {"failures", r.failures}};
}

nlohmann::json report_json(Cocenter& cc, const TheoremCReport& r) {
  const Engine& E = cc.engine();
  Cocenter& cj = cc.parabolic(r.J);
  const Engine& EJ = cj.engine();
  nlohmann::json js = nlohmann::json::array();
  for (const auto& [id, p] : r.j_side)
    js.push_back({{"class", key_json(EJ, cj.lab().key(id))}, {"poly_xi", xi_json(p)}});
  return {{"theorem", "C"},       {"w", E.format(r.w)},
          {"J", r.J},             {"z", E.format(E.from_g(r.z))},
          {"y", E.format(r.y)},   {"lhs", classpolys_json(cc.lab(), r.lhs)},
          {"rhs", classpolys_json(cc.lab(), r.rhs)},
          {"j_side", js},         {"pass", r.pass},
          {"failures", r.failures}};
}

std::vector<PAlcoveTriple> palcove_triples(const Engine& E, int max_len, bool proper_only) {
  const int r = E.num_finite_S();
  std::vector<std::pair<std::vector<int>, std::vector<int>>> jz;
  for (uint32_t m = 0; m < (1u << r); ++m) {
    if (proper_only && m + 1 == (1u << r)) continue;
    std::vector<int> J;
    for (int i = 0; i < r; ++i)
      if (m >> i & 1) J.push_back(i);
    jz.emplace_back(J, E.min_coset_reps_W0(J, true));
  }
  std::vector<PAlcoveTriple> out;
  for (const auto& w : elements_up_to(E, max_len))
    for (const auto& [J, zs] : jz)
      for (int z : zs)
        if (E.is_p_alcove(w, J, z)) out.push_back({w, J, z});
  return out;
}

}  // namespace ahk
