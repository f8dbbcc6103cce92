#include "affhecke/adlv.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace ahk {

namespace {

Elt with_delta(const Engine& E, const Elt& w, int delta) {
  if (delta < 0 || delta >= E.gamma_size()) throw std::invalid_argument("delta must index Gamma");
  return E.mul(w, E.from_g(delta));
}

std::string q_str(const Q& q) { return q.get_str(); }

}  // namespace

nlohmann::json spec_json(const SigmaClassSpec& s) {
  nlohmann::json j = {{"nu_bar", qvec_str(s.nu_bar)}, {"kappa", to_string(s.kappa)}};
  if (s.levi) j["levi"] = *s.levi;
  else j["levi"] = "G";
  return j;
}

std::vector<SigmaClassSpec> support_specs(Cocenter& cc, const Elt& w, int delta) {
  ConjugacyLab& lab = cc.lab();
  std::vector<SigmaClassSpec> out;
  for (const auto& [id, p] : cc.class_polynomials(with_delta(cc.engine(), w, delta))) {
    ConjClassKey k = lab.key(id);
    bool seen = false;
    for (const auto& s : out)
      if (s.nu_bar == k.nu && s.kappa == k.kappa) seen = true;
    if (!seen) out.push_back({k.nu, k.kappa, std::nullopt});
  }
  return out;
}

DimensionReport adlv_dimension(Cocenter& cc, const Elt& w, const SigmaClassSpec& spec, int delta) {
  if (spec.levi) throw std::invalid_argument("adlv_dimension needs a spec for G");
  const Engine& E = cc.engine();
  ConjugacyLab& lab = cc.lab();
  DimensionReport r;
  r.w = w;
  r.delta = delta;
  r.spec = spec;
  Elt wd = with_delta(E, w, delta);
  Q shift = pair_2rho(E.datum(), spec.nu_bar);
  for (const auto& [id, p] : cc.class_polynomials(wd)) {
    ConjClassKey k = lab.key(id);
    if (k.nu != spec.nu_bar || k.kappa != spec.kappa) continue;
    Contributor c;
    c.cls = id;
    c.len_O = k.min_len;
    c.deg = p.degree();
    c.value = Q(E.length(w) + k.min_len + c.deg) / 2 - shift;
    if (!r.dim || c.value > *r.dim) r.dim = c.value;
    r.contributors.push_back(c);
  }
  return r;
}

nlohmann::json dimension_json(Cocenter& cc, const DimensionReport& r) {
  const Engine& E = cc.engine();
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : r.contributors)
    cs.push_back({{"class", key_json(E, cc.lab().key(c.cls))},
                  {"len_O", c.len_O},
                  {"deg", c.deg},
                  {"value", q_str(c.value)}});
  return {{"w", E.format(r.w)},
          {"delta", r.delta},
          {"spec", spec_json(r.spec)},
          {"contributors", cs},
          {"dimension", r.dim ? nlohmann::json(q_str(*r.dim)) : nlohmann::json("empty")}};
}

EmptinessReport emptiness_check(Cocenter& cc, const Elt& w, const std::vector<int>& J, int z,
                                const SigmaClassSpec& spec, int delta) {
  const Engine& E = cc.engine();
  Elt wd = with_delta(E, w, delta);
  if (!spec.levi) throw std::invalid_argument("emptiness_check needs a spec for M_J");
  std::vector<int> L = *spec.levi, JJ = J;
  std::sort(L.begin(), L.end());
  std::sort(JJ.begin(), JJ.end());
  if (L != JJ) throw std::invalid_argument("spec Levi differs from J");
  if (z < 0 || z >= E.group_size() || E.gamma_of(z) != 0 || !E.is_p_alcove(wd, J, z))
    throw std::invalid_argument(fmt::format("{} is not a (J, z)-alcove element", E.format(wd)));
  EmptinessReport r;
  r.w = w;
  r.J = J;
  r.z = z;
  r.delta = delta;
  const Parabolic& P = cc.parabolic_data(J);
  Elt y = P.to_J(E.conj(E.from_g(z), wd));
  Cocenter& cj = cc.parabolic(J);
  r.kappa_J = cj.engine().kappa(y);
  r.empty = r.kappa_J != spec.kappa;
  // the mechanism behind the criterion: a nonempty variety needs some O' with f^J != 0 matching b
  for (const auto& [id, p] : cj.class_polynomials(y)) {
    ConjClassKey k = cj.lab().key(id);
    if (k.nu == spec.nu_bar && k.kappa == spec.kappa)
      r.matching_classes.push_back(cj.engine().format(k.canonical_min));
  }
  r.audit_ok = !r.empty || r.matching_classes.empty();
  return r;
}

nlohmann::json emptiness_json(Cocenter& cc, const EmptinessReport& r) {
  const Engine& E = cc.engine();
  return {{"w", E.format(r.w)},
          {"J", r.J},
          {"z", E.format(E.from_g(r.z))},
          {"delta", r.delta},
          {"kappa_J", to_string(r.kappa_J)},
          {"verdict", r.empty ? "empty" : "undecided"},
          {"audit_ok", r.audit_ok},
          {"matching_classes", r.matching_classes}};
}

}  // namespace ahk
