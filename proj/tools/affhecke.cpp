#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "affhecke/adlv.hpp"
#include "affhecke/cache.hpp"
#include "affhecke/cocenter.hpp"
#include "json.hpp"

using namespace ahk;
using nlohmann::json;

namespace {

enum Exit { kPass = 0, kUsage = 1, kVerifyFail = 2, kInternal = 3 };

struct Common {
  std::string datum = "preset:GL3";
  std::string cache_dir;
  bool no_cache = false;
  std::string out;
  std::string format;  // empty: the command's default
  int threads = 1;
  uint64_t seed = 0;
};

struct Args {
  std::vector<std::string> elts;
  int max_len = -1;
  std::string J;
  std::string z = "1";
  std::string b;
  std::string input;
  int delta = 0;
  bool oracle = false;
  bool proper = false;
};

// Everything a command needs; the cache is loaded lazily and saved on exit.
struct Session {
  explicit Session(const Common& c)
      : common(c), datum(load_datum(c.datum)), E(datum), lab(E), cc(lab, c.seed) {
    if (!c.no_cache && c.seed == 0) {
      cache = std::make_unique<DiskCache>(c.cache_dir.empty() ? default_cache_dir() : c.cache_dir, datum);
      CacheStats st = cache->load(cc);
      if (st.corrupt > 0) std::cerr << fmt::format("cache: skipped {} corrupt entries in {}\n", st.corrupt, cache->path());
      if (st.stale > 0) std::cerr << fmt::format("cache: {} belongs to another datum, ignored\n", cache->path());
    }
  }
  void save() {
    if (cache) cache->save(cc);
  }
  Common common;
  RootDatum datum;
  Engine E;
  ConjugacyLab lab;
  Cocenter cc;
  std::unique_ptr<DiskCache> cache;
};

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream f(c.out, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + c.out);
  f << text;
  if (!text.empty() && text.back() != '\n') f << "\n";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  auto line = [&out](const std::vector<std::string>& r) {
    for (size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + csv_field(r[i]);
    out += "\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

std::vector<int> parse_J(const std::string& s) {
  std::vector<int> J;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) J.push_back(std::stoi(tok));
  std::sort(J.begin(), J.end());
  return J;
}

int parse_z(const Engine& E, const std::string& s) {
  Elt z = E.parse(s);
  if (z.lam != Vec8{} || E.gamma_of(z.g) != 0) throw std::invalid_argument("z must be an element of W0");
  return z.g;
}

std::vector<Elt> elements_arg(const Engine& E, const Args& a, const char* what) {
  std::vector<Elt> out;
  for (const auto& s : a.elts) out.push_back(E.parse(s));
  if (out.empty() && a.max_len >= 0) out = elements_up_to(E, a.max_len);
  if (out.empty()) throw std::invalid_argument(fmt::format("{} needs --elt or --max-len", what));
  return out;
}

std::string J_str(const std::vector<int>& J) { return fmt::format("{}", fmt::join(J, " ")); }

// ---- commands ----

int cmd_validate(const Common& c) {
  RootDatum d = load_datum(c.datum);
  auto errs = validate(d);
  json j = {{"datum", d.name},
            {"hash", fmt::format("{:016x}", datum_hash(d))},
            {"rank", d.rank},
            {"roots", d.num_roots()},
            {"simples", d.num_simples()},
            {"errors", errs},
            {"valid", errs.empty()}};
  emit(c, j.dump(2));
  return errs.empty() ? kPass : kVerifyFail;
}

int cmd_length(const Common& c, const Args& a) {
  RootDatum d = load_datum(c.datum);
  Engine E(d);
  if (a.elts.empty()) throw std::invalid_argument("length needs --elt");
  std::string out;
  int rc = kPass;
  for (const auto& s : a.elts) {
    Elt w = E.parse(s);
    int l = E.length(w);
    if (a.oracle) {
      int lo = E.length_oracle(w);
      if (lo != l) rc = kInternal;
      out += fmt::format("{} {}\n", l, lo);
    } else {
      out += fmt::format("{}\n", l);
    }
  }
  emit(c, out);
  return rc;
}

int cmd_minimize(Session& S, const Args& a) {
  json arr = json::array();
  for (const auto& s : a.elts) {
    Elt w = S.E.parse(s);
    ReductionPath p = S.lab.reduce_to_min(w);
    if (!path_valid(S.E, p) || !S.lab.is_minimal(p.end)) throw std::logic_error("reduction did not reach a minimal element");
    arr.push_back({{"path", path_json(S.E, p)}, {"class", key_json(S.E, S.lab.class_key(w))}});
  }
  if (arr.empty()) throw std::invalid_argument("minimize needs --elt");
  emit(S.common, (arr.size() == 1 ? arr[0] : arr).dump(2));
  return kPass;
}

int cmd_classes(Session& S, const Args& a) {
  if (a.max_len < 0) throw std::invalid_argument("classes needs --max-len");
  std::map<int, int> count;
  for (const auto& w : elements_up_to(S.E, a.max_len)) ++count[S.lab.class_id(w)];
  std::vector<std::pair<ConjClassKey, int>> rows;
  for (const auto& [id, n] : count) rows.emplace_back(S.lab.key(id), n);
  std::sort(rows.begin(), rows.end(), [&S](const auto& x, const auto& y) { return S.E.less(x.first.canonical_min, y.first.canonical_min); });
  if (S.common.format == "csv") {
    std::vector<std::vector<std::string>> t;
    for (const auto& [k, n] : rows)
      t.push_back({S.E.format(k.canonical_min), std::to_string(k.min_len), qvec_str(k.nu), to_string(k.kappa), std::to_string(n)});
    emit(S.common, csv({"min_rep", "min_len", "nu_bar", "kappa", "elements"}, t));
  } else {
    json arr = json::array();
    for (const auto& [k, n] : rows) {
      json j = key_json(S.E, k);
      j["elements"] = n;
      arr.push_back(j);
    }
    emit(S.common, json{{"max_len", a.max_len}, {"classes", arr}}.dump(2));
  }
  return kPass;
}

int cmd_classpoly(Session& S, const Args& a) {
  json arr = json::array();
  for (const auto& s : a.elts) {
    Elt w = S.E.parse(s);
    json j = classpolys_json(S.lab, S.cc.class_polynomials(w));
    j["elt"] = S.E.format(w);
    arr.push_back(j);
  }
  if (arr.empty()) throw std::invalid_argument("classpoly needs --elt");
  emit(S.common, (arr.size() == 1 ? arr[0] : arr).dump(2));
  return kPass;
}

int cmd_reduce(Session& S, const Args& a) {
  HeckeElt h;
  if (!a.input.empty()) {
    std::ifstream f(a.input);
    if (!f) throw std::invalid_argument("cannot read " + a.input);
    h = S.cc.hecke().from_json(json::parse(f));
  }
  for (const auto& s : a.elts) add_to(h, S.E.parse(s), LaurentPoly::constant(1));
  if (a.input.empty() && a.elts.empty()) throw std::invalid_argument("reduce needs --input or --elt");
  emit(S.common, cocenter_json(S.lab, S.cc.reduce_T(h)).dump(2));
  return kPass;
}

int cmd_palcove(Session& S, const Args& a) {
  if (a.max_len < 0) throw std::invalid_argument("palcove-scan needs --max-len");
  auto tr = palcove_triples(S.E, a.max_len, a.proper);
  if (S.common.format == "csv") {
    std::vector<std::vector<std::string>> t;
    for (const auto& x : tr) t.push_back({S.E.format(x.w), J_str(x.J), S.E.format(S.E.from_g(x.z))});
    emit(S.common, csv({"element", "J", "z"}, t));
  } else {
    json arr = json::array();
    for (const auto& x : tr) arr.push_back({{"w", S.E.format(x.w)}, {"J", x.J}, {"z", S.E.format(S.E.from_g(x.z))}});
    emit(S.common, json{{"max_len", a.max_len}, {"triples", arr}}.dump(2));
  }
  return kPass;
}

std::vector<int> classes_of(Session& S, const std::vector<Elt>& els) {
  std::set<int> ids;
  for (const auto& w : els) ids.insert(S.lab.class_id(w));
  std::vector<int> out(ids.begin(), ids.end());
  std::sort(out.begin(), out.end(), [&S](int x, int y) { return S.E.less(S.lab.key(x).canonical_min, S.lab.key(y).canonical_min); });
  return out;
}

int cmd_bernstein(Session& S, const Args& a) {
  json arr = json::array();
  for (int id : classes_of(S, elements_arg(S.E, a, "bernstein-datum"))) {
    BernsteinDatum b = bernstein_datum(S.lab, id);
    SpecialForm f = special_form(S.lab, b);
    json j = bernstein_json(S.E, b);
    j["special_form"] = {{"e", qvec_str(f.e)},       {"J_e", f.Je},          {"w1_tilde", S.E.format(f.w1t)},
                         {"lambda", f.lambda},       {"w1", S.E.format(f.w1)}, {"x1", S.E.format(f.x1)},
                         {"audit_failures", f.audit_failures}};
    arr.push_back(j);
  }
  emit(S.common, (arr.size() == 1 ? arr[0] : arr).dump(2));
  return kPass;
}

template <typename Verify>
int verify_triples(Session& S, const Args& a, const char* name, Verify&& verify) {
  std::vector<PAlcoveTriple> tr;
  if (!a.elts.empty()) {
    for (const auto& s : a.elts) tr.push_back({S.E.parse(s), parse_J(a.J), parse_z(S.E, a.z)});
  } else if (a.max_len >= 0) {
    tr = palcove_triples(S.E, a.max_len, a.proper);
  } else {
    throw std::invalid_argument(fmt::format("{} needs --elt with --J/--z, or --max-len", name));
  }
  json rows = json::array(), failed = json::array();
  std::vector<std::vector<std::string>> t;
  long fails = 0;
  for (const auto& x : tr) {
    auto [pass, rep] = verify(x);
    std::string zs = S.E.format(S.E.from_g(x.z));
    rows.push_back({{"w", S.E.format(x.w)}, {"J", x.J}, {"z", zs}, {"pass", pass}});
    t.push_back({S.E.format(x.w), J_str(x.J), zs, pass ? "pass" : "FAIL"});
    if (!pass) {
      ++fails;
      failed.push_back(rep);
    }
  }
  if (S.common.format == "csv") emit(S.common, csv({"element", "J", "z", "result"}, t));
  else
    emit(S.common, json{{"check", name}, {"checked", tr.size()}, {"failures", fails}, {"rows", rows}, {"failed_reports", failed}}.dump(2));
  return fails == 0 ? kPass : kVerifyFail;
}

int cmd_verify_b(Session& S, const Args& a) {
  json rows = json::array(), failed = json::array();
  std::vector<std::vector<std::string>> t;
  long fails = 0, n = 0;
  const bool single = a.max_len < 0 && a.elts.size() == 1;
  for (int id : classes_of(S, elements_arg(S.E, a, "verify-b"))) {
    TheoremBReport r = verify_theorem_B(S.cc, id);
    ++n;
    std::string rep = S.E.format(S.lab.key(id).canonical_min);
    rows.push_back({{"class", rep}, {"J", r.datum.J}, {"w0", S.E.format(r.datum.w0)}, {"pass", r.pass}});
    t.push_back({rep, J_str(r.datum.J), S.E.format(r.datum.w0), r.pass ? "pass" : "FAIL"});
    if (!r.pass) ++fails;
    if (!r.pass || single) failed.push_back(report_json(S.cc, r));
  }
  if (S.common.format == "csv") emit(S.common, csv({"class", "J", "w0", "result"}, t));
  else {
    json j = {{"check", "B"}, {"checked", n}, {"failures", fails}, {"rows", rows}};
    j[single ? "reports" : "failed_reports"] = failed;
    emit(S.common, j.dump(2));
  }
  return fails == 0 ? kPass : kVerifyFail;
}

SigmaClassSpec spec_from_b(Session& S, const std::string& b) {
  ConjClassKey k = S.lab.class_key(S.E.parse(b));
  return {k.nu, k.kappa, std::nullopt};
}

int cmd_adlv_dim(Session& S, const Args& a) {
  if (a.elts.empty()) throw std::invalid_argument("adlv-dim needs --elt");
  json arr = json::array();
  std::vector<std::vector<std::string>> t;
  for (const auto& s : a.elts) {
    Elt w = S.E.parse(s);
    std::vector<SigmaClassSpec> specs = a.b.empty() ? support_specs(S.cc, w, a.delta) : std::vector{spec_from_b(S, a.b)};
    for (const auto& sp : specs) {
      DimensionReport r = adlv_dimension(S.cc, w, sp, a.delta);
      std::vector<std::string> cls;
      for (const auto& c : r.contributors) cls.push_back(S.E.format(S.lab.key(c.cls).canonical_min));
      std::sort(cls.begin(), cls.end());
      t.push_back({S.E.format(w), qvec_str(sp.nu_bar), to_string(sp.kappa), r.dim ? r.dim->get_str() : "empty",
                   fmt::format("{}", fmt::join(cls, ";"))});
      arr.push_back(dimension_json(S.cc, r));
    }
  }
  if (S.common.format == "json") emit(S.common, arr.dump(2));
  else emit(S.common, csv({"element", "nu_bar", "kappa", "dimension", "contributing_classes"}, t));
  return kPass;
}

// one (J, z) triple against every spec seen among the W~_J classes of the same scan
int cmd_adlv_empty(Session& S, const Args& a) {
  json arr = json::array();
  std::vector<std::vector<std::string>> t;
  long disagree = 0;
  auto run = [&](const Elt& w, const std::vector<int>& J, int z, const SigmaClassSpec& sp) {
    EmptinessReport r = emptiness_check(S.cc, w, J, z, sp, a.delta);
    if (!r.audit_ok) ++disagree;
    t.push_back({S.E.format(w), J_str(J), S.E.format(S.E.from_g(z)), qvec_str(sp.nu_bar), to_string(sp.kappa),
                 r.empty ? "empty" : "undecided", r.audit_ok ? "ok" : "DISAGREE"});
    json j = emptiness_json(S.cc, r);
    j["spec"] = spec_json(sp);
    arr.push_back(j);
  };
  if (!a.elts.empty()) {
    if (a.b.empty()) throw std::invalid_argument("adlv-empty needs --b (an element of W~_J)");
    std::vector<int> J = parse_J(a.J);
    const Parabolic& P = S.cc.parabolic_data(J);
    Cocenter& cj = S.cc.parabolic(J);
    ConjClassKey k = cj.lab().class_key(P.to_J(S.E.parse(a.b)));
    SigmaClassSpec sp{k.nu, k.kappa, J};
    for (const auto& s : a.elts) run(S.E.parse(s), J, parse_z(S.E, a.z), sp);
  } else if (a.max_len >= 0) {
    auto tr = palcove_triples(S.E, a.max_len, a.proper);
    std::map<std::vector<int>, std::vector<SigmaClassSpec>> specs;
    for (const auto& x : tr) {
      const Parabolic& P = S.cc.parabolic_data(x.J);
      Cocenter& cj = S.cc.parabolic(x.J);
      Elt y = P.to_J(S.E.conj(S.E.from_g(x.z), S.E.mul(x.w, S.E.from_g(a.delta))));
      auto& v = specs[x.J];
      for (const auto& [id, p] : cj.class_polynomials(y)) {
        ConjClassKey k = cj.lab().key(id);
        bool seen = false;
        for (const auto& s : v) seen = seen || (s.nu_bar == k.nu && s.kappa == k.kappa);
        if (!seen) v.push_back({k.nu, k.kappa, x.J});
      }
    }
    for (const auto& x : tr)
      for (const auto& sp : specs[x.J]) run(x.w, x.J, x.z, sp);
  } else {
    throw std::invalid_argument("adlv-empty needs --elt or --max-len");
  }
  if (S.common.format == "csv")
    emit(S.common, csv({"element", "J", "z", "nu_bar", "kappa_J", "verdict", "audit"}, t));
  else
    emit(S.common, json{{"checked", arr.size()}, {"disagreements", disagree}, {"rows", arr}}.dump(2));
  return disagree == 0 ? kPass : kVerifyFail;
}

int cmd_cache_gc(const Common& c) {
  std::string dir = c.cache_dir.empty() ? default_cache_dir() : c.cache_dir;
  CacheStats st = DiskCache::gc(dir);
  emit(c, json{{"dir", dir}, {"kept", st.loaded}, {"dropped_entries", st.corrupt}, {"removed_files", st.removed_files}}.dump(2));
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"affhecke: affine Weyl groups, affine Hecke algebras and their cocenters"};
  app.require_subcommand(1);
  Common c;
  Args a;
  app.add_option("--datum", c.datum, "preset:NAME or a JSON file")->capture_default_str();
  app.add_option("--cache", c.cache_dir, "cache directory (default $AFFHECKE_CACHE_DIR or .affhecke-cache)");
  app.add_flag("--no-cache", c.no_cache, "do not read or write the cache");
  app.add_option("--out", c.out, "write output here instead of stdout");
  app.add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", c.threads, "worker count (computations currently run on one thread)")->check(CLI::PositiveNumber);
  app.add_option("--seed", c.seed, "nonzero: draw reduction pivots at random (cache is bypassed)");

  auto elt_opt = [&a](CLI::App* s) { s->add_option("--elt", a.elts, "element, e.g. \"t[1,0,0]*(1 2)\""); };
  auto len_opt = [&a](CLI::App* s) { s->add_option("--max-len", a.max_len, "length bound")->check(CLI::NonNegativeNumber); };
  auto jz_opt = [&a](CLI::App* s) {
    s->add_option("--J", a.J, "comma-separated 0-based simple-root positions");
    s->add_option("--z", a.z, "element of W0 (default 1)");
    s->add_flag("--proper", a.proper, "skip J = all simples in scans");
  };

  auto* validate = app.add_subcommand("validate", "check the root datum axioms");
  auto* length = app.add_subcommand("length", "length of elements");
  elt_opt(length);
  length->add_flag("--oracle", a.oracle, "also print the hyperplane count");
  auto* minimize = app.add_subcommand("minimize", "reduce to a minimal length element of the class");
  elt_opt(minimize);
  auto* classes = app.add_subcommand("classes", "conjugacy classes meeting length <= L");
  len_opt(classes);
  auto* classpoly = app.add_subcommand("classpoly", "class polynomials of T_w");
  elt_opt(classpoly);
  auto* reduce = app.add_subcommand("reduce", "image of a Hecke element in the cocenter");
  elt_opt(reduce);
  reduce->add_option("--input", a.input, "Hecke element JSON: [{\"elt\":..., \"coeff\":{\"exp\":c}}]");
  auto* palcove = app.add_subcommand("palcove-scan", "(J, z)-alcove triples of length <= L");
  len_opt(palcove);
  palcove->add_flag("--proper", a.proper, "skip J = all simples");
  auto* bern = app.add_subcommand("bernstein-datum", "(J, w0) and the special form for the class of each element");
  elt_opt(bern);
  len_opt(bern);
  auto* va = app.add_subcommand("verify-a", "T_w lies in H_J + [H, H] via an explicit witness");
  auto* vb = app.add_subcommand("verify-b", "Bernstein presentation of T_O");
  auto* vc = app.add_subcommand("verify-c", "class polynomial comparison with W~_J");
  for (auto* s : {va, vb, vc}) {
    elt_opt(s);
    len_opt(s);
  }
  jz_opt(va);
  jz_opt(vc);
  auto* adim = app.add_subcommand("adlv-dim", "dimension formula from class polynomials");
  elt_opt(adim);
  adim->add_option("--b", a.b, "element whose (nu, kappa) specifies b; default: every spec in the support");
  adim->add_option("--delta", a.delta, "Gamma element index");
  auto* aemp = app.add_subcommand("adlv-empty", "Levi Kottwitz emptiness criterion with its audit");
  elt_opt(aemp);
  len_opt(aemp);
  jz_opt(aemp);
  aemp->add_option("--b", a.b, "element of W~_J whose (nu, kappa_J) specifies b");
  aemp->add_option("--delta", a.delta, "Gamma element index");
  auto* cache = app.add_subcommand("cache", "cache maintenance");
  cache->require_subcommand(1);
  auto* gc = cache->add_subcommand("gc", "drop corrupt entries and stale files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kPass : kUsage;
  }

  try {
    if (*validate) return cmd_validate(c);
    if (*length) return cmd_length(c, a);
    if (*gc) return cmd_cache_gc(c);
    Session S(c);
    int rc = kPass;
    if (*minimize) rc = cmd_minimize(S, a);
    else if (*classes) rc = cmd_classes(S, a);
    else if (*classpoly) rc = cmd_classpoly(S, a);
    else if (*reduce) rc = cmd_reduce(S, a);
    else if (*palcove) rc = cmd_palcove(S, a);
    else if (*bern) rc = cmd_bernstein(S, a);
    else if (*va)
      rc = verify_triples(S, a, "A", [&S](const PAlcoveTriple& x) {
        auto r = verify_theorem_A(S.cc, x.w, x.J, x.z);
        return std::pair{r.pass, report_json(S.cc, r)};
      });
    else if (*vb) rc = cmd_verify_b(S, a);
    else if (*vc)
      rc = verify_triples(S, a, "C", [&S](const PAlcoveTriple& x) {
        auto r = verify_theorem_C(S.cc, x.w, x.J, x.z);
        return std::pair{r.pass, report_json(S.cc, r)};
      });
    else if (*adim) rc = cmd_adlv_dim(S, a);
    else if (*aemp) rc = cmd_adlv_empty(S, a);
    S.save();
    return rc;
  } catch (const std::invalid_argument& e) {
    std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return kInternal;
  }
}
