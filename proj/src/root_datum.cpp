#include "affhecke/root_datum.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include "json.hpp"

namespace ahk {

using nlohmann::json;

namespace {

IMat reflection_matrix(const IVec& alpha, const IVec& cov) {
  int d = static_cast<int>(alpha.size());
  IMat m = identity(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m[i][j] = sub_ck(m[i][j], mul_ck(alpha[i], cov[j]));
  return m;
}

// Inverse of an integer matrix with determinant +-1.
std::optional<IMat> unimodular_inverse(const IMat& m) {
  int n = static_cast<int>(m.size());
  QMat a = to_q(m);
  QMat inv(n, QVec(n, Q(0)));
  for (int i = 0; i < n; ++i) inv[i][i] = 1;
  for (int c = 0; c < n; ++c) {
    int p = -1;
    for (int r = c; r < n; ++r)
      if (a[r][c] != 0) {
        p = r;
        break;
      }
    if (p < 0) return std::nullopt;
    std::swap(a[p], a[c]);
    std::swap(inv[p], inv[c]);
    Q f = 1 / a[c][c];
    for (int k = 0; k < n; ++k) {
      a[c][k] *= f;
      inv[c][k] *= f;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      Q g = a[r][c];
      for (int k = 0; k < n; ++k) {
        a[r][k] -= g * a[c][k];
        inv[r][k] -= g * inv[c][k];
      }
    }
  }
  IMat out(n, IVec(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (inv[i][j].get_den() != 1) return std::nullopt;
      out[i][j] = to_i64(inv[i][j].get_num());
    }
  return out;
}

std::string vstr(const IVec& v) { return fmt::format("[{}]", fmt::join(v, ",")); }

}  // namespace

int RootDatum::find_root(const IVec& v) const {
  for (int i = 0; i < num_roots(); ++i)
    if (roots[i] == v) return i;
  return -1;
}

std::vector<std::string> validate(const RootDatum& d) {
  std::vector<std::string> bad;
  const int n = d.rank;
  if (n < 1 || n > kMaxRank) {
    bad.push_back(fmt::format("rank {} outside supported range 1..{}", n, kMaxRank));
    return bad;
  }
  auto dims_ok = [n](const IMat& m) {
    return std::all_of(m.begin(), m.end(), [n](const IVec& r) { return (int)r.size() == n; });
  };
  if (!dims_ok(d.roots) || !dims_ok(d.coroots) || d.pairing.size() != (size_t)n ||
      !dims_ok(d.pairing)) {
    bad.push_back("dimension mismatch in roots, coroots or pairing");
    return bad;
  }
  if (d.roots.size() != d.coroots.size()) {
    bad.push_back("roots and coroots differ in number");
    return bad;
  }
  int64_t det = det_int(d.pairing);
  if (det != 1 && det != -1) bad.push_back(fmt::format("pairing not perfect (det = {})", det));

  const int nr = static_cast<int>(d.roots.size());
  IMat cov(nr);
  for (int a = 0; a < nr; ++a) cov[a] = matvec(d.pairing, d.coroots[a]);
  auto find = [&](const IVec& v) {
    for (int i = 0; i < nr; ++i)
      if (d.roots[i] == v) return i;
    return -1;
  };
  std::set<IVec> seen;
  for (int a = 0; a < nr; ++a) {
    if (!seen.insert(d.roots[a]).second) bad.push_back("duplicate root " + vstr(d.roots[a]));
    if (std::all_of(d.roots[a].begin(), d.roots[a].end(), [](int64_t x) { return x == 0; }))
      bad.push_back("zero vector listed as a root");
  }
  for (int a = 0; a < nr; ++a) {
    int64_t p = dot(d.roots[a], cov[a]);
    if (p != 2)
      bad.push_back(fmt::format("pairing(α,α∨)≠2 for root #{} {} (got {})", a, vstr(d.roots[a]), p));
  }
  if (!bad.empty()) return bad;

  for (int a = 0; a < nr; ++a) {
    IVec neg = d.roots[a];
    for (auto& x : neg) x = -x;
    if (find(neg) < 0) bad.push_back("R not closed under negation at " + vstr(d.roots[a]));
    for (int b = 0; b < nr; ++b) {
      int64_t k = dot(d.roots[b], cov[a]);
      IVec img = d.roots[b];
      for (int i = 0; i < n; ++i) img[i] = sub_ck(img[i], mul_ck(k, d.roots[a][i]));
      int c = find(img);
      if (c < 0) {
        bad.push_back(fmt::format("reflection s_{} does not permute R (image of root #{})", a, b));
        continue;
      }
      // dual reflection on coroots: b^vee - <a, b^vee> a^vee must equal c^vee
      int64_t kd = dot(d.roots[a], matvec(d.pairing, d.coroots[b]));
      IVec cimg = d.coroots[b];
      for (int i = 0; i < n; ++i) cimg[i] = sub_ck(cimg[i], mul_ck(kd, d.coroots[a][i]));
      if (cimg != d.coroots[c])
        bad.push_back(fmt::format("reflection s_{} does not permute R∨ compatibly (coroot #{})", a, b));
    }
  }

  // simple roots and positivity
  for (int s : d.simples)
    if (s < 0 || s >= nr) {
      bad.push_back(fmt::format("simple index {} out of range", s));
      return bad;
    }
  const int r = static_cast<int>(d.simples.size());
  if (nr > 0) {
    QMat B(n, QVec(r));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < r; ++j) B[i][j] = Q(static_cast<long>(d.roots[d.simples[j]][i]));
    if (rank_q(B) != r) bad.push_back("simple roots are linearly dependent");
    for (int a = 0; a < nr && bad.empty(); ++a) {
      auto sol = solve_q(B, to_q(d.roots[a]), r);
      if (!sol) {
        bad.push_back(fmt::format("root #{} {} not in the span of F0", a, vstr(d.roots[a])));
        continue;
      }
      bool pos = true, neg = true;
      for (const auto& c : sol->particular) {
        if (c.get_den() != 1) pos = neg = false;
        if (c < 0) pos = false;
        if (c > 0) neg = false;
      }
      if (!pos && !neg)
        bad.push_back(fmt::format("root #{} {} is neither positive nor negative (R+ partition)", a,
                                  vstr(d.roots[a])));
    }
  } else if (r > 0) {
    bad.push_back("simples listed for an empty root system");
  }
  if (!bad.empty()) return bad;

  // Gamma generators
  for (size_t g = 0; g < d.gammas.size(); ++g) {
    const IMat& T = d.gammas[g];
    if (T.size() != (size_t)n || !dims_ok(T)) {
      bad.push_back(fmt::format("gamma #{} has wrong shape", g));
      continue;
    }
    auto Tinv = unimodular_inverse(T);
    if (!Tinv) {
      bad.push_back(fmt::format("gamma #{} is not invertible over Z", g));
      continue;
    }
    std::set<int> img;
    for (int s : d.simples) {
      int c = find(matvec(T, d.roots[s]));
      if (c < 0 || std::find(d.simples.begin(), d.simples.end(), c) == d.simples.end())
        bad.push_back(fmt::format("gamma #{} does not map F0 to F0 (simple #{})", g, s));
      else
        img.insert(c);
    }
    if (img.size() != d.simples.size() && bad.empty())
      bad.push_back(fmt::format("gamma #{} is not a bijection on F0", g));
    // induced action on Y preserving the pairing: Tv = P^-1 T^-T P
    auto Pinv = unimodular_inverse(d.pairing);
    if (!Pinv) continue;
    IMat Tv = matmul(*Pinv, matmul(transpose(*Tinv), d.pairing));
    for (int a = 0; a < nr; ++a) {
      int c = find(matvec(T, d.roots[a]));
      if (c < 0) {
        bad.push_back(fmt::format("gamma #{} does not preserve R (root #{})", g, a));
        continue;
      }
      if (matvec(Tv, d.coroots[a]) != d.coroots[c])
        bad.push_back(fmt::format("gamma #{} does not preserve the pairing on root #{}", g, a));
    }
  }
  return bad;
}

void finalize(RootDatum& d) {
  auto bad = validate(d);
  if (!bad.empty()) throw std::invalid_argument("invalid root datum '" + d.name + "': " + bad[0]);
  const int n = d.rank, nr = d.num_roots(), r = d.num_simples();
  d.cocov.assign(nr, IVec());
  for (int a = 0; a < nr; ++a) d.cocov[a] = matvec(d.pairing, d.coroots[a]);
  d.positive.assign(nr, 0);
  d.pos_roots.clear();
  d.negation.assign(nr, -1);
  d.simple_coeffs.assign(nr, IVec(r, 0));
  QMat B(n, QVec(r));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < r; ++j) B[i][j] = Q(static_cast<long>(d.roots[d.simples[j]][i]));
  for (int a = 0; a < nr; ++a) {
    auto sol = solve_q(B, to_q(d.roots[a]), r);
    bool pos = true;
    for (int j = 0; j < r; ++j) {
      d.simple_coeffs[a][j] = to_i64(sol->particular[j].get_num());
      if (sol->particular[j] < 0) pos = false;
    }
    d.positive[a] = pos;
    if (pos) d.pos_roots.push_back(a);
    IVec neg = d.roots[a];
    for (auto& x : neg) x = -x;
    d.negation[a] = d.find_root(neg);
  }
  // type A in standard coordinates
  bool ta = (nr == n * (n - 1)) && d.pairing == identity(n) && d.roots == d.coroots;
  if (ta) {
    for (int a = 0; a < nr && ta; ++a) {
      int plus = 0, minus = 0, zero = 0;
      for (int64_t x : d.roots[a]) {
        if (x == 1) ++plus;
        else if (x == -1) ++minus;
        else if (x == 0) ++zero;
      }
      ta = plus == 1 && minus == 1 && zero == n - 2;
    }
  }
  d.type_a_standard = ta && n >= 1;
}

namespace {

RootDatum gl(int n) {
  RootDatum d;
  d.name = fmt::format("GL{}", n);
  d.rank = n;
  d.pairing = identity(n);
  IMat pos, neg;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      IVec v(n, 0);
      v[i] = 1;
      v[j] = -1;
      pos.push_back(v);
      for (auto& x : v) x = -x;
      neg.push_back(v);
    }
  d.roots = pos;
  d.roots.insert(d.roots.end(), neg.begin(), neg.end());
  d.coroots = d.roots;
  for (int i = 0; i + 1 < n; ++i) {
    IVec v(n, 0);
    v[i] = 1;
    v[i + 1] = -1;
    d.simples.push_back(d.find_root(v));
  }
  return d;
}

// Cartan convention A[i][j] = <alpha_j, alpha_i^vee>.
// lattice "root": X has the simple roots as basis; "weight": the fundamental weights.
RootDatum from_cartan(const std::string& name, const IMat& A, bool weight_lattice) {
  int r = static_cast<int>(A.size());
  RootDatum d;
  d.name = name;
  d.rank = r;
  d.pairing = identity(r);
  IMat sroot(r), scov(r);
  for (int i = 0; i < r; ++i) {
    if (weight_lattice) {
      sroot[i] = IVec(r);
      for (int k = 0; k < r; ++k) sroot[i][k] = A[k][i];
      scov[i] = IVec(r, 0);
      scov[i][i] = 1;
    } else {
      sroot[i] = IVec(r, 0);
      sroot[i][i] = 1;
      scov[i] = A[i];
    }
  }
  std::vector<std::pair<IVec, IVec>> all;
  std::set<IVec> seen;
  for (int i = 0; i < r; ++i) {
    all.emplace_back(sroot[i], scov[i]);
    seen.insert(sroot[i]);
  }
  for (size_t q = 0; q < all.size(); ++q) {
    for (int i = 0; i < r; ++i) {
      auto [b, c] = all[q];
      int64_t k = dot(b, scov[i]);
      int64_t kd = dot(sroot[i], c);
      for (int t = 0; t < r; ++t) {
        b[t] -= k * sroot[i][t];
        c[t] -= kd * scov[i][t];
      }
      if (seen.insert(b).second) all.emplace_back(b, c);
    }
  }
  // positive roots first, in discovery order, then their negatives
  QMat B(r, QVec(r));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) B[i][j] = Q(static_cast<long>(sroot[j][i]));
  std::vector<std::pair<IVec, IVec>> pos;
  for (auto& rc : all) {
    auto sol = solve_q(B, to_q(rc.first), r);
    bool p = std::all_of(sol->particular.begin(), sol->particular.end(),
                         [](const Q& x) { return x >= 0; });
    if (p) pos.push_back(rc);
  }
  for (auto& rc : pos) {
    d.roots.push_back(rc.first);
    d.coroots.push_back(rc.second);
  }
  for (auto& rc : pos) {
    IVec a = rc.first, c = rc.second;
    for (auto& x : a) x = -x;
    for (auto& x : c) x = -x;
    d.roots.push_back(a);
    d.coroots.push_back(c);
  }
  for (int i = 0; i < r; ++i) d.simples.push_back(d.find_root(sroot[i]));
  return d;
}

RootDatum c2() {
  RootDatum d;
  d.name = "C2";
  d.rank = 2;
  d.pairing = identity(2);
  // short roots +-e1+-e2 (coroot equal), long roots +-2e_i (coroot +-e_i)
  d.roots = {{1, -1}, {0, 2}, {1, 1}, {2, 0}, {-1, 1}, {0, -2}, {-1, -1}, {-2, 0}};
  d.coroots = {{1, -1}, {0, 1}, {1, 1}, {1, 0}, {-1, 1}, {0, -1}, {-1, -1}, {-1, 0}};
  d.simples = {0, 1};
  return d;
}

}  // namespace

RootDatum preset(const std::string& id) {
  RootDatum d;
  if (id.rfind("GL", 0) == 0) {
    int n = std::stoi(id.substr(2));
    if (n < 1 || n > 8) throw std::invalid_argument("GL_n preset needs 1 <= n <= 8");
    d = gl(n);
  } else if (id.rfind("SL", 0) == 0) {
    int n = std::stoi(id.substr(2));
    if (n < 2 || n > 9) throw std::invalid_argument("SL_n preset needs 2 <= n <= 9");
    IMat A(n - 1, IVec(n - 1, 0));
    for (int i = 0; i < n - 1; ++i) {
      A[i][i] = 2;
      if (i > 0) A[i][i - 1] = -1;
      if (i + 2 < n) A[i][i + 1] = -1;
    }
    d = from_cartan(id, A, false);
  } else if (id == "A2ad") {
    d = from_cartan(id, {{2, -1}, {-1, 2}}, true);
  } else if (id == "C2") {
    d = c2();
  } else if (id == "G2") {
    // alpha_1 short, alpha_2 long
    d = from_cartan(id, {{2, -1}, {-3, 2}}, false);
  } else {
    throw std::invalid_argument("unknown preset '" + id + "'");
  }
  finalize(d);
  return d;
}

RootDatum datum_from_json_text(const std::string& text) {
  json j = json::parse(text);
  RootDatum d;
  d.name = j.value("name", std::string("custom"));
  d.rank = j.at("rank").get<int>();
  d.roots = j.at("roots").get<IMat>();
  d.coroots = j.at("coroots").get<IMat>();
  d.pairing = j.at("pairing").get<IMat>();
  d.simples = j.at("simples").get<std::vector<int>>();
  if (j.contains("gammas")) d.gammas = j.at("gammas").get<std::vector<IMat>>();
  return d;
}

RootDatum load_datum(const std::string& spec) {
  if (spec.rfind("preset:", 0) == 0) return preset(spec.substr(7));
  std::ifstream in(spec);
  if (!in) throw std::invalid_argument("cannot open datum file '" + spec + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  RootDatum d = datum_from_json_text(ss.str());
  finalize(d);
  return d;
}

std::string datum_to_json(const RootDatum& d) {
  json j;
  j["name"] = d.name;
  j["rank"] = d.rank;
  j["roots"] = d.roots;
  j["coroots"] = d.coroots;
  j["pairing"] = d.pairing;
  j["simples"] = d.simples;
  j["gammas"] = d.gammas;
  return j.dump();
}

uint64_t datum_hash(const RootDatum& d) {
  json j = json::parse(datum_to_json(d));
  j.erase("name");
  return fnv1a(j.dump());
}

uint64_t fnv1a(std::string_view s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<IMat> gamma_group(const RootDatum& d) {
  std::vector<IMat> elems{identity(d.rank)};
  std::set<IMat> seen{elems[0]};
  for (size_t q = 0; q < elems.size(); ++q)
    for (const auto& g : d.gammas) {
      IMat p = matmul(g, elems[q]);
      if (seen.insert(p).second) elems.push_back(p);
    }
  return elems;
}

ParabolicSubdatum subdatum(const RootDatum& d, const std::vector<int>& Jin) {
  ParabolicSubdatum p;
  p.parent = &d;
  p.J = Jin;
  std::sort(p.J.begin(), p.J.end());
  p.J.erase(std::unique(p.J.begin(), p.J.end()), p.J.end());
  std::vector<char> inJ(d.num_simples(), 0);
  for (int j : p.J) {
    if (j < 0 || j >= d.num_simples()) throw std::invalid_argument("J not a subset of F0");
    inJ[j] = 1;
  }
  for (int a = 0; a < d.num_roots(); ++a) {
    bool in = true;
    for (int k = 0; k < d.num_simples(); ++k)
      if (d.simple_coeffs[a][k] != 0 && !inJ[k]) in = false;
    if (in) p.rootsJ.push_back(a);
  }
  std::set<int> rj(p.rootsJ.begin(), p.rootsJ.end());
  for (const auto& g : gamma_group(d)) {
    bool ok = true;
    for (int a : p.rootsJ)
      if (!rj.count(d.find_root(matvec(g, d.roots[a])))) ok = false;
    if (ok) p.gammasJ.push_back(g);
  }
  RootDatum& s = p.datum;
  s.name = d.name + fmt::format("_J{{{}}}", fmt::join(p.J, ","));
  s.rank = d.rank;
  s.pairing = d.pairing;
  for (int a : p.rootsJ) {
    s.roots.push_back(d.roots[a]);
    s.coroots.push_back(d.coroots[a]);
  }
  for (int j : p.J) s.simples.push_back(s.find_root(d.roots[d.simples[j]]));
  for (size_t g = 1; g < p.gammasJ.size(); ++g) s.gammas.push_back(p.gammasJ[g]);
  finalize(s);
  return p;
}

IVec KottwitzGroup::project(const IVec& x) const {
  IVec out(proj.size());
  for (size_t i = 0; i < proj.size(); ++i) {
    int64_t v = dot(proj[i], x);
    if (i < torsion.size()) v = ((v % torsion[i]) + torsion[i]) % torsion[i];
    out[i] = v;
  }
  return out;
}

KottwitzGroup kottwitz_group(const RootDatum& d) {
  KottwitzGroup k;
  const int n = d.rank, r = d.num_simples();
  IMat B(n, IVec(r, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < r; ++j) B[i][j] = d.roots[d.simples[j]][i];
  IMat U(n, IVec(n));
  int rank = 0;
  std::vector<mpz_class> diag;
  if (r > 0) {
    SNF s = smith(B, n, r);
    rank = s.rank;
    diag = s.diag;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) U[i][j] = to_i64(s.U[i][j]);
  } else {
    U = identity(n);
  }
  for (int i = 0; i < rank; ++i) {
    int64_t di = to_i64(diag[i]);
    if (di > 1) {
      IVec row = U[i];
      for (auto& x : row) x = ((x % di) + di) % di;
      k.torsion.push_back(di);
      k.proj.push_back(row);
    }
  }
  IMat freerows(U.begin() + rank, U.end());
  IMat h = hnf_rows(freerows, n);
  k.free_rank = static_cast<int>(h.size());
  for (auto& row : h) k.proj.push_back(row);
  k.gamma_elems = gamma_group(d);
  return k;
}

std::string to_string(const KottwitzValue& k) {
  std::string s = fmt::format("{}", fmt::join(k.coords, ","));
  if (s.empty()) s = "0";
  if (k.gamma != 0) s += fmt::format(";g{}", k.gamma);
  return s;
}

DominantResult dominant_rep(const RootDatum& d, const QVec& v) {
  DominantResult res{v, identity(d.rank)};
  for (;;) {
    int bad = -1;
    for (int j = 0; j < d.num_simples(); ++j) {
      int a = d.simples[j];
      Q p = 0;
      for (int i = 0; i < d.rank; ++i) p += res.vec[i] * Q(static_cast<long>(d.cocov[a][i]));
      if (p < 0) {
        bad = a;
        Q pp = p;
        for (int i = 0; i < d.rank; ++i) res.vec[i] -= pp * Q(static_cast<long>(d.roots[a][i]));
        break;
      }
    }
    if (bad < 0) break;
    res.w = matmul(reflection_matrix(d.roots[bad], d.cocov[bad]), res.w);
  }
  return res;
}

}  // namespace ahk
