#include "affhecke/engine.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace ahk {

Vec8 to_vec8(const IVec& v) {
  if (v.size() > static_cast<size_t>(kMaxRank)) throw std::invalid_argument("vector longer than max rank");
  Vec8 out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

std::string qvec_str(const QVec& v) {
  std::vector<std::string> parts;
  for (const auto& x : v) parts.push_back(x.get_str());
  return fmt::format("[{}]", fmt::join(parts, ","));
}

namespace {

QMat rref(QMat a) {
  if (a.empty()) return a;
  int m = static_cast<int>(a.size()), n = static_cast<int>(a[0].size());
  int r = 0;
  for (int c = 0; c < n && r < m; ++c) {
    int p = -1;
    for (int i = r; i < m; ++i)
      if (a[i][c] != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    std::swap(a[p], a[r]);
    Q f = 1 / a[r][c];
    for (auto& x : a[r]) x *= f;
    for (int i = 0; i < m; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Q g = a[i][c];
      for (int k = 0; k < n; ++k) a[i][k] -= g * a[r][k];
    }
    ++r;
  }
  a.resize(r);
  return a;
}

int pivot_col(const QVec& row) {
  for (size_t i = 0; i < row.size(); ++i)
    if (row[i] != 0) return static_cast<int>(i);
  return -1;
}

Q qpair(const QVec& v, const IVec& cov) {
  Q s = 0;
  for (size_t i = 0; i < v.size(); ++i)
    if (cov[i] != 0) s += v[i] * Q(static_cast<long>(cov[i]));
  return s;
}

int64_t pair8(const Vec8& x, const IVec& cov, int n) {
  int64_t s = 0;
  for (int i = 0; i < n; ++i) s = add_ck(s, mul_ck(x[i], cov[i]));
  return s;
}

}  // namespace

bool AffineSubspace::contains(const QVec& p) const {
  QVec diff(p.size());
  for (size_t i = 0; i < p.size(); ++i) diff[i] = p[i] - base[i];
  for (const auto& d : dirs) {
    int c = pivot_col(d);
    if (c < 0 || diff[c] == 0) continue;
    Q f = diff[c];
    for (size_t i = 0; i < diff.size(); ++i) diff[i] -= f * d[i];
  }
  return std::all_of(diff.begin(), diff.end(), [](const Q& x) { return x == 0; });
}

Engine::Engine(RootDatum d) : d_(std::move(d)) {
  if (d_.cocov.size() != d_.roots.size()) finalize(d_);
  n_ = d_.rank;
  nroots_ = d_.num_roots();
  build_group();
  build_affine();
  kott_ = kottwitz_group(d_);
  build_omega();
}

int Engine::lookup_mat(const int64_t* m) const {
  std::array<int8_t, kMaxRank * kMaxRank> key{};
  for (int i = 0; i < n_ * n_; ++i) {
    if (m[i] < -127 || m[i] > 127) return -1;
    key[i] = static_cast<int8_t>(m[i]);
  }
  auto it = index_.find(key);
  return it == index_.end() ? -1 : it->second;
}

void Engine::build_group() {
  using Mat = std::array<int64_t, kMaxRank * kMaxRank>;
  const int n = n_;
  auto mm = [n](const Mat& a, const Mat& b) {
    Mat c{};
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        int64_t x = a[i * n + k];
        if (x == 0) continue;
        for (int j = 0; j < n; ++j) c[i * n + j] = add_ck(c[i * n + j], mul_ck(x, b[k * n + j]));
      }
    return c;
  };
  auto from_imat = [n](const IMat& m) {
    Mat c{};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) c[i * n + j] = m[i][j];
    return c;
  };
  auto key_of = [n](const Mat& m) {
    std::array<int8_t, kMaxRank * kMaxRank> key{};
    for (int i = 0; i < n * n; ++i) {
      if (m[i] < -127 || m[i] > 127) throw std::runtime_error("finite group matrix entry out of range");
      key[i] = static_cast<int8_t>(m[i]);
    }
    return key;
  };
  absl::flat_hash_map<IVec, int> root_index;
  for (int a = 0; a < nroots_; ++a) root_index[d_.roots[a]] = a;
  auto root_perm = [&](const Mat& m) {
    std::vector<int> rp(nroots_);
    for (int a = 0; a < nroots_; ++a) {
      IVec img(n, 0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) img[i] += m[i * n + j] * d_.roots[a][j];
      auto it = root_index.find(img);
      if (it == root_index.end()) throw std::runtime_error("group element does not permute roots");
      rp[a] = it->second;
    }
    return rp;
  };

  // Gamma, with a BFS tree over the generators
  std::vector<Mat> gam{from_imat(ahk::identity(n))};
  std::map<Mat, int> gseen{{gam[0], 0}};
  gparent_ = {-1};
  gparent_gen_ = {-1};
  for (size_t q = 0; q < gam.size(); ++q)
    for (size_t j = 0; j < d_.gammas.size(); ++j) {
      Mat p = mm(from_imat(d_.gammas[j]), gam[q]);
      if (gseen.emplace(p, static_cast<int>(gam.size())).second) {
        gam.push_back(p);
        gparent_.push_back(static_cast<int>(q));
        gparent_gen_.push_back(static_cast<int>(j));
      }
    }
  const int m = static_cast<int>(gam.size());
  gamma_mats_.clear();
  for (const auto& g : gam) {
    IMat x(n, IVec(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) x[i][j] = g[i * n + j];
    gamma_mats_.push_back(x);
  }

  // W0 by BFS over simple reflections (left multiplication)
  const int r = d_.num_simples();
  std::vector<Mat> sref(r);
  std::vector<std::vector<int>> srp(r);
  for (int i = 0; i < r; ++i) {
    int a = d_.simples[i];
    Mat s{};
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) s[x * n + y] = (x == y ? 1 : 0) - d_.roots[a][x] * d_.cocov[a][y];
    sref[i] = s;
    srp[i] = root_perm(s);
  }
  std::vector<Mat> W{from_imat(ahk::identity(n))};
  std::vector<std::vector<int>> rpW(1, std::vector<int>(nroots_));
  std::iota(rpW[0].begin(), rpW[0].end(), 0);
  absl::flat_hash_map<std::array<int8_t, kMaxRank * kMaxRank>, int> wseen;
  wseen[key_of(W[0])] = 0;
  wlen_ = {0};
  wparent_ = {-1};
  wparent_s_ = {-1};
  for (size_t q = 0; q < W.size(); ++q)
    for (int i = 0; i < r; ++i) {
      // s_i * W[q]: rank-one update
      Mat p = W[q];
      int a = d_.simples[i];
      for (int y = 0; y < n; ++y) {
        int64_t c = 0;
        for (int x = 0; x < n; ++x) c += d_.cocov[a][x] * W[q][x * n + y];
        if (c == 0) continue;
        for (int x = 0; x < n; ++x) p[x * n + y] -= c * d_.roots[a][x];
      }
      auto key = key_of(p);
      if (wseen.contains(key)) continue;
      wseen[key] = static_cast<int>(W.size());
      W.push_back(p);
      std::vector<int> rp(nroots_);
      for (int b = 0; b < nroots_; ++b) rp[b] = srp[i][rpW[q][b]];
      rpW.push_back(std::move(rp));
      wlen_.push_back(wlen_[q] + 1);
      wparent_.push_back(static_cast<int>(q));
      wparent_s_.push_back(i);
    }
  const int nw = static_cast<int>(W.size());

  std::vector<std::vector<int>> rpG(m);
  for (int t = 0; t < m; ++t) rpG[t] = root_perm(gam[t]);

  mats_.assign(static_cast<size_t>(nw) * m, Mat{});
  rootperm_.assign(static_cast<size_t>(nw) * m * nroots_, 0);
  index_.clear();
  index_.reserve(static_cast<size_t>(nw) * m);
  for (int w = 0; w < nw; ++w)
    for (int t = 0; t < m; ++t) {
      int g = w * m + t;
      mats_[g] = (t == 0) ? W[w] : mm(W[w], gam[t]);
      index_[key_of(mats_[g])] = g;
      for (int a = 0; a < nroots_; ++a)
        rootperm_[static_cast<size_t>(g) * nroots_ + a] = rpW[w][rpG[t][a]];
    }
  if (static_cast<int>(index_.size()) != nw * m) throw std::runtime_error("W0 x| Gamma enumeration collided");

  simple_g_.assign(r, 0);
  for (int i = 0; i < r; ++i) simple_g_[i] = lookup_mat(sref[i].data()) ;
  gamma_gen_g_.clear();
  for (const auto& gm : d_.gammas) gamma_gen_g_.push_back(lookup_mat(from_imat(gm).data()));

  // inverses: W part via the BFS tree, Gamma part by search
  std::vector<int> winv(nw, 0);
  for (int w = 1; w < nw; ++w) {
    // w = s * parent, so w^-1 = parent^-1 * s
    Mat p = mm(W[winv[wparent_[w]]], sref[wparent_s_[w]]);
    winv[w] = wseen.at(key_of(p));
  }
  std::vector<int> tinv(m, 0);
  for (int t = 0; t < m; ++t)
    for (int u = 0; u < m; ++u)
      if (mm(gam[t], gam[u]) == gam[0]) tinv[t] = u;
  ginv_.assign(nw * m, 0);
  for (int w = 0; w < nw; ++w)
    for (int t = 0; t < m; ++t) {
      Mat p = mm(gam[tinv[t]], W[winv[w]]);
      ginv_[w * m + t] = lookup_mat(p.data());
    }
  gorder_.assign(nw * m, 0);

  // ordering ranks: one-line form (type A) or simple-root images, then Gamma index
  std::vector<std::pair<std::vector<int>, int>> keys(nw * m);
  for (int g = 0; g < nw * m; ++g) {
    std::vector<int> k;
    int wg = (g / m) * m;
    if (d_.type_a_standard) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (mats_[wg][j * n + i] == 1) k.push_back(j);
    } else {
      for (int i = 0; i < r; ++i) k.push_back(groot(wg, d_.simples[i]));
    }
    keys[g] = {k, g % m};
  }
  std::vector<int> order(nw * m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return keys[a] < keys[b]; });
  grank_.assign(nw * m, 0);
  for (int i = 0; i < nw * m; ++i) grank_[order[i]] = i;
}

void Engine::build_affine() {
  const int r = d_.num_simples();
  // connected components of the Dynkin diagram
  comp_of_simple_.assign(r, -1);
  int ncomp = 0;
  for (int i = 0; i < r; ++i) {
    if (comp_of_simple_[i] >= 0) continue;
    std::vector<int> stack{i};
    comp_of_simple_[i] = ncomp;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int j = 0; j < r; ++j)
        if (comp_of_simple_[j] < 0 && d_.pair(d_.roots[d_.simples[j]], d_.simples[x]) != 0) {
          comp_of_simple_[j] = ncomp;
          stack.push_back(j);
        }
    }
    ++ncomp;
  }
  // rho-like point: <r, alpha_i^vee> = 1 on simples
  QVec rv(n_, Q(0));
  if (r > 0) {
    QMat A(r, QVec(n_));
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < n_; ++j) A[i][j] = Q(static_cast<long>(d_.cocov[d_.simples[i]][j]));
    auto sol = solve_q(A, QVec(r, Q(1)), n_);
    if (!sol) throw std::runtime_error("no interior point for the fundamental alcove");
    rv = sol->particular;
  }
  int64_t maxh = 0;
  theta_.assign(ncomp, -1);
  std::vector<int64_t> best(ncomp, -1);
  for (int a : d_.pos_roots) {
    Q h = qpair(rv, d_.cocov[a]);
    int64_t hi = to_i64(h.get_num());
    maxh = std::max(maxh, hi);
    int comp = -1;
    for (int i = 0; i < r; ++i)
      if (d_.simple_coeffs[a][i] != 0) comp = comp_of_simple_[i];
    if (hi > best[comp]) {
      best[comp] = hi;
      theta_[comp] = a;
    }
  }
  int64_t hcox = maxh + 1;
  mpz_class den = 1;
  for (const auto& x : rv) den = lcm(den, mpz_class(x.get_den()));
  p0_den_ = to_i64(den) * 2 * hcox;
  p0_.assign(n_, 0);
  for (int i = 0; i < n_; ++i) {
    Q v = rv[i] * Q(to_i64(den));
    p0_[i] = to_i64(v.get_num());
  }
  for (int a : d_.pos_roots) {
    int64_t v = dot(p0_, d_.cocov[a]);
    if (v <= 0 || v >= p0_den_) throw std::runtime_error("interior point of C0 is not interior");
  }

  S_.clear();
  s_beta_.clear();
  s_c_.clear();
  s_g_.clear();
  s_root_.clear();
  s_k_.clear();
  for (int i = 0; i < r; ++i) {
    S_.push_back(Elt{Vec8{}, simple_g_[i]});
    s_beta_.push_back(d_.simples[i]);
    s_c_.push_back(0);
    s_g_.push_back(simple_g_[i]);
    s_root_.push_back(d_.simples[i]);
    s_k_.push_back(0);
  }
  for (int c = 0; c < ncomp; ++c) {
    int th = theta_[c];
    IMat m = ahk::identity(n_);
    for (int x = 0; x < n_; ++x)
      for (int y = 0; y < n_; ++y) m[x][y] -= d_.roots[th][x] * d_.cocov[th][y];
    auto g = glookup(m);
    if (!g) throw std::runtime_error("reflection in highest root missing from W0");
    S_.push_back(Elt{to_vec8(d_.roots[th]), *g});
    s_beta_.push_back(th);
    s_c_.push_back(1);
    s_g_.push_back(*g);
    s_root_.push_back(d_.negation[th]);
    s_k_.push_back(1);
  }
  const int G = group_size();
  s_lmul_.assign(S_.size(), std::vector<int>(G));
  s_rmul_.assign(S_.size(), std::vector<int>(G));
  for (size_t s = 0; s < S_.size(); ++s)
    for (int g = 0; g < G; ++g) {
      s_lmul_[s][g] = gmul(s_g_[s], g);
      s_rmul_[s][g] = gmul(g, s_g_[s]);
    }
}

void Engine::build_omega() {
  omega_gens_.clear();
  auto add = [&](const Elt& w) {
    if (w == identity()) return;
    if (std::find(omega_gens_.begin(), omega_gens_.end(), w) != omega_gens_.end()) return;
    omega_gens_.push_back(w);
  };
  for (int j = 0; j < n_; ++j) {
    IVec e(n_, 0);
    e[j] = 1;
    add(omega_decompose(translation(e)).omega);
  }
  for (int g : gamma_gen_g_) add(from_g(g));
  dnorm_.clear();
  if (gamma_size() == 1) return;
  IMat rows;
  for (int s : d_.simples) rows.push_back(d_.cocov[s]);
  IMat D = rows.empty() ? ahk::identity(n_) : int_kernel(rows, n_);
  dnorm_.resize(mats_.size());
  for (int g = 0; g < group_size(); ++g) {
    IMat m;
    for (const auto& d : D) {
      Vec8 gd = gact(g, to_vec8(d));
      IVec r(n_);
      for (int i = 0; i < n_; ++i) r[i] = d[i] - gd[i];
      m.push_back(r);
    }
    dnorm_[g] = hnf_rows(m, n_);
  }
}

Elt Engine::omega_normalize(const Elt& e) const {
  if (dnorm_.empty() || dnorm_[e.g].empty()) return e;
  Elt r = e;
  r.lam = to_vec8(reduce_mod(dnorm_[e.g], lam_vec(e)));
  return r;
}

int Engine::gmul(int a, int b) const {
  std::array<int64_t, kMaxRank * kMaxRank> c{};
  const auto& A = mats_[a];
  const auto& B = mats_[b];
  const int n = n_;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      int64_t x = A[i * n + k];
      if (x == 0) continue;
      for (int j = 0; j < n; ++j) c[i * n + j] += x * B[k * n + j];
    }
  int g = lookup_mat(c.data());
  if (g < 0) throw std::logic_error("product left the finite group");
  return g;
}

int Engine::gorder(int a) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (gorder_[a] == 0) {
    int k = 1, x = a;
    while (x != 0) {
      x = gmul(x, a);
      ++k;
    }
    gorder_[a] = k;
  }
  return gorder_[a];
}

IMat Engine::gmatrix(int g) const {
  IMat m(n_, IVec(n_));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m[i][j] = mats_[g][i * n_ + j];
  return m;
}

std::optional<int> Engine::glookup(const IMat& m) const {
  std::array<int64_t, kMaxRank * kMaxRank> c{};
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) c[i * n_ + j] = m[i][j];
  int g = lookup_mat(c.data());
  if (g < 0) return std::nullopt;
  return g;
}

Vec8 Engine::gact(int g, const Vec8& x) const {
  Vec8 out{};
  const auto& M = mats_[g];
  for (int i = 0; i < n_; ++i) {
    int64_t s = 0;
    for (int j = 0; j < n_; ++j)
      if (M[i * n_ + j] != 0) s = add_ck(s, mul_ck(M[i * n_ + j], x[j]));
    out[i] = s;
  }
  return out;
}

std::vector<int> Engine::weyl_word(int g) const {
  std::vector<int> w;
  int x = g / gamma_size();
  while (x != 0) {
    w.push_back(wparent_s_[x]);
    x = wparent_[x];
  }
  return w;
}

std::vector<int> Engine::gamma_word(int g) const {
  std::vector<int> w;
  int x = gamma_of(g);
  while (x != 0) {
    w.push_back(gparent_gen_[x]);
    x = gparent_[x];
  }
  return w;
}

int Engine::finite_length(int g) const { return wlen_[g / gamma_size()]; }

Elt Engine::translation(const IVec& lam) const {
  if (static_cast<int>(lam.size()) != n_) throw std::invalid_argument("translation vector has wrong rank");
  return Elt{to_vec8(lam), 0};
}

Elt Engine::from_g(int g) const { return Elt{Vec8{}, g}; }

Elt Engine::mul(const Elt& a, const Elt& b) const {
  Vec8 x = gact(a.g, b.lam);
  Elt out;
  for (int i = 0; i < n_; ++i) out.lam[i] = add_ck(a.lam[i], x[i]);
  out.g = gmul(a.g, b.g);
  return out;
}

Elt Engine::inv(const Elt& a) const {
  Elt out;
  out.g = ginv_[a.g];
  Vec8 x = gact(out.g, a.lam);
  for (int i = 0; i < n_; ++i) out.lam[i] = -x[i];
  return out;
}

IVec Engine::lam_vec(const Elt& e) const { return IVec(e.lam.begin(), e.lam.begin() + n_); }

QVec Engine::act(const Elt& e, const QVec& v) const {
  QVec out(n_);
  for (int i = 0; i < n_; ++i) {
    Q s = Q(static_cast<long>(e.lam[i]));
    for (int j = 0; j < n_; ++j)
      if (mats_[e.g][i * n_ + j] != 0) s += Q(static_cast<long>(mats_[e.g][i * n_ + j])) * v[j];
    out[i] = s;
  }
  return out;
}

Elt Engine::smul_left(int s, const Elt& e) const {
  Elt out = e;
  int b = s_beta_[s];
  int64_t f = sub_ck(pair8(e.lam, d_.cocov[b], n_), s_c_[s]);
  if (f != 0)
    for (int i = 0; i < n_; ++i) out.lam[i] = sub_ck(out.lam[i], mul_ck(f, d_.roots[b][i]));
  out.g = s_lmul_[s][e.g];
  return out;
}

Elt Engine::smul_right(const Elt& e, int s) const {
  Elt out = e;
  if (s_c_[s] != 0) {
    const IVec& gb = d_.roots[groot(e.g, s_beta_[s])];
    for (int i = 0; i < n_; ++i) out.lam[i] = add_ck(out.lam[i], mul_ck(s_c_[s], gb[i]));
  }
  out.g = s_rmul_[s][e.g];
  return out;
}

bool Engine::right_descent(const Elt& e, int s) const {
  int gb = groot(e.g, s_root_[s]);
  int64_t k = sub_ck(s_k_[s], pair8(e.lam, d_.cocov[gb], n_));
  return k < 0 || (k == 0 && !d_.positive[gb]);
}

bool Engine::left_descent(int s, const Elt& e) const {
  int b = s_root_[s];
  int gb = groot(ginv_[e.g], b);
  int64_t k = add_ck(s_k_[s], pair8(e.lam, d_.cocov[b], n_));
  return k < 0 || (k == 0 && !d_.positive[gb]);
}

int Engine::length(const Elt& e) const {
  int64_t total = 0;
  int gi = ginv_[e.g];
  for (int a : d_.pos_roots) {
    int64_t p = pair8(e.lam, d_.cocov[a], n_);
    if (d_.positive[groot(gi, a)])
      total += p < 0 ? -p : p;
    else
      total += (p - 1) < 0 ? 1 - p : p - 1;
  }
  return static_cast<int>(total);
}

KVec Engine::alcove_k_at(const Elt& e, const IVec& point, int64_t den) const {
  // k(alpha) = ceil(<lam + g(point)/den, alpha^vee>)
  IVec q(n_, 0);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) q[i] = add_ck(q[i], mul_ck(mats_[e.g][i * n_ + j], point[j]));
  KVec out;
  out.k.resize(nroots_);
  for (int a = 0; a < nroots_; ++a) {
    int64_t val = add_ck(mul_ck(den, pair8(e.lam, d_.cocov[a], n_)), dot(q, d_.cocov[a]));
    out.k[a] = ceil_div(val, den);
  }
  return out;
}

KVec Engine::alcove_k(const Elt& e) const { return alcove_k_at(e, p0_, p0_den_); }

int Engine::length_oracle(const Elt& e) const {
  KVec k = alcove_k(e);
  int64_t total = 0;
  for (int a : d_.pos_roots) total += k.k[a] >= 1 ? k.k[a] - 1 : 1 - k.k[a];
  return static_cast<int>(total);
}

ReducedWord Engine::reduced_word(const Elt& e) const {
  ReducedWord rw;
  Elt x = e;
  for (;;) {
    int found = -1;
    for (int s = 0; s < num_S(); ++s)
      if (left_descent(s, x)) {
        found = s;
        break;
      }
    if (found < 0) break;
    rw.word.push_back(found);
    x = smul_left(found, x);
  }
  rw.omega = x;
  return rw;
}

OmegaDecomp Engine::omega_decompose(const Elt& e) const {
  OmegaDecomp od;
  Elt x = e;
  std::vector<int> rev;
  for (;;) {
    int found = -1;
    for (int s = 0; s < num_S(); ++s)
      if (right_descent(x, s)) {
        found = s;
        break;
      }
    if (found < 0) break;
    rev.push_back(found);
    x = smul_right(x, found);
  }
  od.omega = x;
  od.word.assign(rev.rbegin(), rev.rend());
  return od;
}

bool Engine::is_central_translation(const Elt& e) const {
  if (e.g != 0) return false;
  for (int a = 0; a < nroots_; ++a)
    if (pair8(e.lam, d_.cocov[a], n_) != 0) return false;
  for (int g : gamma_gen_g_)
    if (gact(g, e.lam) != e.lam) return false;
  return true;
}

std::vector<Elt> Engine::omega_conjugators() const {
  std::vector<Elt> out = omega_gens_;
  for (const auto& g : omega_gens_) out.push_back(inv(g));
  return out;
}

std::vector<Elt> Engine::omega_reps() const {
  // W0-invariant lattice; Gamma may move it (x -> -w0 x negates the center of GL_n), so
  // these are not central in general
  IMat rows;
  for (int s : d_.simples) rows.push_back(d_.cocov[s]);
  IMat central = rows.empty() ? ahk::identity(n_) : int_kernel(rows, n_);
  IMat h = hnf_rows(central, n_);
  auto norm = [&](Elt e) {
    IVec l = reduce_mod(h, lam_vec(e));
    e.lam = to_vec8(l);
    return e;
  };
  std::vector<Elt> gens = omega_gens_;
  for (const auto& g : omega_gens_) gens.push_back(inv(g));
  std::vector<Elt> out{identity()};
  absl::flat_hash_map<Elt, int> seen{{identity(), 0}};
  for (size_t q = 0; q < out.size(); ++q)
    for (const auto& g : gens) {
      Elt x = norm(mul(out[q], g));
      if (seen.contains(x)) continue;
      seen[x] = 1;
      out.push_back(x);
      if (out.size() > 100000) throw std::runtime_error("Omega modulo central translations is not finite here");
    }
  std::sort(out.begin() + 1, out.end(), [this](const Elt& a, const Elt& b) { return less(a, b); });
  return out;
}

KottwitzValue Engine::kappa(const Elt& e) const {
  return KottwitzValue{kott_.project(lam_vec(e)), gamma_of(e.g)};
}

QVec Engine::newton_point(const Elt& e) const {
  int ord = gorder(e.g);
  Vec8 acc{}, x = e.lam;
  for (int i = 0; i < ord; ++i) {
    for (int j = 0; j < n_; ++j) acc[j] = add_ck(acc[j], x[j]);
    x = gact(e.g, x);
  }
  QVec nu(n_);
  for (int j = 0; j < n_; ++j) nu[j] = Q(static_cast<long>(acc[j]), ord);
  for (auto& v : nu) v.canonicalize();
  return nu;
}

QVec Engine::newton_dominant(const Elt& e) const { return dominant_rep(d_, newton_point(e)).vec; }

QMat Engine::fixed_dirs(int g) const {
  QMat A(n_, QVec(n_));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) A[i][j] = Q(static_cast<long>(mats_[g][i * n_ + j] - (i == j ? 1 : 0)));
  auto sol = solve_q(A, QVec(n_, Q(0)), n_);
  return rref(sol->kernel);
}

AffineSubspace Engine::fixed_space(const Elt& e) const {
  QVec nu = newton_point(e);
  QMat A(n_, QVec(n_));
  QVec b(n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) A[i][j] = Q(static_cast<long>(mats_[e.g][i * n_ + j] - (i == j ? 1 : 0)));
    b[i] = nu[i] - Q(static_cast<long>(e.lam[i]));
  }
  auto sol = solve_q(A, b, n_);
  if (!sol) throw std::logic_error("V_w is empty, which cannot happen");
  AffineSubspace E;
  E.dirs = rref(sol->kernel);
  E.base = sol->particular;
  for (const auto& d : E.dirs) {
    int c = pivot_col(d);
    Q f = E.base[c];
    if (f != 0)
      for (int i = 0; i < n_; ++i) E.base[i] -= f * d[i];
  }
  if (act(e, E.base) != [&] {
        QVec t = E.base;
        for (int i = 0; i < n_; ++i) t[i] += nu[i];
        return t;
      }())
    throw std::logic_error("fixed-space base point fails its defining equation");
  return E;
}

bool Engine::is_regular_in(const QVec& p, const AffineSubspace& E, Region region) const {
  if (!E.contains(p)) return false;
  for (int a : d_.pos_roots) {
    Q v = qpair(p, d_.cocov[a]);
    bool constant = std::all_of(E.dirs.begin(), E.dirs.end(),
                                [&](const QVec& d) { return qpair(d, d_.cocov[a]) == 0; });
    if (region == Region::AlcoveClosure) {
      if (v < 0 || v > 1) return false;
      if ((v == 0 || v == 1) && !constant) return false;
    } else {
      if (v < 0) return false;
      if (v == 0 && !constant) return false;
    }
  }
  return true;
}

std::optional<QVec> Engine::regular_point(const AffineSubspace& E, Region region) const {
  const int nv = E.dim();
  QMat g;
  QVec h;
  for (int a : d_.pos_roots) {
    Q c = qpair(E.base, d_.cocov[a]);
    QVec row(nv);
    bool constant = true;
    for (int j = 0; j < nv; ++j) {
      row[j] = qpair(E.dirs[j], d_.cocov[a]);
      if (row[j] != 0) constant = false;
    }
    if (constant) {
      if (c < 0) return std::nullopt;
      if (region == Region::AlcoveClosure && c > 1) return std::nullopt;
      continue;
    }
    g.push_back(row);
    h.push_back(c);
    if (region == Region::AlcoveClosure) {
      for (auto& x : row) x = -x;
      g.push_back(row);
      h.push_back(1 - c);
    }
  }
  if (g.empty()) return E.base;
  MarginResult res = max_margin(g, h, nv, Q(1));
  if (res.margin <= 0) return std::nullopt;
  QVec p = E.base;
  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < n_; ++i) p[i] += res.t[j] * E.dirs[j][i];
  return p;
}

namespace {
uint64_t jmask(const std::vector<int>& J) {
  uint64_t m = 0;
  for (int j : J) m |= (uint64_t{1} << j);
  return m;
}
}  // namespace

bool Engine::in_WJ_weyl(int g, const std::vector<int>& J) const {
  uint64_t key = jmask(J);
  std::lock_guard<std::mutex> lock(mu_);
  auto it = wjw_cache_.find(key);
  if (it == wjw_cache_.end()) {
    std::vector<char> mem(group_size(), 0);
    std::vector<int> list{0};
    mem[0] = 1;
    for (size_t q = 0; q < list.size(); ++q)
      for (int j : J) {
        int x = s_rmul_[j][list[q]];
        if (!mem[x]) {
          mem[x] = 1;
          list.push_back(x);
        }
      }
    it = wjw_cache_.emplace(key, std::move(mem)).first;
  }
  return it->second[g];
}

bool Engine::in_WJ(int g, const std::vector<int>& J) const {
  uint64_t key = jmask(J);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = wj_cache_.find(key);
    if (it != wj_cache_.end()) return it->second[g];
  }
  std::vector<char> rj(nroots_, 0);
  for (int a = 0; a < nroots_; ++a) {
    bool in = true;
    for (int k = 0; k < d_.num_simples(); ++k)
      if (d_.simple_coeffs[a][k] != 0 && std::find(J.begin(), J.end(), k) == J.end()) in = false;
    rj[a] = in;
  }
  std::vector<int> gens;
  for (int j : J) gens.push_back(simple_g_[j]);
  for (int t = 1; t < gamma_size(); ++t) {
    bool ok = true;
    for (int a = 0; a < nroots_; ++a)
      if (rj[a] && !rj[groot(t, a)]) ok = false;
    if (ok) gens.push_back(t);
  }
  std::vector<char> mem(group_size(), 0);
  std::vector<int> list{0};
  mem[0] = 1;
  for (size_t q = 0; q < list.size(); ++q)
    for (int x : gens) {
      int y = gmul(list[q], x);
      if (!mem[y]) {
        mem[y] = 1;
        list.push_back(y);
      }
    }
  std::lock_guard<std::mutex> lock(mu_);
  auto it = wj_cache_.emplace(key, std::move(mem)).first;
  return it->second[g];
}

std::vector<int> Engine::WJ_elements(const std::vector<int>& J) const {
  std::vector<int> out;
  for (int g = 0; g < group_size(); ++g)
    if (in_WJ_weyl(g, J)) out.push_back(g);
  return out;
}

bool Engine::is_p_alcove(const Elt& e, const std::vector<int>& J, int z) const {
  int c = gmul(gmul(z, e.g), ginv_[z]);
  if (!in_WJ(c, J)) return false;
  KVec k = alcove_k(e);
  int zi = ginv_[z];
  for (int b : d_.pos_roots) {
    bool inRJ = true;
    for (int i = 0; i < d_.num_simples(); ++i)
      if (d_.simple_coeffs[b][i] != 0 && std::find(J.begin(), J.end(), i) == J.end()) inRJ = false;
    if (inRJ) continue;
    int a = groot(zi, b);
    int k0 = d_.positive[a] ? 1 : 0;
    if (k.k[a] < k0) return false;
  }
  return true;
}

Elt Engine::coset_min(const Elt& e, const std::vector<int>& J, bool left) const {
  Elt x = e;
  for (bool changed = true; changed;) {
    changed = false;
    for (int j : J) {
      if (left ? left_descent(j, x) : right_descent(x, j)) {
        x = left ? smul_left(j, x) : smul_right(x, j);
        changed = true;
      }
    }
  }
  return x;
}

bool Engine::in_min_coset(const Elt& e, const std::vector<int>& J, bool left) const {
  for (int j : J)
    if (left ? left_descent(j, e) : right_descent(e, j)) return false;
  return true;
}

std::vector<int> Engine::min_coset_reps_W0(const std::vector<int>& J, bool left) const {
  std::vector<int> out;
  for (int g = 0; g < group_size(); g += gamma_size()) {
    bool ok = true;
    for (int j : J) {
      int a = d_.simples[j];
      int img = left ? groot(ginv_[g], a) : groot(g, a);
      if (!d_.positive[img]) ok = false;
    }
    if (ok) out.push_back(g);
  }
  return out;
}

bool Engine::less(const Elt& a, const Elt& b) const {
  int la = length(a), lb = length(b);
  if (la != lb) return la < lb;
  for (int i = 0; i < n_; ++i)
    if (a.lam[i] != b.lam[i]) return a.lam[i] < b.lam[i];
  return grank_[a.g] < grank_[b.g];
}

std::string Engine::format(const Elt& e) const {
  std::string out = fmt::format("t[{}]", fmt::join(lam_vec(e), ","));
  int wg = weyl_of(e.g);
  if (wg != 0) {
    if (d_.type_a_standard) {
      std::vector<int> sigma(n_);
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
          if (mats_[wg][j * n_ + i] == 1) sigma[i] = j;
      std::vector<char> done(n_, 0);
      std::string cyc;
      for (int i = 0; i < n_; ++i) {
        if (done[i] || sigma[i] == i) continue;
        std::vector<int> c;
        for (int x = i; !done[x]; x = sigma[x]) {
          done[x] = 1;
          c.push_back(x + 1);
        }
        cyc += fmt::format("({})", fmt::join(c, " "));
      }
      out += "*" + cyc;
    } else {
      std::vector<int> img;
      for (int s : d_.simples) img.push_back(groot(wg, s) + 1);
      out += fmt::format("*[{}]", fmt::join(img, ","));
    }
  }
  auto gw = gamma_word(e.g);
  for (int j : gw) out += fmt::format("*g{}", j);
  return out;
}

namespace {

std::vector<std::string> split_top(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if (c == '*' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c)) || depth > 0) {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<int64_t> parse_ints(const std::string& body) {
  std::vector<int64_t> v;
  std::string t;
  for (char c : body + ",") {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!t.empty()) {
        size_t pos = 0;
        long long x = std::stoll(t, &pos);
        if (pos != t.size()) throw std::invalid_argument("bad integer '" + t + "'");
        v.push_back(x);
        t.clear();
      }
    } else {
      t += c;
    }
  }
  return v;
}

}  // namespace

Elt Engine::parse(const std::string& text) const {
  Elt acc = identity();
  if (text.empty()) throw std::invalid_argument("empty element");
  for (const auto& tok : split_top(text)) {
    if (tok.empty()) throw std::invalid_argument("empty factor in '" + text + "'");
    Elt f;
    if (tok == "1" || tok == "e") {
      f = identity();
    } else if (tok[0] == 't' && tok.size() >= 3 && tok[1] == '[' && tok.back() == ']') {
      auto v = parse_ints(tok.substr(2, tok.size() - 3));
      if (static_cast<int>(v.size()) != n_) throw std::invalid_argument("translation has wrong rank: " + tok);
      f = translation(v);
    } else if (tok[0] == '(') {
      if (!d_.type_a_standard) throw std::invalid_argument("cycle notation needs a type-A standard datum");
      std::vector<int> sigma(n_);
      std::iota(sigma.begin(), sigma.end(), 0);
      size_t pos = 0;
      // cycles compose right to left, as permutations
      std::vector<std::vector<int>> cycles;
      while (pos < tok.size()) {
        if (tok[pos] != '(') throw std::invalid_argument("bad cycle notation: " + tok);
        size_t close = tok.find(')', pos);
        if (close == std::string::npos) throw std::invalid_argument("unclosed cycle: " + tok);
        auto c = parse_ints(tok.substr(pos + 1, close - pos - 1));
        std::vector<int> ci;
        for (auto x : c) {
          if (x < 1 || x > n_) throw std::invalid_argument("cycle entry out of range: " + tok);
          ci.push_back(static_cast<int>(x) - 1);
        }
        cycles.push_back(ci);
        pos = close + 1;
      }
      for (auto it = cycles.rbegin(); it != cycles.rend(); ++it) {
        std::vector<int> cy(n_);
        std::iota(cy.begin(), cy.end(), 0);
        std::set<int> seen(it->begin(), it->end());
        if (seen.size() != it->size()) throw std::invalid_argument("repeated entry in cycle: " + tok);
        for (size_t k = 0; k < it->size(); ++k) cy[(*it)[k]] = (*it)[(k + 1) % it->size()];
        std::vector<int> comp(n_);
        for (int i = 0; i < n_; ++i) comp[i] = cy[sigma[i]];
        sigma = comp;
      }
      IMat m(n_, IVec(n_, 0));
      for (int i = 0; i < n_; ++i) m[sigma[i]][i] = 1;
      auto g = glookup(m);
      if (!g) throw std::invalid_argument("permutation not in W0: " + tok);
      f = from_g(*g);
    } else if (tok[0] == '[') {
      auto v = parse_ints(tok.substr(1, tok.size() - 2));
      if (static_cast<int>(v.size()) != d_.num_simples()) throw std::invalid_argument("simple-image list has wrong length: " + tok);
      int found = -1;
      for (int g = 0; g < group_size() && found < 0; g += gamma_size()) {
        bool ok = true;
        for (int i = 0; i < d_.num_simples() && ok; ++i) ok = groot(g, d_.simples[i]) + 1 == v[i];
        if (ok) found = g;
      }
      if (found < 0) throw std::invalid_argument("no Weyl element with simple images " + tok);
      f = from_g(found);
    } else if (tok[0] == 'g') {
      int j = std::stoi(tok.substr(1));
      if (j < 0 || j >= static_cast<int>(gamma_gen_g_.size())) throw std::invalid_argument("unknown Gamma generator " + tok);
      f = from_g(gamma_gen_g_[j]);
    } else if (tok[0] == 's') {
      std::string rest = tok.substr(1);
      int idx;
      if (rest.rfind("0_", 0) == 0) {
        int c = std::stoi(rest.substr(2));
        if (c < 0 || c >= component_count()) throw std::invalid_argument("unknown affine reflection " + tok);
        idx = num_finite_S() + c;
      } else {
        int i = std::stoi(rest);
        if (i == 0) {
          if (component_count() == 0) throw std::invalid_argument("no affine reflection");
          idx = num_finite_S();
        } else {
          if (i < 1 || i > num_finite_S()) throw std::invalid_argument("unknown simple reflection " + tok);
          idx = i - 1;
        }
      }
      f = S_[idx];
    } else {
      throw std::invalid_argument("cannot parse factor '" + tok + "'");
    }
    acc = mul(acc, f);
  }
  return acc;
}

Elt Parabolic::to_J(const Elt& e) const {
  int g = to_j[e.g];
  if (g < 0) throw std::invalid_argument("element is not in W~_J");
  return Elt{e.lam, g};
}

Elt Parabolic::from_J(const Elt& e) const { return Elt{e.lam, from_j[e.g]}; }

std::unique_ptr<Parabolic> make_parabolic(const Engine& E, const std::vector<int>& J) {
  auto p = std::make_unique<Parabolic>();
  p->parent = &E;
  p->sub = subdatum(E.datum(), J);
  p->J = p->sub.J;
  p->E = std::make_unique<Engine>(p->sub.datum);
  p->to_j.assign(E.group_size(), -1);
  p->from_j.assign(p->E->group_size(), -1);
  for (int g = 0; g < E.group_size(); ++g) {
    if (!E.in_WJ(g, p->J)) continue;
    auto h = p->E->glookup(E.gmatrix(g));
    if (!h) throw std::logic_error("W_J x| Gamma_J element missing from the parabolic engine");
    p->to_j[g] = *h;
    p->from_j[*h] = g;
  }
  for (int h : p->from_j)
    if (h < 0) throw std::logic_error("parabolic engine has elements outside the parent group");
  return p;
}

}  // namespace ahk
