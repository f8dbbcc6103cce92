#include "affhecke/linalg.hpp"

#include <algorithm>
#include <utility>

namespace ahk {

int64_t to_i64(const mpz_class& z) {
  if (!z.fits_slong_p()) throw OverflowError("integer does not fit in int64");
  return z.get_si();
}

IMat identity(int n) {
  IMat m(n, IVec(n, 0));
  for (int i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

IMat transpose(const IMat& a) {
  if (a.empty()) return {};
  IMat t(a[0].size(), IVec(a.size()));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
  return t;
}

IMat matmul(const IMat& a, const IMat& b) {
  size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  IMat c(n, IVec(m, 0));
  for (size_t i = 0; i < n; ++i)
    for (size_t l = 0; l < k; ++l) {
      if (a[i][l] == 0) continue;
      for (size_t j = 0; j < m; ++j) c[i][j] = add_ck(c[i][j], mul_ck(a[i][l], b[l][j]));
    }
  return c;
}

IVec matvec(const IMat& a, const IVec& x) {
  IVec y(a.size(), 0);
  for (size_t i = 0; i < a.size(); ++i) y[i] = dot(a[i], x);
  return y;
}

int64_t dot(const IVec& a, const IVec& b) {
  int64_t s = 0;
  for (size_t i = 0; i < a.size(); ++i) s = add_ck(s, mul_ck(a[i], b[i]));
  return s;
}

namespace {

using ZMat = std::vector<std::vector<mpz_class>>;

ZMat to_z(const IMat& a, int nrows, int ncols) {
  ZMat z(nrows, std::vector<mpz_class>(ncols));
  for (int i = 0; i < nrows; ++i)
    for (int j = 0; j < ncols; ++j) z[i][j] = a[i][j];
  return z;
}

ZMat zid(int n) {
  ZMat m(n, std::vector<mpz_class>(n, 0));
  for (int i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

// rows r1 <- a*r1 + b*r2, r2 <- c*r1 + d*r2 (unimodular 2x2)
void row_combine(std::vector<mpz_class>& r1, std::vector<mpz_class>& r2, const mpz_class& a,
                 const mpz_class& b, const mpz_class& c, const mpz_class& d) {
  for (size_t k = 0; k < r1.size(); ++k) {
    mpz_class x = a * r1[k] + b * r2[k];
    mpz_class y = c * r1[k] + d * r2[k];
    r1[k] = x;
    r2[k] = y;
  }
}

}  // namespace

IMat hnf_rows(const IMat& rows_in, int ncols) {
  ZMat a = to_z(rows_in, static_cast<int>(rows_in.size()), ncols);
  int m = static_cast<int>(a.size());
  int r = 0;
  for (int col = 0; col < ncols && r < m; ++col) {
    for (int i = r + 1; i < m; ++i) {
      if (a[i][col] == 0) continue;
      if (a[r][col] == 0) {
        std::swap(a[r], a[i]);
        continue;
      }
      mpz_class g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a[r][col].get_mpz_t(),
                 a[i][col].get_mpz_t());
      mpz_class u = a[r][col] / g, v = a[i][col] / g;
      row_combine(a[r], a[i], s, t, -v, u);
    }
    if (a[r][col] == 0) continue;
    if (a[r][col] < 0)
      for (auto& x : a[r]) x = -x;
    for (int i = 0; i < r; ++i) {
      mpz_class q;
      mpz_fdiv_q(q.get_mpz_t(), a[i][col].get_mpz_t(), a[r][col].get_mpz_t());
      if (q != 0)
        for (int k = 0; k < ncols; ++k) a[i][k] -= q * a[r][k];
    }
    ++r;
  }
  IMat out;
  for (int i = 0; i < r; ++i) {
    IVec row(ncols);
    for (int k = 0; k < ncols; ++k) row[k] = to_i64(a[i][k]);
    out.push_back(std::move(row));
  }
  return out;
}

IVec reduce_mod(const IMat& h, IVec x) {
  for (const auto& row : h) {
    size_t p = 0;
    while (p < row.size() && row[p] == 0) ++p;
    if (p == row.size()) continue;
    int64_t q = floor_div(x[p], row[p]);
    if (q != 0)
      for (size_t k = 0; k < row.size(); ++k) x[k] = sub_ck(x[k], mul_ck(q, row[k]));
  }
  return x;
}

SNF smith(const IMat& ain, int nrows, int ncols) {
  ZMat a = to_z(ain, nrows, ncols);
  ZMat U = zid(nrows), V = zid(ncols);
  int t = 0;
  auto col_combine = [&](ZMat& m, int c1, int c2, const mpz_class& p, const mpz_class& q,
                         const mpz_class& r, const mpz_class& s) {
    for (auto& row : m) {
      mpz_class x = p * row[c1] + q * row[c2];
      mpz_class y = r * row[c1] + s * row[c2];
      row[c1] = x;
      row[c2] = y;
    }
  };
  while (t < nrows && t < ncols) {
    // pivot: smallest nonzero absolute value in the remaining block
    int pi = -1, pj = -1;
    for (int i = t; i < nrows; ++i)
      for (int j = t; j < ncols; ++j)
        if (a[i][j] != 0 && (pi < 0 || abs(a[i][j]) < abs(a[pi][pj]))) pi = i, pj = j;
    if (pi < 0) break;
    std::swap(a[t], a[pi]);
    std::swap(U[t], U[pi]);
    for (auto& row : a) std::swap(row[t], row[pj]);
    for (auto& row : V) std::swap(row[t], row[pj]);
    bool clean = false;
    while (!clean) {
      clean = true;
      for (int i = t + 1; i < nrows; ++i) {
        if (a[i][t] == 0) continue;
        if (a[i][t] % a[t][t] == 0) {
          mpz_class f = a[i][t] / a[t][t];
          for (int k = 0; k < ncols; ++k) a[i][k] -= f * a[t][k];
          for (int k = 0; k < nrows; ++k) U[i][k] -= f * U[t][k];
          continue;
        }
        mpz_class g, s, u;
        mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), u.get_mpz_t(), a[t][t].get_mpz_t(),
                   a[i][t].get_mpz_t());
        mpz_class p = a[t][t] / g, q = a[i][t] / g;
        row_combine(a[t], a[i], s, u, -q, p);
        row_combine(U[t], U[i], s, u, -q, p);
      }
      for (int j = t + 1; j < ncols; ++j) {
        if (a[t][j] == 0) continue;
        if (a[t][j] % a[t][t] == 0) {
          mpz_class f = a[t][j] / a[t][t];
          for (int k = 0; k < nrows; ++k) a[k][j] -= f * a[k][t];
          for (int k = 0; k < ncols; ++k) V[k][j] -= f * V[k][t];
          continue;
        }
        mpz_class g, s, u;
        mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), u.get_mpz_t(), a[t][t].get_mpz_t(),
                   a[t][j].get_mpz_t());
        mpz_class p = a[t][t] / g, q = a[t][j] / g;
        col_combine(a, t, j, s, u, -q, p);
        col_combine(V, t, j, s, u, -q, p);
        clean = false;
      }
      if (clean) {
        for (int i = t + 1; i < nrows; ++i)
          if (a[i][t] != 0) clean = false;
      }
      if (clean) {
        // divisibility: pivot must divide the remaining block
        for (int i = t + 1; i < nrows && clean; ++i)
          for (int j = t + 1; j < ncols; ++j)
            if (a[i][j] % a[t][t] != 0) {
              for (int k = 0; k < ncols; ++k) a[t][k] += a[i][k];
              for (int k = 0; k < nrows; ++k) U[t][k] += U[i][k];
              clean = false;
              break;
            }
      }
    }
    if (a[t][t] < 0) {
      for (auto& x : a[t]) x = -x;
      for (auto& x : U[t]) x = -x;
    }
    ++t;
  }
  SNF out;
  out.rank = t;
  for (int i = 0; i < t; ++i) out.diag.push_back(a[i][i]);
  out.U = std::move(U);
  out.V = std::move(V);
  return out;
}

IMat int_kernel(const IMat& a, int ncols) {
  int nrows = static_cast<int>(a.size());
  if (nrows == 0) return identity(ncols);
  SNF s = smith(a, nrows, ncols);
  IMat basis;
  for (int j = s.rank; j < ncols; ++j) {
    IVec v(ncols);
    for (int i = 0; i < ncols; ++i) v[i] = to_i64(s.V[i][j]);
    basis.push_back(std::move(v));
  }
  return hnf_rows(basis, ncols);
}

int64_t det_int(const IMat& a) {
  int n = static_cast<int>(a.size());
  QMat m = to_q(a);
  Q det = 1;
  for (int c = 0; c < n; ++c) {
    int p = -1;
    for (int r = c; r < n; ++r)
      if (m[r][c] != 0) {
        p = r;
        break;
      }
    if (p < 0) return 0;
    if (p != c) {
      std::swap(m[p], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (int r = c + 1; r < n; ++r) {
      if (m[r][c] == 0) continue;
      Q f = m[r][c] / m[c][c];
      for (int k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return to_i64(det.get_num());
}

QMat to_q(const IMat& a) {
  QMat q(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    q[i].resize(a[i].size());
    for (size_t j = 0; j < a[i].size(); ++j) q[i][j] = Q(static_cast<long>(a[i][j]));
  }
  return q;
}

QVec to_q(const IVec& a) {
  QVec q(a.size());
  for (size_t i = 0; i < a.size(); ++i) q[i] = Q(static_cast<long>(a[i]));
  return q;
}

int rank_q(QMat m) {
  int rows = static_cast<int>(m.size());
  if (rows == 0) return 0;
  int cols = static_cast<int>(m[0].size());
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = -1;
    for (int i = r; i < rows; ++i)
      if (m[i][c] != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    std::swap(m[p], m[r]);
    for (int i = r + 1; i < rows; ++i) {
      if (m[i][c] == 0) continue;
      Q f = m[i][c] / m[r][c];
      for (int k = c; k < cols; ++k) m[i][k] -= f * m[r][k];
    }
    ++r;
  }
  return r;
}

std::optional<AffineSolution> solve_q(const QMat& a, const QVec& b, int ncols) {
  int rows = static_cast<int>(a.size());
  QMat m(rows, QVec(ncols + 1));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < ncols; ++j) m[i][j] = a[i][j];
    m[i][ncols] = b[i];
  }
  std::vector<int> pivcol;
  int r = 0;
  for (int c = 0; c < ncols && r < rows; ++c) {
    int p = -1;
    for (int i = r; i < rows; ++i)
      if (m[i][c] != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    std::swap(m[p], m[r]);
    Q inv = 1 / m[r][c];
    for (int k = c; k <= ncols; ++k) m[r][k] *= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      Q f = m[i][c];
      for (int k = c; k <= ncols; ++k) m[i][k] -= f * m[r][k];
    }
    pivcol.push_back(c);
    ++r;
  }
  for (int i = r; i < rows; ++i)
    if (m[i][ncols] != 0) return std::nullopt;
  AffineSolution sol;
  sol.particular.assign(ncols, Q(0));
  for (int i = 0; i < r; ++i) sol.particular[pivcol[i]] = m[i][ncols];
  std::vector<bool> is_piv(ncols, false);
  for (int c : pivcol) is_piv[c] = true;
  for (int f = 0; f < ncols; ++f) {
    if (is_piv[f]) continue;
    QVec v(ncols, Q(0));
    v[f] = 1;
    for (int i = 0; i < r; ++i) v[pivcol[i]] = -m[i][f];
    sol.kernel.push_back(std::move(v));
  }
  return sol;
}

MarginResult max_margin(const QMat& g, const QVec& h, int n, const Q& cap) {
  // Variables: t+ (n), t- (n), s+, s-, then one slack per row.
  int m = static_cast<int>(g.size()) + 1;
  int nx = 2 * n + 2;
  int ncol = nx + m;
  int sp = 2 * n, sm = 2 * n + 1;
  QMat a(m, QVec(ncol, Q(0)));
  QVec b(m);
  for (int i = 0; i + 1 < m; ++i) {
    for (int j = 0; j < n; ++j) {
      a[i][j] = -g[i][j];
      a[i][n + j] = g[i][j];
    }
    a[i][sp] = 1;
    a[i][sm] = -1;
    b[i] = h[i];
  }
  a[m - 1][sp] = 1;
  a[m - 1][sm] = -1;
  b[m - 1] = cap;
  for (int i = 0; i < m; ++i) a[i][nx + i] = 1;
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = nx + i;
  QVec red(ncol, Q(0));
  red[sp] = 1;
  red[sm] = -1;

  auto pivot = [&](int r, int c) {
    Q inv = 1 / a[r][c];
    for (auto& x : a[r]) x *= inv;
    b[r] *= inv;
    for (int i = 0; i < m; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Q f = a[i][c];
      for (int k = 0; k < ncol; ++k)
        if (a[r][k] != 0) a[i][k] -= f * a[r][k];
      b[i] -= f * b[r];
    }
    if (red[c] != 0) {
      Q f = red[c];
      for (int k = 0; k < ncol; ++k)
        if (a[r][k] != 0) red[k] -= f * a[r][k];
    }
    basis[r] = c;
  };

  int worst = 0;
  for (int i = 1; i < m; ++i)
    if (b[i] < b[worst]) worst = i;
  if (b[worst] < 0) pivot(worst, sm);

  for (;;) {
    int enter = -1;
    for (int k = 0; k < ncol; ++k)
      if (red[k] > 0) {
        enter = k;
        break;
      }
    if (enter < 0) break;
    int leave = -1;
    Q best;
    for (int i = 0; i < m; ++i) {
      if (a[i][enter] <= 0) continue;
      Q ratio = b[i] / a[i][enter];
      if (leave < 0 || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) throw std::logic_error("max_margin: unbounded");
    pivot(leave, enter);
  }
  QVec x(ncol, Q(0));
  for (int i = 0; i < m; ++i) x[basis[i]] = b[i];
  MarginResult res;
  res.t.resize(n);
  for (int j = 0; j < n; ++j) res.t[j] = x[j] - x[n + j];
  res.margin = x[sp] - x[sm];
  return res;
}

}  // namespace ahk
