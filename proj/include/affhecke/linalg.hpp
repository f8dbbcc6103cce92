#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

namespace ahk {

using IVec = std::vector<int64_t>;
using IMat = std::vector<IVec>;  // row-major
using Q = mpq_class;
using QVec = std::vector<Q>;
using QMat = std::vector<QVec>;

struct OverflowError : std::overflow_error {
  using std::overflow_error::overflow_error;
};

inline int64_t add_ck(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("int64 add overflow");
  return r;
}
inline int64_t sub_ck(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("int64 sub overflow");
  return r;
}
inline int64_t mul_ck(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("int64 mul overflow");
  return r;
}

int64_t to_i64(const mpz_class& z);

// floor / ceil division for b > 0
inline int64_t floor_div(int64_t a, int64_t b) {
  int64_t q = a / b;
  if ((a % b != 0) && (a < 0)) --q;
  return q;
}
inline int64_t ceil_div(int64_t a, int64_t b) { return -floor_div(-a, b); }

IMat identity(int n);
IMat transpose(const IMat& a);
IMat matmul(const IMat& a, const IMat& b);
IVec matvec(const IMat& a, const IVec& x);
int64_t dot(const IVec& a, const IVec& b);

// Hermite normal form of the lattice spanned by the rows; zero rows dropped.
// Pivots are positive and entries above a pivot are reduced into [0, pivot).
IMat hnf_rows(const IMat& rows, int ncols);

// Canonical representative of x modulo the lattice with HNF basis h.
IVec reduce_mod(const IMat& h, IVec x);

struct SNF {
  std::vector<mpz_class> diag;  // nonzero invariant factors, in order
  std::vector<std::vector<mpz_class>> U, V;  // U * A * V = D
  int rank = 0;
};
SNF smith(const IMat& a, int nrows, int ncols);

// Basis of the integer kernel {x : a x = 0}.
IMat int_kernel(const IMat& a, int ncols);

int64_t det_int(const IMat& a);

// Rational linear algebra.
QMat to_q(const IMat& a);
QVec to_q(const IVec& a);
int rank_q(QMat a);

struct AffineSolution {
  QVec particular;
  QMat kernel;  // basis vectors of the solution directions
};
// Solve a x = b over Q. Free variables are set to zero in the particular solution.
std::optional<AffineSolution> solve_q(const QMat& a, const QVec& b, int ncols);

// Maximize min_i (g_i . t + h_i) subject to that minimum being at most cap.
// Returns the maximizing t and the margin. Exact rational simplex.
struct MarginResult {
  QVec t;
  Q margin;
};
MarginResult max_margin(const QMat& g, const QVec& h, int nvars, const Q& cap);

}  // namespace ahk
