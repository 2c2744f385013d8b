#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "reyeweb/scalar.hpp"

namespace reyeweb {

template <class K>
using Vec4 = std::array<K, 4>;

inline bool field_is_zero(const Rat& x) { return sgn(x) == 0; }
inline bool field_is_zero(const CRat& x) { return x.is_zero(); }

/// Dense 4x4 matrix over the exact or floating track.
template <class K>
struct Mat4 {
  std::array<K, 16> a{};

  K& operator()(int i, int j) { return a[4 * i + j]; }
  const K& operator()(int i, int j) const { return a[4 * i + j]; }

  static Mat4 zero() { return Mat4{}; }

  static Mat4 identity() {
    Mat4 m{};
    for (int i = 0; i < 4; ++i) m(i, i) = K(1);
    return m;
  }

  Mat4 operator+(const Mat4& o) const {
    Mat4 r;
    for (int i = 0; i < 16; ++i) r.a[i] = a[i] + o.a[i];
    return r;
  }

  Mat4 operator-(const Mat4& o) const {
    Mat4 r;
    for (int i = 0; i < 16; ++i) r.a[i] = a[i] - o.a[i];
    return r;
  }

  Mat4 operator*(const K& s) const {
    Mat4 r;
    for (int i = 0; i < 16; ++i) r.a[i] = a[i] * s;
    return r;
  }

  Vec4<K> operator*(const Vec4<K>& x) const {
    Vec4<K> y{};
    for (int i = 0; i < 4; ++i) {
      K acc(0);
      for (int j = 0; j < 4; ++j) acc = acc + (*this)(i, j) * x[j];
      y[i] = acc;
    }
    return y;
  }

  Mat4 transposed() const {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) r(i, j) = (*this)(j, i);
    return r;
  }

  bool is_symmetric() const {
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        if (!((*this)(i, j) == (*this)(j, i))) return false;
    return true;
  }
};

template <class K>
K bilinear(const Vec4<K>& x, const Mat4<K>& m, const Vec4<K>& y) {
  K acc(0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) acc = acc + x[i] * m(i, j) * y[j];
  return acc;
}

template <class K>
K det3(const std::array<K, 9>& s) {
  return s[0] * (s[4] * s[8] - s[5] * s[7]) - s[1] * (s[3] * s[8] - s[5] * s[6]) +
         s[2] * (s[3] * s[7] - s[4] * s[6]);
}

/// Adjugate of a 3x3 (transpose of the cofactor matrix), row-major.
template <class K>
std::array<K, 9> adj3(const std::array<K, 9>& s) {
  std::array<K, 9> r;
  r[0] = s[4] * s[8] - s[5] * s[7];
  r[1] = s[2] * s[7] - s[1] * s[8];
  r[2] = s[1] * s[5] - s[2] * s[4];
  r[3] = s[5] * s[6] - s[3] * s[8];
  r[4] = s[0] * s[8] - s[2] * s[6];
  r[5] = s[2] * s[3] - s[0] * s[5];
  r[6] = s[3] * s[7] - s[4] * s[6];
  r[7] = s[1] * s[6] - s[0] * s[7];
  r[8] = s[0] * s[4] - s[1] * s[3];
  return r;
}

/// 3x3 submatrix of m obtained by deleting row dr and column dc.
template <class K>
std::array<K, 9> submatrix3(const Mat4<K>& m, int dr, int dc) {
  std::array<K, 9> s;
  int idx = 0;
  for (int i = 0; i < 4; ++i) {
    if (i == dr) continue;
    for (int j = 0; j < 4; ++j) {
      if (j == dc) continue;
      s[idx++] = m(i, j);
    }
  }
  return s;
}

/// Minor of m at (deleted row dr, deleted column dc).
template <class K>
K minor3(const Mat4<K>& m, int dr, int dc) {
  return det3(submatrix3(m, dr, dc));
}

template <class K>
K det4(const Mat4<K>& m) {
  K acc(0);
  for (int j = 0; j < 4; ++j) {
    K term = m(0, j) * minor3(m, 0, j);
    if (j % 2 == 0)
      acc = acc + term;
    else
      acc = acc - term;
  }
  return acc;
}

template <class K>
Mat4<CD> to_cd_mat(const Mat4<K>& m) {
  Mat4<CD> r;
  for (int i = 0; i < 16; ++i) r.a[i] = to_cd(m.a[i]);
  return r;
}

inline Vec4<CD> to_cd_vec(const Vec4<Rat>& v) {
  return {to_cd(v[0]), to_cd(v[1]), to_cd(v[2]), to_cd(v[3])};
}

// ---- floating vector helpers ---------------------------------------------

inline double vnorm(const std::vector<CD>& v) {
  double s = 0;
  for (const CD& x : v) s += std::norm(x);
  return std::sqrt(s);
}

template <std::size_t N>
double vnorm(const std::array<CD, N>& v) {
  double s = 0;
  for (const CD& x : v) s += std::norm(x);
  return std::sqrt(s);
}

/// Hermitian inner product, conjugating the first argument.
inline CD vdot(const std::vector<CD>& a, const std::vector<CD>& b) {
  CD s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

template <std::size_t N>
CD vdot(const std::array<CD, N>& a, const std::array<CD, N>& b) {
  CD s = 0;
  for (std::size_t i = 0; i < N; ++i) s += std::conj(a[i]) * b[i];
  return s;
}

/// Scale so the entry of largest modulus becomes exactly 1. Canonical
/// representative used for dedup, sorting and serialization.
template <class V>
V proj_normalize(V v) {
  int best = 0;
  double bm = -1;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double m = std::abs(v[i]);
    if (m > bm) {
      bm = m;
      best = static_cast<int>(i);
    }
  }
  if (bm == 0.0) throw DegenerateInput("zero vector has no projective class");
  CD pivot = v[best];
  for (auto& x : v) x /= pivot;
  return v;
}

/// Chordal distance between projective classes, in [0, 1].
template <class V>
double proj_distance(const V& a, const V& b) {
  double na = 0, nb = 0;
  CD inner = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += std::norm(a[i]);
    nb += std::norm(b[i]);
    inner += std::conj(a[i]) * b[i];
  }
  if (na == 0 || nb == 0) throw DegenerateInput("zero vector has no projective class");
  double c = std::abs(inner) * std::abs(inner) / (na * nb);
  return std::sqrt(std::max(0.0, 1.0 - c));
}

/// Strict-weak projective order on canonical representatives: compare
/// (re, im) lexicographically entry by entry.
template <class V>
bool proj_less(const V& a, const V& b) {
  V ca = proj_normalize(a), cb = proj_normalize(b);
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (ca[i].real() != cb[i].real()) return ca[i].real() < cb[i].real();
    if (ca[i].imag() != cb[i].imag()) return ca[i].imag() < cb[i].imag();
  }
  return false;
}

// ---- dynamic complex matrices ---------------------------------------------

class MatC {
 public:
  MatC() : rows_(0), cols_(0) {}
  MatC(int rows, int cols) : rows_(rows), cols_(cols), a_(rows * cols, CD(0)) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  CD& at(int i, int j) { return a_[i * cols_ + j]; }
  const CD& at(int i, int j) const { return a_[i * cols_ + j]; }

  MatC transposed() const {
    MatC t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
  }

 private:
  int rows_, cols_;
  std::vector<CD> a_;
};

struct SvdResult {
  std::vector<double> sigma;  ///< descending
  MatC u;                     ///< rows() x k, orthonormal columns for sigma > 0
  MatC v;                     ///< cols() x cols(), unitary
};

/// One-sided complex Jacobi SVD. Intended for matrices up to 8x8.
SvdResult svd(const MatC& a);

/// Number of singular values exceeding tol * sigma_max (0 for a zero matrix).
int numeric_rank(const MatC& a, double tol);

/// Like numeric_rank, but throws RankDeficiencyAmbiguous when some ratio
/// sigma_i / sigma_max falls within a factor `band` of tol.
int numeric_rank_checked(const MatC& a, double tol, double band = 10.0);

/// Orthonormal basis of {x : a x = 0} at tolerance tol (right null space).
std::vector<std::vector<CD>> nullspace(const MatC& a, double tol);

/// Singular values of a, descending.
std::vector<double> singular_values(const MatC& a);

/// Square solve by partial-pivot LU. Throws DegenerateInput when singular.
std::vector<CD> solve_square(MatC a, std::vector<CD> b);

/// Least squares min |a x - b| via the SVD pseudo-inverse.
std::vector<CD> lstsq(const MatC& a, const std::vector<CD>& b, double tol = 1e-13);

// ---- exact elimination ------------------------------------------------------

/// Rank by fraction-free-style Gaussian elimination over a field (Rat or CRat).
template <class F>
int gauss_rank(std::vector<F> a, int rows, int cols) {
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int pivot = -1;
    for (int r = rank; r < rows; ++r) {
      if (!field_is_zero(a[r * cols + col])) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    if (pivot != rank)
      for (int j = 0; j < cols; ++j) std::swap(a[pivot * cols + j], a[rank * cols + j]);
    for (int r = rank + 1; r < rows; ++r) {
      if (field_is_zero(a[r * cols + col])) continue;
      F factor = a[r * cols + col] / a[rank * cols + col];
      for (int j = col; j < cols; ++j)
        a[r * cols + j] = a[r * cols + j] - factor * a[rank * cols + j];
    }
    ++rank;
  }
  return rank;
}

/// Basis of the right kernel {x : a x = 0} over a field, via RREF.
template <class F>
std::vector<std::vector<F>> gauss_kernel(std::vector<F> a, int rows, int cols) {
  std::vector<int> pivot_col;
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int pivot = -1;
    for (int r = rank; r < rows; ++r) {
      if (!field_is_zero(a[r * cols + col])) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    if (pivot != rank)
      for (int j = 0; j < cols; ++j) std::swap(a[pivot * cols + j], a[rank * cols + j]);
    F inv = F(1) / a[rank * cols + col];
    for (int j = col; j < cols; ++j) a[rank * cols + j] = a[rank * cols + j] * inv;
    for (int r = 0; r < rows; ++r) {
      if (r == rank || field_is_zero(a[r * cols + col])) continue;
      F factor = a[r * cols + col];
      for (int j = col; j < cols; ++j)
        a[r * cols + j] = a[r * cols + j] - factor * a[rank * cols + j];
    }
    pivot_col.push_back(col);
    ++rank;
  }
  std::vector<bool> is_pivot(cols, false);
  for (int c : pivot_col) is_pivot[c] = true;
  std::vector<std::vector<F>> basis;
  for (int free_col = 0; free_col < cols; ++free_col) {
    if (is_pivot[free_col]) continue;
    std::vector<F> x(cols, F(0));
    x[free_col] = F(1);
    for (int r = 0; r < rank; ++r) x[pivot_col[r]] = -a[r * cols + free_col];
    basis.push_back(std::move(x));
  }
  return basis;
}

template <class F>
int exact_rank4(const Mat4<F>& m) {
  std::vector<F> a(m.a.begin(), m.a.end());
  return gauss_rank(std::move(a), 4, 4);
}

}  // namespace reyeweb
