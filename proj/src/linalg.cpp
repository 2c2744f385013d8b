#include "reyeweb/linalg.hpp"

#include <algorithm>
#include <numeric>

namespace reyeweb {

namespace {

/// One-sided Jacobi: orthogonalize the columns of `w` in place, accumulating
/// the column operations into `v` (cols x cols, starts as identity).
void jacobi_orthogonalize(MatC& w, MatC& v) {
  const int m = w.rows(), n = w.cols();
  const double eps = 1e-15;
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (int i = 0; i < n - 1; ++i) {
      for (int j = i + 1; j < n; ++j) {
        CD p = 0;
        double q = 0, r = 0;
        for (int k = 0; k < m; ++k) {
          p += std::conj(w.at(k, i)) * w.at(k, j);
          q += std::norm(w.at(k, i));
          r += std::norm(w.at(k, j));
        }
        double ap = std::abs(p);
        if (ap <= eps * std::sqrt(q * r) || ap == 0.0) continue;
        rotated = true;
        // absorb the phase of p into column j, making the pairing real
        CD phase = p / ap;
        for (int k = 0; k < m; ++k) w.at(k, j) *= std::conj(phase);
        for (int k = 0; k < n; ++k) v.at(k, j) *= std::conj(phase);
        double tau = (q - r) / (2.0 * ap);
        double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        for (int k = 0; k < m; ++k) {
          CD wi = w.at(k, i), wj = w.at(k, j);
          w.at(k, i) = c * wi + s * wj;
          w.at(k, j) = -s * wi + c * wj;
        }
        for (int k = 0; k < n; ++k) {
          CD vi = v.at(k, i), vj = v.at(k, j);
          v.at(k, i) = c * vi + s * vj;
          v.at(k, j) = -s * vi + c * vj;
        }
      }
    }
    if (!rotated) break;
  }
}

}  // namespace

SvdResult svd(const MatC& a) {
  const int m = a.rows(), n = a.cols();
  MatC w = a;
  MatC v(n, n);
  for (int i = 0; i < n; ++i) v.at(i, i) = 1;
  jacobi_orthogonalize(w, v);

  std::vector<double> sigma(n);
  for (int j = 0; j < n; ++j) {
    double s = 0;
    for (int i = 0; i < m; ++i) s += std::norm(w.at(i, j));
    sigma[j] = std::sqrt(s);
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return sigma[x] > sigma[y]; });

  SvdResult out;
  out.sigma.resize(n);
  out.u = MatC(m, n);
  out.v = MatC(n, n);
  for (int jj = 0; jj < n; ++jj) {
    int j = order[jj];
    out.sigma[jj] = sigma[j];
    for (int i = 0; i < m; ++i)
      out.u.at(i, jj) = sigma[j] > 0 ? w.at(i, j) / sigma[j] : CD(0);
    for (int i = 0; i < n; ++i) out.v.at(i, jj) = v.at(i, j);
  }
  return out;
}

std::vector<double> singular_values(const MatC& a) { return svd(a).sigma; }

int numeric_rank(const MatC& a, double tol) {
  std::vector<double> s = singular_values(a);
  if (s.empty() || s[0] == 0.0) return 0;
  int rank = 0;
  for (double x : s)
    if (x > tol * s[0]) ++rank;
  return rank;
}

int numeric_rank_checked(const MatC& a, double tol, double band) {
  std::vector<double> s = singular_values(a);
  if (s.empty() || s[0] == 0.0) return 0;
  int rank = 0;
  for (double x : s) {
    double ratio = x / s[0];
    if (ratio > tol / band && ratio <= tol * band)
      throw RankDeficiencyAmbiguous("singular value ratio " + std::to_string(ratio) +
                                    " within a factor " + std::to_string(band) +
                                    " of tolerance " + std::to_string(tol));
    if (ratio > tol) ++rank;
  }
  return rank;
}

std::vector<std::vector<CD>> nullspace(const MatC& a, double tol) {
  SvdResult s = svd(a);
  const int n = a.cols();
  double smax = s.sigma.empty() ? 0.0 : s.sigma[0];
  std::vector<std::vector<CD>> basis;
  for (int j = 0; j < n; ++j) {
    if (smax > 0 && s.sigma[j] > tol * smax) continue;
    std::vector<CD> col(n);
    for (int i = 0; i < n; ++i) col[i] = s.v.at(i, j);
    basis.push_back(std::move(col));
  }
  return basis;
}

std::vector<CD> solve_square(MatC a, std::vector<CD> b) {
  const int n = a.rows();
  if (a.cols() != n || static_cast<int>(b.size()) != n)
    throw DegenerateInput("solve_square needs a square system");
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::abs(a.at(col, col));
    for (int r = col + 1; r < n; ++r) {
      double m = std::abs(a.at(r, col));
      if (m > best) {
        best = m;
        pivot = r;
      }
    }
    if (best == 0.0) throw DegenerateInput("singular system in solve_square");
    if (pivot != col) {
      for (int j = 0; j < n; ++j) std::swap(a.at(pivot, j), a.at(col, j));
      std::swap(b[pivot], b[col]);
    }
    for (int r = col + 1; r < n; ++r) {
      CD f = a.at(r, col) / a.at(col, col);
      if (f == CD(0)) continue;
      for (int j = col; j < n; ++j) a.at(r, j) -= f * a.at(col, j);
      b[r] -= f * b[col];
    }
  }
  std::vector<CD> x(n);
  for (int i = n - 1; i >= 0; --i) {
    CD acc = b[i];
    for (int j = i + 1; j < n; ++j) acc -= a.at(i, j) * x[j];
    x[i] = acc / a.at(i, i);
  }
  return x;
}

std::vector<CD> lstsq(const MatC& a, const std::vector<CD>& b, double tol) {
  SvdResult s = svd(a);
  const int n = a.cols();
  double smax = s.sigma.empty() ? 0.0 : s.sigma[0];
  std::vector<CD> x(n, CD(0));
  for (int j = 0; j < n; ++j) {
    if (smax == 0.0 || s.sigma[j] <= tol * smax) continue;
    CD coeff = 0;
    for (int i = 0; i < a.rows(); ++i) coeff += std::conj(s.u.at(i, j)) * b[i];
    coeff /= s.sigma[j];
    for (int i = 0; i < n; ++i) x[i] += coeff * s.v.at(i, j);
  }
  return x;
}

}  // namespace reyeweb
