#pragma once

#include <array>
#include <map>
#include <utility>
#include <vector>

#include "reyeweb/linalg.hpp"
#include "reyeweb/rng.hpp"

namespace reyeweb {

/// Dense univariate polynomial, coefficients ascending in the variable.
template <class K>
struct Poly {
  std::vector<K> c;

  Poly() = default;
  explicit Poly(std::vector<K> coeffs) : c(std::move(coeffs)) {}

  int degree() const {
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
      if (!(c[i] == K(0))) return i;
    return -1;
  }

  K eval(const K& t) const {
    K acc(0);
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) acc = acc * t + c[i];
    return acc;
  }

  Poly derivative() const {
    Poly d;
    for (std::size_t i = 1; i < c.size(); ++i) d.c.push_back(c[i] * K(static_cast<int>(i)));
    return d;
  }

  Poly operator+(const Poly& o) const {
    Poly r;
    r.c.resize(std::max(c.size(), o.c.size()), K(0));
    for (std::size_t i = 0; i < c.size(); ++i) r.c[i] = r.c[i] + c[i];
    for (std::size_t i = 0; i < o.c.size(); ++i) r.c[i] = r.c[i] + o.c[i];
    return r;
  }

  Poly operator-(const Poly& o) const {
    Poly r;
    r.c.resize(std::max(c.size(), o.c.size()), K(0));
    for (std::size_t i = 0; i < c.size(); ++i) r.c[i] = r.c[i] + c[i];
    for (std::size_t i = 0; i < o.c.size(); ++i) r.c[i] = r.c[i] - o.c[i];
    return r;
  }

  Poly operator*(const Poly& o) const {
    if (c.empty() || o.c.empty()) return Poly();
    Poly r;
    r.c.assign(c.size() + o.c.size() - 1, K(0));
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = 0; j < o.c.size(); ++j) r.c[i + j] = r.c[i + j] + c[i] * o.c[j];
    return r;
  }

  Poly scaled(const K& s) const {
    Poly r = *this;
    for (K& x : r.c) x = x * s;
    return r;
  }
};

using PolyQ = Poly<Rat>;
using PolyC = Poly<CD>;

inline PolyC to_cd_poly(const PolyQ& p) {
  PolyC r;
  r.c.reserve(p.c.size());
  for (const Rat& x : p.c) r.c.push_back(to_cd(x));
  return r;
}

/// Drop floating coefficients below rel_tol of the largest.
PolyC trim(const PolyC& p, double rel_tol = 1e-13);

/// Monic gcd over Q by the Euclidean algorithm; gcd(0,0) = 0.
PolyQ poly_gcd(PolyQ a, PolyQ b);

/// Exact univariate Lagrange interpolation through (t_i, y_i) with distinct t_i.
PolyQ lagrange_interpolate(const std::vector<std::pair<Rat, Rat>>& samples);
PolyC lagrange_interpolate_cd(const std::vector<std::pair<CD, CD>>& samples);

// ---- root finding -----------------------------------------------------------

struct RootResult {
  std::vector<CD> roots;
  int iterations = 0;
  double backward_error = 0.0;
};

/// Aberth-Ehrlich simultaneous iteration for all complex roots (degree <= 64).
/// Stops when every root has relative backward error below tol; throws
/// NoConvergence past max_iter sweeps.
RootResult poly_roots(const PolyC& p, double tol = 1e-12, int max_iter = 400);

/// Cluster roots whose mutual distance is below rel_tol * max(1, max |root|).
/// Returns (cluster mean, multiplicity), in input order of first members.
std::vector<std::pair<CD, int>> cluster_roots(const std::vector<CD>& roots,
                                              double rel_tol = 1e-6);

// ---- perfect square certificates ---------------------------------------------

struct SquareCertificate {
  bool ok = false;
  CD lead{};                ///< q = lead * (t^2 + b t + d)^2 when ok
  PolyC root_quadratic;     ///< monic quadratic factor
  double pair_gap = 0.0;    ///< worst in-pair root distance, relative
  double residual = 0.0;    ///< coefficient defect of the completed square
};

/// Floating route: root-pair clustering for the two-double-roots structure,
/// plus the coefficient defect of the square completed from the top three
/// coefficients. The defect stays well conditioned where root reconstruction
/// loses digits inside the clusters.
SquareCertificate is_perfect_square_quartic(const PolyC& q, double cluster_tol = 1e-6,
                                            double residual_tol = 1e-8);

/// Exact route: coefficient matching q == lead * (t^2 + b t + d)^2 over Q.
bool is_perfect_square_quartic_exact(const PolyQ& q);

// ---- multivariate polynomials over Q ---------------------------------------

/// Sparse polynomial in up to four variables with rational coefficients.
class MPoly {
 public:
  using Exp = std::array<int, 4>;

  MPoly() = default;
  explicit MPoly(const Rat& constant) {
    if (sgn(constant) != 0) terms_[{0, 0, 0, 0}] = constant;
  }

  static MPoly variable(int i) {
    MPoly p;
    Exp e{0, 0, 0, 0};
    e[i] = 1;
    p.terms_[e] = Rat(1);
    return p;
  }

  const std::map<Exp, Rat>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int total_degree() const;

  void add_term(const Exp& e, const Rat& coeff);

  MPoly operator+(const MPoly& o) const;
  MPoly operator-(const MPoly& o) const;
  MPoly operator*(const MPoly& o) const;
  MPoly operator-() const;
  MPoly scaled(const Rat& s) const;

  MPoly partial(int var) const;

  Rat eval(const std::array<Rat, 4>& x) const;
  CD eval_cd(const std::array<CD, 4>& x) const;
  std::array<CD, 4> gradient_cd(const std::array<CD, 4>& x) const;

  /// Substitute x_i = sum_j m[i][j] * y_j for the first nvars variables.
  MPoly compose_linear(const std::vector<std::vector<Rat>>& m) const;

  /// Exact division by var^k; throws IdenticallyZero when not divisible.
  MPoly divide_by_var_power(int var, int k) const;

  /// Largest k with var^k dividing every term (0 for the zero polynomial).
  int var_order(int var) const;

  /// Collapse to a univariate polynomial in `var` after fixing the other
  /// variables at the given complex values.
  PolyC collapse_cd(int var, const std::array<CD, 4>& fixed) const;

  /// Exact restriction f(a + t b) for a quadruple of rationals, via
  /// evaluation at total_degree()+1 nodes and Lagrange interpolation.
  PolyQ restrict_to_line(const std::array<Rat, 4>& a, const std::array<Rat, 4>& b) const;

 private:
  std::map<Exp, Rat> terms_;
};

/// Determinant of a 4x4 matrix of polynomials (cofactor expansion).
MPoly mpoly_det4(const std::array<MPoly, 16>& m);

/// Determinant of a 3x3 matrix of polynomials.
MPoly mpoly_det3(const std::array<MPoly, 9>& m);

// ---- resultants ---------------------------------------------------------------

struct ResultantResult {
  PolyQ res;                                ///< univariate in the first kept variable
  std::array<std::array<long, 3>, 3> change;  ///< recorded GL3(Z) coordinate change
};

/// Sylvester resultant of two ternary forms (variables 0,1,2) eliminating
/// `eliminate_var` after a recorded random unimodular change of coordinates.
/// The returned polynomial is in the chart second-kept-variable = 1.
/// Throws IdenticallyZero when the resultant vanishes identically.
ResultantResult resultant_bivariate(const MPoly& f, const MPoly& g, int eliminate_var,
                                    Rng& rng);

struct TernaryCommonZeros {
  std::vector<std::array<CD, 3>> zeros;  ///< projective representatives, normalized
  ResultantResult certificate;
};

/// All isolated common zeros of two ternary forms in P^2, by resultant plus
/// back-substitution. Zeros are polished by a 2x2 complex Newton on (f, g).
TernaryCommonZeros common_zeros_ternary(const MPoly& f, const MPoly& g, Rng& rng,
                                        double tol = 1e-10);

/// Sylvester matrix determinant of two exact univariate polynomials.
Rat sylvester_resultant(const PolyQ& f, const PolyQ& g);

}  // namespace reyeweb
