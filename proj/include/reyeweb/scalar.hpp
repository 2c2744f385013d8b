#pragma once

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <optional>
#include <string>

#include "reyeweb/errors.hpp"

namespace reyeweb {

/// Exact track scalar.
using Rat = mpq_class;
/// Floating track scalar.
using CD = std::complex<double>;

inline double to_double(const Rat& r) { return r.get_d(); }
inline CD to_cd(const Rat& r) { return CD(r.get_d(), 0.0); }

inline bool is_zero(const Rat& r) { return sgn(r) == 0; }

/// Canonical "p/q" string (or "p" when q == 1).
inline std::string rat_to_string(const Rat& r) {
  Rat c = r;
  c.canonicalize();
  return c.get_str();
}

inline Rat rat_from_string(const std::string& s) {
  Rat r;
  if (r.set_str(s, 10) != 0) throw IoError("malformed rational: " + s);
  r.canonicalize();
  return r;
}

/// Exact binary expansion of a finite double.
inline Rat rat_from_double_exact(double x) {
  if (!std::isfinite(x)) throw DegenerateInput("non-finite double");
  Rat r;
  mpq_set_d(r.get_mpq_t(), x);
  return r;
}

/// Best continued-fraction convergent of x with denominator <= max_den,
/// accepted only if it reproduces x to rel_tol. Returns nullopt otherwise.
inline std::optional<Rat> rationalize(double x, unsigned long max_den = 100000000UL,
                                      double rel_tol = 1e-9) {
  if (!std::isfinite(x)) return std::nullopt;
  if (x == 0.0) return Rat(0);
  mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double v = x;
  for (int iter = 0; iter < 64; ++iter) {
    double fl = std::floor(v);
    if (std::abs(fl) > 1e18) break;
    mpz_class a(static_cast<long>(fl));
    mpz_class p2 = a * p1 + p0;
    mpz_class q2 = a * q1 + q0;
    if (q2 > mpz_class(max_den)) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double rem = v - fl;
    if (rem < 1e-15 * std::max(1.0, std::abs(v))) break;
    v = 1.0 / rem;
  }
  if (q1 == 0) return std::nullopt;
  Rat cand(p1, q1);
  cand.canonicalize();
  double err = std::abs(cand.get_d() - x);
  if (err <= rel_tol * std::max(1.0, std::abs(x))) return cand;
  return std::nullopt;
}

/// Gaussian rational: exact arithmetic over Q(i), used to run the exact-track
/// rank certificates on complex inputs whose coordinates admit rationalization.
struct CRat {
  Rat re{0}, im{0};

  CRat() = default;
  CRat(Rat r) : re(std::move(r)) {}
  CRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }

  CRat operator+(const CRat& o) const { return {re + o.re, im + o.im}; }
  CRat operator-(const CRat& o) const { return {re - o.re, im - o.im}; }
  CRat operator-() const { return {-re, -im}; }
  CRat operator*(const CRat& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  CRat conj() const { return {re, -im}; }
  Rat norm() const { return re * re + im * im; }
  CRat operator/(const CRat& o) const {
    Rat n = o.norm();
    if (sgn(n) == 0) throw DegenerateInput("division by zero Gaussian rational");
    CRat num = *this * o.conj();
    return {num.re / n, num.im / n};
  }
  bool operator==(const CRat& o) const { return re == o.re && im == o.im; }

  CD to_cd() const { return CD(re.get_d(), im.get_d()); }
};

inline std::optional<CRat> rationalize_cd(const CD& z, unsigned long max_den = 100000000UL,
                                          double rel_tol = 1e-9) {
  auto r = rationalize(z.real(), max_den, rel_tol);
  auto i = rationalize(z.imag(), max_den, rel_tol);
  if (!r || !i) return std::nullopt;
  return CRat{*r, *i};
}

}  // namespace reyeweb
