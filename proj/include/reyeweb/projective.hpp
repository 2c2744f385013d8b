#pragma once

#include <array>

#include "reyeweb/linalg.hpp"
#include "reyeweb/rng.hpp"

namespace reyeweb {

template <class K>
using PPoint = Vec4<K>;

/// Symmetric 4x4 Gram matrix of a quadratic form on P^3.
template <class K>
using QuadricForm = Mat4<K>;

template <class K>
K quad_eval(const QuadricForm<K>& q, const Vec4<K>& x) {
  return bilinear(x, q, x);
}

template <class K>
K quad_bil(const QuadricForm<K>& q, const Vec4<K>& x, const Vec4<K>& y) {
  return bilinear(x, q, y);
}

template <class K>
Vec4<K> vadd(const Vec4<K>& a, const Vec4<K>& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}

template <class K>
Vec4<K> vsub(const Vec4<K>& a, const Vec4<K>& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]};
}

template <class K>
Vec4<K> vscale(const Vec4<K>& a, const K& s) {
  return {a[0] * s, a[1] * s, a[2] * s, a[3] * s};
}

inline Vec4<CD> vunit(Vec4<CD> v) {
  double n = vnorm(v);
  if (n == 0.0) throw DegenerateInput("cannot normalize zero vector");
  for (auto& x : v) x /= n;
  return v;
}

/// Line coordinates in lexicographic order (p01, p02, p03, p12, p13, p23),
/// with p_ij = a_i b_j - a_j b_i.
template <class K>
std::array<K, 6> plucker_from_span(const Vec4<K>& a, const Vec4<K>& b) {
  auto w = [&](int i, int j) -> K { return a[i] * b[j] - a[j] * b[i]; };
  return {w(0, 1), w(0, 2), w(0, 3), w(1, 2), w(1, 3), w(2, 3)};
}

/// Quadratic Plucker relation; vanishes exactly on decomposable tensors.
template <class K>
K plucker_relation(const std::array<K, 6>& p) {
  return p[0] * p[5] - p[1] * p[4] + p[2] * p[3];
}

/// Bilinear pairing whose vanishing says two lines meet.
template <class K>
K plucker_pairing(const std::array<K, 6>& p, const std::array<K, 6>& q) {
  return p[0] * q[5] - p[1] * q[4] + p[2] * q[3] + p[3] * q[2] - p[4] * q[1] +
         p[5] * q[0];
}

/// Line in P^3 carried both as a span pair and as Plucker coordinates.
template <class K>
struct PLine {
  Vec4<K> a, b;
  std::array<K, 6> pl;
};

using PLineC = PLine<CD>;
using PLineQ = PLine<Rat>;

template <class K>
PLine<K> line_from_points(const Vec4<K>& a, const Vec4<K>& b);

template <>
PLine<Rat> line_from_points(const Vec4<Rat>& a, const Vec4<Rat>& b);
template <>
PLine<CD> line_from_points(const Vec4<CD>& a, const Vec4<CD>& b);

bool lines_meet(const PLineC& l1, const PLineC& l2, double tol = 1e-8);
bool lines_meet_exact(const PLineQ& l1, const PLineQ& l2);

/// Projective distance between lines as points of the Plucker quadric.
double line_distance(const PLineC& l1, const PLineC& l2);

/// Coefficients (q(a), 2 B(a,b), q(b)) of q(s a + t b) in the basis s^2, st, t^2.
template <class K>
std::array<K, 3> restrict_quadric_to_line(const QuadricForm<K>& q, const PLine<K>& l) {
  K qa = quad_eval(q, l.a);
  K qb = quad_eval(q, l.b);
  K qab = quad_bil(q, l.a, l.b);
  return {qa, qab + qab, qb};
}

/// Direction vector of the line at base point p: the span component
/// Hermitian-orthogonal to p. Requires p to lie on (or near) the line.
Vec4<CD> line_direction_at(const PLineC& l, const Vec4<CD>& p);

/// Hermitian projection of x onto the span of the line.
Vec4<CD> project_onto_line(const PLineC& l, const Vec4<CD>& x);

/// Random point with integer entries in [-range, range], not all zero.
Vec4<Rat> random_rational_point(Rng& rng, int range = 9);

/// Random complex point with O(1) entries.
Vec4<CD> random_cd_point(Rng& rng);

/// Random point on the quadric q, found along a random line; relative residual
/// below res_tol. Throws GenericityExhausted after `budget` draws.
Vec4<CD> random_point_on_quadric(const QuadricForm<CD>& q, Rng& rng,
                                 double res_tol = 1e-10, int budget = 64);

/// Relative residual |q(p)| / (|q| |p|^2).
double quadric_residual(const QuadricForm<CD>& q, const Vec4<CD>& p);

/// Frobenius norm.
double mat_norm(const Mat4<CD>& m);

/// MatC view of a Mat4<CD>.
MatC to_matc(const Mat4<CD>& m);

}  // namespace reyeweb
