#include "reyeweb/projective.hpp"

#include <algorithm>
#include <cmath>

namespace reyeweb {

template <>
PLine<Rat> line_from_points(const Vec4<Rat>& a, const Vec4<Rat>& b) {
  PLine<Rat> l{a, b, plucker_from_span(a, b)};
  bool all_zero = true;
  for (const Rat& c : l.pl)
    if (sgn(c) != 0) all_zero = false;
  if (all_zero) throw DegenerateInput("span points are projectively equal");
  return l;
}

template <>
PLine<CD> line_from_points(const Vec4<CD>& a, const Vec4<CD>& b) {
  PLine<CD> l{a, b, plucker_from_span(a, b)};
  double scale = vnorm(a) * vnorm(b);
  double n = 0;
  for (const CD& c : l.pl) n += std::norm(c);
  if (scale == 0.0 || std::sqrt(n) <= 1e-12 * scale)
    throw DegenerateInput("span points are projectively equal");
  return l;
}

bool lines_meet(const PLineC& l1, const PLineC& l2, double tol) {
  double n1 = 0, n2 = 0;
  for (const CD& c : l1.pl) n1 += std::norm(c);
  for (const CD& c : l2.pl) n2 += std::norm(c);
  CD pairing = plucker_pairing(l1.pl, l2.pl);
  return std::abs(pairing) <= tol * std::sqrt(n1 * n2);
}

bool lines_meet_exact(const PLineQ& l1, const PLineQ& l2) {
  return sgn(plucker_pairing(l1.pl, l2.pl)) == 0;
}

double line_distance(const PLineC& l1, const PLineC& l2) {
  std::vector<CD> p(l1.pl.begin(), l1.pl.end());
  std::vector<CD> q(l2.pl.begin(), l2.pl.end());
  return proj_distance(p, q);
}

Vec4<CD> line_direction_at(const PLineC& l, const Vec4<CD>& p) {
  Vec4<CD> pa = project_onto_line(l, p);
  if (proj_distance(std::vector<CD>(pa.begin(), pa.end()),
                    std::vector<CD>(p.begin(), p.end())) > 1e-6)
    throw DegenerateInput("base point does not lie on the line");
  // Gram-Schmidt inside the span: pick the generator less aligned with p.
  Vec4<CD> pu = vunit(pa);
  auto ortho = [&](const Vec4<CD>& g) {
    CD c = vdot(pu, g);
    return vsub(g, vscale(pu, c));
  };
  Vec4<CD> da = ortho(l.a), db = ortho(l.b);
  Vec4<CD> d = vnorm(da) >= vnorm(db) ? da : db;
  if (vnorm(d) <= 1e-14 * std::max(vnorm(l.a), vnorm(l.b)))
    throw DegenerateInput("degenerate span in line_direction_at");
  return vunit(d);
}

Vec4<CD> project_onto_line(const PLineC& l, const Vec4<CD>& x) {
  // Orthonormalize the span {a, b}.
  Vec4<CD> e1 = vunit(l.a);
  Vec4<CD> b2 = vsub(l.b, vscale(e1, vdot(e1, l.b)));
  double nb = vnorm(b2);
  if (nb <= 1e-14 * vnorm(l.b)) throw DegenerateInput("degenerate span");
  Vec4<CD> e2 = vunit(b2);
  return vadd(vscale(e1, vdot(e1, x)), vscale(e2, vdot(e2, x)));
}

Vec4<Rat> random_rational_point(Rng& rng, int range) {
  for (int tries = 0; tries < 256; ++tries) {
    Vec4<Rat> p{Rat(rng.next_int(-range, range)), Rat(rng.next_int(-range, range)),
                Rat(rng.next_int(-range, range)), Rat(rng.next_int(-range, range))};
    if (sgn(p[0]) != 0 || sgn(p[1]) != 0 || sgn(p[2]) != 0 || sgn(p[3]) != 0) return p;
  }
  throw GenericityExhausted("random_rational_point kept drawing zero");
}

Vec4<CD> random_cd_point(Rng& rng) {
  auto c = [&]() { return CD(2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0); };
  Vec4<CD> p{c(), c(), c(), c()};
  return vunit(p);
}

double mat_norm(const Mat4<CD>& m) {
  double s = 0;
  for (const CD& x : m.a) s += std::norm(x);
  return std::sqrt(s);
}

double quadric_residual(const QuadricForm<CD>& q, const Vec4<CD>& p) {
  double qn = mat_norm(q);
  double pn = vnorm(p);
  if (qn == 0.0 || pn == 0.0) throw DegenerateInput("zero quadric or point");
  return std::abs(quad_eval(q, p)) / (qn * pn * pn);
}

Vec4<CD> random_point_on_quadric(const QuadricForm<CD>& q, Rng& rng, double res_tol,
                                 int budget) {
  for (int t = 0; t < budget; ++t) {
    Vec4<CD> a = random_cd_point(rng);
    Vec4<CD> b = random_cd_point(rng);
    CD qa = quad_eval(q, a);
    CD qb = quad_eval(q, b);
    CD qab = quad_bil(q, a, b);
    if (std::abs(qb) < 1e-10 * mat_norm(q)) continue;
    CD disc = std::sqrt(qab * qab - qa * qb);
    for (CD root : {(-qab + disc) / qb, (-qab - disc) / qb}) {
      Vec4<CD> p = vunit(vadd(a, vscale(b, root)));
      // one Newton polish along b
      CD qp = quad_eval(q, p);
      CD bp = quad_bil(q, p, b);
      if (std::abs(bp) > 1e-12 * mat_norm(q)) {
        p = vunit(vadd(p, vscale(b, -qp / (bp + bp))));
      }
      if (quadric_residual(q, p) < res_tol) return p;
    }
  }
  throw GenericityExhausted("random_point_on_quadric budget exhausted");
}

MatC to_matc(const Mat4<CD>& m) {
  MatC r(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r.at(i, j) = m(i, j);
  return r;
}

}  // namespace reyeweb
