#include "reyeweb/cover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "reyeweb/errors.hpp"

namespace reyeweb {

namespace {

double line_on_quadric_residual(const QuadricForm<CD>& q, const PLineC& l) {
  Vec4<CD> a = vunit(l.a), b = vunit(l.b);
  double qn = mat_norm(q);
  if (qn == 0.0) throw DegenerateInput("zero quadric");
  double worst = std::abs(quad_eval(q, a));
  worst = std::max(worst, std::abs(quad_bil(q, a, b)));
  worst = std::max(worst, std::abs(quad_eval(q, b)));
  return worst / qn;
}

Vec4<CD> polar_direction(const QuadricForm<CD>& q, const Vec4<CD>& p) {
  Vec4<CD> n{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) n[i] += q(i, j) * p[j];
  return n;
}

/// Smaller-|tau| root of A tau^2 + 2 B tau + C = 0, via the stable
/// product-of-roots form tau = C / (-B -+ sqrt(B^2 - AC)).
CD small_quadratic_root(CD A, CD B, CD C) {
  CD sq = std::sqrt(B * B - A * C);
  CD d1 = -B + sq, d2 = -B - sq;
  CD denom = std::abs(d1) >= std::abs(d2) ? d1 : d2;
  if (std::abs(denom) == 0.0) {
    if (std::abs(A) == 0.0) throw DegenerateInput("degenerate projection quadratic");
    return -B / A;  // A tau^2 = 0 only when C = B = 0
  }
  return C / denom;
}

/// Hermitian inner product sum conj(a_i) b_i.
CD hdot(const Vec4<CD>& a, const Vec4<CD>& b) {
  CD acc(0);
  for (int i = 0; i < 4; ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

double overlap(const Vec4<CD>& a, const Vec4<CD>& b) {
  double na = vnorm(a), nb = vnorm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::abs(hdot(a, b)) / (na * nb);
}

double quartic_clearance(const PolyC& q, CD t) {
  double scale = 0;
  for (const CD& c : q.c) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return 0.0;
  int deg = static_cast<int>(q.c.size()) - 1;
  double tp = std::max(1.0, std::abs(t));
  double denom = scale;
  for (int i = 0; i < deg; ++i) denom *= tp;
  CD v(0);
  for (int i = deg; i >= 0; --i) v = v * t + q.c[static_cast<std::size_t>(i)];
  return std::abs(v) / denom;
}

std::vector<CD> pencil_branch_roots(const Web& web, const Vec4<CD>& a,
                                    const Vec4<CD>& b) {
  PolyC q = trim(pencil_quartic_cd(web, a, b), 1e-11);
  if (q.c.size() <= 1) return {};
  return poly_roots(q, 1e-12).roots;
}

}  // namespace

// ---- fiber classification ------------------------------------------------------

FiberType fiber_type(const Web& web, const Vec4<CD>& z, double tol) {
  Mat4<CD> m = web.member_matrix_cd(vunit(z));
  int r = numeric_rank(to_matc(m), tol);
  switch (r) {
    case 4: return FiberType::TwoRulings;
    case 3: return FiberType::DoubleConic;
    case 2: return FiberType::TwoPlanes;
    default: throw RankTooLow("member has rank below 2");
  }
}

// ---- lines through a point -----------------------------------------------------

TangentLines lines_through_point_on_quadric(const QuadricForm<CD>& q,
                                            const Vec4<CD>& p_in, double tol) {
  Vec4<CD> p = vunit(p_in);
  double qn = mat_norm(q);
  if (qn == 0.0) throw DegenerateInput("zero quadric");
  if (std::abs(quad_eval(q, p)) / qn > std::max(tol, 1e-6))
    throw PointNotOnQuadric("point does not satisfy the quadric");

  Vec4<CD> n = polar_direction(q, p);
  if (vnorm(n) / qn < tol) throw VertexPoint("polar of the point vanishes");

  // tangent plane {x : sum n_i x_i = 0}; kernel frame, then remove p.
  int jp = 0;
  for (int j = 1; j < 4; ++j)
    if (std::abs(n[j]) > std::abs(n[jp])) jp = j;
  std::array<Vec4<CD>, 3> g{};
  int gi = 0;
  for (int i = 0; i < 4; ++i) {
    if (i == jp) continue;
    Vec4<CD> v{};
    v[i] = CD(1);
    v[jp] = -n[i] / n[jp];
    g[gi++] = v;
  }
  for (auto& v : g) {
    CD c = hdot(p, v);
    for (int i = 0; i < 4; ++i) v[i] -= c * p[i];
  }
  std::sort(g.begin(), g.end(),
            [](const Vec4<CD>& x, const Vec4<CD>& y) { return vnorm(x) > vnorm(y); });
  Vec4<CD> f1 = vunit(g[0]);
  Vec4<CD> f2 = g[1];
  CD c12 = hdot(f1, f2);
  for (int i = 0; i < 4; ++i) f2[i] -= c12 * f1[i];
  if (vnorm(f2) < 1e-10) {
    f2 = g[2];
    CD c13 = hdot(f1, f2);
    for (int i = 0; i < 4; ++i) f2[i] -= c13 * f1[i];
    if (vnorm(f2) < 1e-10) throw DegenerateInput("tangent frame collapsed");
  }
  f2 = vunit(f2);

  CD A = quad_eval(q, f1);
  CD B = quad_bil(q, f1, f2);
  CD C = quad_eval(q, f2);
  double scale = std::abs(A) + std::abs(B) + std::abs(C);
  if (scale / qn < 1e-13)
    throw DegenerateInput("tangent conic vanishes: quadric rank below 3");

  CD disc = B * B - A * C;
  CD sq = std::sqrt(disc);
  CD r1 = -B + sq, r2 = -B - sq;
  CD rbig = std::abs(r1) >= std::abs(r2) ? r1 : r2;

  std::array<std::array<CD, 2>, 2> mu{{{rbig, A}, {C, rbig}}};
  auto weight = [](const std::array<CD, 2>& w) { return std::abs(w[0]) + std::abs(w[1]); };
  if (weight(mu[0]) < 1e-14 * scale) mu[0] = mu[1];
  if (weight(mu[1]) < 1e-14 * scale) mu[1] = mu[0];
  if (weight(mu[0]) < 1e-14 * scale)
    throw DegenerateInput("tangent conic has no usable roots");

  TangentLines out;
  out.discriminant_ratio = std::abs(disc) / (scale * scale);
  out.double_line = out.discriminant_ratio < 1e-10;
  for (int i = 0; i < 2; ++i) {
    Vec4<CD> d = vadd(vscale(f1, mu[i][0]), vscale(f2, mu[i][1]));
    out.lines[i] = line_from_points(p, vunit(d));
  }
  return out;
}

// ---- ruling comparison ---------------------------------------------------------

bool same_ruling(const QuadricForm<CD>& q, const PLineC& l1, const PLineC& l2,
                 double tol) {
  if (line_on_quadric_residual(q, l1) > tol || line_on_quadric_residual(q, l2) > tol)
    throw LinesNotOnQuadric("ruling comparison requires lines on the quadric");
  // Two lines of the same ruling at Plucker distance eps pair to O(eps^2),
  // which sinks below the meet tolerance long before eps reaches it, while
  // opposite rulings stay a conditioning-bounded angle apart at their common
  // point.  Lines closer than 1e-3 can therefore only be a slightly
  // perturbed copy of one line, never a genuine opposite-ruling pair.
  if (line_distance(l1, l2) < 1e-3) return true;
  return !lines_meet(l1, l2);
}

RulingPoint make_ruling_point(const Web& web, const Vec4<CD>& z, Rng& rng) {
  Mat4<CD> q = web.member_matrix_cd(vunit(z));
  for (int attempt = 0; attempt < 16; ++attempt) {
    Vec4<CD> p = random_point_on_quadric(q, rng);
    try {
      TangentLines tl = lines_through_point_on_quadric(q, p);
      return {vunit(z), tl.lines[0]};
    } catch (const Error&) {
      continue;
    }
  }
  throw GenericityExhausted("no ruling witness found on the member");
}

// ---- paths ---------------------------------------------------------------------

CD PathInW::param(double s) const {
  if (kind == Kind::Segment) return from + (to - from) * CD(s, 0.0);
  double ang = 2.0 * 3.14159265358979323846 * turns * s * (ccw ? 1.0 : -1.0);
  return center + CD(radius, 0.0) * CD(std::cos(ang), std::sin(ang));
}

Vec4<CD> PathInW::z_at(double s) const {
  CD t = param(s);
  Vec4<CD> z{};
  for (int i = 0; i < 4; ++i) z[i] = a[i] + t * b[i];
  return z;
}

PathInW PathInW::segment(const Vec4<CD>& a, const Vec4<CD>& b, CD from, CD to) {
  PathInW p;
  p.a = a;
  p.b = b;
  p.kind = Kind::Segment;
  p.from = from;
  p.to = to;
  return p;
}

PathInW PathInW::circle(const Vec4<CD>& a, const Vec4<CD>& b, CD center,
                        double radius, bool ccw, double turns) {
  PathInW p;
  p.a = a;
  p.b = b;
  p.kind = Kind::Circle;
  p.center = center;
  p.radius = radius;
  p.ccw = ccw;
  p.turns = turns;
  return p;
}

PathInW branch_loop(const Web& web, const Vec4<CD>& a, const Vec4<CD>& b, CD around,
                    double radius_factor, double cluster_tol) {
  std::vector<CD> roots = pencil_branch_roots(web, a, b);
  double best = std::numeric_limits<double>::infinity();
  for (const CD& r : roots) {
    double d = std::abs(r - around);
    if (d > cluster_tol) best = std::min(best, d);
  }
  double radius = std::isfinite(best)
                      ? radius_factor * best
                      : 2.0 * radius_factor * std::max(1.0, std::abs(around));
  return PathInW::circle(a, b, around, radius);
}

PathInW all_roots_loop(const Web& web, const Vec4<CD>& a, const Vec4<CD>& b,
                       double radius_factor) {
  std::vector<CD> roots = pencil_branch_roots(web, a, b);
  CD center(0);
  for (const CD& r : roots) center += r;
  if (!roots.empty()) center /= static_cast<double>(roots.size());
  double rmax = 0;
  for (const CD& r : roots) rmax = std::max(rmax, std::abs(r - center));
  double radius = radius_factor * std::max(rmax, std::max(1.0, std::abs(center)) * 1e-3);
  if (roots.empty()) radius = radius_factor;
  return PathInW::circle(a, b, center, radius);
}

// ---- transport -----------------------------------------------------------------

TransportResult transport_ruling(const Web& web, const PathInW& path,
                                 const RulingPoint& start, const TransportOptions& opts,
                                 std::vector<TransportStep>* trace) {
  Mat4<CD> q0 = web.member_matrix_cd(path.z_at(0.0));
  if (line_on_quadric_residual(q0, start.witness) > 1e-6)
    throw LinesNotOnQuadric("start witness is not on the initial member");

  PolyC quartic = pencil_quartic_cd(web, path.a, path.b);
  double ds0 = std::min(opts.init_dt, 1.0 / std::max(1, path.min_samples));

  TransportResult out;
  out.min_margin = std::numeric_limits<double>::infinity();
  out.min_best_overlap = std::numeric_limits<double>::infinity();
  out.min_clearance = quartic_clearance(quartic, path.param(0.0));
  if (out.min_clearance < opts.clearance)
    throw BranchHit("path starts on the symmetroid");

  PLineC line = line_from_points(vunit(start.witness.a), vunit(start.witness.b));
  Vec4<CD> p = vunit(start.witness.a);
  double s = 0.0, ds = ds0;

  while (s < 1.0 - 1e-15) {
    double step = std::min(ds, 1.0 - s);
    double s2 = s + step;
    CD t2 = path.param(s2);

    double clear = quartic_clearance(quartic, t2);
    out.min_clearance = std::min(out.min_clearance, clear);
    if (clear < opts.clearance) throw BranchHit("path too close to the symmetroid");

    Mat4<CD> q2 = web.member_matrix_cd(path.z_at(s2));

    bool ok = true;
    Vec4<CD> p2 = p;
    try {
      for (int polish = 0; polish < 3; ++polish) {
        Vec4<CD> n = polar_direction(q2, p2);
        if (vnorm(n) < 1e-12 * mat_norm(q2)) throw VertexPoint("projection hit a vertex");
        CD tau = small_quadratic_root(quad_eval(q2, n), quad_bil(q2, p2, n),
                                      quad_eval(q2, p2));
        p2 = vunit(vadd(p2, vscale(n, tau)));
        if (quadric_residual(q2, p2) < 1e-12) break;
      }
      if (quadric_residual(q2, p2) > 1e-8) ok = false;
    } catch (const Error&) {
      ok = false;
    }

    double margin = 0, best_overlap = 0;
    PLineC next;
    if (ok) {
      try {
        TangentLines tl = lines_through_point_on_quadric(q2, p2);
        Vec4<CD> on_prev = project_onto_line(line, p2);
        Vec4<CD> d_prev = line_direction_at(line, on_prev);
        double o0 = overlap(d_prev, line_direction_at(tl.lines[0], p2));
        double o1 = overlap(d_prev, line_direction_at(tl.lines[1], p2));
        int best = o0 >= o1 ? 0 : 1;
        margin = std::abs(o0 - o1);
        best_overlap = std::max(o0, o1);
        next = tl.lines[best];
      } catch (const Error&) {
        ok = false;
      }
    }

    if (!ok || margin < opts.margin || best_overlap < opts.min_overlap) {
      ds *= 0.5;
      if (ds < opts.min_dt)
        throw StepUnderflow("transport step underflow: selection margin exhausted");
      continue;
    }

    s = s2;
    p = p2;
    line = next;
    out.steps += 1;
    out.min_margin = std::min(out.min_margin, margin);
    out.min_best_overlap = std::min(out.min_best_overlap, best_overlap);
    if (trace) trace->push_back({s, t2, line, margin});
    ds = std::min(ds0, ds * 1.6);
  }

  out.end = RulingPoint{path.z_at(1.0), line};
  return out;
}

bool monodromy_swap(const Web& web, const PathInW& loop, const RulingPoint& start,
                    const TransportOptions& opts) {
  Vec4<CD> z0 = loop.z_at(0.0), z1 = loop.z_at(1.0);
  if (proj_distance(z0, z1) > 1e-9) throw DegenerateInput("monodromy loop is not closed");
  if (proj_distance(vunit(start.z), z0) > 1e-8)
    throw DegenerateInput("start member is not the loop base point");

  TransportResult r = transport_ruling(web, loop, start, opts);
  Mat4<CD> q0 = web.member_matrix_cd(z0);
  return !same_ruling(q0, start.witness, r.end.witness, 1e-6);
}

// ---- the degree-6 fundamental form ----------------------------------------------

FundamentalResult fundamental_degree(const Web& web, const RulingPoint& ruling,
                                     Rng& rng, double tol) {
  Vec4<CD> z = vunit(ruling.z);
  Mat4<CD> q = web.member_matrix_cd(z);
  if (numeric_rank(to_matc(q), 1e-8) < 4)
    throw RankTooLow("fundamental form needs a rank-4 member");
  if (line_on_quadric_residual(q, ruling.witness) > 1e-6)
    throw LinesNotOnQuadric("ruling witness is not on the member");

  const PLineC L = ruling.witness;
  int jz = 0;
  for (int j = 1; j < 4; ++j)
    if (std::abs(z[j]) > std::abs(z[jz])) jz = j;

  int degree_drops = 0;
  FundamentalResult out;
  for (int attempt = 0; attempt < 12; ++attempt) {
    out.attempts = attempt + 1;
    try {
      Vec4<CD> p1;
      if (attempt == 0) {
        p1 = vunit(L.a);
      } else if (attempt == 1) {
        p1 = vunit(L.b);
      } else {
        CD lam(rng.next_double() * 2 - 1, rng.next_double() * 2 - 1);
        p1 = vunit(vadd(L.a, vscale(L.b, lam * CD(vnorm(L.a) / vnorm(L.b), 0))));
      }

      TangentLines tl = lines_through_point_on_quadric(q, p1, tol);
      if (tl.double_line) continue;
      double d0 = line_distance(tl.lines[0], L);
      double d1 = line_distance(tl.lines[1], L);
      if (std::min(d0, d1) > 1e-6) continue;
      PLineC other = d0 <= d1 ? tl.lines[1] : tl.lines[0];

      Vec4<CD> p2 = vunit(line_direction_at(L, p1));
      Vec4<CD> p3 = vunit(line_direction_at(other, p1));

      auto second_line = [&](const Vec4<CD>& pt, const PLineC& not_this,
                             PLineC& found) -> bool {
        TangentLines t2 = lines_through_point_on_quadric(q, pt, tol);
        double e0 = line_distance(t2.lines[0], not_this);
        double e1 = line_distance(t2.lines[1], not_this);
        if (std::max(e0, e1) < 1e-6) return false;
        found = e0 >= e1 ? t2.lines[0] : t2.lines[1];
        return true;
      };
      PLineC ell_a, ell_b;
      if (!second_line(p2, L, ell_a)) continue;
      if (!second_line(p3, other, ell_b)) continue;

      MatC cross(4, 4);
      for (int i = 0; i < 4; ++i) {
        cross.at(i, 0) = ell_a.a[i];
        cross.at(i, 1) = ell_a.b[i];
        cross.at(i, 2) = -ell_b.a[i];
        cross.at(i, 3) = -ell_b.b[i];
      }
      auto ker = nullspace(cross, 1e-8);
      if (ker.size() != 1) continue;
      Vec4<CD> p4{};
      for (int i = 0; i < 4; ++i)
        p4[i] = ker[0][0] * ell_a.a[i] + ker[0][1] * ell_a.b[i];
      p4 = vunit(p4);

      CD denom = quad_bil(q, p1, p4);
      if (std::abs(denom) < 1e-10 * mat_norm(q)) continue;
      CD gamma = -quad_bil(q, p2, p3) / denom;

      auto chart = [&](CD t) {
        Vec4<CD> x0 = vadd(p1, vscale(p3, t));
        Vec4<CD> x1 = vadd(p2, vscale(p4, gamma * t));
        return std::pair<Vec4<CD>, Vec4<CD>>{x0, x1};
      };
      {
        auto [x0, x1] = chart(CD(0.7, 0.3));
        Vec4<CD> probe = vadd(x0, vscale(x1, CD(-1.2, 0.5)));
        if (quadric_residual(q, vunit(probe)) > 1e-8) continue;
      }

      std::array<Mat4<CD>, 3> rows;
      {
        int gi = 0;
        for (int k = 0; k < 4; ++k) {
          if (k == jz) continue;
          rows[gi++] = to_cd_mat(web.basis[k]);
        }
      }

      std::vector<std::pair<CD, CD>> samples;
      const double nodes[7] = {0, 1, -1, 2, -2, 3, -3};
      for (double tn : nodes) {
        auto [x0, x1] = chart(CD(tn, 0));
        Mat4<CD> rest;  // row g: restriction of basis quadric g to span{x0, x1}
        for (int g = 0; g < 3; ++g) {
          rest(g, 0) = quad_eval(rows[g], x0);
          rest(g, 1) = CD(2) * quad_bil(rows[g], x0, x1);
          rest(g, 2) = quad_eval(rows[g], x1);
        }
        CD v = rest(0, 0) * (rest(1, 1) * rest(2, 2) - rest(1, 2) * rest(2, 1)) -
               rest(0, 1) * (rest(1, 0) * rest(2, 2) - rest(1, 2) * rest(2, 0)) +
               rest(0, 2) * (rest(1, 0) * rest(2, 1) - rest(1, 1) * rest(2, 0));
        samples.push_back({CD(tn, 0), v});
      }
      PolyC det6 = lagrange_interpolate_cd(samples);
      det6.c.resize(7, CD(0));
      double maxc = 0;
      for (const CD& c : det6.c) maxc = std::max(maxc, std::abs(c));
      if (maxc == 0.0) continue;
      for (CD& c : det6.c) c /= maxc;
      if (std::abs(det6.c[6]) < 1e-8) {
        ++degree_drops;
        continue;
      }

      RootResult rr = poly_roots(det6, 1e-13);
      std::vector<PLineC> lines;
      bool all_ok = true;
      for (const CD& t : rr.roots) {
        auto [x0, x1] = chart(t);
        PLineC lt = line_from_points(vunit(x0), vunit(x1));
        if (line_on_quadric_residual(q, lt) > 1e-7 ||
            !is_reye_line(web, lt, std::max(tol, 1e-7))) {
          all_ok = false;
          break;
        }
        lines.push_back(lt);
      }
      if (!all_ok || lines.size() != 6) continue;

      out.lines = std::move(lines);
      out.determinant = det6;
      out.roots = rr.roots;
      return out;
    } catch (const Error&) {
      continue;
    }
  }
  if (degree_drops > 0)
    throw DegreeDrop("fundamental form degree drop persisted across charts");
  throw NoConvergence("no chart produced six certified ruling lines");
}

}  // namespace reyeweb
