#include "reyeweb/reye.hpp"

#include <algorithm>
#include <cmath>

namespace reyeweb {

namespace {

std::array<Mat4<CD>, 4> basis_cd(const Web& web) {
  return {to_cd_mat(web.basis[0]), to_cd_mat(web.basis[1]), to_cd_mat(web.basis[2]),
          to_cd_mat(web.basis[3])};
}

MPoly linear_form(const std::array<Rat, 3>& coeffs) {
  MPoly p;
  for (int j = 0; j < 3; ++j)
    p.add_term(MPoly::variable(j).terms().begin()->first, coeffs[j]);
  return p;
}

double mpoly_scale(const MPoly& f) {
  double s = 0;
  for (const auto& [e, c] : f.terms()) {
    double d = c.get_d();
    s += d * d;
  }
  return std::sqrt(s);
}

double mpoly_rel_value(const MPoly& f, const std::array<CD, 3>& w) {
  std::array<CD, 4> xe{w[0], w[1], w[2], CD(0)};
  double nw = std::sqrt(std::norm(w[0]) + std::norm(w[1]) + std::norm(w[2]));
  double scale = mpoly_scale(f) * std::pow(std::max(nw, 1e-300), f.total_degree());
  return std::abs(f.eval_cd(xe)) / std::max(scale, 1e-300);
}

}  // namespace

MatC restriction_matrix(const Web& web, const PLineC& line) {
  MatC r(4, 3);
  std::array<Mat4<CD>, 4> basis = basis_cd(web);
  for (int k = 0; k < 4; ++k) {
    std::array<CD, 3> row = restrict_quadric_to_line(basis[k], line);
    for (int j = 0; j < 3; ++j) r.at(k, j) = row[j];
  }
  return r;
}

std::array<Rat, 12> restriction_matrix_exact(const Web& web, const PLineQ& line) {
  std::array<Rat, 12> out;
  for (int k = 0; k < 4; ++k) {
    std::array<Rat, 3> row = restrict_quadric_to_line(web.basis[k], line);
    for (int j = 0; j < 3; ++j) out[3 * k + j] = row[j];
  }
  return out;
}

int restriction_rank_exact(const Web& web, const PLineQ& line) {
  std::array<Rat, 12> m = restriction_matrix_exact(web, line);
  return gauss_rank(std::vector<Rat>(m.begin(), m.end()), 4, 3);
}

int restriction_rank_exact_crat(const Web& web, const Vec4<CRat>& a,
                                const Vec4<CRat>& b) {
  std::vector<CRat> rows;
  rows.reserve(12);
  for (int k = 0; k < 4; ++k) {
    Mat4<CRat> m;
    for (int i = 0; i < 16; ++i) m.a[i] = CRat(web.basis[k].a[i]);
    CRat qa = bilinear(a, m, a);
    CRat qab = bilinear(a, m, b);
    CRat qb = bilinear(b, m, b);
    rows.push_back(qa);
    rows.push_back(qab + qab);
    rows.push_back(qb);
  }
  return gauss_rank(std::move(rows), 4, 3);
}

std::optional<ReyeCertificate> is_reye_line(const Web& web, const PLineC& line,
                                            double tol) {
  MatC r = restriction_matrix(web, line);
  std::vector<double> sv = singular_values(r);
  if (sv[0] == 0.0) throw DegenerateInput("zero restriction matrix");
  ReyeCertificate cert;
  cert.sigma_ratio = sv[2] / sv[0];
  cert.sigma2_ratio = sv[1] / sv[0];
  if (cert.sigma_ratio > tol) return std::nullopt;

  auto kernel = nullspace(r.transposed(), std::sqrt(cert.sigma_ratio * 1e-2 + tol));
  if (kernel.size() < 2)
    throw RankDeficiencyAmbiguous("restriction kernel dimension below 2");
  for (int g = 0; g < 2; ++g) {
    const auto& kv = kernel[kernel.size() - 2 + g];
    for (int i = 0; i < 4; ++i) cert.pencil[g][i] = kv[i];
  }

  // exact certification where the span admits rationalization
  Vec4<CRat> ar, br;
  bool ok = true;
  for (int i = 0; i < 4 && ok; ++i) {
    auto ra = rationalize_cd(line.a[i], 1000000UL, 1e-12);
    auto rb = rationalize_cd(line.b[i], 1000000UL, 1e-12);
    if (!ra || !rb)
      ok = false;
    else {
      ar[i] = *ra;
      br[i] = *rb;
    }
  }
  if (ok) cert.exact = restriction_rank_exact_crat(web, ar, br) <= 2;
  return cert;
}

// ---- sampling --------------------------------------------------------------

namespace {

/// Newton polish of (t, y): x(t) = a + t b stays on the sampled line while all
/// four bilinear pairings x(t)^T A_k y and the affine normalization of y vanish.
bool polish_conjugate_pair(const std::array<Mat4<CD>, 4>& basis, const Vec4<CD>& a,
                           const Vec4<CD>& b, CD& t, Vec4<CD>& y) {
  Vec4<CD> v = y;
  double vn = vnorm(v);
  if (vn == 0) return false;
  for (auto& c : v) c /= vn * vn;

  for (int iter = 0; iter < 12; ++iter) {
    Vec4<CD> x = vadd(a, vscale(b, t));
    MatC jac(5, 5);
    std::vector<CD> rhs(5);
    double worst = 0;
    for (int k = 0; k < 4; ++k) {
      CD fk = bilinear(x, basis[k], y);
      rhs[k] = -fk;
      double scale = mat_norm(basis[k]) * vnorm(x) * vnorm(y);
      worst = std::max(worst, std::abs(fk) / std::max(scale, 1e-300));
      jac.at(k, 0) = bilinear(b, basis[k], y);
      Vec4<CD> xa = basis[k].transposed() * x;
      for (int j = 0; j < 4; ++j) jac.at(k, 1 + j) = xa[j];
    }
    CD f5 = vdot(v, y) - CD(1);
    rhs[4] = -f5;
    jac.at(4, 0) = CD(0);
    for (int j = 0; j < 4; ++j) jac.at(4, 1 + j) = std::conj(v[j]);

    if (worst < 1e-15 && std::abs(f5) < 1e-12) return true;
    std::vector<CD> delta;
    try {
      delta = solve_square(jac, rhs);
    } catch (const DegenerateInput&) {
      return false;
    }
    t += delta[0];
    for (int j = 0; j < 4; ++j) y[j] += delta[1 + j];
  }
  Vec4<CD> x = vadd(a, vscale(b, t));
  double worst = 0;
  for (int k = 0; k < 4; ++k) {
    double scale = mat_norm(basis[k]) * vnorm(x) * vnorm(y);
    worst = std::max(worst, std::abs(bilinear(x, basis[k], y)) / std::max(scale, 1e-300));
  }
  return worst < 1e-13;
}

std::optional<ReyeSample> sample_one(const Web& web, const std::array<Mat4<CD>, 4>& basis,
                                     const MPoly& st, Rng rng) {
  for (int attempt = 0; attempt < 24; ++attempt) {
    Vec4<Rat> a = random_rational_point(rng);
    Vec4<Rat> b = random_rational_point(rng);
    try {
      line_from_points(a, b);
    } catch (const DegenerateInput&) {
      continue;
    }
    PolyQ restricted =
        st.restrict_to_line({a[0], a[1], a[2], a[3]}, {b[0], b[1], b[2], b[3]});
    if (restricted.degree() != 4) continue;
    RootResult rr;
    try {
      rr = poly_roots(to_cd_poly(restricted), 1e-13, 400);
    } catch (const Error&) {
      continue;
    }
    CD t = rr.roots[rng.next_u64() % rr.roots.size()];
    Vec4<CD> ac = to_cd_vec(a), bc = to_cd_vec(b);
    Vec4<CD> x = vadd(ac, vscale(bc, t));
    XiFiber fib;
    try {
      fib = xi_fiber_from_x(web, x, 1e-5);
    } catch (const Error&) {
      continue;
    }
    Vec4<CD> y = fib.y;
    if (!polish_conjugate_pair(basis, ac, bc, t, y)) continue;
    x = vadd(ac, vscale(bc, t));

    ReyeSample s;
    try {
      s.line = line_from_points(vunit(x), vunit(y));
    } catch (const DegenerateInput&) {
      continue;
    }
    s.x = vunit(x);
    s.y = vunit(y);
    double worst = 0;
    for (int k = 0; k < 4; ++k) {
      double scale = mat_norm(basis[k]);
      worst = std::max(worst, std::abs(bilinear(s.x, basis[k], s.y)) / scale);
    }
    s.bilinear_residual = worst;
    auto cert = is_reye_line(web, s.line, 1e-9);
    if (!cert) continue;
    s.membership = cert->sigma_ratio;
    s.pencil = cert->pencil;
    return s;
  }
  return std::nullopt;
}

}  // namespace

std::vector<ReyeSample> sample_reye_lines(const Web& web, Rng& rng, int count,
                                          Exec exec) {
  std::array<Mat4<CD>, 4> basis = basis_cd(web);
  MPoly st = steinerian(web);
  Rng master(rng.next_u64());
  std::vector<std::optional<ReyeSample>> raw = parallel_map<std::optional<ReyeSample>>(
      count, exec, [&](int i) { return sample_one(web, basis, st, master.split(i)); });
  std::vector<ReyeSample> out;
  out.reserve(count);
  for (auto& s : raw) {
    if (!s) throw SampleBudgetExceeded("sample_reye_lines item exhausted its budget");
    out.push_back(std::move(*s));
  }
  return out;
}

// ---- rays through a point ------------------------------------------------------

RaysThroughPoint rays_through_point(const Web& web, const Vec4<Rat>& o, Rng& rng) {
  // net of members through o: kernel of the row (o^T A_k o)_k
  std::vector<Rat> row(4);
  for (int k = 0; k < 4; ++k) row[k] = bilinear(o, web.basis[k], o);
  auto net = gauss_kernel(row, 1, 4);
  if (net.size() != 3) throw DegenerateInput("net through the point is not 3-dimensional");

  std::array<Mat4<Rat>, 3> gens;
  for (int g = 0; g < 3; ++g)
    gens[g] = web.member_matrix({net[g][0], net[g][1], net[g][2], net[g][3]});

  // direction chart: d = D w for a random integer 4x3 frame with o outside its span
  std::array<std::array<Rat, 3>, 4> dmat{};
  for (int tries = 0;; ++tries) {
    if (tries >= 64) throw GenericityExhausted("no usable direction chart");
    std::vector<Rat> probe(16);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 3; ++j) {
        dmat[i][j] = Rat(rng.next_int(-9, 9));
        probe[4 * i + j] = dmat[i][j];
      }
    for (int i = 0; i < 4; ++i) probe[4 * i + 3] = o[i];
    if (gauss_rank(probe, 4, 4) == 4) break;
  }

  // u_g(w) linear, v_g(w) quadratic
  std::array<MPoly, 3> u, v;
  for (int g = 0; g < 3; ++g) {
    std::array<Rat, 3> ucoef;
    for (int j = 0; j < 3; ++j) {
      Vec4<Rat> col{dmat[0][j], dmat[1][j], dmat[2][j], dmat[3][j]};
      ucoef[j] = bilinear(o, gens[g], col);
    }
    u[g] = linear_form(ucoef);
    MPoly vg;
    for (int j = 0; j < 3; ++j)
      for (int l = 0; l < 3; ++l) {
        Vec4<Rat> cj{dmat[0][j], dmat[1][j], dmat[2][j], dmat[3][j]};
        Vec4<Rat> cl{dmat[0][l], dmat[1][l], dmat[2][l], dmat[3][l]};
        MPoly::Exp e{0, 0, 0, 0};
        e[j] += 1;
        e[l] += 1;
        vg.add_term(e, bilinear(cj, gens[g], cl));
      }
    v[g] = vg;
  }

  MPoly m01 = u[0] * v[1] - u[1] * v[0];
  MPoly m02 = u[0] * v[2] - u[2] * v[0];
  MPoly m12 = u[1] * v[2] - u[2] * v[1];

  RaysThroughPoint out;
  TernaryCommonZeros zeros = common_zeros_ternary(m01, m02, rng, 1e-9);
  out.certificate = zeros.certificate;
  out.zero_count = static_cast<int>(zeros.zeros.size());

  Vec4<CD> oc = to_cd_vec(o);
  out.base_points.push_back(vunit(oc));
  out.base_residuals.push_back(0.0);

  for (const auto& w : zeros.zeros) {
    if (mpoly_rel_value(m12, w) >= 1e-7) {
      ++out.spurious_count;
      continue;
    }
    Vec4<CD> d{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 3; ++j) d[i] += to_cd(dmat[i][j]) * w[j];
    PLineC ray;
    try {
      ray = line_from_points(vunit(oc), vunit(d));
    } catch (const DegenerateInput&) {
      ++out.spurious_count;
      continue;
    }
    auto cert = is_reye_line(web, ray, 1e-8);
    if (!cert) {
      ++out.spurious_count;
      continue;
    }

    // base point on the ray: the common second root of every net generator
    std::array<CD, 4> xe{w[0], w[1], w[2], CD(0)};
    std::vector<CD> tstars;
    for (int g = 0; g < 3; ++g) {
      CD uv = u[g].eval_cd(xe);
      CD vv = v[g].eval_cd(xe);
      double scale = mpoly_scale(v[g]);
      if (std::abs(vv) < 1e-9 * scale) continue;
      tstars.push_back(-2.0 * uv / vv);
    }
    if (tstars.size() < 2) throw DegenerateInput("base point parameter is indeterminate");
    double spread = 0, tmax = 0;
    for (const CD& ts : tstars) tmax = std::max(tmax, std::abs(ts));
    for (std::size_t i = 0; i < tstars.size(); ++i)
      for (std::size_t j = i + 1; j < tstars.size(); ++j)
        spread = std::max(spread, std::abs(tstars[i] - tstars[j]));
    spread /= (1.0 + tmax);
    CD tmean(0);
    for (const CD& ts : tstars) tmean += ts;
    tmean /= static_cast<double>(tstars.size());

    Vec4<CD> base = vunit(vadd(oc, vscale(d, tmean)));

    double worst = 0;
    for (int g = 0; g < 3; ++g) {
      Mat4<CD> gc = to_cd_mat(gens[g]);
      worst = std::max(worst, quadric_residual(gc, base));
    }

    out.rays.push_back(ray);
    out.membership.push_back(cert->sigma_ratio);
    out.base_points.push_back(base);
    out.base_residuals.push_back(worst);
    out.base_spreads.push_back(spread);
  }

  if (static_cast<int>(out.rays.size()) != 7)
    throw CountMismatch("rays through the point", 7, static_cast<int>(out.rays.size()));

  // distinctness of the 8 base points
  for (std::size_t i = 0; i < out.base_points.size(); ++i)
    for (std::size_t j = i + 1; j < out.base_points.size(); ++j) {
      std::vector<CD> pi(out.base_points[i].begin(), out.base_points[i].end());
      std::vector<CD> pj(out.base_points[j].begin(), out.base_points[j].end());
      if (proj_distance(pi, pj) < 1e-6)
        throw CountMismatch("base points of the net are not distinct", 8,
                            static_cast<int>(out.base_points.size()) - 1);
    }
  return out;
}

// ---- rays in a plane ---------------------------------------------------------------

RaysInPlane rays_in_plane(const Web& web, const Vec4<Rat>& plane, Rng& rng) {
  std::vector<Rat> hrow{plane[0], plane[1], plane[2], plane[3]};
  auto kernel = gauss_kernel(hrow, 1, 4);
  if (kernel.size() != 3) throw DegenerateInput("plane covector is zero");

  // random exact recombination so the chart's blind point is generic
  std::array<Vec4<Rat>, 3> s;
  for (int tries = 0;; ++tries) {
    if (tries >= 64) throw GenericityExhausted("no usable plane frame");
    std::array<std::array<Rat, 3>, 3> mix{};
    std::vector<Rat> flat(9);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        mix[i][j] = Rat(rng.next_int(-5, 5));
        flat[3 * i + j] = mix[i][j];
      }
    if (gauss_rank(flat, 3, 3) != 3) continue;
    for (int i = 0; i < 3; ++i) {
      Vec4<Rat> si{Rat(0), Rat(0), Rat(0), Rat(0)};
      for (int j = 0; j < 3; ++j)
        for (int c = 0; c < 4; ++c) si[c] += mix[i][j] * kernel[j][c];
      s[i] = si;
    }
    break;
  }

  // conics: restrictions of the basis quadrics to the plane frame
  std::array<std::array<Rat, 9>, 4> conic;
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) conic[k][3 * i + j] = bilinear(s[i], web.basis[k], s[j]);

  // dual-line chart: the line with dual coordinates (al, be, ga) is spanned by
  // k1 = (0, ga, -be) and k2 = (-ga, 0, al) in plane coordinates
  std::array<MPoly, 3> k1, k2;
  {
    MPoly al = MPoly::variable(0), be = MPoly::variable(1), ga = MPoly::variable(2);
    k1 = {MPoly(), ga, -be};
    k2 = {-ga, MPoly(), al};
  }
  auto conic_pair = [&](int k, const std::array<MPoly, 3>& p,
                        const std::array<MPoly, 3>& q) {
    MPoly acc;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) acc = acc + (p[i] * q[j]).scaled(conic[k][3 * i + j]);
    return acc;
  };

  std::array<std::array<MPoly, 3>, 4> rows;
  for (int k = 0; k < 4; ++k) {
    MPoly q11 = conic_pair(k, k1, k1);
    MPoly q12 = conic_pair(k, k1, k2);
    MPoly q22 = conic_pair(k, k2, k2);
    rows[k] = {q11, q12 + q12, q22};
  }

  RaysInPlane out;
  std::array<MPoly, 4> minors;
  int min_order = 1000;
  for (int omit = 0; omit < 4; ++omit) {
    std::array<MPoly, 9> sub;
    int idx = 0;
    for (int k = 0; k < 4; ++k) {
      if (k == omit) continue;
      for (int j = 0; j < 3; ++j) sub[idx++] = rows[k][j];
    }
    MPoly m = mpoly_det3(sub);
    // At the chart's blind point (gamma = 0) the restriction matrix drops to
    // rank 1 and its first-order term stays inside a two-column span, so every
    // minor carries an exact gamma^3; the residual curves are cubics.
    int order = m.is_zero() ? 3 : m.var_order(2);
    if (order < 3)
      throw DegenerateInput("plane-chart minor is not divisible by the chart factor");
    min_order = std::min(min_order, order);
    minors[omit] = m.is_zero() ? m : m.divide_by_var_power(2, 3);
  }
  out.gamma_order = (min_order == 1000) ? 0 : min_order;

  TernaryCommonZeros zeros = common_zeros_ternary(minors[3], minors[2], rng, 1e-9);
  out.certificate = zeros.certificate;
  out.candidate_count = static_cast<int>(zeros.zeros.size());

  for (const auto& w : zeros.zeros) {
    if (mpoly_rel_value(minors[0], w) >= 1e-7) continue;
    if (mpoly_rel_value(minors[1], w) >= 1e-7) continue;
    // map the dual point back to a line in P^3
    std::array<CD, 3> p1{CD(0), w[2], -w[1]};
    std::array<CD, 3> p2{-w[2], CD(0), w[0]};
    Vec4<CD> a{}, b{};
    for (int c = 0; c < 4; ++c)
      for (int i = 0; i < 3; ++i) {
        a[c] += p1[i] * to_cd(s[i][c]);
        b[c] += p2[i] * to_cd(s[i][c]);
      }
    PLineC ray;
    try {
      ray = line_from_points(vunit(a), vunit(b));
    } catch (const DegenerateInput&) {
      continue;  // chart-degenerate candidate (gamma = 0)
    }
    auto cert = is_reye_line(web, ray, 1e-8);
    if (!cert) continue;
    out.rays.push_back(ray);
    out.membership.push_back(cert->sigma_ratio);
  }

  if (static_cast<int>(out.rays.size()) != 3)
    throw CountMismatch("rays in the plane", 3, static_cast<int>(out.rays.size()));
  return out;
}

// ---- bitangency --------------------------------------------------------------------

DeltaResult delta(const Web& web, const ReyeSample& sample) {
  DeltaResult out;
  out.pencil = sample.pencil;

  // Balance the pencil basis: a tiny leading coefficient parks one tangency
  // near infinity of the chart and ruins the conditioning of everything
  // downstream. By Cauchy's bound, |c4| >= 0.05 sup keeps every root inside
  // |t| <= 21.
  Rng basis_rng(0xB17A06ull);
  Vec4<CD> c1 = sample.pencil[0], c2 = sample.pencil[1];
  PolyC quartic;
  double best_ratio = -1.0;
  Vec4<CD> best_c1 = c1, best_c2 = c2;
  PolyC best_q;
  for (int attempt = 0; attempt < 16; ++attempt) {
    quartic = trim(pencil_quartic_cd(web, c1, c2));
    double ratio = 0.0;
    if (quartic.degree() == 4) {
      double supc = 0;
      for (const CD& c : quartic.c) supc = std::max(supc, std::abs(c));
      ratio = std::abs(quartic.c[4]) / supc;
    }
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best_c1 = c1;
      best_c2 = c2;
      best_q = quartic;
    }
    if (ratio >= 0.05) break;
    CD lam(2.0 * basis_rng.next_double() - 1.0, 2.0 * basis_rng.next_double() - 1.0);
    c2 = vunit(vadd(c2, vscale(c1, lam)));
  }
  c1 = best_c1;
  c2 = best_c2;
  quartic = best_q;
  if (quartic.degree() != 4)
    throw DegreeDrop("pencil quartic keeps dropping degree");

  // The sample's pencil comes out of a kernel extraction whose accuracy is
  // limited by the restriction's singular-value gap; an unlucky gap leaves a
  // squareness defect near 1e-12, whose square root then pushes the root
  // clusters against the certificate radius. A few minimum-norm Gauss-Newton
  // steps on the two defect coefficients drive the defect down to the noise
  // of the determinant expansion; the shift is recorded and the polished
  // pencil is checked against the line again below.
  auto squareness_polish = [&](Vec4<CD>& p1, Vec4<CD>& p2, PolyC& quar) -> double {
    MatC span(2, 4);
    for (int j = 0; j < 4; ++j) {
      span.at(0, j) = std::conj(p1[j]);
      span.at(1, j) = std::conj(p2[j]);
    }
    SvdResult sv = svd(span);
    Vec4<CD> u1, u2;
    for (int j = 0; j < 4; ++j) {
      u1[j] = sv.v.at(j, 2);
      u2[j] = sv.v.at(j, 3);
    }
    auto defect = [&](const std::array<CD, 4>& s, std::array<CD, 2>& e) {
      Vec4<CD> d1 = p1, d2 = p2;
      for (int j = 0; j < 4; ++j) {
        d1[j] += s[0] * u1[j] + s[1] * u2[j];
        d2[j] += s[2] * u1[j] + s[3] * u2[j];
      }
      PolyC q = trim(pencil_quartic_cd(web, d1, d2));
      if (q.degree() != 4) return false;
      CD b = q.c[3] / (q.c[4] * 2.0);
      CD d = (q.c[2] / q.c[4] - b * b) / 2.0;
      double supc = 0;
      for (const CD& c : q.c) supc = std::max(supc, std::abs(c));
      e[0] = (q.c[1] - q.c[4] * b * d * 2.0) / supc;
      e[1] = (q.c[0] - q.c[4] * d * d) / supc;
      return true;
    };
    std::array<CD, 4> s{};
    std::array<CD, 2> e{};
    if (!defect(s, e)) return 0.0;
    double damping = 0.0;
    for (int iter = 0; iter < 8; ++iter) {
      double en = std::max(std::abs(e[0]), std::abs(e[1]));
      if (en < 1e-15) break;
      const double h = 1e-5;
      MatC jac(2, 4);
      bool ok = true;
      for (int k = 0; k < 4 && ok; ++k) {
        std::array<CD, 4> sp = s, sm = s;
        sp[k] += h;
        sm[k] -= h;
        std::array<CD, 2> ep{}, em{};
        ok = defect(sp, ep) && defect(sm, em);
        for (int r = 0; r < 2; ++r) jac.at(r, k) = (ep[r] - em[r]) / (2 * h);
      }
      if (!ok) break;
      MatC gram(2, 2);
      for (int r = 0; r < 2; ++r)
        for (int q = 0; q < 2; ++q) {
          CD acc;
          for (int k = 0; k < 4; ++k) acc += jac.at(r, k) * std::conj(jac.at(q, k));
          gram.at(r, q) = acc;
        }
      double trace = std::abs(gram.at(0, 0)) + std::abs(gram.at(1, 1));
      // Levenberg damping: a nearly rank-deficient Jacobian otherwise throws
      // the minimum-norm step out of the linear regime and the defect jumps.
      bool accepted = false;
      for (int attempt = 0; attempt < 5 && !accepted; ++attempt) {
        MatC damped = gram;
        for (int r = 0; r < 2; ++r) damped.at(r, r) += damping * trace;
        std::vector<CD> w;
        try {
          w = solve_square(damped, {-e[0], -e[1]});
        } catch (const DegenerateInput&) {
          break;
        }
        std::array<CD, 4> snew = s;
        for (int k = 0; k < 4; ++k)
          snew[k] += std::conj(jac.at(0, k)) * w[0] + std::conj(jac.at(1, k)) * w[1];
        std::array<CD, 2> enew{};
        if (defect(snew, enew) &&
            std::max(std::abs(enew[0]), std::abs(enew[1])) < en) {
          s = snew;
          e = enew;
          damping *= 0.25;
          accepted = true;
        } else {
          damping = damping == 0.0 ? 1e-8 : damping * 100.0;
        }
      }
      if (!accepted) break;
    }
    double shift2 = 0;
    for (const CD& v : s) shift2 += std::norm(v);
    for (int j = 0; j < 4; ++j) {
      p1[j] += s[0] * u1[j] + s[1] * u2[j];
      p2[j] += s[2] * u1[j] + s[3] * u2[j];
    }
    quar = trim(pencil_quartic_cd(web, p1, p2));
    if (quar.degree() != 4)
      throw DegreeDrop("pencil quartic lost degree during the squareness polish");
    return std::sqrt(shift2);
  };

  // the polished pencil must still consist of quadrics through the line
  auto line_membership = [&](const Vec4<CD>& p1, const Vec4<CD>& p2) -> double {
    double worst = 0;
    for (const Vec4<CD>& c : {p1, p2}) {
      Mat4<CD> m = web.member_matrix_cd(c);
      double scale = std::max(mat_norm(m), 1e-300);
      worst = std::max(worst, std::abs(bilinear(sample.x, m, sample.x)) / scale);
      worst = std::max(worst, std::abs(bilinear(sample.x, m, sample.y)) / scale);
      worst = std::max(worst, std::abs(bilinear(sample.y, m, sample.y)) / scale);
    }
    if (worst > 1e-9) throw BitangencyFailed("polished pencil drifted off the line");
    return worst;
  };

  double shift1 = squareness_polish(c1, c2, quartic);
  line_membership(c1, c2);

  // First pass: only the squareness residual matters here; the root clusters
  // are measured again after the chart below, so the cluster radius is loose.
  SquareCertificate cert0 = is_perfect_square_quartic(quartic, 0.05, 1e-8);
  if (!cert0.ok) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "pair gap %.3g, residual %.3g", cert0.pair_gap,
                  cert0.residual);
    throw BitangencyFailed(std::string("pencil quartic is not a perfect square (") + buf +
                           ")");
  }
  RootResult rq0 = poly_roots(cert0.root_quadratic, 1e-14, 200);

  // Translate the pencil chart so the two tangencies sit symmetrically at
  // +/- halfd around the origin. A far-off tangency pair flattens the
  // quartic's curvature at its double roots relative to the sup norm and
  // amplifies the measured cluster splitting; recentering keeps the roots at
  // order one where the splitting bottoms out near sqrt(eps). Translation
  // only: rescaling the second basis vector by halfd would make the chart
  // anisotropic and leave the polish Jacobian too ill-conditioned to converge.
  {
    CD center = (rq0.roots[0] + rq0.roots[1]) / 2.0;
    CD halfd = (rq0.roots[0] - rq0.roots[1]) / 2.0;
    if (std::abs(halfd) < 1e-4 * std::max(1.0, std::abs(center)))
      throw BitangencyFailed("tangency members nearly coincide");
    Vec4<CD> d1 = vadd(c1, vscale(c2, center));
    double common = vnorm(d1);
    if (common <= 0) throw DegenerateInput("pencil chart collapsed");
    c1 = vscale(d1, CD(1.0 / common));
    c2 = vscale(c2, CD(1.0 / common));
    quartic = trim(pencil_quartic_cd(web, c1, c2));
    if (quartic.degree() != 4)
      throw DegreeDrop("pencil quartic lost degree in the tangency chart");
  }

  double shift2 = squareness_polish(c1, c2, quartic);
  out.pencil_polish_shift = std::hypot(shift1, shift2);
  out.pencil_line_residual = line_membership(c1, c2);

  out.pencil = {c1, c2};
  out.quartic = quartic;
  out.pencil_plucker = plucker_from_span(c1, c2);
  {
    std::vector<CD> pv(out.pencil_plucker.begin(), out.pencil_plucker.end());
    pv = proj_normalize(pv);
    for (int i = 0; i < 6; ++i) out.pencil_plucker[i] = pv[i];
  }

  out.square = is_perfect_square_quartic(quartic, 1e-6, 1e-8);
  if (!out.square.ok) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "pair gap %.3g, residual %.3g", out.square.pair_gap,
                  out.square.residual);
    throw BitangencyFailed(std::string("pencil quartic is not a perfect square (") + buf +
                           ")");
  }

  // tangency members at the double roots, now close to -1 and +1
  RootResult rq = poly_roots(out.square.root_quadratic, 1e-14, 200);
  out.tangency = {rq.roots[0], rq.roots[1]};
  double scale = std::max({1.0, std::abs(rq.roots[0]), std::abs(rq.roots[1])});
  out.tangency_separation = std::abs(rq.roots[0] - rq.roots[1]) / scale;
  for (int i = 0; i < 2; ++i) {
    Vec4<CD> z = vadd(c1, vscale(c2, out.tangency[i]));
    out.tangency_ranks[i] = numeric_rank(to_matc(web.member_matrix_cd(z)), 1e-8);
  }
  return out;
}

}  // namespace reyeweb
