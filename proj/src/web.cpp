#include "reyeweb/web.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace reyeweb {

namespace {

constexpr int kUpper[10][2] = {{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 1},
                               {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3}};

std::array<Mat4<CD>, 4> basis_cd(const Web& web) {
  return {to_cd_mat(web.basis[0]), to_cd_mat(web.basis[1]), to_cd_mat(web.basis[2]),
          to_cd_mat(web.basis[3])};
}

std::array<CD, 16> minors16(const Mat4<CD>& m) {
  std::array<CD, 16> f;
  int idx = 0;
  for (int dr = 0; dr < 4; ++dr)
    for (int dc = 0; dc < 4; ++dc) f[idx++] = minor3(m, dr, dc);
  return f;
}

double minors_residual(const Mat4<CD>& m) {
  std::array<CD, 16> f = minors16(m);
  double s = mat_norm(m);
  double r = 0;
  for (const CD& x : f) r += std::norm(x);
  return std::sqrt(r) / (s * s * s);
}

/// Orthonormal basis of the Hermitian complement of z (unit norm), 3 vectors.
std::array<Vec4<CD>, 3> chart_basis(const Vec4<CD>& z) {
  std::array<Vec4<CD>, 4> cand{};
  for (int i = 0; i < 4; ++i) {
    Vec4<CD> e{};
    e[i] = 1;
    CD c = vdot(z, e);
    cand[i] = vsub(e, vscale(z, c));
  }
  std::array<int, 4> order{0, 1, 2, 3};
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return vnorm(cand[a]) > vnorm(cand[b]); });
  std::array<Vec4<CD>, 3> basis;
  int got = 0;
  for (int oi = 0; oi < 4 && got < 3; ++oi) {
    Vec4<CD> v = cand[order[oi]];
    for (int j = 0; j < got; ++j) v = vsub(v, vscale(basis[j], vdot(basis[j], v)));
    if (vnorm(v) < 1e-8) continue;
    basis[got++] = vunit(v);
  }
  if (got < 3) throw DegenerateInput("chart basis construction failed");
  return basis;
}

std::optional<Node> gn_node(const Web& web, const std::array<Mat4<CD>, 4>& basis,
                            Vec4<CD> z, const NodeOptions& opts) {
  z = vunit(z);
  double resid = 0;
  for (int iter = 0; iter < opts.gn_iters; ++iter) {
    Mat4<CD> m = web.member_matrix_cd(z);
    double s = mat_norm(m);
    std::array<CD, 16> f = minors16(m);
    double fn = 0;
    for (const CD& x : f) fn += std::norm(x);
    resid = std::sqrt(fn) / (s * s * s);
    if (resid < 1e-14) break;

    std::array<Vec4<CD>, 3> chart = chart_basis(z);
    MatC jac(16, 3);
    int row = 0;
    for (int dr = 0; dr < 4; ++dr) {
      for (int dc = 0; dc < 4; ++dc) {
        std::array<CD, 9> sub = submatrix3(m, dr, dc);
        std::array<CD, 9> adj = adj3(sub);
        // d minor / d z_k = tr(adj(sub) * A_k[sub])
        std::array<CD, 4> dk;
        for (int k = 0; k < 4; ++k) {
          std::array<CD, 9> aks = submatrix3(basis[k], dr, dc);
          CD tr = 0;
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) tr += adj[3 * i + j] * aks[3 * j + i];
          dk[k] = tr;
        }
        for (int c = 0; c < 3; ++c) {
          CD acc = 0;
          for (int k = 0; k < 4; ++k) acc += dk[k] * chart[c][k];
          jac.at(row, c) = acc;
        }
        ++row;
      }
    }
    std::vector<CD> rhs(16);
    for (int i = 0; i < 16; ++i) rhs[i] = -f[i];
    std::vector<CD> delta = lstsq(jac, rhs);

    bool improved = false;
    double scale = 1.0;
    for (int attempt = 0; attempt < 7; ++attempt) {
      Vec4<CD> zn = z;
      for (int c = 0; c < 3; ++c)
        zn = vadd(zn, vscale(chart[c], delta[c] * scale));
      zn = vunit(zn);
      double rn = minors_residual(web.member_matrix_cd(zn));
      if (rn < resid) {
        z = zn;
        improved = true;
        break;
      }
      scale *= 0.5;
    }
    if (!improved) break;
  }
  resid = minors_residual(web.member_matrix_cd(z));
  if (resid >= opts.gn_accept) return std::nullopt;
  std::vector<double> sv = singular_values(to_matc(web.member_matrix_cd(z)));
  Node n;
  n.z = z;
  n.residual = resid;
  n.sigma2_ratio = sv[1] / sv[0];
  n.sigma3_ratio = sv[2] / sv[0];
  return n;
}

}  // namespace

bool web_basis_independent(const Web& web) {
  std::vector<Rat> rows;
  rows.reserve(40);
  for (int k = 0; k < 4; ++k)
    for (const auto& [i, j] : kUpper) rows.push_back(web.basis[k](i, j));
  return gauss_rank(std::move(rows), 4, 10) == 4;
}

MPoly symmetroid(const Web& web) {
  std::array<MPoly, 16> entries;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      MPoly e;
      for (int k = 0; k < 4; ++k)
        e.add_term(MPoly::variable(k).terms().begin()->first, web.basis[k](i, j));
      entries[4 * i + j] = e;
    }
  return mpoly_det4(entries);
}

std::array<MPoly, 16> steinerian_matrix(const Web& web) {
  // column k of C(x) is A_k x
  std::array<MPoly, 16> entries;
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) {
      MPoly e;
      for (int i = 0; i < 4; ++i)
        e.add_term(MPoly::variable(i).terms().begin()->first, web.basis[k](j, i));
      entries[4 * j + k] = e;
    }
  return entries;
}

MPoly steinerian(const Web& web) { return mpoly_det4(steinerian_matrix(web)); }

Mat4<CD> steinerian_matrix_at(const Web& web, const Vec4<CD>& x) {
  Mat4<CD> c;
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) {
      CD acc = 0;
      for (int i = 0; i < 4; ++i) acc += to_cd(web.basis[k](j, i)) * x[i];
      c(j, k) = acc;
    }
  return c;
}

XiFiber xi_fiber_from_x(const Web& web, const Vec4<CD>& x, double tol) {
  Mat4<CD> c = steinerian_matrix_at(web, x);
  MatC cm = to_matc(c);
  std::vector<double> sv = singular_values(cm);
  if (sv[0] == 0.0 || sv[3] / sv[0] > tol)
    throw DegenerateInput("point is not on the Steinerian at the given tolerance");
  if (sv[2] / sv[0] <= tol)
    throw RankDeficiencyAmbiguous("Steinerian matrix kernel has dimension > 1");

  auto kz = nullspace(cm, 1e-2 * sv[2] / sv[0] + tol);
  auto ky = nullspace(cm.transposed(), 1e-2 * sv[2] / sv[0] + tol);
  if (kz.size() != 1 || ky.size() != 1)
    throw RankDeficiencyAmbiguous("unexpected kernel dimension in xi_fiber");

  XiFiber fib;
  fib.x = x;
  fib.z = {kz[0][0], kz[0][1], kz[0][2], kz[0][3]};
  fib.y = {ky[0][0], ky[0][1], ky[0][2], ky[0][3]};
  double worst = 0;
  for (int k = 0; k < 4; ++k) {
    Mat4<CD> a = to_cd_mat(web.basis[k]);
    double denom = mat_norm(a) * vnorm(fib.x) * vnorm(fib.y);
    worst = std::max(worst, std::abs(bilinear(fib.x, a, fib.y)) / denom);
  }
  fib.residual = worst;
  return fib;
}

std::array<Rat, 5> pencil_quartic(const Web& web, const Vec4<Rat>& a,
                                  const Vec4<Rat>& b) {
  Mat4<Rat> ma = web.member_matrix(a);
  Mat4<Rat> mb = web.member_matrix(b);
  std::vector<std::pair<Rat, Rat>> samples;
  for (int t = 0; t <= 4; ++t) {
    Rat tt(t);
    Mat4<Rat> m;
    for (int i = 0; i < 16; ++i) m.a[i] = ma.a[i] + tt * mb.a[i];
    samples.push_back({tt, det4(m)});
  }
  PolyQ p = lagrange_interpolate(samples);
  std::array<Rat, 5> out{Rat(0), Rat(0), Rat(0), Rat(0), Rat(0)};
  for (int i = 0; i <= 4 && i < static_cast<int>(p.c.size()); ++i) out[i] = p.c[i];
  return out;
}

PolyC pencil_quartic_cd(const Web& web, const Vec4<CD>& a, const Vec4<CD>& b) {
  Mat4<CD> ma = web.member_matrix_cd(a);
  Mat4<CD> mb = web.member_matrix_cd(b);
  static const double nodes[5] = {0.0, 1.0, -1.0, 2.0, -2.0};
  std::vector<std::pair<CD, CD>> samples;
  for (double t : nodes) {
    Mat4<CD> m;
    for (int i = 0; i < 16; ++i) m.a[i] = ma.a[i] + t * mb.a[i];
    samples.push_back({CD(t), det4(m)});
  }
  return lagrange_interpolate_cd(samples);
}

NodeSearch find_nodes_search(const Web& web, Rng& rng, const NodeOptions& opts) {
  std::array<Mat4<CD>, 4> basis = basis_cd(web);
  NodeSearch out;
  std::vector<Node> found;
  int stable_batches = 0;
  std::uint64_t stream = rng.next_u64();
  Rng master(stream);

  for (int batch_start = 0; batch_start < opts.max_pencils;
       batch_start += opts.batch) {
    int batch_n = std::min(opts.batch, opts.max_pencils - batch_start);
    std::vector<Vec4<CD>> starts;
    for (int p = 0; p < batch_n; ++p) {
      Rng prng = master.split(batch_start + p);
      Vec4<CD> a = random_cd_point(prng);
      Vec4<CD> b = random_cd_point(prng);
      try {
        PolyC q = trim(pencil_quartic_cd(web, a, b));
        if (q.degree() < 1) continue;
        RootResult rr = poly_roots(q, 1e-11, 400);
        for (const CD& t : rr.roots) starts.push_back(vadd(a, vscale(b, t)));
      } catch (const Error&) {
        continue;
      }
    }
    out.pencils_used += batch_n;
    out.starts_used += static_cast<int>(starts.size());

    std::vector<std::optional<Node>> results = parallel_map<std::optional<Node>>(
        static_cast<int>(starts.size()), opts.exec,
        [&](int i) { return gn_node(web, basis, starts[i], opts); });

    int before = static_cast<int>(found.size());
    for (const auto& cand : results) {
      if (!cand) continue;
      std::vector<CD> cz(cand->z.begin(), cand->z.end());
      bool merged = false;
      for (auto& existing : found) {
        std::vector<CD> ez(existing.z.begin(), existing.z.end());
        if (proj_distance(cz, ez) < opts.dedup_tol) {
          if (cand->residual < existing.residual) existing = *cand;
          merged = true;
          break;
        }
      }
      if (!merged) found.push_back(*cand);
    }

    if (static_cast<int>(found.size()) == 10 &&
        static_cast<int>(found.size()) == before) {
      if (++stable_batches >= 1) break;
    } else {
      stable_batches = 0;
    }
    if (static_cast<int>(found.size()) > 10) break;
  }

  std::sort(found.begin(), found.end(), [](const Node& a, const Node& b) {
    return proj_less(std::vector<CD>(a.z.begin(), a.z.end()),
                     std::vector<CD>(b.z.begin(), b.z.end()));
  });
  out.nodes = std::move(found);
  return out;
}

std::vector<Node> find_nodes(const Web& web, Rng& rng, const NodeOptions& opts) {
  NodeSearch s = find_nodes_search(web, rng, opts);
  if (static_cast<int>(s.nodes.size()) != 10)
    throw CountMismatch("symmetroid node count is not 10 within the search budget", 10,
                        static_cast<int>(s.nodes.size()));
  return s.nodes;
}

// ---- exact certificates -----------------------------------------------------

namespace {

using CMat4 = Mat4<CRat>;

CMat4 member_crat(const Web& web, const Vec4<CRat>& z) {
  CMat4 m;
  for (int i = 0; i < 16; ++i) {
    CRat acc;
    for (int k = 0; k < 4; ++k) acc = acc + CRat(web.basis[k].a[i]) * z[k];
    m.a[i] = acc;
  }
  return m;
}

Rat crat_minors_norm2(const CMat4& m) {
  Rat acc(0);
  for (int dr = 0; dr < 4; ++dr)
    for (int dc = 0; dc < 4; ++dc) acc += det3(submatrix3(m, dr, dc)).norm();
  return acc;
}

Rat crat_mat_norm2(const CMat4& m) {
  Rat acc(0);
  for (const CRat& x : m.a) acc += x.norm();
  return acc;
}

double rel_residual(const Rat& minors_norm2, const Rat& mat_norm2) {
  if (sgn(mat_norm2) == 0) return std::numeric_limits<double>::infinity();
  // Form the scale-invariant ratio exactly before rounding: the two norms can
  // individually overflow double once the iterate is written over integers.
  Rat ratio2 = minors_norm2 / (mat_norm2 * mat_norm2 * mat_norm2);
  return std::sqrt(ratio2.get_d());
}

/// Rescale a projective CRat vector to Gaussian integers with unit content.
/// Keeps every subsequent exact operation on integer numerators, where mpq
/// canonicalization is cheap; the Gauss-Newton step is homogeneous, so the
/// iterate is unchanged projectively.
Vec4<CRat> crat_proj_reduce(Vec4<CRat> z) {
  mpz_class den(1);
  for (const CRat& c : z) {
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.re.get_den().get_mpz_t());
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.im.get_den().get_mpz_t());
  }
  Rat scale(den);
  for (CRat& c : z) {
    c.re *= scale;
    c.im *= scale;
  }
  mpz_class content(0);
  for (const CRat& c : z) {
    mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), c.re.get_num().get_mpz_t());
    mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), c.im.get_num().get_mpz_t());
  }
  if (sgn(content) != 0) {
    Rat inv = Rat(1) / Rat(content);
    for (CRat& c : z) {
      c.re *= inv;
      c.im *= inv;
    }
  }
  return z;
}

/// One exact Gauss-Newton step in the chart that freezes coordinate `pivot`.
Vec4<CRat> exact_gn_step(const Web& web, Vec4<CRat> z, int pivot) {
  CMat4 m = member_crat(web, z);
  std::array<int, 3> free{};
  int fi = 0;
  for (int i = 0; i < 4; ++i)
    if (i != pivot) free[fi++] = i;

  std::array<CRat, 16> f;
  std::array<std::array<CRat, 3>, 16> jac;
  int row = 0;
  for (int dr = 0; dr < 4; ++dr)
    for (int dc = 0; dc < 4; ++dc) {
      std::array<CRat, 9> sub = submatrix3(m, dr, dc);
      std::array<CRat, 9> adj = adj3(sub);
      f[row] = det3(sub);
      for (int c = 0; c < 3; ++c) {
        Mat4<Rat> ak = web.basis[free[c]];
        std::array<Rat, 9> aks = submatrix3(ak, dr, dc);
        CRat tr;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) tr = tr + adj[3 * i + j] * CRat(aks[3 * j + i]);
        jac[row][c] = tr;
      }
      ++row;
    }

  // normal equations H delta = -J^H f
  std::array<CRat, 9> h;
  std::array<CRat, 3> g;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CRat acc;
      for (int r = 0; r < 16; ++r) acc = acc + jac[r][i].conj() * jac[r][j];
      h[3 * i + j] = acc;
    }
    CRat acc;
    for (int r = 0; r < 16; ++r) acc = acc + jac[r][i].conj() * f[r];
    g[i] = -acc;
  }
  CRat dh = det3(h);
  if (dh.is_zero()) return z;
  for (int c = 0; c < 3; ++c) {
    std::array<CRat, 9> hc = h;
    for (int i = 0; i < 3; ++i) hc[3 * i + c] = g[i];
    z[free[c]] = z[free[c]] + det3(hc) / dh;
  }
  return z;
}

}  // namespace

NodeCertificate certify_node(const Web& web, const Node& node, double rank_tol,
                             unsigned long max_den) {
  NodeCertificate cert;
  std::vector<double> sv = singular_values(to_matc(web.member_matrix_cd(node.z)));
  cert.sigma2_ratio = sv[1] / sv[0];
  cert.sigma3_ratio = sv[2] / sv[0];
  cert.numeric_rank2 = cert.sigma3_ratio <= rank_tol && cert.sigma2_ratio > 1e-4;

  std::vector<CD> zc(node.z.begin(), node.z.end());
  zc = proj_normalize(zc);
  Vec4<CRat> zr;
  bool ok = true;
  for (int i = 0; i < 4; ++i) {
    auto r = rationalize_cd(zc[i], max_den, 1e-6);
    if (!r) {
      ok = false;
      break;
    }
    zr[i] = *r;
  }
  cert.rationalized = ok;
  if (!ok) return cert;
  zr = crat_proj_reduce(zr);

  int pivot = 0;
  double bm = -1;
  for (int i = 0; i < 4; ++i)
    if (std::abs(zc[i]) > bm) {
      bm = std::abs(zc[i]);
      pivot = i;
    }

  CMat4 m0 = member_crat(web, zr);
  cert.exact_residual_0 = rel_residual(crat_minors_norm2(m0), crat_mat_norm2(m0));
  Vec4<CRat> z1 = crat_proj_reduce(exact_gn_step(web, zr, pivot));
  CMat4 m1 = member_crat(web, z1);
  cert.exact_residual_1 = rel_residual(crat_minors_norm2(m1), crat_mat_norm2(m1));
  Vec4<CRat> z2 = crat_proj_reduce(exact_gn_step(web, z1, pivot));
  CMat4 m2 = member_crat(web, z2);
  cert.exact_residual_2 = rel_residual(crat_minors_norm2(m2), crat_mat_norm2(m2));

  double r0 = cert.exact_residual_0, r1 = cert.exact_residual_1,
         r2 = cert.exact_residual_2;
  cert.quadratic_drop = r0 < 1e-4 && r1 <= std::pow(r0, 1.7) && r2 <= std::pow(r1, 1.7);
  return cert;
}

// ---- genericity ---------------------------------------------------------------

bool pencil_scan(const Web& web, Rng& rng, int trials, std::string* why) {
  for (int t = 0; t < trials; ++t) {
    Vec4<Rat> a, b;
    PLineQ line{};
    bool drawn = false;
    for (int attempt = 0; attempt < 32 && !drawn; ++attempt) {
      a = random_rational_point(rng);
      b = random_rational_point(rng);
      try {
        line = line_from_points(a, b);
        drawn = true;
      } catch (const DegenerateInput&) {
      }
    }
    if (!drawn) {
      if (why) *why = "could not draw a pencil";
      return false;
    }
    std::array<Rat, 5> q = pencil_quartic(web, a, b);
    if (sgn(q[4]) == 0 || sgn(q[0]) == 0) {
      if (why) *why = "pencil quartic drops degree (member with zero determinant)";
      return false;
    }
    PolyC qc;
    for (int i = 0; i <= 4; ++i) qc.c.push_back(to_cd(q[i]));
    RootResult rr;
    try {
      rr = poly_roots(qc, 1e-11, 400);
    } catch (const NoConvergence&) {
      if (why) *why = "pencil quartic root finding failed";
      return false;
    }
    auto clusters = cluster_roots(rr.roots, 1e-6);
    if (clusters.size() != 4) {
      if (why) *why = "pencil quartic has a multiple root";
      return false;
    }
    PolyC dqc = qc.derivative();
    for (const auto& [root, mult] : clusters) {
      // Aberth leaves a badly conditioned simple root with forward error up
      // to 1e-11 / |q'|, enough to push the member past the rank cutoff;
      // Newton against the exact coefficients recovers it to eps / |q'|.
      CD t = root;
      for (int it = 0; it < 4; ++it) {
        CD dv = dqc.eval(t);
        if (std::abs(dv) == 0.0) break;
        t -= qc.eval(t) / dv;
      }
      Vec4<CD> z = vadd(to_cd_vec(a), vscale(to_cd_vec(b), t));
      if (numeric_rank(to_matc(web.member_matrix_cd(z)), 1e-8) != 3) {
        if (why) *why = "degenerate pencil member is not rank 3";
        return false;
      }
    }
  }
  return true;
}

namespace {

/// Substitute x_i = sum_j s[i][j] w_j (4 variables to 3) into f.
MPoly substitute_4_to_3(const MPoly& f, const std::array<std::array<Rat, 3>, 4>& s) {
  std::array<MPoly, 4> lin;
  for (int i = 0; i < 4; ++i) {
    MPoly li;
    for (int j = 0; j < 3; ++j)
      li.add_term(MPoly::variable(j).terms().begin()->first, s[i][j]);
    lin[i] = li;
  }
  std::array<int, 4> max_e{0, 0, 0, 0};
  for (const auto& [e, c] : f.terms())
    for (int i = 0; i < 4; ++i) max_e[i] = std::max(max_e[i], e[i]);
  std::array<std::vector<MPoly>, 4> pow;
  for (int i = 0; i < 4; ++i) {
    pow[i].push_back(MPoly(Rat(1)));
    for (int k = 1; k <= max_e[i]; ++k) pow[i].push_back(pow[i][k - 1] * lin[i]);
  }
  MPoly out;
  for (const auto& [e, c] : f.terms()) {
    MPoly term{c};
    for (int i = 0; i < 4; ++i)
      if (e[i] > 0) term = term * pow[i][e[i]];
    out = out + term;
  }
  return out;
}

}  // namespace

GenericityReport genericity_check(const Web& web, Rng& rng, int pencil_trials) {
  GenericityReport rep;
  rep.basis_independent = web_basis_independent(web);
  if (!rep.basis_independent) rep.failures.push_back("basis is linearly dependent");

  std::string why;
  rep.pencil_scan_ok = pencil_scan(web, rng, pencil_trials, &why);
  if (!rep.pencil_scan_ok) rep.failures.push_back("pencil scan: " + why);

  try {
    NodeSearch search = find_nodes_search(web, rng);
    rep.node_count = static_cast<int>(search.nodes.size());
    rep.nodes_ok = rep.node_count == 10;
    if (rep.nodes_ok) {
      for (const Node& n : search.nodes) {
        std::vector<double> sv = singular_values(to_matc(web.member_matrix_cd(n.z)));
        if (sv[2] / sv[0] > 1e-8 || sv[1] / sv[0] < 1e-4) {
          rep.nodes_ok = false;
          rep.failures.push_back("a node is not an ordinary rank-2 point");
          break;
        }
      }
    } else {
      rep.failures.push_back("node count " + std::to_string(rep.node_count) +
                             " instead of 10");
    }
  } catch (const Error& e) {
    rep.nodes_ok = false;
    rep.failures.push_back(std::string("node search failed: ") + e.what());
  }

  try {
    Vec4<Rat> h = random_rational_point(rng);
    std::vector<Rat> hrow{h[0], h[1], h[2], h[3]};
    auto kernel = gauss_kernel(hrow, 1, 4);
    if (kernel.size() != 3) throw DegenerateInput("plane kernel is not 3-dimensional");
    std::array<std::array<Rat, 3>, 4> s{};
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 4; ++i) s[i][j] = kernel[j][i];
    MPoly section = substitute_4_to_3(steinerian(web), s);
    MPoly f1 = section.partial(0);
    MPoly f2 = section.partial(1);
    MPoly f3 = section.partial(2);
    TernaryCommonZeros zeros = common_zeros_ternary(f1, f2, rng);
    rep.steinerian_section_smooth = true;
    for (const auto& zp : zeros.zeros) {
      std::array<CD, 4> xe{zp[0], zp[1], zp[2], CD(0)};
      double scale = 0;
      for (const auto& [e, c] : f3.terms()) scale += std::abs(c.get_d());
      double v3 = std::abs(f3.eval_cd(xe)) / std::max(scale, 1e-300);
      if (v3 < 1e-6) {
        rep.steinerian_section_smooth = false;
        rep.failures.push_back("random plane section of the Steinerian is singular");
        break;
      }
    }
  } catch (const IdenticallyZero&) {
    rep.steinerian_section_smooth = false;
    rep.failures.push_back("Steinerian section partials share a component");
  } catch (const Error& e) {
    rep.steinerian_section_smooth = false;
    rep.failures.push_back(std::string("Steinerian probe failed: ") + e.what());
  }
  return rep;
}

Web generate_web(std::uint64_t seed, int coeff_range, int budget) {
  Rng rng(seed);
  for (int attempt = 0; attempt < budget; ++attempt) {
    Web w;
    w.seed = seed;
    w.coeff_range = coeff_range;
    for (int k = 0; k < 4; ++k) {
      Mat4<Rat> m;
      for (const auto& [i, j] : kUpper) {
        Rat v(rng.next_int(-coeff_range, coeff_range));
        m(i, j) = v;
        m(j, i) = v;
      }
      w.basis[k] = m;
    }
    if (!web_basis_independent(w)) continue;
    Rng scan = rng.split(0xA5A50000ull + attempt);
    if (!pencil_scan(w, scan, 8)) continue;
    return w;
  }
  throw GenericityExhausted("generate_web exhausted its draw budget");
}

}  // namespace reyeweb
