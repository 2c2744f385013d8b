#include "reyeweb/poly.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace reyeweb {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

PolyC trim(const PolyC& p, double rel_tol) {
  double maxc = 0;
  for (const CD& x : p.c) maxc = std::max(maxc, std::abs(x));
  PolyC r = p;
  if (maxc == 0) {
    r.c.clear();
    return r;
  }
  while (!r.c.empty() && std::abs(r.c.back()) <= rel_tol * maxc) r.c.pop_back();
  return r;
}

static PolyQ trim_exact(PolyQ p) {
  while (!p.c.empty() && sgn(p.c.back()) == 0) p.c.pop_back();
  return p;
}

PolyQ poly_gcd(PolyQ a, PolyQ b) {
  a = trim_exact(std::move(a));
  b = trim_exact(std::move(b));
  while (b.degree() >= 0) {
    // a mod b
    PolyQ r = a;
    int db = b.degree();
    Rat lead = b.c[db];
    while (r.degree() >= db) {
      int dr = r.degree();
      Rat f = r.c[dr] / lead;
      for (int i = 0; i <= db; ++i) r.c[dr - db + i] -= f * b.c[i];
      r = trim_exact(std::move(r));
    }
    a = std::move(b);
    b = std::move(r);
  }
  if (a.degree() >= 0) {
    Rat lead = a.c[a.degree()];
    for (Rat& x : a.c) x /= lead;
  }
  return a;
}

PolyQ lagrange_interpolate(const std::vector<std::pair<Rat, Rat>>& samples) {
  const int n = static_cast<int>(samples.size());
  PolyQ acc;
  for (int i = 0; i < n; ++i) {
    PolyQ basis(std::vector<Rat>{Rat(1)});
    Rat denom(1);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      basis = basis * PolyQ(std::vector<Rat>{-samples[j].first, Rat(1)});
      denom *= samples[i].first - samples[j].first;
    }
    if (sgn(denom) == 0) throw DegenerateInput("repeated interpolation node");
    acc = acc + basis.scaled(samples[i].second / denom);
  }
  return trim_exact(std::move(acc));
}

PolyC lagrange_interpolate_cd(const std::vector<std::pair<CD, CD>>& samples) {
  const int n = static_cast<int>(samples.size());
  PolyC acc;
  for (int i = 0; i < n; ++i) {
    PolyC basis(std::vector<CD>{CD(1)});
    CD denom(1);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      basis = basis * PolyC(std::vector<CD>{-samples[j].first, CD(1)});
      denom *= samples[i].first - samples[j].first;
    }
    if (denom == CD(0)) throw DegenerateInput("repeated interpolation node");
    acc = acc + basis.scaled(samples[i].second / denom);
  }
  return acc;
}

// ---- Aberth-Ehrlich ---------------------------------------------------------

RootResult poly_roots(const PolyC& p, double tol, int max_iter) {
  PolyC q = trim(p);
  int d = q.degree();
  if (d < 0) throw IdenticallyZero("root finding on the zero polynomial");
  if (d == 0) return {{}, 0, 0.0};
  if (d > 64) throw DegenerateInput("poly_roots supports degree <= 64");

  std::vector<CD> a(q.c.begin(), q.c.begin() + d + 1);
  CD lead = a[d];
  for (CD& x : a) x /= lead;

  double cauchy = 0;
  for (int i = 0; i < d; ++i) cauchy = std::max(cauchy, std::abs(a[i]));
  double radius = 1.0 + cauchy;

  std::vector<CD> z(d);
  for (int k = 0; k < d; ++k) {
    double ang = 2.0 * kPi * (k + 0.353) / d;
    double r = radius * (0.55 + 0.35 * (k + 1.0) / d);
    z[k] = CD(r * std::cos(ang), r * std::sin(ang));
  }

  auto horner = [&](const CD& x, CD& val, CD& der) {
    val = a[d];
    der = CD(0);
    for (int i = d - 1; i >= 0; --i) {
      der = der * x + val;
      val = val * x + a[i];
    }
  };
  auto backward = [&](const CD& x, const CD& val) {
    double ax = std::abs(x);
    double b = 0, powx = 1.0;
    for (int i = 0; i <= d; ++i) {
      b += std::abs(a[i]) * powx;
      powx *= ax;
    }
    return std::abs(val) / std::max(b, 1e-300);
  };

  std::vector<bool> done(d, false);
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    bool all_done = true;
    for (int k = 0; k < d; ++k) {
      if (done[k]) continue;
      CD val, der;
      horner(z[k], val, der);
      if (backward(z[k], val) < tol) {
        done[k] = true;
        continue;
      }
      all_done = false;
      if (der == CD(0)) {
        z[k] += CD(1e-8 * radius, 1e-8 * radius);
        continue;
      }
      CD newton = val / der;
      CD s(0);
      for (int j = 0; j < d; ++j) {
        if (j == k) continue;
        CD diff = z[k] - z[j];
        if (std::abs(diff) < 1e-300) diff = CD(1e-300, 0);
        s += CD(1) / diff;
      }
      CD denom = CD(1) - newton * s;
      if (std::abs(denom) < 1e-300) denom = CD(1e-300, 0);
      z[k] -= newton / denom;
    }
    if (all_done) break;
  }

  double worst = 0;
  for (int k = 0; k < d; ++k) {
    CD val, der;
    horner(z[k], val, der);
    worst = std::max(worst, backward(z[k], val));
  }
  if (worst >= tol * 10.0)
    throw NoConvergence("poly_roots stalled at backward error " + std::to_string(worst));

  return {std::move(z), iter, worst};
}

std::vector<std::pair<CD, int>> cluster_roots(const std::vector<CD>& roots,
                                              double rel_tol) {
  const int n = static_cast<int>(roots.size());
  double scale = 1.0;
  for (const CD& r : roots) scale = std::max(scale, std::abs(r));
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(roots[i] - roots[j]) <= rel_tol * scale) parent[find(i)] = find(j);

  std::vector<std::pair<CD, int>> out;
  std::vector<int> rep_index(n, -1);
  for (int i = 0; i < n; ++i) {
    int r = find(i);
    if (rep_index[r] < 0) {
      rep_index[r] = static_cast<int>(out.size());
      out.push_back({CD(0), 0});
    }
    auto& cl = out[rep_index[r]];
    cl.first += roots[i];
    cl.second += 1;
  }
  for (auto& cl : out) cl.first /= static_cast<double>(cl.second);
  return out;
}

// ---- perfect squares ---------------------------------------------------------

SquareCertificate is_perfect_square_quartic(const PolyC& qin, double cluster_tol,
                                            double residual_tol) {
  PolyC q = trim(qin);
  if (q.degree() != 4) throw DegenerateInput("perfect-square test expects a quartic");
  RootResult rr = poly_roots(q, 1e-14, 600);
  const std::vector<CD>& r = rr.roots;
  double scale = 1.0;
  for (const CD& x : r) scale = std::max(scale, std::abs(x));

  static const int pairings[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
  double best_gap = 1e300;
  const int* bp = pairings[0];
  for (const auto& p : pairings) {
    double g1 = std::abs(r[p[0]] - r[p[1]]);
    double g2 = std::abs(r[p[2]] - r[p[3]]);
    double g = std::max(g1, g2) / scale;
    if (g < best_gap) {
      best_gap = g;
      bp = p;
    }
  }
  // Aberth roots of a near-double pair carry O(sqrt(eps)) noise, so the raw
  // gap bottoms out around 1e-7 * scale even when the quartic is a square to
  // machine precision.  A double root of q is a simple root of q', so Newton
  // on q' recovers the cluster center at full accuracy, and the genuine
  // splitting of the given coefficients is 2 sqrt(2|q(m)| / |q''(m)|) — the
  // same formula reproduces the plain separation when the pair is far apart,
  // and the raw gap is kept whenever the refinement runs away or the
  // curvature underflows.
  {
    PolyC dq = q.derivative();
    PolyC ddq = dq.derivative();
    double refined = 0;
    for (int pair = 0; pair < 2; ++pair) {
      CD r1 = r[bp[2 * pair]], r2 = r[bp[2 * pair + 1]];
      double raw = std::abs(r1 - r2);
      CD mid = (r1 + r2) / 2.0;
      CD m = mid;
      for (int it = 0; it < 8; ++it) {
        CD ddv = ddq.eval(m);
        if (std::abs(ddv) == 0.0) break;
        CD step = dq.eval(m) / ddv;
        m -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(m))) break;
      }
      double split = raw;
      CD ddv = ddq.eval(m);
      if (std::abs(ddv) > 0.0 && std::abs(m - mid) <= 0.01 * scale) {
        double s = 2.0 * std::sqrt(2.0 * std::abs(q.eval(m)) / std::abs(ddv));
        if (std::isfinite(s)) split = std::min(raw, s);
      }
      refined = std::max(refined, split);
    }
    best_gap = refined / scale;
  }
  SquareCertificate cert;
  cert.pair_gap = best_gap;
  cert.lead = q.c[4];
  // Complete the square from the top three coefficients; the defect in the
  // remaining two is the squareness residual. Root reconstruction would lose
  // half the digits inside each cluster, this route stays conditioned.
  CD b = q.c[3] / (q.c[4] * 2.0);
  CD d = (q.c[2] / q.c[4] - b * b) / 2.0;
  cert.root_quadratic = PolyC(std::vector<CD>{d, b, CD(1)});
  double supc = 0;
  for (const CD& c : q.c) supc = std::max(supc, std::abs(c));
  double defect = std::max(std::abs(q.c[1] - q.c[4] * b * d * 2.0),
                           std::abs(q.c[0] - q.c[4] * d * d));
  cert.residual = defect / supc;
  cert.ok = best_gap <= cluster_tol && cert.residual <= residual_tol;
  return cert;
}

bool is_perfect_square_quartic_exact(const PolyQ& qin) {
  PolyQ q = trim_exact(qin);
  if (q.degree() != 4) throw DegenerateInput("perfect-square test expects a quartic");
  const Rat& q4 = q.c[4];
  Rat b = q.c[3] / (q4 * 2);
  Rat d = (q.c[2] / q4 - b * b) / 2;
  Rat q1 = q4 * b * d * 2;
  Rat q0 = q4 * d * d;
  return q.c[1] == q1 && q.c[0] == q0;
}

// ---- MPoly --------------------------------------------------------------------

void MPoly::add_term(const Exp& e, const Rat& coeff) {
  if (sgn(coeff) == 0) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_[e] = coeff;
  } else {
    it->second += coeff;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

int MPoly::total_degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, e[0] + e[1] + e[2] + e[3]);
  return d;
}

MPoly MPoly::operator+(const MPoly& o) const {
  MPoly r = *this;
  for (const auto& [e, c] : o.terms_) r.add_term(e, c);
  return r;
}

MPoly MPoly::operator-(const MPoly& o) const {
  MPoly r = *this;
  for (const auto& [e, c] : o.terms_) r.add_term(e, -c);
  return r;
}

MPoly MPoly::operator-() const {
  MPoly r;
  for (const auto& [e, c] : terms_) r.terms_[e] = -c;
  return r;
}

MPoly MPoly::operator*(const MPoly& o) const {
  MPoly r;
  for (const auto& [e1, c1] : terms_) {
    for (const auto& [e2, c2] : o.terms_) {
      Exp e{e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3]};
      r.add_term(e, c1 * c2);
    }
  }
  return r;
}

MPoly MPoly::scaled(const Rat& s) const {
  MPoly r;
  if (sgn(s) == 0) return r;
  for (const auto& [e, c] : terms_) r.terms_[e] = c * s;
  return r;
}

MPoly MPoly::partial(int var) const {
  MPoly r;
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exp d = e;
    d[var] -= 1;
    r.add_term(d, c * Rat(e[var]));
  }
  return r;
}

Rat MPoly::eval(const std::array<Rat, 4>& x) const {
  Rat acc(0);
  for (const auto& [e, c] : terms_) {
    Rat term = c;
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < e[i]; ++k) term *= x[i];
    acc += term;
  }
  return acc;
}

CD MPoly::eval_cd(const std::array<CD, 4>& x) const {
  CD acc(0);
  for (const auto& [e, c] : terms_) {
    CD term = to_cd(c);
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < e[i]; ++k) term *= x[i];
    acc += term;
  }
  return acc;
}

std::array<CD, 4> MPoly::gradient_cd(const std::array<CD, 4>& x) const {
  std::array<CD, 4> g{CD(0), CD(0), CD(0), CD(0)};
  for (const auto& [e, c] : terms_) {
    for (int v = 0; v < 4; ++v) {
      if (e[v] == 0) continue;
      CD term = to_cd(c) * static_cast<double>(e[v]);
      for (int i = 0; i < 4; ++i) {
        int p = (i == v) ? e[i] - 1 : e[i];
        for (int k = 0; k < p; ++k) term *= x[i];
      }
      g[v] += term;
    }
  }
  return g;
}

MPoly MPoly::compose_linear(const std::vector<std::vector<Rat>>& m) const {
  const int n = static_cast<int>(m.size());
  std::vector<MPoly> lin(n);
  for (int i = 0; i < n; ++i) {
    MPoly li;
    for (int j = 0; j < n; ++j) li.add_term(MPoly::variable(j).terms().begin()->first, m[i][j]);
    lin[i] = li;
  }
  std::array<int, 4> max_e{0, 0, 0, 0};
  for (const auto& [e, c] : terms_)
    for (int i = 0; i < 4; ++i) max_e[i] = std::max(max_e[i], e[i]);

  std::vector<std::vector<MPoly>> pow(n);
  for (int i = 0; i < n; ++i) {
    pow[i].push_back(MPoly(Rat(1)));
    for (int k = 1; k <= max_e[i]; ++k) pow[i].push_back(pow[i][k - 1] * lin[i]);
  }

  MPoly out;
  for (const auto& [e, c] : terms_) {
    MPoly term(c);
    for (int i = 0; i < n; ++i)
      if (e[i] > 0) term = term * pow[i][e[i]];
    for (int i = n; i < 4; ++i) {
      if (e[i] > 0) {
        Exp ve{0, 0, 0, 0};
        ve[i] = e[i];
        MPoly v;
        v.add_term(ve, Rat(1));
        term = term * v;
      }
    }
    out = out + term;
  }
  return out;
}

MPoly MPoly::divide_by_var_power(int var, int k) const {
  MPoly r;
  for (const auto& [e, c] : terms_) {
    if (e[var] < k)
      throw IdenticallyZero("polynomial is not divisible by the requested variable power");
    Exp d = e;
    d[var] -= k;
    r.terms_[d] = c;
  }
  return r;
}

int MPoly::var_order(int var) const {
  int order = 0;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (first) {
      order = e[var];
      first = false;
    } else {
      order = std::min(order, e[var]);
    }
  }
  return order;
}

PolyC MPoly::collapse_cd(int var, const std::array<CD, 4>& fixed) const {
  PolyC out;
  for (const auto& [e, c] : terms_) {
    CD term = to_cd(c);
    for (int i = 0; i < 4; ++i) {
      if (i == var) continue;
      for (int k = 0; k < e[i]; ++k) term *= fixed[i];
    }
    int d = e[var];
    if (static_cast<int>(out.c.size()) <= d) out.c.resize(d + 1, CD(0));
    out.c[d] += term;
  }
  return out;
}

PolyQ MPoly::restrict_to_line(const std::array<Rat, 4>& a,
                              const std::array<Rat, 4>& b) const {
  int d = std::max(total_degree(), 0);
  std::vector<std::pair<Rat, Rat>> samples;
  for (int t = 0; t <= d; ++t) {
    Rat tt(t);
    std::array<Rat, 4> x{a[0] + tt * b[0], a[1] + tt * b[1], a[2] + tt * b[2],
                         a[3] + tt * b[3]};
    samples.push_back({tt, eval(x)});
  }
  return lagrange_interpolate(samples);
}

MPoly mpoly_det3(const std::array<MPoly, 9>& m) {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

MPoly mpoly_det4(const std::array<MPoly, 16>& m) {
  MPoly acc;
  for (int j = 0; j < 4; ++j) {
    std::array<MPoly, 9> sub;
    int idx = 0;
    for (int i = 1; i < 4; ++i)
      for (int k = 0; k < 4; ++k) {
        if (k == j) continue;
        sub[idx++] = m[4 * i + k];
      }
    MPoly term = m[j] * mpoly_det3(sub);
    acc = (j % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

// ---- resultants -----------------------------------------------------------------

static Rat exact_det_dense(std::vector<Rat> a, int n) {
  Rat det(1);
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r)
      if (sgn(a[r * n + col]) != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) return Rat(0);
    if (pivot != col) {
      for (int j = 0; j < n; ++j) std::swap(a[pivot * n + j], a[col * n + j]);
      det = -det;
    }
    det *= a[col * n + col];
    for (int r = col + 1; r < n; ++r) {
      if (sgn(a[r * n + col]) == 0) continue;
      Rat f = a[r * n + col] / a[col * n + col];
      for (int j = col; j < n; ++j) a[r * n + j] -= f * a[col * n + j];
    }
  }
  return det;
}

Rat sylvester_resultant(const PolyQ& fin, const PolyQ& gin) {
  PolyQ f = trim_exact(fin), g = trim_exact(gin);
  int df = f.degree(), dg = g.degree();
  if (df < 0 || dg < 0) return Rat(0);
  if (df == 0 && dg == 0) return Rat(1);
  const int n = df + dg;
  std::vector<Rat> m(n * n, Rat(0));
  for (int row = 0; row < dg; ++row)
    for (int i = 0; i <= df; ++i) m[row * n + row + i] = f.c[df - i];
  for (int row = 0; row < df; ++row)
    for (int i = 0; i <= dg; ++i) m[(dg + row) * n + row + i] = g.c[dg - i];
  return exact_det_dense(std::move(m), n);
}

namespace {

/// Univariate in var 2 after fixing vars 0,1 at rational values, exact.
PolyQ collapse_exact_w(const MPoly& f, const Rat& u, const Rat& v) {
  std::map<int, Rat> coeffs;
  for (const auto& [e, c] : f.terms()) {
    Rat term = c;
    for (int k = 0; k < e[0]; ++k) term *= u;
    for (int k = 0; k < e[1]; ++k) term *= v;
    coeffs[e[2]] += term;
  }
  int dmax = coeffs.empty() ? 0 : coeffs.rbegin()->first;
  PolyQ out;
  out.c.assign(dmax + 1, Rat(0));
  for (const auto& [d, c] : coeffs) out.c[d] = c;
  return out;
}

std::array<std::array<long, 3>, 3> random_change(Rng& rng) {
  std::array<std::array<long, 3>, 3> t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t[i][j] = rng.next_int(-5, 5);
  return t;
}

long det3_long(const std::array<std::array<long, 3>, 3>& t) {
  return t[0][0] * (t[1][1] * t[2][2] - t[1][2] * t[2][1]) -
         t[0][1] * (t[1][0] * t[2][2] - t[1][2] * t[2][0]) +
         t[0][2] * (t[1][0] * t[2][1] - t[1][1] * t[2][0]);
}

std::vector<std::vector<Rat>> change_to_rat(const std::array<std::array<long, 3>, 3>& t) {
  std::vector<std::vector<Rat>> m(3, std::vector<Rat>(3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = Rat(t[i][j]);
  return m;
}

}  // namespace

ResultantResult resultant_bivariate(const MPoly& f, const MPoly& g, int eliminate_var,
                                    Rng& rng) {
  if (f.is_zero() || g.is_zero())
    throw IdenticallyZero("resultant of the zero polynomial");
  const int df = f.total_degree(), dg = g.total_degree();
  const int cap = df * dg;

  // permutation sending eliminate_var to slot 2
  std::array<int, 3> perm{0, 1, 2};
  std::swap(perm[2], perm[eliminate_var]);

  int zero_streak = 0;
  for (int attempt = 0; attempt < 24; ++attempt) {
    std::array<std::array<long, 3>, 3> draw = random_change(rng);
    if (det3_long(draw) == 0) continue;
    // combined change: x_old[i] = sum_j draw[perm[i]][j] * y_new[j]
    std::array<std::array<long, 3>, 3> change{};
    for (int i = 0; i < 3; ++i) change[i] = draw[perm[i]];

    MPoly fc = f.compose_linear(change_to_rat(change));
    MPoly gc = g.compose_linear(change_to_rat(change));

    // leading coefficients in w must be nonzero constants (degree preserved)
    auto lead_ok = [&](const MPoly& h, int d) {
      for (const auto& [e, c] : h.terms())
        if (e[2] == d) return e[0] == 0 && e[1] == 0;
      return false;
    };
    if (!lead_ok(fc, df) || !lead_ok(gc, dg)) continue;

    std::vector<std::pair<Rat, Rat>> samples;
    bool all_zero = true;
    for (int t = 0; t <= cap; ++t) {
      Rat u(t);
      PolyQ fw = collapse_exact_w(fc, u, Rat(1));
      PolyQ gw = collapse_exact_w(gc, u, Rat(1));
      Rat r = sylvester_resultant(fw, gw);
      if (sgn(r) != 0) all_zero = false;
      samples.push_back({u, r});
    }
    if (all_zero) {
      if (++zero_streak >= 3)
        throw IdenticallyZero("resultant vanishes identically (common component)");
      continue;
    }
    return {lagrange_interpolate(samples), change};
  }
  throw GenericityExhausted("no usable coordinate change for resultant_bivariate");
}

namespace {

/// Two-equation Newton polish of a projective P^2 zero, pivot coordinate frozen.
std::array<CD, 3> newton_polish_p2(const MPoly& f, const MPoly& g, std::array<CD, 3> x,
                                   int iters) {
  for (int it = 0; it < iters; ++it) {
    int pivot = 0;
    double bm = -1;
    for (int i = 0; i < 3; ++i)
      if (std::abs(x[i]) > bm) {
        bm = std::abs(x[i]);
        pivot = i;
      }
    int free1 = (pivot + 1) % 3, free2 = (pivot + 2) % 3;
    std::array<CD, 4> xe{x[0], x[1], x[2], CD(0)};
    CD fv = f.eval_cd(xe), gv = g.eval_cd(xe);
    std::array<CD, 4> fg = f.gradient_cd(xe), gg = g.gradient_cd(xe);
    CD a = fg[free1], b = fg[free2], c = gg[free1], d = gg[free2];
    CD det = a * d - b * c;
    if (std::abs(det) < 1e-300) break;
    CD d1 = (d * fv - b * gv) / det;
    CD d2 = (a * gv - c * fv) / det;
    x[free1] -= d1;
    x[free2] -= d2;
    if (std::abs(d1) + std::abs(d2) < 1e-16 * std::max(1.0, bm)) break;
  }
  return x;
}

double mpoly_coeff_norm(const MPoly& f) {
  double s = 0;
  for (const auto& [e, c] : f.terms()) {
    double d = c.get_d();
    s += d * d;
  }
  return std::sqrt(s);
}

double p2_residual(const MPoly& f, const std::array<CD, 3>& x) {
  std::array<CD, 4> xe{x[0], x[1], x[2], CD(0)};
  double nx = std::sqrt(std::norm(x[0]) + std::norm(x[1]) + std::norm(x[2]));
  double scale = mpoly_coeff_norm(f) * std::pow(nx, f.total_degree());
  return std::abs(f.eval_cd(xe)) / std::max(scale, 1e-300);
}

}  // namespace

TernaryCommonZeros common_zeros_ternary(const MPoly& f, const MPoly& g, Rng& rng,
                                        double tol) {
  TernaryCommonZeros out;
  out.certificate = resultant_bivariate(f, g, 2, rng);

  MPoly fc = f.compose_linear(change_to_rat(out.certificate.change));
  MPoly gc = g.compose_linear(change_to_rat(out.certificate.change));

  RootResult rr = poly_roots(to_cd_poly(out.certificate.res), 1e-13, 600);
  for (const CD& u0 : rr.roots) {
    std::array<CD, 4> fixed{u0, CD(1), CD(0), CD(0)};
    PolyC fw = trim(fc.collapse_cd(2, fixed));
    PolyC gw = trim(gc.collapse_cd(2, fixed));
    if (fw.degree() < 1) continue;
    RootResult wr = poly_roots(fw, 1e-13, 600);
    double best = 1e300;
    CD w0(0);
    for (const CD& w : wr.roots) {
      double gval = std::abs(gw.eval(w));
      double gscale = 0;
      double aw = std::max(1.0, std::abs(w));
      double powa = 1;
      for (const CD& cc : gw.c) {
        gscale += std::abs(cc) * powa;
        powa *= aw;
      }
      double relv = gval / std::max(gscale, 1e-300);
      if (relv < best) {
        best = relv;
        w0 = w;
      }
    }
    if (best > 1e-4) continue;

    const auto& t = out.certificate.change;
    std::array<CD, 3> x{};
    std::array<CD, 3> y{u0, CD(1), w0};
    for (int i = 0; i < 3; ++i)
      x[i] = static_cast<double>(t[i][0]) * y[0] + static_cast<double>(t[i][1]) * y[1] +
             static_cast<double>(t[i][2]) * y[2];

    x = newton_polish_p2(f, g, x, 24);
    if (p2_residual(f, x) > tol || p2_residual(g, x) > tol) continue;

    std::vector<CD> xv(x.begin(), x.end());
    xv = proj_normalize(xv);
    bool dup = false;
    for (const auto& z : out.zeros) {
      std::vector<CD> zv(z.begin(), z.end());
      if (proj_distance(zv, xv) < 1e-7) {
        dup = true;
        break;
      }
    }
    if (!dup) out.zeros.push_back({xv[0], xv[1], xv[2]});
  }
  return out;
}

}  // namespace reyeweb
