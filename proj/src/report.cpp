#include "reyeweb/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>

#include "reyeweb/errors.hpp"

namespace reyeweb {

namespace {

constexpr double kPi = 3.14159265358979323846;

constexpr std::uint64_t kSplitGenericity = 0xE0;
constexpr std::uint64_t kSplitNodes = 0xE1;
constexpr std::uint64_t kSplitReyeCount = 0xE2;
constexpr std::uint64_t kSplitSample = 0xE3;
constexpr std::uint64_t kSplitBitangent = 0xE4;
constexpr std::uint64_t kSplitMonodromy = 0xE5;
constexpr std::uint64_t kSplitFano = 0xE6;

Rng experiment_rng(const Web& web, std::uint64_t which) {
  Rng base(web.seed ^ 0x5EEDBA5Eu);
  return base.split(which);
}

double mpoly_scale(const MPoly& f) {
  double s = 0;
  for (const auto& [e, c] : f.terms()) s += std::abs(to_double(c));
  return s;
}

double mpoly_rel(const MPoly& f, double scale, const Vec4<CD>& x) {
  std::array<CD, 4> xe{x[0], x[1], x[2], x[3]};
  if (scale == 0.0) return 0.0;
  return std::abs(f.eval_cd(xe)) / scale;
}

}  // namespace

// ---- value serialization ---------------------------------------------------------

Json cd_to_json(const CD& z) { return Json::array({z.real(), z.imag()}); }

CD cd_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw IoError("complex value must be [re, im]");
  return CD(j[0].get<double>(), j[1].get<double>());
}

Json vec4_to_json(const Vec4<CD>& v) {
  Json j = Json::array();
  for (int i = 0; i < 4; ++i) j.push_back(cd_to_json(v[i]));
  return j;
}

Json line_to_json(const PLineC& l) {
  Json j;
  j["a"] = vec4_to_json(l.a);
  j["b"] = vec4_to_json(l.b);
  Json pl = Json::array();
  for (int i = 0; i < 6; ++i) pl.push_back(cd_to_json(l.pl[i]));
  j["plucker"] = pl;
  return j;
}

// ---- web persistence -------------------------------------------------------------

namespace {
constexpr int kUpperIdx[10][2] = {{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 1},
                                  {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3}};
}

Json web_to_json(const Web& web) {
  Json j;
  j["seed"] = web.seed;
  j["coeff_range"] = web.coeff_range;
  Json basis = Json::array();
  for (int k = 0; k < 4; ++k) {
    Json row = Json::array();
    for (const auto& [r, c] : kUpperIdx)
      row.push_back(rat_to_string(web.basis[k](r, c)));
    basis.push_back(row);
  }
  j["basis"] = basis;
  return j;
}

Web web_from_json(const Json& j) {
  Web web;
  if (!j.contains("basis")) throw IoError("web JSON lacks a basis");
  web.seed = j.value("seed", std::uint64_t{0});
  web.coeff_range = j.value("coeff_range", 9);
  const Json& basis = j["basis"];
  if (!basis.is_array() || basis.size() != 4)
    throw IoError("web basis must list four quadrics");
  for (int k = 0; k < 4; ++k) {
    const Json& row = basis[k];
    if (!row.is_array() || row.size() != 10)
      throw IoError("each web quadric needs ten upper-triangular entries");
    Mat4<Rat> m = Mat4<Rat>::zero();
    for (int t = 0; t < 10; ++t) {
      Rat v = rat_from_string(row[t].get<std::string>());
      m(kUpperIdx[t][0], kUpperIdx[t][1]) = v;
      m(kUpperIdx[t][1], kUpperIdx[t][0]) = v;
    }
    web.basis[k] = m;
  }
  if (!web_basis_independent(web)) throw DegenerateInput("web basis is dependent");
  return web;
}

void save_web(const Web& web, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << web_to_json(web).dump(2) << "\n";
  if (!out) throw IoError("write to " + path + " failed");
}

Web load_web(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw IoError(std::string("invalid web JSON: ") + e.what());
  }
  return web_from_json(j);
}

// ---- experiments -----------------------------------------------------------------

Experiment exp_genericity(const Web& web, double /*tol*/) {
  Rng rng = experiment_rng(web, kSplitGenericity);
  GenericityReport rep = genericity_check(web, rng);
  Experiment e;
  e.name = "genericity";
  e.record["basis_independent"] = rep.basis_independent;
  e.record["pencil_scan_ok"] = rep.pencil_scan_ok;
  e.record["nodes_ok"] = rep.nodes_ok;
  e.record["steinerian_section_smooth"] = rep.steinerian_section_smooth;
  e.record["node_count"] = rep.node_count;
  e.record["failures"] = rep.failures;
  e.pass = rep.ok();
  return e;
}

Experiment exp_nodes(const Web& web, double tol) {
  Rng rng = experiment_rng(web, kSplitNodes);
  NodeOptions opts;
  opts.rank_tol = tol;
  std::vector<Node> nodes = find_nodes(web, rng, opts);

  Experiment e;
  e.name = "nodes";
  e.record["count"] = nodes.size();
  Json list = Json::array();
  bool all_ok = true;
  for (const Node& n : nodes) {
    NodeCertificate cert = certify_node(web, n, tol);
    Json jn;
    jn["z"] = vec4_to_json(n.z);
    jn["residual"] = n.residual;
    jn["sigma2_ratio"] = n.sigma2_ratio;
    jn["sigma3_ratio"] = n.sigma3_ratio;
    jn["numeric_rank2"] = cert.numeric_rank2;
    jn["rationalized"] = cert.rationalized;
    jn["exact_residuals"] =
        Json::array({cert.exact_residual_0, cert.exact_residual_1, cert.exact_residual_2});
    jn["quadratic_drop"] = cert.quadratic_drop;
    list.push_back(jn);
    if (!(n.residual < 1e-12 && cert.numeric_rank2)) all_ok = false;
  }
  e.record["nodes"] = list;
  e.pass = nodes.size() == 10 && all_ok;
  return e;
}

Experiment exp_reye_count(const Web& web, double /*tol*/) {
  Rng rng = experiment_rng(web, kSplitReyeCount);
  Experiment e;
  e.name = "reye_count";

  int count_strikes = 0;
  RaysThroughPoint rtp;
  Vec4<Rat> o{};
  bool have_point = false;
  for (int attempt = 0; attempt < 12 && !have_point; ++attempt) {
    o = random_rational_point(rng, 9);
    try {
      rtp = rays_through_point(web, o, rng);
      have_point = true;
    } catch (const CountMismatch&) {
      if (++count_strikes >= 3) throw;
    } catch (const Error&) {
      continue;
    }
  }
  if (!have_point) throw GenericityExhausted("no usable point for the ray count");

  Json jp;
  {
    Json oj = Json::array();
    for (int i = 0; i < 4; ++i) oj.push_back(rat_to_string(o[i]));
    jp["point"] = oj;
    jp["ray_count"] = rtp.rays.size();
    jp["zero_count"] = rtp.zero_count;
    jp["spurious_count"] = rtp.spurious_count;
    Json rays = Json::array();
    for (std::size_t i = 0; i < rtp.rays.size(); ++i) {
      Json r = line_to_json(rtp.rays[i]);
      r["membership"] = rtp.membership[i];
      rays.push_back(r);
    }
    jp["rays"] = rays;
    Json bps = Json::array();
    for (std::size_t i = 0; i < rtp.base_points.size(); ++i) {
      Json b;
      b["point"] = vec4_to_json(rtp.base_points[i]);
      b["residual"] = rtp.base_residuals[i];
      bps.push_back(b);
    }
    jp["base_points"] = bps;
    jp["base_spreads"] = rtp.base_spreads;
  }
  e.record["through_point"] = jp;

  count_strikes = 0;
  RaysInPlane rip;
  Vec4<Rat> plane{};
  bool have_plane = false;
  for (int attempt = 0; attempt < 12 && !have_plane; ++attempt) {
    plane = random_rational_point(rng, 9);
    try {
      rip = rays_in_plane(web, plane, rng);
      have_plane = true;
    } catch (const CountMismatch&) {
      if (++count_strikes >= 3) throw;
    } catch (const Error&) {
      continue;
    }
  }
  if (!have_plane) throw GenericityExhausted("no usable plane for the ray count");

  Json jpl;
  {
    Json pj = Json::array();
    for (int i = 0; i < 4; ++i) pj.push_back(rat_to_string(plane[i]));
    jpl["plane"] = pj;
    jpl["ray_count"] = rip.rays.size();
    jpl["candidate_count"] = rip.candidate_count;
    jpl["gamma_order"] = rip.gamma_order;
    Json rays = Json::array();
    for (std::size_t i = 0; i < rip.rays.size(); ++i) {
      Json r = line_to_json(rip.rays[i]);
      r["membership"] = rip.membership[i];
      rays.push_back(r);
    }
    jpl["rays"] = rays;
  }
  e.record["in_plane"] = jpl;

  double worst_base = 0;
  for (double r : rtp.base_residuals) worst_base = std::max(worst_base, r);
  e.pass = rtp.rays.size() == 7 && rtp.base_points.size() == 8 && worst_base < 1e-8 &&
           rip.rays.size() == 3;
  return e;
}

Experiment exp_sample(const Web& web, double /*tol*/, int samples) {
  Rng rng = experiment_rng(web, kSplitSample);
  std::vector<ReyeSample> got = sample_reye_lines(web, rng, samples);

  MPoly st = steinerian(web);
  double st_scale = mpoly_scale(st);

  Experiment e;
  e.name = "sample";
  Json list = Json::array();
  bool all_ok = true;
  for (const ReyeSample& s : got) {
    double sx = mpoly_rel(st, st_scale, s.x);
    double sy = mpoly_rel(st, st_scale, s.y);
    Json js;
    js["x"] = vec4_to_json(s.x);
    js["y"] = vec4_to_json(s.y);
    js["line"] = line_to_json(s.line);
    js["membership"] = s.membership;
    js["bilinear_residual"] = s.bilinear_residual;
    js["steinerian_x"] = sx;
    js["steinerian_y"] = sy;
    list.push_back(js);
    if (!(s.membership < 1e-8 && s.bilinear_residual < 1e-8 && sx < 1e-8 && sy < 1e-8))
      all_ok = false;
  }
  e.record["count"] = got.size();
  e.record["samples"] = list;
  e.pass = all_ok && static_cast<int>(got.size()) == samples;
  return e;
}

Experiment exp_bitangent(const Web& web, double /*tol*/, int samples) {
  Rng rng = experiment_rng(web, kSplitBitangent);
  std::vector<ReyeSample> got = sample_reye_lines(web, rng, samples);

  Experiment e;
  e.name = "bitangent";
  Json list = Json::array();
  bool all_ok = true;
  for (const ReyeSample& s : got) {
    Json js;
    try {
      DeltaResult d = delta(web, s);
      Json pl = Json::array();
      for (int i = 0; i < 6; ++i) pl.push_back(cd_to_json(d.pencil_plucker[i]));
      js["pencil_plucker"] = pl;
      js["pair_gap"] = d.square.pair_gap;
      js["square_residual"] = d.square.residual;
      js["pencil_polish_shift"] = d.pencil_polish_shift;
      js["pencil_line_residual"] = d.pencil_line_residual;
      js["tangency"] = Json::array({cd_to_json(d.tangency[0]), cd_to_json(d.tangency[1])});
      js["tangency_ranks"] = d.tangency_ranks;
      js["tangency_separation"] = d.tangency_separation;
      bool ok = d.square.ok && d.tangency_ranks[0] == 3 && d.tangency_ranks[1] == 3 &&
                d.tangency_separation > 1e-6;
      js["ok"] = ok;
      all_ok = all_ok && ok;
    } catch (const Error& err) {
      js["ok"] = false;
      js["error"] = err.what();
      all_ok = false;
    }
    list.push_back(js);
  }
  e.record["count"] = got.size();
  e.record["pencils"] = list;
  e.pass = all_ok && !got.empty();
  return e;
}

namespace {

/// A pencil on rational generators whose quartic has four simple roots.
struct GeneralPencil {
  Vec4<CD> a, b;
  std::vector<CD> roots;
  int loop_root = 0;  ///< index of the best-isolated root
};

/// Smallest transport clearance over a sampled circle in the (a, b) chart.
double circle_clearance(const Web& web, const Vec4<CD>& a, const Vec4<CD>& b, CD center,
                        double radius) {
  PolyC q = pencil_quartic_cd(web, a, b);
  double scale = 0;
  for (const CD& c : q.c) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return 0.0;
  int deg = static_cast<int>(q.c.size()) - 1;
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 128; ++k) {
    double ang = 2.0 * kPi * k / 128;
    CD t = center + radius * CD(std::cos(ang), std::sin(ang));
    CD v(0);
    for (int i = deg; i >= 0; --i) v = v * t + q.c[static_cast<std::size_t>(i)];
    double denom = scale;
    double tp = std::max(1.0, std::abs(t));
    for (int i = 0; i < deg; ++i) denom *= tp;
    worst = std::min(worst, std::abs(v) / denom);
  }
  return worst;
}

/// Smallest sigma_3 / sigma_0 of the member matrix over a sampled circle.
/// The transport margin — the angular separation of the two ruling
/// directions at the witness — collapses on members that are nearly cones,
/// which the determinant clearance alone does not see (a small fourth
/// singular value can hide behind large leading ones).
double circle_member_conditioning(const Web& web, const Vec4<CD>& a, const Vec4<CD>& b,
                                  CD center, double radius) {
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 64; ++k) {
    double ang = 2.0 * kPi * k / 64;
    CD t = center + radius * CD(std::cos(ang), std::sin(ang));
    Vec4<CD> z = vadd(a, vscale(b, t));
    Mat4<CD> q = web.member_matrix_cd(z);
    MatC m(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) m.at(i, j) = q(i, j);
    SvdResult sv = svd(m);
    if (sv.sigma[0] == 0.0) return 0.0;
    worst = std::min(worst, sv.sigma[3] / sv.sigma[0]);
  }
  return worst;
}

/// Both prechecks for a transport circle in one call.
bool loop_viable(const Web& web, const Vec4<CD>& a, const Vec4<CD>& b, CD center,
                 double radius) {
  return circle_clearance(web, a, b, center, radius) >= 1e-5 &&
         circle_member_conditioning(web, a, b, center, radius) >= 0.04;
}

/// A pencil with four well-separated simple branch roots whose monodromy
/// loops stay clear of the symmetroid along their whole circles.
GeneralPencil find_general_pencil(const Web& web, Rng& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    Vec4<Rat> ar = random_rational_point(rng, 5);
    Vec4<Rat> br = random_rational_point(rng, 5);
    Vec4<CD> a, b;
    for (int i = 0; i < 4; ++i) {
      a[i] = to_cd(ar[i]);
      b[i] = to_cd(br[i]);
    }
    PolyC q = trim(pencil_quartic_cd(web, a, b), 1e-11);
    if (q.degree() != 4) continue;
    RootResult rr = poly_roots(q, 1e-12);
    if (rr.roots.size() != 4) continue;
    double sep = 1e9;
    double scale = 1.0;
    for (const CD& r : rr.roots) scale = std::max(scale, std::abs(r));
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        sep = std::min(sep, std::abs(rr.roots[i] - rr.roots[j]) / scale);
    if (sep < 0.02) continue;

    // loop around the most isolated root whose circle passes both prechecks
    int best = -1;
    double best_iso = -1;
    for (int i = 0; i < 4; ++i) {
      double iso = 1e9;
      for (int j = 0; j < 4; ++j)
        if (j != i) iso = std::min(iso, std::abs(rr.roots[i] - rr.roots[j]));
      if (iso > best_iso && loop_viable(web, a, b, rr.roots[i], 0.5 * iso)) {
        best_iso = iso;
        best = i;
      }
    }
    if (best < 0) continue;
    CD centroid(0);
    for (const CD& r : rr.roots) centroid += r;
    centroid /= 4.0;
    double rmax = 0;
    for (const CD& r : rr.roots) rmax = std::max(rmax, std::abs(r - centroid));
    if (!loop_viable(web, a, b, centroid,
                     1.5 * std::max(rmax, std::max(1.0, std::abs(centroid)) * 1e-3)))
      continue;
    return {a, b, rr.roots, best};
  }
  throw GenericityExhausted("no general pencil with four simple roots");
}

Json loop_to_json(const PathInW& loop) {
  Json j;
  j["pencil_a"] = vec4_to_json(loop.a);
  j["pencil_b"] = vec4_to_json(loop.b);
  j["center"] = cd_to_json(loop.center);
  j["radius"] = loop.radius;
  return j;
}

}  // namespace

Experiment exp_monodromy(const Web& web, double /*tol*/) {
  Rng rng = experiment_rng(web, kSplitMonodromy);
  Experiment e;
  e.name = "monodromy";

  GeneralPencil gp = find_general_pencil(web, rng);
  {
    Json roots = Json::array();
    for (const CD& r : gp.roots) roots.push_back(cd_to_json(r));
    e.record["pencil_a"] = vec4_to_json(gp.a);
    e.record["pencil_b"] = vec4_to_json(gp.b);
    e.record["branch_roots"] = roots;
  }

  // The swap verdict depends only on the loop and the ruling class, not on
  // the witness, so a transport whose particular trajectory runs out of
  // selection margin is retried from a fresh witness.
  auto run_loop = [&](const PathInW& loop, const char* key) -> bool {
    for (int attempt = 0;; ++attempt) {
      RulingPoint start = make_ruling_point(web, loop.z_at(0.0), rng);
      TransportResult tr;
      try {
        tr = transport_ruling(web, loop, start);
      } catch (const StepUnderflow&) {
        if (attempt >= 4) throw;
        continue;
      }
      Mat4<CD> q0 = web.member_matrix_cd(loop.z_at(0.0));
      bool swapped = !same_ruling(q0, start.witness, tr.end.witness, 1e-6);
      Json j = loop_to_json(loop);
      j["steps"] = tr.steps;
      j["min_margin"] = tr.min_margin;
      j["min_clearance"] = tr.min_clearance;
      j["witness_attempts"] = attempt + 1;
      j["swap"] = swapped;
      e.record[key] = j;
      return swapped;
    }
  };

  bool swap_simple = run_loop(branch_loop(web, gp.a, gp.b, gp.roots[gp.loop_root]),
                              "simple_branch_loop");

  // Bitangent contact loop: around one tangency point of the pencil of a
  // sampled Reye line.  Rewriting the pencil in the basis of its two tangency
  // members sends the tangencies to t = 0 and t = infinity, so the branch
  // quartic is close to c t^2 and the unit circle separates the two double
  // roots with clearance of order one — a circle drawn in the original chart
  // loses clearance like the fourth power of the tangency separation.
  bool swap_bitangent = false;
  for (int attempt = 0;; ++attempt) {
    std::vector<ReyeSample> one = sample_reye_lines(web, rng, 1);
    try {
      DeltaResult d = delta(web, one[0]);
      Vec4<CD> m1 = vunit(vadd(d.pencil[0], vscale(d.pencil[1], d.tangency[0])));
      Vec4<CD> m2 = vunit(vadd(d.pencil[0], vscale(d.pencil[1], d.tangency[1])));
      if (!loop_viable(web, m1, m2, CD(0), 1.0))
        throw BitangencyFailed("tangency-basis unit circle is not transportable");
      swap_bitangent = run_loop(PathInW::circle(m1, m2, CD(0), 1.0), "bitangent_loop");
      break;
    } catch (const Error&) {
      if (attempt >= 7) throw;
    }
  }

  bool swap_composite = run_loop(all_roots_loop(web, gp.a, gp.b), "all_roots_loop");

  e.record["swap_simple"] = swap_simple;
  e.record["swap_bitangent"] = swap_bitangent;
  e.record["swap_composite"] = swap_composite;
  e.pass = swap_simple && !swap_bitangent && !swap_composite;
  return e;
}

Experiment exp_fano_degree(const Web& web, double tol) {
  Rng rng = experiment_rng(web, kSplitFano);
  Experiment e;
  e.name = "fano_degree";

  Vec4<CD> z{};
  bool found = false;
  for (int attempt = 0; attempt < 16 && !found; ++attempt) {
    Vec4<Rat> zr = random_rational_point(rng, 9);
    for (int i = 0; i < 4; ++i) z[i] = to_cd(zr[i]);
    try {
      found = fiber_type(web, z) == FiberType::TwoRulings;
    } catch (const Error&) {
      found = false;
    }
  }
  if (!found) throw GenericityExhausted("no rank-4 member found for the fundamental form");

  RulingPoint ruling = make_ruling_point(web, z, rng);
  FundamentalResult fr = fundamental_degree(web, ruling, rng, tol);

  e.record["member"] = vec4_to_json(vunit(z));
  e.record["witness"] = line_to_json(ruling.witness);
  {
    Json coeffs = Json::array();
    for (const CD& c : fr.determinant.c) coeffs.push_back(cd_to_json(c));
    e.record["determinant"] = coeffs;
    Json roots = Json::array();
    for (const CD& r : fr.roots) roots.push_back(cd_to_json(r));
    e.record["roots"] = roots;
    Json lines = Json::array();
    for (const PLineC& l : fr.lines) lines.push_back(line_to_json(l));
    e.record["lines"] = lines;
  }
  e.record["degree"] = 6;
  e.record["attempts"] = fr.attempts;
  e.pass = fr.lines.size() == 6;
  return e;
}

Experiment exp_chow(const Web& /*web*/, double /*tol*/) {
  Experiment e;
  e.name = "chow";
  SchubertClass reye = porteous_reye();
  e.record["porteous"] = reye.to_string();
  e.record["coefficients"] = reye.c;
  e.record["order"] = order_of(reye);
  e.record["class"] = class_of(reye);
  e.record["degree"] = degree_of(reye);
  Json table = Json::array();
  for (const KnownCongruence& k : known_classes_table()) {
    Json row;
    row["name"] = k.name;
    row["order"] = k.order;
    row["class"] = k.cls;
    row["degree"] = k.degree;
    row["chow"] = k.chow.to_string();
    row["source"] = k.source;
    table.push_back(row);
  }
  e.record["known_classes"] = table;
  SchubertClass expect = SchubertClass::s2().scaled(7) + SchubertClass::s11().scaled(3);
  e.pass = reye == expect && order_of(reye) == 7 && class_of(reye) == 3 &&
           degree_of(reye) == 10;
  return e;
}

// ---- report envelope -------------------------------------------------------------

Json make_report(const Web& web, const std::vector<Experiment>& experiments,
                 const std::vector<std::pair<std::string, double>>& runtimes_ms) {
  Json report;
  report["schema"] = kReportSchema;
  Json tool;
  tool["name"] = kToolName;
  tool["version"] = kToolVersion;
  report["tool"] = tool;
  report["web"] = web_to_json(web);

  Json results;
  bool all = true;
  std::vector<std::string> failures;
  for (const Experiment& e : experiments) {
    Json rec = e.record;
    rec["pass"] = e.pass;
    results[e.name] = rec;
    all = all && e.pass;
    if (!e.pass) failures.push_back(e.name);
  }
  report["results"] = results;

  Json verdict;
  verdict["pass"] = all;
  verdict["failures"] = failures;
  report["verdict"] = verdict;

  Json meta;
  {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    meta["timestamp"] = buf;
    Json rt;
    for (const auto& [name, ms] : runtimes_ms) rt[name] = ms;
    meta["runtimes_ms"] = rt;
  }
  report["meta"] = meta;
  return report;
}

Json strip_meta(Json report) {
  report.erase("meta");
  return report;
}

}  // namespace reyeweb
