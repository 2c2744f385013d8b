#pragma once

#include <optional>

#include "reyeweb/web.hpp"

namespace reyeweb {

/// Certificate that a line belongs to the Reye congruence of the web: the
/// 4x3 restriction matrix has a clear rank-2 spectrum, and the left kernel
/// spans the pencil of web members containing the line.
struct ReyeCertificate {
  double sigma_ratio = 1.0;            ///< sigma_3 / sigma_1 of the restriction
  double sigma2_ratio = 1.0;           ///< sigma_2 / sigma_1 (rank exactly 2 witness)
  std::array<Vec4<CD>, 2> pencil{};    ///< generators of I_l in W coordinates
  bool exact = false;                  ///< exact rank <= 2 certified over Q or Q(i)
};

/// Rows are the restrictions (q_k(a), 2 B_k(a,b), q_k(b)) of the four basis
/// quadrics to the span basis of the line.
MatC restriction_matrix(const Web& web, const PLineC& line);

/// Exact rational restriction matrix as 12 row-major entries.
std::array<Rat, 12> restriction_matrix_exact(const Web& web, const PLineQ& line);

/// Exact rank of the restriction matrix over Q.
int restriction_rank_exact(const Web& web, const PLineQ& line);

/// Exact rank over Q(i) for a line with Gaussian-rational span points.
int restriction_rank_exact_crat(const Web& web, const Vec4<CRat>& a,
                                const Vec4<CRat>& b);

/// Floating membership test at tolerance tol; nullopt when the line is not in
/// the congruence. When the span points admit rationalization the certificate
/// is additionally checked exactly and `exact` is set.
std::optional<ReyeCertificate> is_reye_line(const Web& web, const PLineC& line,
                                            double tol = 1e-8);

// ---- sampling -------------------------------------------------------------------

/// A sampled Reye line together with the conjugate point pair generating it:
/// x on the Steinerian, y its partner, and every web quadric polar-orthogonal
/// to the pair. Samples are Newton-polished to near machine precision.
struct ReyeSample {
  PLineC line;
  Vec4<CD> x, y;
  double membership = 1.0;        ///< sigma_3 / sigma_1 of the restriction
  double bilinear_residual = 1.0; ///< max relative |x^T A_k y|
  std::array<Vec4<CD>, 2> pencil{};
};

std::vector<ReyeSample> sample_reye_lines(const Web& web, Rng& rng, int count,
                                          Exec exec = Exec::Parallel);

// ---- enumerative counts ------------------------------------------------------------

/// The rays of the congruence through a generic point o, their membership
/// certificates, and the base points of the net of quadrics through o.
struct RaysThroughPoint {
  std::vector<PLineC> rays;              ///< expected 7
  std::vector<double> membership;        ///< sigma ratio per ray
  std::vector<Vec4<CD>> base_points;     ///< o first, then one per ray (8 total)
  std::vector<double> base_residuals;    ///< worst net-quadric residual per point
  std::vector<double> base_spreads;      ///< per-ray parameter spread across the net
  ResultantResult certificate;
  int zero_count = 0;                    ///< common zeros of the two minors (9)
  int spurious_count = 0;                ///< zeros rejected by the third minor (2)
};

/// Throws CountMismatch unless exactly 7 rays and 8 distinct base points are
/// certified.
RaysThroughPoint rays_through_point(const Web& web, const Vec4<Rat>& o, Rng& rng);

/// The rays of the congruence inside a generic plane (given by its covector).
struct RaysInPlane {
  std::vector<PLineC> rays;        ///< expected 3
  std::vector<double> membership;
  ResultantResult certificate;
  int candidate_count = 0;         ///< common zeros of the two divided minors
  int gamma_order = 0;             ///< power of the chart factor removed (3)
};

/// Throws CountMismatch unless exactly 3 rays are certified.
RaysInPlane rays_in_plane(const Web& web, const Vec4<Rat>& plane, Rng& rng);

// ---- the bitangency map ---------------------------------------------------------------

/// Image of a Reye line under the map to the pencil it fills: the pencil is
/// bitangent to the symmetroid, certified by the restricted quartic being a
/// perfect square with rank-3 members at the two double roots.
struct DeltaResult {
  std::array<Vec4<CD>, 2> pencil{};
  std::array<CD, 6> pencil_plucker{};  ///< normalized Plucker of the pencil in W
  PolyC quartic;
  SquareCertificate square;
  std::array<CD, 2> tangency{};
  std::array<int, 2> tangency_ranks{};
  double tangency_separation = 0.0;    ///< |tau_1 - tau_2| relative to scale
  double pencil_polish_shift = 0.0;    ///< how far the squareness polish moved the pencil
  double pencil_line_residual = 0.0;   ///< worst restriction of the pencil to the line
};

DeltaResult delta(const Web& web, const ReyeSample& sample);

}  // namespace reyeweb
