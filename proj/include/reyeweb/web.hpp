#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reyeweb/batch.hpp"
#include "reyeweb/poly.hpp"
#include "reyeweb/projective.hpp"

namespace reyeweb {

/// Member of the web at parameter z, with its Gram matrix cached.
template <class K>
struct Member {
  Vec4<K> z;
  Mat4<K> m;
};

using MemberC = Member<CD>;
using MemberQ = Member<Rat>;

/// A web of quadrics in P^3: four independent symmetric 4x4 integer matrices.
struct Web {
  std::array<QuadricForm<Rat>, 4> basis;
  std::uint64_t seed = 0;
  int coeff_range = 9;

  Mat4<Rat> member_matrix(const Vec4<Rat>& z) const {
    Mat4<Rat> m;
    for (int i = 0; i < 16; ++i)
      m.a[i] = basis[0].a[i] * z[0] + basis[1].a[i] * z[1] + basis[2].a[i] * z[2] +
               basis[3].a[i] * z[3];
    return m;
  }

  Mat4<CD> member_matrix_cd(const Vec4<CD>& z) const {
    Mat4<CD> m;
    for (int i = 0; i < 16; ++i)
      m.a[i] = to_cd(basis[0].a[i]) * z[0] + to_cd(basis[1].a[i]) * z[1] +
               to_cd(basis[2].a[i]) * z[2] + to_cd(basis[3].a[i]) * z[3];
    return m;
  }

  MemberC member_cd(const Vec4<CD>& z) const { return {z, member_matrix_cd(z)}; }
};

/// True when the four basis forms are linearly independent (exact 4x10 rank).
bool web_basis_independent(const Web& web);

/// Fresh random web passing the light genericity checks (basis independence
/// and a short pencil scan). Throws GenericityExhausted past the draw budget.
Web generate_web(std::uint64_t seed, int coeff_range = 9, int budget = 200);

/// det M(z) as an exact quartic in z0..z3.
MPoly symmetroid(const Web& web);

/// Matrix C(x) whose k-th column is A_k x, as 16 exact linear polynomials.
std::array<MPoly, 16> steinerian_matrix(const Web& web);

/// det C(x) as an exact quartic in x0..x3.
MPoly steinerian(const Web& web);

Mat4<CD> steinerian_matrix_at(const Web& web, const Vec4<CD>& x);

/// Fiber of the incidence correspondence over a Steinerian point x:
/// z spans ker C(x) (the member singular at x) and y spans ker C(x)^T
/// (the partner point, conjugate to x under every web quadric).
struct XiFiber {
  Vec4<CD> x, y, z;
  double residual;  ///< max relative |x^T A_k y|
};

XiFiber xi_fiber_from_x(const Web& web, const Vec4<CD>& x, double tol = 1e-8);

/// Exact binary quartic det(s M(a) + t M(b)) as coefficients of s^(4-i) t^i.
std::array<Rat, 5> pencil_quartic(const Web& web, const Vec4<Rat>& a,
                                  const Vec4<Rat>& b);

/// Floating pencil restriction det(M(a) + t M(b)) as a polynomial in t.
PolyC pencil_quartic_cd(const Web& web, const Vec4<CD>& a, const Vec4<CD>& b);

// ---- nodes of the symmetroid ---------------------------------------------------

struct Node {
  Vec4<CD> z;          ///< unit norm
  double residual;     ///< |16 minors|_2 / |M|_F^3
  double sigma2_ratio; ///< sigma_2 / sigma_1 of M(z)
  double sigma3_ratio; ///< sigma_3 / sigma_1 of M(z)
};

struct NodeOptions {
  int max_pencils = 240;
  int batch = 40;
  int gn_iters = 80;
  double gn_accept = 1e-12;
  double dedup_tol = 1e-4;
  double rank_tol = 1e-8;
  Exec exec = Exec::Parallel;
};

struct NodeSearch {
  std::vector<Node> nodes;  ///< canonically sorted
  int pencils_used = 0;
  int starts_used = 0;
};

/// Multi-start Gauss-Newton on the 16 3x3 minors of M(z); starts are roots of
/// pencil quartics along random pencils. Stops once the node set has been
/// stable for a full extra batch.
NodeSearch find_nodes_search(const Web& web, Rng& rng, const NodeOptions& opts = {});

/// Same search, but throws CountMismatch unless exactly 10 nodes were found.
std::vector<Node> find_nodes(const Web& web, Rng& rng, const NodeOptions& opts = {});

///// Node certificate: numeric rank-2 spectrum, rationalization over Q(i), and
/// exact-arithmetic Gauss-Newton steps exhibiting quadratic residual decay.
struct NodeCertificate {
  double sigma2_ratio = 0;
  double sigma3_ratio = 0;
  bool numeric_rank2 = false;
  bool rationalized = false;
  double exact_residual_0 = 0;  ///< at the rationalized point
  double exact_residual_1 = 0;  ///< after one exact GN step
  double exact_residual_2 = 0;  ///< after two
  bool quadratic_drop = false;
};

NodeCertificate certify_node(const Web& web, const Node& node, double rank_tol = 1e-8,
                             unsigned long max_den = 100000000UL);

// ---- genericity ------------------------------------------------------------------

struct GenericityReport {
  bool basis_independent = false;
  bool pencil_scan_ok = false;
  bool nodes_ok = false;
  bool steinerian_section_smooth = false;
  int node_count = -1;
  std::vector<std::string> failures;

  bool ok() const {
    return basis_independent && pencil_scan_ok && nodes_ok && steinerian_section_smooth;
  }
};

/// Pencil scan only (the light check used at generation time): each sampled
/// pencil quartic must have degree 4, four simple roots, and rank-3 members
/// at the roots.
bool pencil_scan(const Web& web, Rng& rng, int trials, std::string* why = nullptr);

/// Full genericity check: basis independence, 50-pencil scan, the ten-node
/// count with rank-2 certificates, and smoothness of a random plane section
/// of the Steinerian.
GenericityReport genericity_check(const Web& web, Rng& rng, int pencil_trials = 50);

}  // namespace reyeweb
