#pragma once

#include <optional>
#include <vector>

#include "reyeweb/poly.hpp"
#include "reyeweb/reye.hpp"
#include "reyeweb/web.hpp"

namespace reyeweb {

/// Fiber classification of the ruling double cover over a web member.
enum class FiberType { TwoRulings, DoubleConic, TwoPlanes };

/// Classify the member at z by the numeric rank of its Gram matrix.
/// Throws RankTooLow below rank 2.
FiberType fiber_type(const Web& web, const Vec4<CD>& z, double tol = 1e-8);

/// The (at most two) lines on the quadric through a point of it: directions d
/// in the tangent plane with d^T Q d = 0, a binary quadratic in the tangent
/// frame. `double_line` marks a (numerically) repeated root, which is the
/// generic situation on a rank-3 cone.
struct TangentLines {
  std::array<PLineC, 2> lines;
  double discriminant_ratio = 0;  ///< |b^2 - ac| / (|a|+|b|+|c|)^2
  bool double_line = false;
};

TangentLines lines_through_point_on_quadric(const QuadricForm<CD>& q,
                                            const Vec4<CD>& p, double tol = 1e-8);

/// True when two lines of a rank-4 quadric belong to the same ruling:
/// projectively equal, or disjoint. Lines of opposite rulings meet in one
/// point. Throws LinesNotOnQuadric when a restriction residual is large.
bool same_ruling(const QuadricForm<CD>& q, const PLineC& l1, const PLineC& l2,
                 double tol = 1e-8);

/// A point of the double cover: a member together with a witness line of one
/// of its rulings.
struct RulingPoint {
  Vec4<CD> z;
  PLineC witness;
};

/// RulingPoint over z with a witness through a random point of the quadric.
RulingPoint make_ruling_point(const Web& web, const Vec4<CD>& z, Rng& rng);

/// A path [0,1] -> W supported on a pencil z(t) = a + t b, with the complex
/// parameter t following either a segment or a circle.
struct PathInW {
  Vec4<CD> a{}, b{};

  enum class Kind { Segment, Circle };
  Kind kind = Kind::Segment;

  CD from{0.0, 0.0}, to{1.0, 0.0};  // segment
  CD center{0.0, 0.0};              // circle
  double radius = 1.0;
  bool ccw = true;
  double turns = 1.0;

  int min_samples = 64;

  CD param(double s) const;      ///< t(s), s in [0,1]
  Vec4<CD> z_at(double s) const; ///< a + t(s) b

  static PathInW segment(const Vec4<CD>& a, const Vec4<CD>& b, CD from, CD to);
  static PathInW circle(const Vec4<CD>& a, const Vec4<CD>& b, CD center,
                        double radius, bool ccw = true, double turns = 1.0);
};

/// Circle around one affine root of the pencil quartic det(M(a) + t M(b)).
/// The radius is `radius_factor` times the distance from `around` to the
/// nearest root further than `cluster_tol` away (the factor itself if the
/// quartic has no other root).
PathInW branch_loop(const Web& web, const Vec4<CD>& a, const Vec4<CD>& b,
                    CD around, double radius_factor = 0.5,
                    double cluster_tol = 1e-6);

/// Circle enclosing every affine root of the pencil quartic.
PathInW all_roots_loop(const Web& web, const Vec4<CD>& a, const Vec4<CD>& b,
                       double radius_factor = 1.5);

struct TransportOptions {
  double init_dt = 0.02;      ///< initial step in the path parameter
  double min_dt = 1e-6;       ///< StepUnderflow below this
  double margin = 0.05;       ///< minimal direction-overlap separation
  double clearance = 1e-6;    ///< minimal relative |pencil quartic| along the path
  double min_overlap = 0.9;   ///< minimal winning overlap per accepted step
};

struct TransportStep {
  double s;
  CD t;
  PLineC witness;
  double margin;
};

struct TransportResult {
  RulingPoint end;
  int steps = 0;
  double min_margin = 0;        ///< smallest accepted selection margin
  double min_clearance = 0;     ///< smallest relative quartic value seen
  double min_best_overlap = 0;  ///< smallest accepted winning overlap
};

/// Continue the ruling witness along the path by adaptive stepping: project a
/// marked point of the witness onto the next quadric along its polar
/// direction, take the two lines through the image, keep the one whose
/// direction overlaps the previous witness best, and halve the step whenever
/// the selection margin drops below opts.margin or the winning overlap below
/// opts.min_overlap (a coarse step can rotate the ruling so far that the
/// wrong line wins with a comfortable margin; near-unit winning overlap is
/// what certifies continuity). Throws BranchHit when the path runs into the
/// symmetroid, StepUnderflow when halving bottoms out.
TransportResult transport_ruling(const Web& web, const PathInW& path,
                                 const RulingPoint& start,
                                 const TransportOptions& opts = {},
                                 std::vector<TransportStep>* trace = nullptr);

/// True iff transporting around the closed loop lands in the other ruling.
bool monodromy_swap(const Web& web, const PathInW& loop, const RulingPoint& start,
                    const TransportOptions& opts = {});

///// The six Reye lines in the witness ruling of a rank-4 member: the degree-6
/// determinant of the web restricted to a Segre chart of the quadric, with the
/// first factor indexing the witness ruling.
struct FundamentalResult {
  std::vector<PLineC> lines;     ///< six Reye lines of the ruling
  PolyC determinant;             ///< the degree-6 form, sup-normalized
  std::vector<CD> roots;
  int attempts = 0;
};

FundamentalResult fundamental_degree(const Web& web, const RulingPoint& ruling,
                                     Rng& rng, double tol = 1e-8);

}  // namespace reyeweb
