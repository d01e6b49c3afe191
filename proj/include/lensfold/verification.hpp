#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lensfold/folding.hpp"
#include "lensfold/geometry.hpp"
#include "lensfold/tolerances.hpp"

namespace lensfold {

struct CheckRecord {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double worst_sample = 0.0;  // parameter (arclength, t, ...) of the worst residual
  std::string status;         // "pass", "fail", "NotACrease" or "error"
  std::string detail;
};

/// pass ⇔ residual ≤ tolerance (NaN fails).
CheckRecord make_record(std::string name, double residual, double tolerance, double worst_sample,
                        std::string detail = {});

/// A folded crease with the two ruled surfaces meeting along it. Left and
/// right refer to the crease pattern, looking along increasing arclength.
struct CreaseSides {
  std::string name;
  SampledCurve3D crease3d;
  SampledCurve2D crease2d;
  std::vector<Vec3> P_L, P_R;  // top-side unit normals
  std::vector<Vec3> R_L, R_R;  // 3D ruling directions, pointing away from the crease
  std::vector<Vec2> r_L, r_R;  // the same rulings in the pattern
  std::vector<double> theta_L, theta_R;
  std::optional<MV> expected;
  // Per-sample unit tangent and curvature vector of crease3d, unit tangent
  // and signed curvature of crease2d.
  std::vector<Vec3> T, kv;
  std::vector<Vec2> t;
  std::vector<double> k;
};

/// Assembles CreaseSides; normals come from ruling × tangent per side.
CreaseSides make_crease_sides(std::string name, SampledCurve3D crease3d, SampledCurve2D crease2d,
                              std::vector<Vec3> R_L, std::vector<Vec3> R_R, std::vector<Vec2> r_L,
                              std::vector<Vec2> r_R, std::optional<MV> expected = std::nullopt);

/// sign = +1: γ⁺ with U on the left and M on the right; sign = -1: γ⁻ with
/// M on the left and L on the right.
CreaseSides crease_sides(const KiteModule& module, int sign);

/// The crease after a tile transform (3D rigid motion or reflection plus
/// the matching planar map of the pattern).
CreaseSides transform_sides(const CreaseSides& cs, const TileTransform& map, const PlanarTransform& map2d,
                            std::optional<MV> expected);

CheckRecord check_bisection(const CreaseSides& cs, const Tolerances& tol = default_tolerances());

struct FoldAngleResult {
  std::vector<double> rho;
  MV mv = MV::Mountain;
  bool not_a_crease = false;
  CheckRecord record;
};
/// Throws MVInconsistent where ρ changes sign along the crease.
FoldAngleResult check_fold_angle_and_MV(const CreaseSides& cs, const Tolerances& tol = default_tolerances());

struct CurvatureRelationResult {
  CheckRecord relation;       // K̂ cos(ρ/2) = k̂
  CheckRecord increase;       // K > |k| at every sample
};
CurvatureRelationResult check_curvature_relation(const CreaseSides& cs, const Tolerances& tol = default_tolerances());

/// Geodesic curvature of the crease on each side against the other side
/// and against the planar curvature.
CheckRecord check_geodesic_equality(const CreaseSides& cs, const Tolerances& tol = default_tolerances());

struct RulingViolation {
  PatchId patch = PatchId::U;
  double t = 0.0;
  MV predicted = MV::Mountain;
  MV observed = MV::Mountain;
};

struct RulingMVResult {
  // Counts of rulings bending mountain/valley, indexed by PatchId.
  std::array<int, 3> mountain{};
  std::array<int, 3> valley{};
  std::vector<RulingViolation> violations;
  int normal_side_mismatches = 0;  // "left ruling valley ⇔ N·P_L > 0"
  MV crease_plus = MV::Mountain;
  MV crease_minus = MV::Mountain;
  CheckRecord record;
};
/// Bending direction of every interior ruling against the prediction from
/// the crease MV and the side (convex/concave) the ruling lies on.
RulingMVResult ruling_mv_analysis(const KiteModule& module, const Tolerances& tol = default_tolerances());
/// Same, throwing MVRuleViolation on the first violation.
RulingMVResult check_ruling_MV_rules(const KiteModule& module, const Tolerances& tol = default_tolerances());

struct TangentRulingResult {
  double min_angle = 0.0;
  double t_at_min = 0.0;
  CheckRecord record;
};
/// Smallest angle between a ruling and the lens crease in the pattern,
/// over n samples of t. `tess` must be shifted to its visible vertex.
TangentRulingResult tangent_ruling_analysis(const LensTessellation& tess, std::size_t n,
                                            const Tolerances& tol = default_tolerances());
/// Same, throwing TangentRuling below the angle floor.
TangentRulingResult check_no_tangent_rulings(const LensTessellation& tess, std::size_t n,
                                             const Tolerances& tol = default_tolerances());

struct IsometryResult {
  double rulings = 0.0;
  double creases = 0.0;
  double coordinate_curves = 0.0;
  double chords = 0.0;
  std::size_t chord_count = 0;
  double max_error() const;
  std::vector<CheckRecord> records;
};
/// Relative length errors between pattern curves and their folded images:
/// rulings, creases, (s, ℓ)-coordinate lines, and random chords pushed
/// through the piecewise-linear patch maps.
IsometryResult check_isometry(const KiteModule& module, std::size_t chords_per_patch = 100, std::uint64_t seed = 1,
                              const Tolerances& tol = default_tolerances());

/// Surface normal variation along each stored ruling.
CheckRecord check_developability(const KiteModule& module, const Tolerances& tol = default_tolerances());

/// Jumps of the discrete curvature against h · max|X'''|.
CheckRecord check_semikink(const CreaseSides& cs, const Tolerances& tol = default_tolerances());

struct VertexKink {
  Vec3 position;
  Vec2 position2d;
  double angle3d = 0.0;  // between the two crease ends bounding a cone region
  double angle2d = 0.0;
};
struct KinkResult {
  std::vector<VertexKink> kinks;
  CheckRecord record;
};
KinkResult check_kinks_at_vertices(const TiledFolding& tiling, const Tolerances& tol = default_tolerances());

struct CollisionResult {
  std::size_t pairs_tested = 0;  // module pairs without a shared corner
  std::size_t intersections = 0;
  CheckRecord record;
};
CollisionResult check_collisions(const TiledFolding& tiling, const Tolerances& tol = default_tolerances());

/// Seam gaps, normal agreement, and the valley label of reflected creases.
std::vector<CheckRecord> check_seams(const TiledFolding& tiling, const Tolerances& tol = default_tolerances());

/// Triangle–triangle intersection, including touching and coplanar overlap.
bool triangles_intersect(const Vec3& a0, const Vec3& a1, const Vec3& a2, const Vec3& b0, const Vec3& b1,
                         const Vec3& b2);

/// Largest distance between a folded point and its pattern point (z = 0);
/// bounds the Hausdorff distance to the flat kite.
double flat_correspondence_distance(const KiteModule& module);
/// Largest distance between two kite corners in the pattern.
double kite_diameter(const KiteModule& module);

struct VerifyOptions {
  Tolerances tol = default_tolerances();
  std::set<std::string> enabled;  // empty: every check
  std::size_t chords_per_patch = 100;
  std::uint64_t seed = 1;
  bool convergence = true;  // rebuild at 2n and require residuals to halve
  bool is_enabled(const std::string& family) const { return enabled.empty() || enabled.count(family) > 0; }
};

/// Names accepted in VerifyOptions::enabled.
const std::vector<std::string>& check_families();

struct FoldReport {
  std::string pattern_hash;
  double vstar = 0.0;
  std::size_t n = 0;
  std::vector<CheckRecord> checks;
  bool all_pass() const;
  double max_residual_ratio() const;  // max over checks of residual / tolerance
};

FoldReport verify_module(const KiteModule& module, const VerifyOptions& opts = {});
void verify_tiling(const TiledFolding& tiling, FoldReport& report, const VerifyOptions& opts = {});
/// Compares module-level residuals with a rebuild at twice the samples.
void verify_convergence(const KiteModule& coarse, const KiteModule& fine, FoldReport& report,
                        const VerifyOptions& opts = {});

/// Residual floor below which convergence is not required: at that point
/// the residual is rounding noise, not discretization error.
double convergence_noise_floor(const std::string& family);

/// FNV-1a of the tessellation's canonical description, as 16 hex digits.
std::string pattern_hash(const LensTessellation& tess);

}  // namespace lensfold
