#pragma once

#include <array>
#include <memory>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lensfold/geometry.hpp"
#include "lensfold/tessellation.hpp"

namespace lensfold {

/// Isosceles trapezoid cut by the plane through f(V₀,₁), f(V₀,₋₁) and the
/// middle ruling at t: base v*, top 2ℓ(t), legs r(t), height h(t).
struct TrapezoidSection {
  double t = 0.0;
  double r = 0.0;
  double h = 0.0;
  double two_ell = 0.0;
  double vstar = 0.0;
};

/// Requires 0 < v* ≤ v. Throws TrapezoidInfeasible when no trapezoid exists.
TrapezoidSection section(const LensTessellation& tess, double vstar, double t);

/// Closed-form pieces of the height function, with w = v - v*:
///   h² = w((v+v*)/4 - ℓ) + (t-u)²,  h h' = (t-u) - wℓ'/2,
///   h² - (h h')² = w·D,  D = (v+v*)/4 - ℓ - ℓ'(u-t) - wℓ'²/4.
struct HeightTerms {
  double h2 = 0.0;
  double hdh = 0.0;
  double wD = 0.0;
};
HeightTerms height_terms(const LensTessellation& tess, double vstar, double t);

struct ThetaProfile {
  std::vector<double> t;
  std::vector<double> theta;
  /// θ(1): polar angle swept by the projected crease around f(V₀,₁).
  double theta_end = 0.0;
  /// Turning angle of the projected crease; 0 in the flat state.
  double total_turn = 0.0;
  /// Largest error estimate reported by the quadrature.
  double quadrature_error = 0.0;
};

/// θ(t) = ∫₀ᵗ √(1 - h'²)/h at the given increasing t in [0,1].
/// Throws FoldDepthInfeasible (carrying t) where h'² ≥ 1 and SingularHeight
/// where h vanishes.
ThetaProfile integrate_theta(const LensTessellation& tess, double vstar, std::span<const double> t);
/// Same at n points uniform in t.
ThetaProfile integrate_theta(const LensTessellation& tess, double vstar, std::size_t n);

/// Top-side unit normal of a ruled patch along a crease, from the 3D
/// tangent and ruling, oriented by their order in the crease pattern.
Vec3 oriented_normal(const Vec3& tangent3, const Vec3& ruling3, const Vec2& tangent2, const Vec2& ruling2);

enum class PatchId { U, M, L };
inline const char* to_string(PatchId p) { return p == PatchId::U ? "U" : p == PatchId::M ? "M" : "L"; }

/// Ruled patch stored as rulings from[i] → to[i], one per crease sample,
/// in 3D and in the crease pattern.
struct RuledPatch {
  PatchId id = PatchId::U;
  std::vector<Vec3> from3, to3;
  std::vector<Vec2> from2, to2;
};

struct KiteModule {
  LensTessellation tess;  // shifted so that V₀,₁ is the visible vertex
  double vstar = 0.0;
  std::vector<double> t;       // profile parameter at each crease sample
  std::vector<double> theta;   // polar angle at each crease sample
  SampledCurve2D crease_plus_2d, crease_minus_2d;
  SampledCurve3D folded_crease_plus, folded_crease_minus;
  RuledPatch U, M, L;
  // Images of V₀,₀, V₁,₀, V₀,₁, V₀,₋₁.
  Vec3 corner_00, corner_10, apex_upper, apex_lower;
  double theta_end = 0.0;
  double total_turn = 0.0;

  const RuledPatch& patch(PatchId id) const { return id == PatchId::U ? U : id == PatchId::M ? M : L; }
};

/// Folded kite module at row spacing v* with n crease samples uniform in
/// arclength. f(V₀,₀) sits at the origin and f(V₁,₀) on the +x axis; the
/// middle rulings are parallel to y.
KiteModule build_kite_module(const LensTessellation& tess, double vstar, std::size_t n);

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Vec2> uv;  // crease-pattern coordinates of each vertex
  std::vector<std::array<int, 3>> faces;  // counter-clockwise in the pattern
};

/// Apex fans for U and L, split quads for M; degenerate triangles dropped.
TriangleMesh mesh_patch(const KiteModule& module, PatchId id);

/// Rigid or reflected copy of the module. Reflected tiles have their
/// normals negated so that the top side stays consistent across seams.
struct TileTransform {
  Eigen::Matrix3d linear = Eigen::Matrix3d::Identity();
  Vec3 offset = Vec3::Zero();
  bool flip_normals = false;
  Vec3 apply(const Vec3& p) const { return linear * p + offset; }
  Vec3 apply_vector(const Vec3& d) const { return linear * d; }
  Vec3 apply_normal(const Vec3& n) const { return flip_normals ? Vec3(-(linear * n)) : Vec3(linear * n); }
};

struct PlanarTransform {
  double sign = 1.0;  // +1 translation, -1 point reflection
  Vec2 offset = Vec2::Zero();
  Vec2 apply(const Vec2& p) const { return sign * p + offset; }
  Vec2 apply_vector(const Vec2& d) const { return sign * d; }
};

struct Tile {
  int col = 0;
  int row = 0;
  TileTransform map;
  PlanarTransform map2d;
  bool reflected() const { return map.flip_normals; }
};

/// Module boundary edges, each a straight ruling.
enum class KiteEdge { UpperStart = 0, UpperEnd = 1, LowerEnd = 2, LowerStart = 3 };

struct Seam {
  std::size_t tile_a = 0, tile_b = 0;
  KiteEdge edge_a = KiteEdge::UpperStart, edge_b = KiteEdge::UpperStart;
  double max_gap = 0.0;
  double normal_angle_raw = 0.0;  // before negating reflected normals
  double normal_angle = 0.0;      // after
};

struct TiledFolding {
  std::shared_ptr<const KiteModule> module;
  int rows = 0, cols = 0;
  std::vector<Tile> tiles;
  std::vector<Seam> seams;
};

/// rows × cols copies. Row k even is a translate of the module; row k odd
/// is its point reflection through the midpoint of f(V₀,₁)f(V₁,₀). Throws
/// TilingInconsistent if a seam does not close to tol.seam.
TiledFolding tile(const KiteModule& module, int rows, int cols, const Tolerances& tol = default_tolerances());

/// Endpoints (start, end) of a boundary edge of the untransformed module.
std::array<Vec3, 2> kite_edge(const KiteModule& module, KiteEdge e);
std::array<Vec2, 2> kite_edge_2d(const KiteModule& module, KiteEdge e);
/// Top-side normal of the patch along a boundary edge.
Vec3 kite_edge_normal(const KiteModule& module, KiteEdge e);

struct SweepFrame {
  double vstar = 0.0;
  KiteModule module;
};

/// k_frames modules with v* stepping down from v - margin to v*_lim + margin,
/// margin = 1e-4 (v - v*_lim), with v*_lim clamped at 0. The tessellation
/// must be shifted to its visible vertex.
std::vector<SweepFrame> sweep_vstar(const LensTessellation& tess, std::size_t k_frames, std::size_t n);
/// The v* values sweep_vstar uses.
std::vector<double> sweep_values(const LensTessellation& tess, std::size_t k_frames);

/// Visibility plus v*_lim for a pattern, with the tessellation shifted to
/// the chosen vertex. Throws InfeasiblePattern when no vertex is visible.
struct FoldSetup {
  LensTessellation tess;
  int visible_vertex = 0;
  VStarLimit limit;
};
FoldSetup prepare_fold(const LensTessellation& tess, const Tolerances& tol = default_tolerances());

}  // namespace lensfold
