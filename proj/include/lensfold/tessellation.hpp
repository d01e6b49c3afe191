#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lensfold/geometry.hpp"
#include "lensfold/profile.hpp"
#include "lensfold/tolerances.hpp"

namespace lensfold {

enum class MV { Mountain, Valley };

inline const char* to_string(MV mv) { return mv == MV::Mountain ? "mountain" : "valley"; }

/// Doubly periodic lens tessellation. Even rows 2j hold lenses over
/// [i, i+1] × {jv}; odd rows 2j+1 are shifted by u horizontally and v/2
/// vertically and carry the lens rotated by 180°. Row j holds crease pairs
/// γ⁺ (upper) and γ⁻ (lower), mountain in even rows and valley in odd rows.
class LensTessellation {
 public:
  /// u must lie in [0,1), v > 0. Throws InvalidPattern when creases of
  /// adjacent rows touch or cross.
  LensTessellation(LensProfile profile, double u, double v);

  /// The same tessellation with the odd-row vertices relabelled so that
  /// V_{n,1} becomes V_{0,1}; u() then reports u + n.
  LensTessellation shifted(int n) const;

  const LensProfile& profile() const { return profile_; }
  double u() const { return u_ + shift_; }
  double base_u() const { return u_; }
  int shift() const { return shift_; }
  double v() const { return v_; }

  /// γ^sign_{i,j}(t), sign = +1 upper, -1 lower.
  Vec2 crease_point(int i, int j, int sign, double t) const;
  /// dγ/dt.
  Vec2 crease_derivative(int i, int j, int sign, double t) const;
  /// d²γ/dt².
  Vec2 crease_second_derivative(int i, int j, int sign, double t) const;
  Vec2 vertex(int i, int j) const;
  static MV crease_mv(int j) { return (j % 2 == 0) ? MV::Mountain : MV::Valley; }

  /// Crease γ^sign_{i,j} as an arclength curve traversed with increasing t,
  /// n samples uniform in arclength, with an exact evaluator.
  SampledCurve2D crease_curve(int i, int j, int sign, std::size_t n) const;

  /// Smallest vertical clearance between creases of neighbouring rows.
  double min_row_gap() const;

  /// Stable description used for pattern hashes.
  std::string canonical() const;

 private:
  LensTessellation(LensProfile profile, double u, double v, int shift, bool validate);
  double row_offset_x(int j) const;

  LensProfile profile_;
  double u_;
  double v_;
  int shift_ = 0;
};

struct VisibilityFailure {
  int candidate = 0;
  double t = 0.0;
  std::string reason;
};

struct VisibilityResult {
  /// n such that V_{n,1} sees every point of γ⁺_{0,0}, chosen closest to
  /// the lens apex when several do.
  std::optional<int> visible_vertex;
  std::vector<int> passing;
  /// First failing sample of every rejected candidate.
  std::vector<VisibilityFailure> failures;
};

/// Tests candidates V_{n,1} near the apex of γ⁺_{0,0}: the segment from
/// γ⁺_{0,0}(t) must leave on the convex side and cross no crease except at
/// its endpoints, for each of `n_samples` values of t.
VisibilityResult visibility_check(const LensTessellation& tess, std::size_t n_samples = 1024,
                                  std::size_t crease_samples = 2048, const Tolerances& tol = default_tolerances());

/// Visibility of a single candidate; empty when it sees the whole crease.
std::optional<VisibilityFailure> check_vertex_visibility(const LensTessellation& tess, int candidate,
                                                         std::size_t n_samples = 1024,
                                                         std::size_t crease_samples = 2048,
                                                         const Tolerances& tol = default_tolerances());

struct VStarLimit {
  double vstar_lim = 0.0;
  double t_argmin = 0.0;
  /// min over t of v/2 - (ℓ + ℓ'(u - t)); positive for foldable patterns.
  double support_margin = 0.0;
};

/// Lower bound on the folded row spacing v*. `tess` must already be shifted
/// so that V_{0,1} is the visible vertex. Throws InfeasiblePattern when the
/// bound does not exist.
VStarLimit vstar_limit(const LensTessellation& tess, std::size_t n_samples = 10000);

}  // namespace lensfold
