#pragma once

namespace lensfold {

/// Numerical thresholds shared by construction and verification. Acceptance
/// tests pin these values, so change them here and nowhere else.
struct Tolerances {
  double arc = 1e-9;           // arclength parameterization defect
  double unit = 1e-8;          // |v| - 1 for unit vectors
  double orth = 1e-8;          // pairwise dot products of frame vectors
  double geo = 1e-4;           // geodesic curvature agreement, scaled by max|k|
  double k_min = 1e-7;         // below this a curve is treated as straight
  double len_eps = 1e-12;      // degenerate curve length

  double angle = 1e-4;              // bisection residual [rad]
  double length = 1e-6;             // relative length error on creases/rulings
  double chord = 1e-5;              // relative length error on random chords
  double curvature_relation = 1e-3; // relative residual of K̂ cos(ρ/2) = k̂
  double fold_angle_floor = 1e-6;   // |ρ| below this is "not a crease"
  double ruling_angle_floor = 1e-3; // min ruling/tangent angle [rad]
  double developable = 1e-5;        // normal variation along a ruling [rad]
  double semikink_envelope = 4.0;   // jump of κ relative to h·max|X'''|

  double seam = 1e-9;          // seam endpoint coincidence
  double seam_normal = 1e-6;   // seam normal agreement [rad]
  double contact = 1e-9;       // endpoint contact in visibility tests
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

}  // namespace lensfold
