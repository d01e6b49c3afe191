#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lensfold/errors.hpp"
#include "lensfold/tolerances.hpp"

namespace lensfold {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Unsigned angle between two nonzero vectors, accurate near 0 and π.
template <typename V>
double angle_between(const V& a, const V& b) {
  const double c = a.dot(b);
  if constexpr (V::RowsAtCompileTime == 2) {
    return std::abs(std::atan2(cross2(a, b), c));
  } else {
    return std::atan2(a.cross(b).norm(), c);
  }
}

/// Finite-difference weights (Fornberg) for derivatives 0..max_order at x0
/// using the nodes `xs`. Row k of the result holds the weights of order k.
std::vector<std::vector<double>> fd_weights(double x0, std::span<const double> xs, int max_order);

/// Arclength-parameterized curve stored as ordered samples. An optional
/// evaluator supplies exact jets (derivatives with respect to arclength);
/// otherwise derivatives come from finite differences on the samples.
template <int Dim>
class SampledCurve {
 public:
  using Point = Eigen::Matrix<double, Dim, 1>;
  struct Jet {
    Point p = Point::Zero();
    Point d1 = Point::Zero();
    Point d2 = Point::Zero();
    Point d3 = Point::Zero();
  };
  using Evaluator = std::function<Jet(double)>;

  SampledCurve(std::vector<double> s, std::vector<Point> points, Evaluator evaluator = {});

  /// Samples `evaluator` at n points uniformly spaced on [0, length].
  static SampledCurve from_evaluator(Evaluator evaluator, double length, std::size_t n);
  /// Uses cumulative chord length as the arclength estimate.
  static SampledCurve from_polyline(std::vector<Point> points);

  std::size_t size() const { return points_.size(); }
  double length() const { return s_.back() - s_.front(); }
  double s0() const { return s_.front(); }
  const std::vector<double>& arclengths() const { return s_; }
  const std::vector<Point>& points() const { return points_; }
  const Point& point(std::size_t i) const { return points_[i]; }
  double s(std::size_t i) const { return s_[i]; }
  bool has_evaluator() const { return static_cast<bool>(evaluator_); }

  /// Jet at sample i (evaluator if present, else finite differences).
  Jet jet_at(std::size_t i) const;
  /// Finite-difference jet at sample i, ignoring any evaluator.
  Jet fd_jet_at(std::size_t i) const;
  /// Jet at arbitrary arclength within [s0, s0 + length].
  Jet jet(double s) const;

  /// Same point set traversed the other way; arclength restarts at 0.
  SampledCurve reversed() const;

  /// Largest | |dX/ds| - 1 | over interior samples, from finite differences.
  double arclength_defect() const;

  /// Index of the sample bracketing s from below.
  std::size_t bracket(double s) const;

 private:
  std::vector<double> s_;
  std::vector<Point> points_;
  Evaluator evaluator_;
};

using SampledCurve2D = SampledCurve<2>;
using SampledCurve3D = SampledCurve<3>;

extern template class SampledCurve<2>;
extern template class SampledCurve<3>;

/// Resamples at n points equally spaced in arclength, interpolating with
/// cubic Hermite segments on the stored arclength parameter.
template <int Dim>
SampledCurve<Dim> resample_arclength(const SampledCurve<Dim>& curve, std::size_t n);

struct Frame2D {
  Vec2 t;
  std::optional<Vec2> n;  // absent where k <= k_min
  double k = 0.0;
};

struct Frame3D {
  Vec3 origin;
  Vec3 T;
  Vec3 N;
  Vec3 B;
};

struct Frenet3D {
  Frame3D frame;
  double K = 0.0;
  double torsion = 0.0;
};

/// Per-sample frame data of a space curve; `frame` is empty where the curve
/// is straight to within k_min.
struct FrameSample {
  double s = 0.0;
  Vec3 T;
  double K = 0.0;
  std::optional<Frenet3D> frenet;
};

Frame2D frenet_2d(const SampledCurve2D& curve, double s, const Tolerances& tol = default_tolerances());
Frame2D frenet_2d_at(const SampledCurve2D& curve, std::size_t i, const Tolerances& tol = default_tolerances());

Frenet3D frenet_3d(const SampledCurve3D& curve, double s, const Tolerances& tol = default_tolerances());
Frenet3D frenet_3d_at(const SampledCurve3D& curve, std::size_t i, const Tolerances& tol = default_tolerances());
std::vector<FrameSample> compute_frames(const SampledCurve3D& curve, const Tolerances& tol = default_tolerances());

/// Signed curvature with the left normal e_z × t: positive on left turns.
double signed_curvature_2d(const SampledCurve2D& curve, double s);
double signed_curvature_2d_at(const SampledCurve2D& curve, std::size_t i);

/// (K N)·(P × T): geodesic curvature of the crease on the surface whose
/// top-side normal along the crease is `side_normal` (one per sample).
double geodesic_curvature_at(const SampledCurve3D& crease, std::span<const Vec3> side_normal, std::size_t i,
                             const Tolerances& tol = default_tolerances());
double geodesic_curvature(const SampledCurve3D& crease, std::span<const Vec3> side_normal, double s,
                          const Tolerances& tol = default_tolerances());

/// Curvature vector d²X/ds² projected orthogonally to the tangent and
/// rescaled for non-unit speed.
template <typename P>
P curvature_vector(const P& d1, const P& d2) {
  const double speed2 = d1.squaredNorm();
  const P t = d1 / std::sqrt(speed2);
  return (d2 - d2.dot(t) * t) / speed2;
}

}  // namespace lensfold
