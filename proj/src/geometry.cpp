#include "lensfold/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lensfold {

std::vector<std::vector<double>> fd_weights(double x0, std::span<const double> xs, int max_order) {
  // Fornberg, "Generation of finite difference formulas on arbitrarily
  // spaced grids", Math. Comp. 51 (1988).
  const int n = static_cast<int>(xs.size());
  const int m = max_order;
  std::vector<std::vector<double>> c(m + 1, std::vector<double>(n, 0.0));
  double c1 = 1.0;
  double c4 = xs[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        }
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      }
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

namespace {

struct Stencil {
  std::size_t first = 0;
  std::size_t count = 0;
};

// Centered 4th-order stencils in the interior; 2nd-order centered next to
// the ends and 2nd-order one-sided at the ends.
Stencil stencil_d1(std::size_t i, std::size_t n) {
  if (n >= 5 && i >= 2 && i + 2 < n) return {i - 2, 5};
  if (n >= 3 && i >= 1 && i + 1 < n) return {i - 1, 3};
  const std::size_t len = std::min<std::size_t>(n, 3);
  return i == 0 ? Stencil{0, len} : Stencil{n - len, len};
}

Stencil stencil_d2(std::size_t i, std::size_t n) {
  if (n >= 5 && i >= 2 && i + 2 < n) return {i - 2, 5};
  if (n >= 3 && i >= 1 && i + 1 < n) return {i - 1, 3};
  const std::size_t len = std::min<std::size_t>(n, 4);
  return i == 0 ? Stencil{0, len} : Stencil{n - len, len};
}

Stencil stencil_d3(std::size_t i, std::size_t n) {
  if (n >= 7 && i >= 3 && i + 3 < n) return {i - 3, 7};
  if (n >= 5 && i >= 2 && i + 2 < n) return {i - 2, 5};
  const std::size_t len = std::min<std::size_t>(n, 5);
  return i < n / 2 ? Stencil{0, len} : Stencil{n - len, len};
}

template <typename P>
P apply(const std::vector<double>& s, const std::vector<P>& pts, std::size_t i, Stencil st, int order) {
  if (st.count <= static_cast<std::size_t>(order)) return P::Zero();
  const auto w = fd_weights(s[i], std::span<const double>(s.data() + st.first, st.count), order);
  P acc = P::Zero();
  for (std::size_t k = 0; k < st.count; ++k) acc += w[order][k] * pts[st.first + k];
  return acc;
}

}  // namespace

template <int Dim>
SampledCurve<Dim>::SampledCurve(std::vector<double> s, std::vector<Point> points, Evaluator evaluator)
    : s_(std::move(s)), points_(std::move(points)), evaluator_(std::move(evaluator)) {
  if (s_.size() != points_.size()) {
    throw LensError(Errc::DegenerateCurve, "arclength and point counts differ");
  }
  if (s_.size() < 2) throw LensError(Errc::DegenerateCurve, "curve needs at least two samples");
  for (std::size_t i = 1; i < s_.size(); ++i) {
    if (!(s_[i] > s_[i - 1])) {
      throw LensError(Errc::DegenerateCurve, "arclength not strictly increasing at sample " + std::to_string(i),
                      s_[i]);
    }
    if (points_[i] == points_[i - 1]) {
      throw LensError(Errc::DegenerateCurve, "repeated point at sample " + std::to_string(i), s_[i]);
    }
  }
}

template <int Dim>
SampledCurve<Dim> SampledCurve<Dim>::from_evaluator(Evaluator evaluator, double length, std::size_t n) {
  if (n < 2) throw LensError(Errc::DegenerateCurve, "need n >= 2");
  if (!(length > default_tolerances().len_eps)) throw LensError(Errc::DegenerateCurve, "zero-length curve");
  std::vector<double> s(n);
  std::vector<Point> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = (i + 1 == n) ? length : length * static_cast<double>(i) / static_cast<double>(n - 1);
    pts[i] = evaluator(s[i]).p;
  }
  return SampledCurve(std::move(s), std::move(pts), std::move(evaluator));
}

template <int Dim>
SampledCurve<Dim> SampledCurve<Dim>::from_polyline(std::vector<Point> points) {
  std::vector<double> s(points.size(), 0.0);
  for (std::size_t i = 1; i < points.size(); ++i) s[i] = s[i - 1] + (points[i] - points[i - 1]).norm();
  return SampledCurve(std::move(s), std::move(points));
}

template <int Dim>
typename SampledCurve<Dim>::Jet SampledCurve<Dim>::fd_jet_at(std::size_t i) const {
  const std::size_t n = size();
  Jet j;
  j.p = points_[i];
  j.d1 = apply(s_, points_, i, stencil_d1(i, n), 1);
  j.d2 = apply(s_, points_, i, stencil_d2(i, n), 2);
  j.d3 = apply(s_, points_, i, stencil_d3(i, n), 3);
  return j;
}

template <int Dim>
typename SampledCurve<Dim>::Jet SampledCurve<Dim>::jet_at(std::size_t i) const {
  if (evaluator_) return evaluator_(s_[i]);
  return fd_jet_at(i);
}

template <int Dim>
std::size_t SampledCurve<Dim>::bracket(double s) const {
  auto it = std::upper_bound(s_.begin(), s_.end(), s);
  if (it == s_.begin()) return 0;
  const auto idx = static_cast<std::size_t>(std::distance(s_.begin(), it)) - 1;
  return std::min(idx, size() - 2);
}

template <int Dim>
typename SampledCurve<Dim>::Jet SampledCurve<Dim>::jet(double s) const {
  const double slack = 1e-12 * std::max(1.0, length());
  if (s < s_.front() - slack || s > s_.back() + slack) {
    throw LensError(Errc::OutOfDomain, "arclength outside curve domain", s);
  }
  if (evaluator_) return evaluator_(s);
  const std::size_t i = bracket(s);
  const double h = s_[i + 1] - s_[i];
  if (std::abs(s - s_[i]) <= slack) return jet_at(i);
  if (std::abs(s - s_[i + 1]) <= slack) return jet_at(i + 1);
  const Jet a = jet_at(i);
  const Jet b = jet_at(i + 1);
  const double x = (s - s_[i]) / h;
  const double x2 = x * x;
  const double x3 = x2 * x;
  Jet out;
  out.p = (2 * x3 - 3 * x2 + 1) * a.p + (x3 - 2 * x2 + x) * h * a.d1 + (-2 * x3 + 3 * x2) * b.p +
          (x3 - x2) * h * b.d1;
  out.d1 = ((6 * x2 - 6 * x) * a.p + (3 * x2 - 4 * x + 1) * h * a.d1 + (-6 * x2 + 6 * x) * b.p +
            (3 * x2 - 2 * x) * h * b.d1) /
           h;
  out.d2 = (1 - x) * a.d2 + x * b.d2;
  out.d3 = (1 - x) * a.d3 + x * b.d3;
  return out;
}

template <int Dim>
SampledCurve<Dim> SampledCurve<Dim>::reversed() const {
  const std::size_t n = size();
  std::vector<double> s(n);
  std::vector<Point> pts(n);
  const double end = s_.back();
  for (std::size_t k = 0; k < n; ++k) {
    s[k] = end - s_[n - 1 - k];
    pts[k] = points_[n - 1 - k];
  }
  Evaluator eval;
  if (evaluator_) {
    eval = [inner = evaluator_, end](double r) {
      Jet j = inner(end - r);
      j.d1 = -j.d1;
      j.d3 = -j.d3;
      return j;
    };
  }
  return SampledCurve(std::move(s), std::move(pts), std::move(eval));
}

template <int Dim>
double SampledCurve<Dim>::arclength_defect() const {
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < size(); ++i) {
    worst = std::max(worst, std::abs(fd_jet_at(i).d1.norm() - 1.0));
  }
  return worst;
}

template class SampledCurve<2>;
template class SampledCurve<3>;

template <int Dim>
SampledCurve<Dim> resample_arclength(const SampledCurve<Dim>& curve, std::size_t n) {
  using Curve = SampledCurve<Dim>;
  if (n < 2) throw LensError(Errc::DegenerateCurve, "resample needs n >= 2");
  const double length = curve.length();
  if (!(length > default_tolerances().len_eps)) throw LensError(Errc::DegenerateCurve, "curve length below epsilon");
  std::vector<double> s(n);
  std::vector<typename Curve::Point> pts(n);
  const double s0 = curve.s0();
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = (i + 1 == n) ? s0 + length : s0 + length * static_cast<double>(i) / static_cast<double>(n - 1);
    pts[i] = curve.jet(s[i]).p;
  }
  pts.front() = curve.points().front();
  pts.back() = curve.points().back();
  typename Curve::Evaluator eval;
  if (curve.has_evaluator()) {
    eval = [curve](double r) { return curve.jet(r); };
  }
  return Curve(std::move(s), std::move(pts), std::move(eval));
}

template SampledCurve<2> resample_arclength(const SampledCurve<2>&, std::size_t);
template SampledCurve<3> resample_arclength(const SampledCurve<3>&, std::size_t);

namespace {

Frame2D frame2d_from_jet(const SampledCurve2D::Jet& j, const Tolerances& tol) {
  Frame2D f;
  f.t = j.d1.normalized();
  const Vec2 kappa = curvature_vector(j.d1, j.d2);
  f.k = kappa.norm();
  if (f.k > tol.k_min) f.n = kappa / f.k;
  return f;
}

Frenet3D frenet3d_from_jet(const SampledCurve3D::Jet& j, double s, const Tolerances& tol) {
  const Vec3 T = j.d1.normalized();
  const Vec3 kappa = curvature_vector(j.d1, j.d2);
  const double K = kappa.norm();
  if (!(K > tol.k_min)) {
    throw LensError(Errc::FrameUndefined, "curvature below k_min; the curve is locally straight", s);
  }
  Frenet3D out;
  out.frame.origin = j.p;
  out.frame.T = T;
  out.frame.N = kappa / K;
  out.frame.B = T.cross(out.frame.N);
  out.K = K;
  const Vec3 c = j.d1.cross(j.d2);
  out.torsion = c.dot(j.d3) / c.squaredNorm();
  return out;
}

void check_domain(double s, double lo, double hi) {
  const double slack = 1e-12 * std::max(1.0, hi - lo);
  if (s < lo - slack || s > hi + slack) throw LensError(Errc::OutOfDomain, "arclength outside curve domain", s);
}

}  // namespace

Frame2D frenet_2d(const SampledCurve2D& curve, double s, const Tolerances& tol) {
  check_domain(s, curve.s0(), curve.s0() + curve.length());
  return frame2d_from_jet(curve.jet(s), tol);
}

Frame2D frenet_2d_at(const SampledCurve2D& curve, std::size_t i, const Tolerances& tol) {
  return frame2d_from_jet(curve.jet_at(i), tol);
}

Frenet3D frenet_3d(const SampledCurve3D& curve, double s, const Tolerances& tol) {
  check_domain(s, curve.s0(), curve.s0() + curve.length());
  return frenet3d_from_jet(curve.jet(s), s, tol);
}

Frenet3D frenet_3d_at(const SampledCurve3D& curve, std::size_t i, const Tolerances& tol) {
  return frenet3d_from_jet(curve.jet_at(i), curve.s(i), tol);
}

std::vector<FrameSample> compute_frames(const SampledCurve3D& curve, const Tolerances& tol) {
  std::vector<FrameSample> out(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const auto j = curve.jet_at(i);
    out[i].s = curve.s(i);
    out[i].T = j.d1.normalized();
    out[i].K = curvature_vector(j.d1, j.d2).norm();
    if (out[i].K > tol.k_min) out[i].frenet = frenet3d_from_jet(j, curve.s(i), tol);
  }
  return out;
}

namespace {
double signed_k(const SampledCurve2D::Jet& j) {
  const Vec2 t = j.d1.normalized();
  const Vec2 left(-t.y(), t.x());
  return curvature_vector(j.d1, j.d2).dot(left);
}
}  // namespace

double signed_curvature_2d(const SampledCurve2D& curve, double s) {
  check_domain(s, curve.s0(), curve.s0() + curve.length());
  return signed_k(curve.jet(s));
}

double signed_curvature_2d_at(const SampledCurve2D& curve, std::size_t i) { return signed_k(curve.jet_at(i)); }

double geodesic_curvature_at(const SampledCurve3D& crease, std::span<const Vec3> side_normal, std::size_t i,
                             const Tolerances& tol) {
  if (side_normal.size() != crease.size()) {
    throw LensError(Errc::InvalidSurfaceNormal, "need one surface normal per crease sample");
  }
  const auto j = crease.jet_at(i);
  const Vec3 T = j.d1.normalized();
  const Vec3& P = side_normal[i];
  if (std::abs(P.norm() - 1.0) > tol.unit || std::abs(P.dot(T)) > tol.orth) {
    throw LensError(Errc::InvalidSurfaceNormal, "surface normal not unit or not orthogonal to the crease tangent",
                    crease.s(i));
  }
  return curvature_vector(j.d1, j.d2).dot(P.cross(T));
}

double geodesic_curvature(const SampledCurve3D& crease, std::span<const Vec3> side_normal, double s,
                          const Tolerances& tol) {
  check_domain(s, crease.s0(), crease.s0() + crease.length());
  if (side_normal.size() != crease.size()) {
    throw LensError(Errc::InvalidSurfaceNormal, "need one surface normal per crease sample");
  }
  const std::size_t i = crease.bracket(s);
  const double x = (s - crease.s(i)) / (crease.s(i + 1) - crease.s(i));
  const auto j = crease.jet(s);
  const Vec3 T = j.d1.normalized();
  Vec3 P = (1 - x) * side_normal[i] + x * side_normal[i + 1];
  for (const Vec3& q : {side_normal[i], side_normal[i + 1]}) {
    if (std::abs(q.norm() - 1.0) > tol.unit) {
      throw LensError(Errc::InvalidSurfaceNormal, "surface normal not unit", s);
    }
  }
  P = (P - P.dot(T) * T).normalized();
  return curvature_vector(j.d1, j.d2).dot(P.cross(T));
}

}  // namespace lensfold
