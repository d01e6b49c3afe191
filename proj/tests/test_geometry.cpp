#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lensfold/geometry.hpp"

using namespace lensfold;
using doctest::Approx;

namespace {

SampledCurve3D helix(double a, double b, std::size_t n, bool exact) {
  const double c = std::sqrt(a * a + b * b);
  const double L = 4.0 * c;
  if (!exact) {
    std::vector<double> s;
    std::vector<Vec3> p;
    for (std::size_t i = 0; i < n; ++i) {
      const double si = L * static_cast<double>(i) / static_cast<double>(n - 1);
      s.push_back(si);
      p.emplace_back(a * std::cos(si / c), a * std::sin(si / c), b * si / c);
    }
    return SampledCurve3D(s, p);
  }
  auto eval = [a, b, c](double s) {
    SampledCurve3D::Jet j;
    const double u = s / c;
    j.p = Vec3(a * std::cos(u), a * std::sin(u), b * u);
    j.d1 = Vec3(-a * std::sin(u), a * std::cos(u), b) / c;
    j.d2 = Vec3(-a * std::cos(u), -a * std::sin(u), 0) / (c * c);
    j.d3 = Vec3(a * std::sin(u), -a * std::cos(u), 0) / (c * c * c);
    return j;
  };
  return SampledCurve3D::from_evaluator(eval, L, n);
}

}  // namespace

TEST_CASE("fd_weights reproduce polynomial derivatives") {
  const std::vector<double> xs{-0.3, -0.1, 0.0, 0.2, 0.5};
  const auto w = fd_weights(0.0, xs, 3);
  auto apply = [&](int k, auto f) {
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) acc += w[k][i] * f(xs[i]);
    return acc;
  };
  auto cubic = [](double x) { return 2.0 - x + 3 * x * x + 0.5 * x * x * x; };
  CHECK(apply(0, cubic) == Approx(2.0).epsilon(1e-12));
  CHECK(apply(1, cubic) == Approx(-1.0).epsilon(1e-10));
  CHECK(apply(2, cubic) == Approx(6.0).epsilon(1e-9));
  CHECK(apply(3, cubic) == Approx(3.0).epsilon(1e-8));
}

TEST_CASE("circle curvature and torsion") {
  const double R = 0.7;
  std::vector<Vec3> pts;
  std::vector<double> s;
  const std::size_t n = 801;
  for (std::size_t i = 0; i < n; ++i) {
    const double si = 2.0 * R * static_cast<double>(i) / static_cast<double>(n - 1);
    s.push_back(si);
    pts.emplace_back(R * std::cos(si / R), R * std::sin(si / R), 0.0);
  }
  const SampledCurve3D c(s, pts);
  for (std::size_t i : {std::size_t{0}, std::size_t{3}, n / 2, n - 1}) {
    const Frenet3D f = frenet_3d_at(c, i);
    CHECK(f.K == Approx(1.0 / R).epsilon(1e-5));
    CHECK(std::abs(f.torsion) < 1e-3);
    CHECK(std::abs(f.frame.T.dot(f.frame.N)) < 1e-8);
    CHECK(f.frame.B.dot(Vec3::UnitZ()) == Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("helix curvature and torsion, exact and sampled") {
  const double a = 0.8, b = 0.3, c2 = a * a + b * b;
  const double K = a / c2, tau = b / c2;
  for (bool exact : {true, false}) {
    const SampledCurve3D c = helix(a, b, 2001, exact);
    const double tolK = exact ? 1e-12 : 1e-5;
    for (std::size_t i : {std::size_t{1}, std::size_t{500}, std::size_t{1000}, std::size_t{1999}}) {
      const Frenet3D f = frenet_3d_at(c, i);
      CHECK(f.K == Approx(K).epsilon(tolK));
      CHECK(f.torsion == Approx(tau).epsilon(exact ? 1e-6 : 1e-3));
    }
    CHECK(c.arclength_defect() < 1e-6);
  }
}

TEST_CASE("sampled jets converge at second order") {
  const double a = 0.8, b = 0.3, K = a / (a * a + b * b);
  double prev = 0.0;
  for (std::size_t n : {101u, 201u, 401u}) {
    const SampledCurve3D c = helix(a, b, n, false);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(frenet_3d_at(c, i).K - K));
    if (prev > 0.0) CHECK(worst / prev < 0.3);
    prev = worst;
  }
}

TEST_CASE("2D signed curvature and straight lines") {
  const double R = 2.0;
  auto eval = [R](double s) {
    SampledCurve2D::Jet j;
    j.p = Vec2(R * std::cos(s / R), R * std::sin(s / R));
    j.d1 = Vec2(-std::sin(s / R), std::cos(s / R));
    j.d2 = -j.p / (R * R);
    j.d3 = -j.d1 / (R * R);
    return j;
  };
  const SampledCurve2D ccw = SampledCurve2D::from_evaluator(eval, 1.0, 50);
  CHECK(signed_curvature_2d(ccw, 0.4) == Approx(1.0 / R).epsilon(1e-12));
  CHECK(signed_curvature_2d_at(ccw.reversed(), 10) == Approx(-1.0 / R).epsilon(1e-5));
  const Frame2D fr = frenet_2d(ccw, 0.3);
  REQUIRE(fr.n.has_value());
  CHECK(fr.n->dot(-ccw.jet(0.3).p.normalized()) == Approx(1.0));

  const SampledCurve2D line = SampledCurve2D::from_polyline({Vec2(0, 0), Vec2(1, 1), Vec2(2, 2), Vec2(3, 3)});
  CHECK_FALSE(frenet_2d_at(line, 1).n.has_value());

  std::vector<Vec3> pts;
  for (int i = 0; i < 10; ++i) pts.emplace_back(0.1 * i, 0.2 * i, -0.05 * i);
  const SampledCurve3D line3 = SampledCurve3D::from_polyline(pts);
  try {
    frenet_3d_at(line3, 4);
    FAIL("expected FrameUndefined");
  } catch (const LensError& e) {
    CHECK(e.code() == Errc::FrameUndefined);
  }
}

TEST_CASE("curve construction errors") {
  auto code_of = [](auto fn) {
    try {
      fn();
    } catch (const LensError& e) {
      return e.code();
    }
    return Errc::InvalidConfig;
  };
  CHECK(code_of([] { SampledCurve2D({0.0}, {Vec2(0, 0)}); }) == Errc::DegenerateCurve);
  CHECK(code_of([] { SampledCurve2D({0.0, 0.0}, {Vec2(0, 0), Vec2(1, 0)}); }) == Errc::DegenerateCurve);
  const SampledCurve2D c = SampledCurve2D::from_polyline({Vec2(0, 0), Vec2(1, 0), Vec2(2, 0)});
  CHECK(code_of([&] { c.jet(5.0); }) == Errc::OutOfDomain);
}

TEST_CASE("geodesic curvature of a planar circle on its own plane") {
  const double R = 0.5;
  std::vector<Vec3> pts;
  std::vector<double> s;
  for (int i = 0; i <= 400; ++i) {
    const double si = i * 0.005;
    s.push_back(si);
    pts.emplace_back(R * std::cos(si / R), R * std::sin(si / R), 0.0);
  }
  const SampledCurve3D c(s, pts);
  const std::vector<Vec3> up(pts.size(), Vec3::UnitZ());
  // (K N)·(P × T) with P = e_z: the curvature vector points left of T.
  CHECK(geodesic_curvature_at(c, up, 200) == Approx(1.0 / R).epsilon(1e-5));
  const std::vector<Vec3> down(pts.size(), -Vec3::UnitZ());
  CHECK(geodesic_curvature_at(c, down, 200) == Approx(-1.0 / R).epsilon(1e-5));
}

TEST_CASE("curvature and torsion are invariant under rigid motions") {
  const SampledCurve3D c = helix(0.6, 0.25, 801, false);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::Quaterniond q = Eigen::Quaterniond(g(rng), g(rng), g(rng), g(rng)).normalized();
    const Vec3 off(g(rng), g(rng), g(rng));
    std::vector<Vec3> moved;
    for (const Vec3& p : c.points()) moved.push_back(q * p + off);
    const SampledCurve3D m(c.arclengths(), moved);
    for (std::size_t i : {std::size_t{2}, std::size_t{400}, std::size_t{790}}) {
      const Frenet3D a = frenet_3d_at(c, i), b = frenet_3d_at(m, i);
      CHECK(b.K == Approx(a.K).epsilon(1e-9));
      CHECK(b.torsion == Approx(a.torsion).epsilon(1e-6));
      CHECK((q * a.frame.B - b.frame.B).norm() < 1e-9);
    }
  }
}

TEST_CASE("resampling keeps the curve and equalizes spacing") {
  std::vector<Vec2> pts;
  for (int i = 0; i <= 300; ++i) {
    const double x = std::pow(i / 300.0, 2.0);
    pts.emplace_back(x, std::sin(3 * x));
  }
  const SampledCurve2D raw = SampledCurve2D::from_polyline(pts);
  const SampledCurve2D r = resample_arclength(raw, 101);
  CHECK(r.size() == 101);
  CHECK(r.length() == Approx(raw.length()).epsilon(1e-9));
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(std::abs(r.point(i).y() - std::sin(3 * r.point(i).x())) < 1e-4);
}

TEST_CASE("angle_between is accurate near 0 and pi") {
  const Vec3 a(1, 0, 0);
  CHECK(angle_between(a, Vec3(1, 1e-9, 0)) == Approx(1e-9).epsilon(1e-12));
  CHECK(angle_between(a, Vec3(-1, 1e-9, 0)) == Approx(std::numbers::pi - 1e-9).epsilon(1e-15));
  CHECK(angle_between(Vec2(0, 2), Vec2(3, 0)) == Approx(std::numbers::pi / 2));
}
