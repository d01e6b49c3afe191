#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <functional>

#include "lensfold/verification.hpp"

using namespace lensfold;
using doctest::Approx;

namespace {

/// Circle of radius R in z = 0, folded with the left side lifted by α(s)
/// and the right side by β(s) about the crease. The binormal is e_z, so the
/// bisection residual is |α - β| exactly.
CreaseSides tilted_circle(std::function<double(double)> alpha, std::function<double(double)> beta,
                          std::size_t n = 201) {
  const double R = 0.8, L = 1.5;
  std::vector<double> s;
  std::vector<Vec3> p3, RL, RR;
  std::vector<Vec2> p2, rL, rR;
  for (std::size_t i = 0; i < n; ++i) {
    const double si = L * static_cast<double>(i) / static_cast<double>(n - 1);
    const Vec2 q(R * std::cos(si / R), R * std::sin(si / R));
    const Vec2 inward = -q / R;
    const Vec3 N(inward.x(), inward.y(), 0.0);
    s.push_back(si);
    p2.push_back(q);
    p3.emplace_back(q.x(), q.y(), 0.0);
    const double a = alpha(si), b = beta(si);
    RL.push_back(std::cos(a) * N + std::sin(a) * Vec3::UnitZ());
    RR.push_back(-std::cos(b) * N + std::sin(b) * Vec3::UnitZ());
    rL.push_back(inward);
    rR.push_back(-inward);
  }
  return make_crease_sides("synthetic", SampledCurve3D(s, p3), SampledCurve2D(s, p2), RL, RR, rL, rR);
}

const KiteModule& module_16() {
  static const KiteModule m = build_kite_module(LensTessellation(LensProfile::sine(0.3), 0.5, 2.0), 1.6, 257);
  return m;
}

const CheckRecord* find(const FoldReport& r, const std::string& name) {
  for (const auto& c : r.checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("bisection residual on a synthetic fold") {
  const CreaseSides sym = tilted_circle([](double) { return 0.3; }, [](double) { return 0.3; });
  CHECK(check_bisection(sym).max_residual < 1e-12);
  CHECK(check_bisection(sym).pass);
  const CreaseSides asym = tilted_circle([](double) { return 0.3; }, [](double) { return 0.2; });
  const CheckRecord r = check_bisection(asym);
  CHECK(r.max_residual == Approx(0.1).epsilon(1e-9));
  CHECK_FALSE(r.pass);
}

TEST_CASE("fold angle sign, flat creases, and sign changes") {
  const FoldAngleResult up = check_fold_angle_and_MV(tilted_circle([](double) { return 0.2; }, [](double) { return 0.2; }));
  const FoldAngleResult down =
      check_fold_angle_and_MV(tilted_circle([](double) { return -0.2; }, [](double) { return -0.2; }));
  CHECK(std::abs(up.rho[50]) == Approx(0.4).epsilon(1e-9));
  CHECK(up.mv != down.mv);
  CHECK(up.rho[50] == Approx(-down.rho[50]));

  const FoldAngleResult flat = check_fold_angle_and_MV(tilted_circle([](double) { return 0.0; }, [](double) { return 0.0; }));
  CHECK(flat.not_a_crease);
  CHECK(flat.record.status == "NotACrease");
  CHECK_FALSE(flat.record.pass);

  auto swing = [](double s) { return 0.3 - 0.4 * s; };
  try {
    check_fold_angle_and_MV(tilted_circle(swing, swing));
    FAIL("expected MVInconsistent");
  } catch (const LensError& e) {
    CHECK(e.code() == Errc::MVInconsistent);
    REQUIRE(e.where().has_value());
    CHECK(*e.where() == Approx(0.75).epsilon(0.02));
  }
}

TEST_CASE("triangle intersection cases") {
  const Vec3 a0(0, 0, 0), a1(1, 0, 0), a2(0, 1, 0);
  // Piercing.
  CHECK(triangles_intersect(a0, a1, a2, Vec3(0.2, 0.2, -1), Vec3(0.3, 0.2, 1), Vec3(0.2, 0.4, 1)));
  // Above the plane.
  CHECK_FALSE(triangles_intersect(a0, a1, a2, Vec3(0.2, 0.2, 0.1), Vec3(0.3, 0.2, 1), Vec3(0.2, 0.4, 1)));
  // Crossing the plane outside the triangle.
  CHECK_FALSE(triangles_intersect(a0, a1, a2, Vec3(2, 2, -1), Vec3(2.1, 2, 1), Vec3(2, 2.2, 1)));
  // Touching at a vertex.
  CHECK(triangles_intersect(a0, a1, a2, Vec3(1, 0, 0), Vec3(2, 0, 1), Vec3(2, 1, -1)));
  // Coplanar overlap and coplanar separation.
  CHECK(triangles_intersect(a0, a1, a2, Vec3(0.2, 0.2, 0), Vec3(1.2, 0.2, 0), Vec3(0.2, 1.2, 0)));
  CHECK_FALSE(triangles_intersect(a0, a1, a2, Vec3(1, 1, 0), Vec3(2, 1, 0), Vec3(1, 2, 0)));
  // Symmetric in its arguments.
  CHECK(triangles_intersect(Vec3(0.2, 0.2, -1), Vec3(0.3, 0.2, 1), Vec3(0.2, 0.4, 1), a0, a1, a2));
}

TEST_CASE("pattern hash is FNV-1a of the canonical form") {
  const LensTessellation T(LensProfile::sine(0.3), 0.5, 2.0);
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : T.canonical()) h = (h ^ c) * 1099511628211ULL;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  CHECK(pattern_hash(T) == std::string(buf));
  CHECK(pattern_hash(T) != pattern_hash(LensTessellation(LensProfile::sine(0.3), 0.25, 2.0)));
}

TEST_CASE("ruling bending directions follow the crease labels") {
  const KiteModule& m = module_16();
  const RulingMVResult r = check_ruling_MV_rules(m);
  const int interior = static_cast<int>(m.t.size()) - 2;
  CHECK(r.crease_plus == MV::Mountain);
  CHECK(r.crease_minus == MV::Mountain);
  CHECK(r.mountain[static_cast<int>(PatchId::U)] == interior);
  CHECK(r.valley[static_cast<int>(PatchId::M)] == interior);
  CHECK(r.mountain[static_cast<int>(PatchId::L)] == interior);
  CHECK(r.valley[static_cast<int>(PatchId::U)] == 0);
  CHECK(r.violations.empty());
  CHECK(r.normal_side_mismatches == 0);
}

TEST_CASE("nearly tangent rulings are reported") {
  const LensTessellation T(LensProfile::sine(0.3), 0.5, 2.0);
  const TangentRulingResult ok = check_no_tangent_rulings(T, 1025);
  CHECK(ok.min_angle > 0.3);
  // A flat arc lens with far-apart rows: cone rulings meet the crease at
  // nearly zero angle close to the tips.
  const FoldSetup s = prepare_fold(LensTessellation(LensProfile::circular_arc(0.499), 0.5, 600.0));
  const TangentRulingResult bad = tangent_ruling_analysis(s.tess, 1025);
  CHECK(bad.min_angle < default_tolerances().ruling_angle_floor);
  try {
    check_no_tangent_rulings(s.tess, 1025);
    FAIL("expected TangentRuling");
  } catch (const LensError& e) {
    CHECK(e.code() == Errc::TangentRuling);
  }
}

TEST_CASE("module invariants at v* = 1.6") {
  const KiteModule& m = module_16();
  VerifyOptions opts;
  opts.convergence = false;
  const FoldReport rep = verify_module(m, opts);
  for (const auto& c : rep.checks) {
    CAPTURE(c.name);
    CAPTURE(c.max_residual);
    CHECK(c.pass);
  }
  REQUIRE(find(rep, "bisection_plus") != nullptr);
  CHECK(find(rep, "bisection_plus")->max_residual < 1e-10);
  CHECK(find(rep, "isometry_rulings")->max_residual < 1e-12);
  CHECK(flat_correspondence_distance(m) > 0.0);
  CHECK(kite_diameter(m) == Approx(2.0));
}

TEST_CASE("K exceeds |k| and geodesic curvature matches on both sides (property)") {
  const LensTessellation T(LensProfile::sine(0.3), 0.5, 2.0);
  for (double vs : {0.95, 1.3, 1.8, 1.99}) {
    const KiteModule m = build_kite_module(T, vs, 129);
    for (int sign : {1, -1}) {
      const CreaseSides cs = crease_sides(m, sign);
      const CurvatureRelationResult cr = check_curvature_relation(cs);
      CHECK(cr.relation.pass);
      CHECK(cr.increase.pass);
      CHECK(check_geodesic_equality(cs).pass);
      CHECK(check_bisection(cs).pass);
    }
  }
}

TEST_CASE("tiling checks on a 2x2 tiling") {
  const TiledFolding tl = tile(module_16(), 2, 2);
  const KinkResult k = check_kinks_at_vertices(tl);
  CHECK(k.record.pass);
  CHECK_FALSE(k.kinks.empty());
  for (const auto& kink : k.kinks) CHECK(kink.angle3d > 0.0);
  const CollisionResult c = check_collisions(tl);
  CHECK(c.intersections == 0);
  for (const auto& r : check_seams(tl)) {
    CAPTURE(r.name);
    CHECK(r.pass);
  }
}

TEST_CASE("convergence records compare coarse and fine builds") {
  const LensTessellation T(LensProfile::sine(0.3), 0.5, 2.0);
  const KiteModule coarse = build_kite_module(T, 1.6, 129);
  const KiteModule fine = build_kite_module(T, 1.6, 257);
  FoldReport rep;
  verify_convergence(coarse, fine, rep);
  REQUIRE_FALSE(rep.checks.empty());
  for (const auto& c : rep.checks) {
    CAPTURE(c.name);
    CAPTURE(c.detail);
    CHECK(c.pass);
    CHECK(c.max_residual < 0.5);
  }
}

TEST_CASE("family filter and report summary") {
  VerifyOptions opts;
  opts.enabled = {"bisection"};
  opts.convergence = false;
  const FoldReport rep = verify_module(module_16(), opts);
  REQUIRE(rep.checks.size() == 2);
  CHECK(rep.checks[0].name == "bisection_plus");
  CHECK(rep.all_pass());
  CHECK(rep.max_residual_ratio() < 1e-6);
  FoldReport failing = rep;
  failing.checks.push_back(make_record("x", 2.0, 1.0, 0.0));
  CHECK_FALSE(failing.all_pass());
  CHECK(failing.max_residual_ratio() == Approx(2.0));
  CHECK_FALSE(make_record("nan", std::nan(""), 1.0, 0.0).pass);
}
