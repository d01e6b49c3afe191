#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lensfold/folding.hpp"
#include "oracles.hpp"

using namespace lensfold;
using doctest::Approx;

namespace {

const LensTessellation& base() {
  static const LensTessellation T(LensProfile::sine(0.3), 0.5, 2.0);
  return T;
}

const KiteModule& module_16() {
  static const KiteModule m = build_kite_module(base(), 1.6, 257);
  return m;
}

Errc error_of(auto fn) {
  try {
    fn();
  } catch (const LensError& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::InvalidConfig;
}

/// Tangent turning of the polar curve (h(t), θ(t)), from dense chords.
double chord_turning(const oracle::Sine& p, double u, double v, double vs, std::size_t n) {
  std::vector<Vec2> pts;
  double theta = 0.0;
  auto f = [&](double t) { return oracle::theta_rate(p, u, v, vs, t); };
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n - 1);
    if (k > 0) theta += oracle::simpson(f, static_cast<double>(k - 1) / static_cast<double>(n - 1), t, 8);
    const double w = v - vs;
    const double h = std::sqrt(w * ((v + vs) / 4.0 - p.l(t)) + (t - u) * (t - u));
    pts.emplace_back(h * std::cos(theta), h * std::sin(theta));
  }
  double turn = 0.0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const Vec2 a = pts[k] - pts[k - 1], b = pts[k + 1] - pts[k];
    turn += std::atan2(cross2(a, b), a.dot(b));
  }
  return std::abs(turn);
}

}  // namespace

TEST_CASE("trapezoid section closed forms") {
  const TrapezoidSection s0 = section(base(), 1.6, 0.0);
  CHECK(s0.r == Approx(std::sqrt(1.25)).epsilon(1e-15));
  CHECK(s0.two_ell == 0.0);
  const TrapezoidSection s = section(base(), 1.6, 0.5);
  CHECK(s.h == Approx(std::sqrt(0.24)).epsilon(1e-14));
  CHECK(s.r == Approx(0.7).epsilon(1e-15));
  CHECK(s.two_ell == Approx(0.6).epsilon(1e-15));
  // Trapezoid consistency: h² + ((v* - 2ℓ)/2)² = r² - (t - u)²... at t = u.
  CHECK(s.h * s.h + std::pow((1.6 - 0.6) / 2.0, 2) == Approx(s.r * s.r).epsilon(1e-14));
  for (double t : {0.0, 0.2, 0.5, 0.9}) CHECK(section(base(), 2.0, t).h == Approx(std::abs(t - 0.5)).epsilon(1e-14));
  CHECK(error_of([] { section(base(), 2.5, 0.3); }) == Errc::TrapezoidInfeasible);
  CHECK(error_of([] { section(base(), 0.0, 0.3); }) == Errc::TrapezoidInfeasible);
}

TEST_CASE("height terms satisfy their identities") {
  const oracle::Sine o{0.3};
  for (double vs : {0.9, 1.6, 1.99}) {
    for (double t : {0.0, 0.13, 0.5, 0.77, 1.0}) {
      const HeightTerms h = height_terms(base(), vs, t);
      CHECK(h.h2 == Approx(section(base(), vs, t).h * section(base(), vs, t).h).epsilon(1e-13));
      const double dt = 1e-6;
      const double fd = (std::sqrt(height_terms(base(), vs, std::min(1.0, t + dt)).h2) -
                         std::sqrt(height_terms(base(), vs, std::max(0.0, t - dt)).h2)) /
                        (std::min(1.0, t + dt) - std::max(0.0, t - dt));
      CHECK(h.hdh / std::sqrt(h.h2) == Approx(fd).epsilon(1e-6));
      CHECK(h.h2 - h.hdh * h.hdh == Approx(h.wD).epsilon(1e-12));
      CHECK(oracle::theta_rate(o, 0.5, 2.0, vs, t) == Approx(std::sqrt(h.wD) / h.h2).epsilon(1e-13));
    }
  }
}

TEST_CASE("theta goldens") {
  struct Row {
    double vstar, theta_end, total_turn;
  };
  // Frozen after agreement with the Simpson oracle below.
  const Row rows[] = {
      {0.9, 0.79534632641196878, 2.1462741756295007},
      {1.2, 0.98451721876298937, 1.4021822935612318},
      {1.6, 1.3215649003751151, 0.83661382683324459},
      {1.9, 1.997135837588996, 0.38157308495800846},
      {1.999, 3.0126450503549242, 0.037160510605512891},
  };
  const oracle::Sine o{0.3};
  for (const Row& r : rows) {
    CAPTURE(r.vstar);
    const ThetaProfile p = integrate_theta(base(), r.vstar, 65);
    CHECK(p.theta_end == Approx(r.theta_end).epsilon(1e-12));
    CHECK(p.total_turn == Approx(r.total_turn).epsilon(1e-12));
    CHECK(p.theta.back() == Approx(p.theta_end).epsilon(1e-13));
    if (r.vstar <= 1.9) CHECK(p.theta_end == Approx(oracle::theta_end(o, 0.5, 2.0, r.vstar)).epsilon(1e-10));
  }
}

TEST_CASE("total turn matches the turning of the traced section curve") {
  const oracle::Sine o{0.3};
  for (double vs : {1.2, 1.6}) {
    const double turn = chord_turning(o, 0.5, 2.0, vs, 20001);
    CHECK(integrate_theta(base(), vs, 17).total_turn == Approx(turn).epsilon(1e-3));
  }
}

TEST_CASE("theta is increasing in t and the turn shrinks as v* grows") {
  const ThetaProfile p = integrate_theta(base(), 1.3, 129);
  for (std::size_t i = 1; i < p.theta.size(); ++i) CHECK(p.theta[i] > p.theta[i - 1]);
  double prev = INFINITY;
  for (double vs = 0.9; vs < 2.0; vs += 0.1) {
    const double turn = integrate_theta(base(), vs, 9).total_turn;
    CHECK(turn < prev);
    prev = turn;
  }
  CHECK(integrate_theta(base(), 2.0 - 1e-6, 9).total_turn < 1e-2);
}

TEST_CASE("fold depth below the limit is infeasible") {
  const double lim = vstar_limit(base()).vstar_lim;
  CHECK_NOTHROW(integrate_theta(base(), lim + 1e-3 * (2.0 - lim), 33));
  CHECK(error_of([&] { integrate_theta(base(), lim - 1e-2 * (2.0 - lim), 33); }) == Errc::FoldDepthInfeasible);
  try {
    integrate_theta(base(), 0.44, 33);
  } catch (const LensError& e) {
    REQUIRE(e.where().has_value());
    CHECK(*e.where() == Approx(0.0).scale(1.0).epsilon(1e-3));
  }
  CHECK(error_of([] { integrate_theta(base(), 2.0, 9); }) == Errc::FoldDepthInfeasible);
}

TEST_CASE("module geometry identities") {
  const KiteModule& m = module_16();
  const LensProfile& p = m.tess.profile();
  CHECK(m.corner_00.norm() < 1e-14);
  CHECK(std::abs(m.corner_10.y()) < 1e-14);
  CHECK(std::abs(m.corner_10.z()) < 1e-14);
  CHECK(m.corner_10.x() > 0.0);
  CHECK((m.apex_upper - m.apex_lower).norm() == Approx(1.6).epsilon(1e-13));
  const Vec2 V01 = m.tess.vertex(0, 1);
  for (std::size_t i = 0; i < m.t.size(); i += 16) {
    const double t = m.t[i];
    const Vec3& Xp = m.folded_crease_plus.point(i);
    const Vec3& Xm = m.folded_crease_minus.point(i);
    // Rulings from the cone apex keep their pattern length.
    CHECK((Xp - m.apex_upper).norm() == Approx((m.tess.crease_point(0, 0, 1, t) - V01).norm()).epsilon(1e-12));
    // Middle rulings are parallel to y with length 2ℓ.
    CHECK((Xp - Xm).norm() == Approx(2.0 * p(t)).epsilon(1e-12).scale(1.0));
    if (i > 0 && i + 1 < m.t.size()) CHECK(std::abs((Xp - Xm).normalized().dot(Vec3::UnitY())) == Approx(1.0).epsilon(1e-12));
  }
  // Upper and lower creases mirror each other through the y = const plane.
  const Vec3 mid = 0.5 * (m.folded_crease_plus.point(100) + m.folded_crease_minus.point(100));
  CHECK(std::abs(mid.y() - 0.5 * (m.apex_upper.y() + m.apex_lower.y())) < 1e-12);
}

TEST_CASE("folded creases are unit speed and keep their length") {
  const KiteModule& m = module_16();
  CHECK(m.folded_crease_plus.length() == Approx(m.crease_plus_2d.length()).epsilon(1e-12));
  for (std::size_t i = 0; i < m.t.size(); i += 32) {
    const auto j = m.folded_crease_plus.jet_at(i);
    CHECK(j.d1.norm() == Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(j.d1.dot(j.d2)) < 1e-8);
  }
}

TEST_CASE("tilings of one and two modules") {
  const KiteModule& m = module_16();
  const TiledFolding one = tile(m, 1, 1);
  CHECK(one.tiles.size() == 1);
  CHECK(one.seams.empty());
  // Neighbours within a row share only a corner.
  const TiledFolding two = tile(m, 1, 2);
  CHECK(two.tiles.size() == 2);
  CHECK(two.seams.empty());
  CHECK((two.tiles[1].map.apply(m.corner_00) - two.tiles[0].map.apply(m.corner_10)).norm() < 1e-12);
  const TiledFolding tall = tile(m, 2, 1);
  CHECK(tall.tiles[1].reflected());
  REQUIRE_FALSE(tall.seams.empty());
  for (const Seam& s : tall.seams) {
    CHECK(s.max_gap < 1e-9);
    CHECK(s.normal_angle < 1e-6);
  }
  CHECK_THROWS_AS(tile(m, 0, 1), LensError);
}

TEST_CASE("sweep runs from flat toward the limit, continuously") {
  const auto vals = sweep_values(base(), 8);
  const double lim = vstar_limit(base()).vstar_lim;
  CHECK(vals.front() == Approx(2.0 - 1e-4 * (2.0 - lim)).epsilon(1e-15));
  CHECK(vals.back() == Approx(lim + 1e-4 * (2.0 - lim)).epsilon(1e-15));
  const auto frames = sweep_vstar(base(), 8, 65);
  double max_jump_rate = 0.0;
  for (std::size_t k = 1; k < frames.size(); ++k) {
    CHECK(frames[k].vstar < frames[k - 1].vstar);
    CHECK(frames[k].module.total_turn > frames[k - 1].module.total_turn);
    double jump = 0.0;
    for (std::size_t i = 0; i < 65; ++i) {
      jump = std::max(jump, (frames[k].module.folded_crease_plus.point(i) -
                             frames[k - 1].module.folded_crease_plus.point(i)).norm());
    }
    max_jump_rate = std::max(max_jump_rate, jump / (frames[k - 1].vstar - frames[k].vstar));
  }
  // Crease points move a bounded distance per unit change of v*.
  CHECK(max_jump_rate < 10.0);
}

TEST_CASE("module construction is deterministic") {
  const KiteModule a = build_kite_module(base(), 1.3, 129);
  const KiteModule b = build_kite_module(base(), 1.3, 129);
  for (std::size_t i = 0; i < a.t.size(); ++i) {
    CHECK(a.folded_crease_plus.point(i) == b.folded_crease_plus.point(i));
    CHECK(a.U.to3[i] == b.U.to3[i]);
  }
}

TEST_CASE("sweep of a pattern without a depth limit stays at positive v*") {
  const FoldSetup s = prepare_fold(LensTessellation(LensProfile::sine(0.1259), 0.4829, 1.0906));
  REQUIRE(s.limit.vstar_lim < 0.0);
  const auto vals = sweep_values(s.tess, 4);
  CHECK(vals.back() > 0.0);
  CHECK(vals.back() == Approx(1e-4 * 1.0906));
  CHECK_NOTHROW(integrate_theta(s.tess, vals.back(), 33));
}
