#include "lensfold/folding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "lensfold/errors.hpp"

namespace lensfold {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

constexpr double kQuadTol = 1e-12;
constexpr int kMaxPanels = 4096;
constexpr std::size_t kFeasibilitySamples = 10000;

// Composite Gauss–Kronrod: uniform panels, each with a single 31-point
// rule, doubled until two panel counts agree. Boost's adaptive driver uses
// a relative stopping rule that cannot be met on short pieces where the
// integral is tiny.
template <typename F>
double gk_integrate(F&& f, double a, double b, double* err) {
  if (!(b > a)) {
    *err = 0.0;
    return 0.0;
  }
  const auto panels = [&](int m) {
    double sum = 0.0;
    const double w = (b - a) / m;
    for (int k = 0; k < m; ++k) {
      const double x = a + k * w;
      sum += GK::integrate(f, x, k + 1 == m ? b : x + w, 0, 0.0);
    }
    return sum;
  };
  double coarse = panels(1);
  for (int m = 2; m <= kMaxPanels; m *= 2) {
    const double fine = panels(m);
    const double diff = std::abs(fine - coarse);
    if (diff <= kQuadTol * std::abs(fine) + 1e-16 * (b - a)) {
      *err = diff;
      return fine;
    }
    coarse = fine;
  }
  throw LensError(Errc::QuadratureFailure, "panel refinement did not converge", a);
}
}  // namespace

TrapezoidSection section(const LensTessellation& tess, double vstar, double t) {
  const double u = tess.u(), v = tess.v();
  if (!(vstar > 0.0 && vstar <= v)) throw LensError(Errc::TrapezoidInfeasible, "v* must lie in (0, v]", t);
  if (!(t >= 0.0 && t <= 1.0)) throw LensError(Errc::OutOfDomain, "profile parameter outside [0,1]", t);
  const double l = tess.profile()(t);
  const double r = std::hypot(u - t, v / 2.0 - l);
  if (v > (2.0 * l + 2.0 * r) * (1.0 + 1e-12)) {
    throw LensError(Errc::TrapezoidInfeasible, "v exceeds 2l + 2r", t);
  }
  const double h2 = (v - vstar) * ((v + vstar) / 4.0 - l) + (t - u) * (t - u);
  if (h2 < 0.0) throw LensError(Errc::TrapezoidInfeasible, "negative squared height", t);
  return {t, r, std::sqrt(h2), 2.0 * l, vstar};
}

HeightTerms height_terms(const LensTessellation& tess, double vstar, double t) {
  const double u = tess.u(), v = tess.v();
  const ProfileJet j = tess.profile().jet(t);
  const double w = v - vstar;
  const double D = (v + vstar) / 4.0 - j.value - j.d1 * (u - t) - 0.25 * w * j.d1 * j.d1;
  return {w * ((v + vstar) / 4.0 - j.value) + (t - u) * (t - u), (t - u) - 0.5 * w * j.d1, w * D};
}

namespace {

void check_fold_depth(const LensTessellation& tess, double vstar) {
  const double v = tess.v();
  if (!(vstar > 0.0)) throw LensError(Errc::TrapezoidInfeasible, "v* must be positive");
  if (!(vstar < v)) throw LensError(Errc::FoldDepthInfeasible, "v* must lie below v");
  // w·D > 0 is exactly h'² < 1; scan for its minimum and refine.
  const auto wD = [&](double t) { return height_terms(tess, vstar, t).wD; };
  std::size_t best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  const auto n = kFeasibilitySamples;
  for (std::size_t k = 0; k < n; ++k) {
    const double val = wD(static_cast<double>(k) / (n - 1));
    if (val < best_val) {
      best_val = val;
      best = k;
    }
  }
  double t_min = static_cast<double>(best) / (n - 1);
  const double lo = static_cast<double>(best == 0 ? 0 : best - 1) / (n - 1);
  const double hi = static_cast<double>(std::min(best + 1, n - 1)) / (n - 1);
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::brent_find_minima(wD, lo, hi, 52, iters);
  if (r.second < best_val) {
    best_val = r.second;
    t_min = r.first;
  }
  if (!(best_val > 0.0)) throw LensError(Errc::FoldDepthInfeasible, "|dh/dt| reaches 1; v* is below the limit", t_min);
}

double integrand(const LensTessellation& tess, double vstar, double t) {
  const HeightTerms h = height_terms(tess, vstar, t);
  return std::sqrt(std::max(h.wD, 0.0)) / h.h2;
}

// Integral over [a, b], split at u where the integrand peaks.
double integrate_piece(const LensTessellation& tess, double vstar, double a, double b, double& err_max) {
  const auto f = [&](double t) { return integrand(tess, vstar, t); };
  const double u = tess.u();
  double sum = 0.0;
  const auto one = [&](double x, double y) {
    if (y <= x) return;
    double err = 0.0;
    const double val = gk_integrate(f, x, y, &err);
    if (!std::isfinite(val)) throw LensError(Errc::QuadratureFailure, "non-finite integral", x);
    err_max = std::max(err_max, err);
    sum += val;
  };
  if (u > a && u < b) {
    one(a, u);
    one(u, b);
  } else {
    one(a, b);
  }
  return sum;
}

double tangent_angle_offset(const HeightTerms& h) { return std::atan2(std::sqrt(std::max(h.wD, 0.0)), h.hdh); }

}  // namespace

ThetaProfile integrate_theta(const LensTessellation& tess, double vstar, std::span<const double> ts) {
  if (ts.empty()) throw LensError(Errc::InvalidConfig, "no sample parameters");
  for (std::size_t k = 0; k < ts.size(); ++k) {
    if (!(ts[k] >= 0.0 && ts[k] <= 1.0)) throw LensError(Errc::OutOfDomain, "profile parameter outside [0,1]", ts[k]);
    if (k > 0 && !(ts[k] > ts[k - 1])) throw LensError(Errc::InvalidConfig, "sample parameters must increase", ts[k]);
  }
  check_fold_depth(tess, vstar);
  const double h_eps = 1e-12 * tess.v();
  for (double t : ts) {
    if (!(std::sqrt(height_terms(tess, vstar, t).h2) > h_eps)) {
      throw LensError(Errc::SingularHeight, "trapezoid height vanishes", t);
    }
  }

  ThetaProfile out;
  out.t.assign(ts.begin(), ts.end());
  out.theta.resize(ts.size());
  double acc = integrate_piece(tess, vstar, 0.0, ts[0], out.quadrature_error);
  out.theta[0] = acc;
  for (std::size_t k = 1; k < ts.size(); ++k) {
    acc += integrate_piece(tess, vstar, ts[k - 1], ts[k], out.quadrature_error);
    out.theta[k] = acc;
  }
  double tail_err = 0.0;
  const double rest = integrate_piece(tess, vstar, ts.back(), 1.0, tail_err);
  out.theta_end = acc + rest;

  // Independent pass over [0,1] in one piece (two around u).
  double whole_err = 0.0;
  const double whole = integrate_piece(tess, vstar, 0.0, 1.0, whole_err);
  out.quadrature_error = std::max({out.quadrature_error, tail_err, whole_err});
  if (std::abs(whole - out.theta_end) > 1e-8 * std::max(out.theta_end, 1e-300)) {
    throw LensError(Errc::QuadratureFailure,
                    "cumulative and single-pass integrals disagree by " + std::to_string(whole - out.theta_end));
  }
  for (std::size_t k = 1; k < ts.size(); ++k) {
    if (!(out.theta[k] > out.theta[k - 1])) throw LensError(Errc::QuadratureFailure, "theta not increasing", ts[k]);
  }
  out.total_turn = tangent_angle_offset(height_terms(tess, vstar, 0.0)) - out.theta_end -
                   tangent_angle_offset(height_terms(tess, vstar, 1.0));
  return out;
}

ThetaProfile integrate_theta(const LensTessellation& tess, double vstar, std::size_t n) {
  if (n < 2) throw LensError(Errc::InvalidConfig, "need at least two samples");
  std::vector<double> ts(n);
  for (std::size_t k = 0; k < n; ++k) ts[k] = static_cast<double>(k) / static_cast<double>(n - 1);
  ts.back() = 1.0;
  return integrate_theta(tess, vstar, ts);
}

Vec3 oriented_normal(const Vec3& tangent3, const Vec3& ruling3, const Vec2& tangent2, const Vec2& ruling2) {
  const double orient = cross2(tangent2, ruling2) >= 0.0 ? 1.0 : -1.0;
  return orient * tangent3.cross(ruling3).normalized();
}

namespace {

// Exact jets of the folded creases from the closed forms of h and θ'.
struct FoldedCreaseJets {
  LensTessellation tess;
  double vstar = 0.0;
  std::vector<double> t, theta;
  Eigen::Vector2d origin;
  double ca = 1.0, sa = 0.0;
  double length = 0.0;

  double theta_at(double x) const {
    const auto it = std::upper_bound(t.begin(), t.end(), x);
    const std::size_t k = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
    if (x <= t[k]) return theta[k];
    double err = 0.0;
    const auto f = [this](double y) { return integrand(tess, vstar, y); };
    return theta[k] + gk_integrate(f, t[k], x, &err);
  }

  // Position and first two t-derivatives, before the arclength change.
  void at(double x, int sign, Vec3& p, Vec3& d1, Vec3& d2) const {
    const double w = tess.v() - vstar;
    const ProfileJet l = tess.profile().jet(x);
    const HeightTerms ht = height_terms(tess, vstar, x);
    const double h = std::sqrt(ht.h2);
    const double hp = ht.hdh / h;
    const double hdh_p = 1.0 - 0.5 * w * l.d2;
    const double hpp = (hdh_p - hp * hp) / h;
    const double rw = std::sqrt(std::max(ht.wD, 0.0));
    const double th = theta_at(x);
    const double thp = rw / ht.h2;
    const double wD_p = ht.hdh * w * l.d2;
    const double thpp = (rw > 0.0 ? wD_p / (2.0 * rw * ht.h2) : 0.0) - rw * 2.0 * ht.hdh / (ht.h2 * ht.h2);
    const Eigen::Vector2d e(std::cos(th), -std::sin(th)), e_perp(-std::sin(th), -std::cos(th));
    const Eigen::Vector2d q = h * e - origin;
    const Eigen::Vector2d q1 = hp * e + h * thp * e_perp;
    const Eigen::Vector2d q2 = (hpp - h * thp * thp) * e + (2.0 * hp * thp + h * thpp) * e_perp;
    const auto rot = [this](const Eigen::Vector2d& a) {
      return Eigen::Vector2d(ca * a.x() + sa * a.y(), -sa * a.x() + ca * a.y());
    };
    const Eigen::Vector2d r0 = rot(q), r1 = rot(q1), r2 = rot(q2);
    p = {r0.x(), sign * l.value, r0.y()};
    d1 = {r1.x(), sign * l.d1, r1.y()};
    d2 = {r2.x(), sign * l.d2, r2.y()};
  }

  SampledCurve3D::Evaluator evaluator(int sign) const {
    const auto second = [this, sign](double s, Vec3& p, Vec3& d1, Vec3& d2) {
      Vec3 g1, g2;
      at(tess.profile().t_at_arclength(std::clamp(s, 0.0, length)), sign, p, g1, g2);
      const double sp2 = g1.squaredNorm();
      d1 = g1 / std::sqrt(sp2);
      d2 = (g2 - (g1.dot(g2) / sp2) * g1) / sp2;
    };
    return [this, second](double s) {
      SampledCurve3D::Jet jet;
      second(s, jet.p, jet.d1, jet.d2);
      const double step = 1e-4 * length;
      const double sa_ = std::max(0.0, s - step), sb_ = std::min(length, s + step);
      Vec3 p, a1, a2, b1, b2;
      second(sa_, p, a1, a2);
      second(sb_, p, b1, b2);
      jet.d3 = (b2 - a2) / (sb_ - sa_);
      return jet;
    };
  }
};

KiteModule assemble(const LensTessellation& tess, double vstar, std::size_t n) {
  const LensProfile& prof = tess.profile();
  const double length = prof.total_arclength();
  std::vector<double> s(n), t(n);
  for (std::size_t k = 0; k < n; ++k) {
    s[k] = length * static_cast<double>(k) / static_cast<double>(n - 1);
    t[k] = prof.t_at_arclength(s[k]);
  }
  s.back() = length;
  t.front() = 0.0;
  t.back() = 1.0;

  ThetaProfile th = integrate_theta(tess, vstar, t);

  // Polar curve about the projection of f(V₀,₁), angle measured clockwise
  // in the xz-plane, then rotated so the chord points along +x.
  std::vector<Eigen::Vector2d> xz(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double h = std::sqrt(height_terms(tess, vstar, t[k]).h2);
    xz[k] = {h * std::cos(th.theta[k]), -h * std::sin(th.theta[k])};
  }
  const Eigen::Vector2d origin = xz.front();
  const Eigen::Vector2d chord = xz.back() - origin;
  const double ca = chord.x() / chord.norm(), sa = chord.y() / chord.norm();
  const auto place = [&](const Eigen::Vector2d& p) {
    const Eigen::Vector2d d = p - origin;
    return Eigen::Vector2d(ca * d.x() + sa * d.y(), -sa * d.x() + ca * d.y());
  };
  const Eigen::Vector2d apex = place(Eigen::Vector2d::Zero());

  auto jets = std::make_shared<FoldedCreaseJets>(
      FoldedCreaseJets{tess, vstar, t, th.theta, origin, ca, sa, length});

  std::vector<Vec3> plus(n), minus(n);
  for (std::size_t k = 0; k < n; ++k) {
    Eigen::Vector2d q = place(xz[k]);
    if (k == 0) q = Eigen::Vector2d::Zero();
    if (k + 1 == n) q = {chord.norm(), 0.0};
    const double l = (k == 0 || k + 1 == n) ? 0.0 : prof(t[k]);
    plus[k] = {q.x(), l, q.y()};
    minus[k] = {q.x(), -l, q.y()};
  }

  SampledCurve2D c2p = tess.crease_curve(0, 0, 1, n);
  SampledCurve2D c2m = tess.crease_curve(0, 0, -1, n);
  KiteModule m{tess,
               vstar,
               t,
               th.theta,
               std::move(c2p),
               std::move(c2m),
               SampledCurve3D(s, plus, [jets](double x) { return jets->evaluator(1)(x); }),
               SampledCurve3D(s, minus, [jets](double x) { return jets->evaluator(-1)(x); }),
               {},
               {},
               {},
               plus.front(),
               plus.back(),
               Vec3(apex.x(), vstar / 2.0, apex.y()),
               Vec3(apex.x(), -vstar / 2.0, apex.y()),
               th.theta_end,
               th.total_turn};

  const Vec2 v01 = tess.vertex(0, 1), v0m1 = tess.vertex(0, -1);
  m.U.id = PatchId::U;
  m.M.id = PatchId::M;
  m.L.id = PatchId::L;
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 p2 = m.crease_plus_2d.point(k);
    const Vec2 q2 = m.crease_minus_2d.point(k);
    m.U.from3.push_back(m.apex_upper);
    m.U.to3.push_back(plus[k]);
    m.U.from2.push_back(v01);
    m.U.to2.push_back(p2);
    m.M.from3.push_back(plus[k]);
    m.M.to3.push_back(minus[k]);
    m.M.from2.push_back(p2);
    m.M.to2.push_back(q2);
    m.L.from3.push_back(m.apex_lower);
    m.L.to3.push_back(minus[k]);
    m.L.from2.push_back(v0m1);
    m.L.to2.push_back(q2);
  }
  return m;
}

}  // namespace

KiteModule build_kite_module(const LensTessellation& tess, double vstar, std::size_t n) {
  if (n < 8) throw LensError(Errc::InvalidConfig, "need at least 8 crease samples");
  return assemble(tess, vstar, n);
}

TriangleMesh mesh_patch(const KiteModule& m, PatchId id) {
  TriangleMesh mesh;
  const RuledPatch& p = m.patch(id);
  const std::size_t n = p.to3.size();
  const auto add = [&mesh](const Vec3& x, const Vec2& q) {
    mesh.vertices.push_back(x);
    mesh.uv.push_back(q);
    return static_cast<int>(mesh.vertices.size() - 1);
  };
  const auto tri = [&mesh](int a, int b, int c) {
    const Vec2& A = mesh.uv[a];
    const double area = cross2(mesh.uv[b] - A, mesh.uv[c] - A);
    if (std::abs(area) <= 1e-14) return;
    if (area > 0.0) mesh.faces.push_back({a, b, c});
    else mesh.faces.push_back({a, c, b});
  };
  if (id == PatchId::M) {
    std::vector<int> top(n), bottom(n);
    for (std::size_t k = 0; k < n; ++k) {
      top[k] = add(p.from3[k], p.from2[k]);
      // The lens tips are shared by both creases.
      bottom[k] = (k == 0 || k + 1 == n) ? top[k] : add(p.to3[k], p.to2[k]);
    }
    for (std::size_t k = 0; k + 1 < n; ++k) {
      tri(top[k], bottom[k], top[k + 1]);
      tri(top[k + 1], bottom[k], bottom[k + 1]);
    }
  } else {
    const int apex = add(p.from3[0], p.from2[0]);
    std::vector<int> ring(n);
    for (std::size_t k = 0; k < n; ++k) ring[k] = add(p.to3[k], p.to2[k]);
    for (std::size_t k = 0; k + 1 < n; ++k) tri(apex, ring[k], ring[k + 1]);
  }
  return mesh;
}

std::array<Vec3, 2> kite_edge(const KiteModule& m, KiteEdge e) {
  switch (e) {
    case KiteEdge::UpperStart: return {m.corner_00, m.apex_upper};
    case KiteEdge::UpperEnd: return {m.apex_upper, m.corner_10};
    case KiteEdge::LowerEnd: return {m.corner_10, m.apex_lower};
    case KiteEdge::LowerStart: return {m.apex_lower, m.corner_00};
  }
  return {};
}

std::array<Vec2, 2> kite_edge_2d(const KiteModule& m, KiteEdge e) {
  const Vec2 v00 = m.tess.vertex(0, 0), v10 = m.tess.vertex(1, 0);
  const Vec2 v01 = m.tess.vertex(0, 1), v0m1 = m.tess.vertex(0, -1);
  switch (e) {
    case KiteEdge::UpperStart: return {v00, v01};
    case KiteEdge::UpperEnd: return {v01, v10};
    case KiteEdge::LowerEnd: return {v10, v0m1};
    case KiteEdge::LowerStart: return {v0m1, v00};
  }
  return {};
}

Vec3 kite_edge_normal(const KiteModule& m, KiteEdge e) {
  const bool upper = (e == KiteEdge::UpperStart || e == KiteEdge::UpperEnd);
  const bool start = (e == KiteEdge::UpperStart || e == KiteEdge::LowerStart);
  const SampledCurve3D& c3 = upper ? m.folded_crease_plus : m.folded_crease_minus;
  const SampledCurve2D& c2 = upper ? m.crease_plus_2d : m.crease_minus_2d;
  const std::size_t k = start ? 0 : c3.size() - 1;
  const Vec3 apex3 = upper ? m.apex_upper : m.apex_lower;
  const Vec2 apex2 = upper ? m.tess.vertex(0, 1) : m.tess.vertex(0, -1);
  return oriented_normal(c3.jet_at(k).d1, apex3 - c3.point(k), c2.jet_at(k).d1, apex2 - c2.point(k));
}

TiledFolding tile(const KiteModule& module, int rows, int cols, const Tolerances& tol) {
  if (rows < 1 || cols < 1) throw LensError(Errc::InvalidConfig, "tiling needs rows, cols >= 1");
  TiledFolding out;
  out.module = std::make_shared<const KiteModule>(module);
  out.rows = rows;
  out.cols = cols;
  const KiteModule& m = *out.module;

  const Vec3 Ma = 0.5 * (m.apex_upper + m.corner_10);
  const Vec3 Mb = 0.5 * (m.corner_00 + m.apex_upper);
  const Vec3 Mc = 0.5 * (m.corner_10 + m.apex_lower);
  const Vec3 TX = 2.0 * (Ma - Mb);
  const Vec3 TY = 2.0 * (Ma - Mc);
  const Vec2 ma = 0.5 * (m.tess.vertex(0, 1) + m.tess.vertex(1, 0));
  const Vec2 tx(1.0, 0.0), ty(0.0, m.tess.v());

  for (int k = 0; k < rows; ++k) {
    for (int i = 0; i < cols; ++i) {
      Tile t;
      t.col = i;
      t.row = k;
      const int half = (k >= 0) ? k / 2 : -((-k + 1) / 2);
      if (k % 2 == 0) {
        t.map.offset = i * TX + half * TY;
        t.map2d.offset = i * tx + half * ty;
      } else {
        t.map.linear = -Eigen::Matrix3d::Identity();
        t.map.offset = 2.0 * Ma + i * TX + half * TY;
        t.map.flip_normals = true;
        t.map2d.sign = -1.0;
        t.map2d.offset = 2.0 * ma + i * tx + half * ty;
      }
      out.tiles.push_back(t);
    }
  }

  double scale = 1.0;
  for (KiteEdge e : {KiteEdge::UpperStart, KiteEdge::UpperEnd, KiteEdge::LowerEnd, KiteEdge::LowerStart}) {
    const auto ends = kite_edge(m, e);
    scale = std::max(scale, (ends[1] - ends[0]).norm());
  }
  const double match = 1e-6 * scale;
  const std::array<KiteEdge, 4> edges{KiteEdge::UpperStart, KiteEdge::UpperEnd, KiteEdge::LowerEnd,
                                      KiteEdge::LowerStart};
  for (std::size_t a = 0; a < out.tiles.size(); ++a) {
    for (std::size_t b = a + 1; b < out.tiles.size(); ++b) {
      const Tile& A = out.tiles[a];
      const Tile& B = out.tiles[b];
      for (KiteEdge ea : edges) {
        const auto pa = kite_edge(m, ea);
        const Vec3 a0 = A.map.apply(pa[0]), a1 = A.map.apply(pa[1]);
        for (KiteEdge eb : edges) {
          const auto pb = kite_edge(m, eb);
          const Vec3 b0 = B.map.apply(pb[0]), b1 = B.map.apply(pb[1]);
          const bool reversed = (a0 - b1).norm() < match && (a1 - b0).norm() < match;
          const bool same = (a0 - b0).norm() < match && (a1 - b1).norm() < match;
          if (!reversed && !same) continue;
          Seam seam;
          seam.tile_a = a;
          seam.tile_b = b;
          seam.edge_a = ea;
          seam.edge_b = eb;
          for (int q = 0; q <= 16; ++q) {
            const double lam = q / 16.0;
            const Vec3 xa = a0 + lam * (a1 - a0);
            const Vec3 xb = reversed ? Vec3(b1 + lam * (b0 - b1)) : Vec3(b0 + lam * (b1 - b0));
            seam.max_gap = std::max(seam.max_gap, (xa - xb).norm());
          }
          // The crease pattern must agree on the shared edge as well.
          const auto qa = kite_edge_2d(m, ea);
          const auto qb = kite_edge_2d(m, eb);
          const Vec2 qa0 = A.map2d.apply(qa[0]), qa1 = A.map2d.apply(qa[1]);
          const Vec2 qb0 = B.map2d.apply(qb[0]), qb1 = B.map2d.apply(qb[1]);
          const double gap2d = reversed ? std::max((qa0 - qb1).norm(), (qa1 - qb0).norm())
                                        : std::max((qa0 - qb0).norm(), (qa1 - qb1).norm());
          if (seam.max_gap > tol.seam * scale || gap2d > 1e-12 * scale) {
            throw LensError(Errc::TilingInconsistent,
                            "seam between tiles " + std::to_string(a) + " and " + std::to_string(b) + " is open");
          }
          const Vec3 na = A.map.apply_normal(kite_edge_normal(m, ea));
          const Vec3 nb_raw = B.map.apply_vector(kite_edge_normal(m, eb));
          const Vec3 na_raw = A.map.apply_vector(kite_edge_normal(m, ea));
          const Vec3 nb = B.map.apply_normal(kite_edge_normal(m, eb));
          seam.normal_angle_raw = angle_between(na_raw, nb_raw);
          seam.normal_angle = angle_between(na, nb);
          out.seams.push_back(seam);
        }
      }
    }
  }
  return out;
}

std::vector<double> sweep_values(const LensTessellation& tess, std::size_t k_frames) {
  if (k_frames < 2) throw LensError(Errc::InvalidConfig, "a sweep needs at least two frames");
  // A limit at or below zero means the depth condition never binds; the
  // sweep then runs down toward coincident apices instead.
  const double lim = std::max(0.0, vstar_limit(tess).vstar_lim);
  const double v = tess.v();
  const double margin = 1e-4 * (v - lim);
  const double hi = v - margin, lo = lim + margin;
  std::vector<double> out(k_frames);
  for (std::size_t j = 0; j < k_frames; ++j) {
    out[j] = hi + (lo - hi) * static_cast<double>(j) / static_cast<double>(k_frames - 1);
  }
  out.back() = lo;
  return out;
}

std::vector<SweepFrame> sweep_vstar(const LensTessellation& tess, std::size_t k_frames, std::size_t n) {
  std::vector<SweepFrame> frames;
  for (double vs : sweep_values(tess, k_frames)) frames.push_back({vs, build_kite_module(tess, vs, n)});
  return frames;
}

FoldSetup prepare_fold(const LensTessellation& tess, const Tolerances& tol) {
  const VisibilityResult vis = visibility_check(tess, 1024, 2048, tol);
  if (!vis.visible_vertex) {
    std::string why = "no vertex V_{n,1} sees the whole crease";
    if (!vis.failures.empty()) why += " (e.g. n=" + std::to_string(vis.failures.front().candidate) + ": " +
                                      vis.failures.front().reason + ")";
    throw LensError(Errc::InfeasiblePattern, why);
  }
  LensTessellation shifted = tess.shifted(*vis.visible_vertex);
  const VStarLimit lim = vstar_limit(shifted);
  return {shifted, *vis.visible_vertex, lim};
}

}  // namespace lensfold
