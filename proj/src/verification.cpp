#include "lensfold/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include "lensfold/errors.hpp"

namespace lensfold {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

MV opposite(MV mv) { return mv == MV::Mountain ? MV::Valley : MV::Mountain; }

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

Vec3 unit_tangent(const SampledCurve3D& c, std::size_t i) { return c.jet_at(i).d1.normalized(); }
Vec2 unit_tangent(const SampledCurve2D& c, std::size_t i) { return c.jet_at(i).d1.normalized(); }

double fold_angle(const Vec3& PL, const Vec3& PR, const Vec3& T) {
  return std::atan2(PL.cross(PR).dot(T), PL.dot(PR));
}

double polyline_length3(const std::vector<Vec3>& p) {
  double s = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) s += (p[i] - p[i - 1]).norm();
  return s;
}

double polyline_length2(const std::vector<Vec2>& p) {
  double s = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) s += (p[i] - p[i - 1]).norm();
  return s;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

CheckRecord make_record(std::string name, double residual, double tolerance, double worst_sample, std::string detail) {
  CheckRecord r;
  r.name = std::move(name);
  r.max_residual = residual;
  r.tolerance = tolerance;
  r.pass = residual <= tolerance;  // false for NaN
  r.worst_sample = worst_sample;
  r.status = r.pass ? "pass" : "fail";
  r.detail = std::move(detail);
  return r;
}

namespace {

CreaseSides assemble_sides(std::string name, SampledCurve3D crease3d, SampledCurve2D crease2d, std::vector<Vec3> R_L,
                           std::vector<Vec3> R_R, std::vector<Vec2> r_L, std::vector<Vec2> r_R,
                           std::optional<MV> expected, std::vector<Vec3> T3, std::vector<Vec3> kv,
                           std::vector<Vec2> t2, std::vector<double> k2) {
  const std::size_t n = crease3d.size();
  if (crease2d.size() != n || R_L.size() != n || R_R.size() != n || r_L.size() != n || r_R.size() != n) {
    throw LensError(Errc::InvalidSurfaceNormal, "crease side data has mismatched sample counts");
  }
  CreaseSides cs{std::move(name), std::move(crease3d), std::move(crease2d), {}, {}, {}, {}, {}, {}, {}, {},
                 expected, std::move(T3), std::move(kv), {}, {}};
  cs.P_L.resize(n);
  cs.P_R.resize(n);
  cs.theta_L.resize(n);
  cs.theta_R.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    R_L[i].normalize();
    R_R[i].normalize();
    r_L[i].normalize();
    r_R[i].normalize();
    cs.P_L[i] = oriented_normal(cs.T[i], R_L[i], t2[i], r_L[i]);
    cs.P_R[i] = oriented_normal(cs.T[i], R_R[i], t2[i], r_R[i]);
    cs.theta_L[i] = angle_between(t2[i], r_L[i]);
    cs.theta_R[i] = angle_between(t2[i], r_R[i]);
  }
  cs.R_L = std::move(R_L);
  cs.R_R = std::move(R_R);
  cs.r_L = std::move(r_L);
  cs.r_R = std::move(r_R);
  cs.t = std::move(t2);
  cs.k = std::move(k2);
  return cs;
}

}  // namespace

CreaseSides make_crease_sides(std::string name, SampledCurve3D crease3d, SampledCurve2D crease2d,
                              std::vector<Vec3> R_L, std::vector<Vec3> R_R, std::vector<Vec2> r_L,
                              std::vector<Vec2> r_R, std::optional<MV> expected) {
  const std::size_t n = crease2d.size();
  std::vector<Vec2> t2(n);
  std::vector<double> k2(n);
  std::vector<Vec3> T3(crease3d.size()), kv(crease3d.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = crease2d.jet_at(i);
    t2[i] = j.d1.normalized();
    k2[i] = cross2(j.d1, j.d2) / std::pow(j.d1.norm(), 3);
  }
  for (std::size_t i = 0; i < T3.size(); ++i) {
    const auto j = crease3d.jet_at(i);
    T3[i] = j.d1.normalized();
    kv[i] = curvature_vector(j.d1, j.d2);
  }
  return assemble_sides(std::move(name), std::move(crease3d), std::move(crease2d), std::move(R_L), std::move(R_R),
                        std::move(r_L), std::move(r_R), expected, std::move(T3), std::move(kv), std::move(t2),
                        std::move(k2));
}

namespace {

// `discrete`: drop the exact jets and use finite differences on the samples.
CreaseSides module_sides(const KiteModule& m, int sign, bool discrete) {
  const bool upper = sign > 0;
  const SampledCurve3D& exact = upper ? m.folded_crease_plus : m.folded_crease_minus;
  const SampledCurve3D c3 = discrete ? SampledCurve3D(exact.arclengths(), exact.points()) : exact;
  const SampledCurve2D& c2 = upper ? m.crease_plus_2d : m.crease_minus_2d;
  const std::size_t n = c3.size();
  std::vector<Vec3> RL(n), RR(n);
  std::vector<Vec2> rL(n), rR(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (upper) {
      RL[i] = m.apex_upper - c3.point(i);
      rL[i] = m.tess.vertex(0, 1) - c2.point(i);
      RR[i] = Vec3(0.0, -1.0, 0.0);
      rR[i] = Vec2(0.0, -1.0);
    } else {
      RL[i] = Vec3(0.0, 1.0, 0.0);
      rL[i] = Vec2(0.0, 1.0);
      RR[i] = m.apex_lower - c3.point(i);
      rR[i] = m.tess.vertex(0, -1) - c2.point(i);
    }
  }
  return make_crease_sides(upper ? "plus" : "minus", c3, c2, std::move(RL), std::move(RR), std::move(rL),
                           std::move(rR), LensTessellation::crease_mv(0));
}

}  // namespace

CreaseSides crease_sides(const KiteModule& m, int sign) { return module_sides(m, sign, false); }

CreaseSides transform_sides(const CreaseSides& cs, const TileTransform& map, const PlanarTransform& map2d,
                            std::optional<MV> expected) {
  const std::size_t n = cs.crease3d.size();
  std::vector<Vec3> pts(n), RL(n), RR(n);
  std::vector<Vec2> q(n), rL(n), rR(n);
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = map.apply(cs.crease3d.point(i));
    RL[i] = map.apply_vector(cs.R_L[i]);
    RR[i] = map.apply_vector(cs.R_R[i]);
    q[i] = map2d.apply(cs.crease2d.point(i));
    rL[i] = map2d.apply_vector(cs.r_L[i]);
    rR[i] = map2d.apply_vector(cs.r_R[i]);
  }
  SampledCurve2D::Evaluator eval;
  if (cs.crease2d.has_evaluator()) {
    eval = [base = cs.crease2d, map2d](double s) {
      auto j = base.jet(s);
      j.p = map2d.apply(j.p);
      j.d1 = map2d.apply_vector(j.d1);
      j.d2 = map2d.apply_vector(j.d2);
      j.d3 = map2d.apply_vector(j.d3);
      return j;
    };
  }
  std::vector<Vec2> t2(n);
  std::vector<Vec3> T3(n), kv(n);
  for (std::size_t i = 0; i < n; ++i) {
    t2[i] = map2d.apply_vector(cs.t[i]);
    T3[i] = map.apply_vector(cs.T[i]);
    kv[i] = map.apply_vector(cs.kv[i]);
  }
  // Translations and point reflections keep the signed curvature.
  return assemble_sides(cs.name, SampledCurve3D(cs.crease3d.arclengths(), pts),
                        SampledCurve2D(cs.crease2d.arclengths(), q, eval), std::move(RL), std::move(RR),
                        std::move(rL), std::move(rR), expected, std::move(T3), std::move(kv), std::move(t2), cs.k);
}

CheckRecord check_bisection(const CreaseSides& cs, const Tolerances& tol) {
  double worst = 0.0, where = 0.0;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < cs.crease3d.size(); ++i) {
    // No osculating plane where the crease is straight; K vanishes with k.
    if (std::abs(cs.k[i]) <= tol.k_min) {
      ++skipped;
      continue;
    }
    const double K = cs.kv[i].norm();
    if (K <= tol.k_min) {
      throw LensError(Errc::FrameUndefined, "curvature below k_min; the curve is locally straight", cs.crease3d.s(i));
    }
    const Vec3 B0 = cs.T[i].cross(cs.kv[i] / K);
    const Vec3 B = B0.dot(cs.P_L[i]) >= 0.0 ? B0 : Vec3(-B0);
    const double res = std::abs(angle_between(cs.P_L[i], B) - angle_between(B, cs.P_R[i]));
    if (!(res <= worst)) {
      worst = res;
      where = cs.crease3d.s(i);
    }
  }
  return make_record("bisection_" + cs.name, worst, tol.angle, where,
                     skipped ? std::to_string(skipped) + " straight samples skipped" : std::string());
}

FoldAngleResult check_fold_angle_and_MV(const CreaseSides& cs, const Tolerances& tol) {
  FoldAngleResult out;
  const std::size_t n = cs.crease3d.size();
  out.rho.resize(n);
  double max_abs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.rho[i] = fold_angle(cs.P_L[i], cs.P_R[i], cs.T[i]);
    max_abs = std::max(max_abs, std::abs(out.rho[i]));
  }
  if (max_abs < tol.fold_angle_floor) {
    out.not_a_crease = true;
    out.record = make_record("fold_angle_" + cs.name, max_abs, tol.fold_angle_floor, 0.0, "flat: not a crease");
    out.record.pass = false;
    out.record.status = "NotACrease";
    return out;
  }
  // Sign changes among samples clearly away from zero.
  int last = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(out.rho[i]) < tol.fold_angle_floor) continue;
    const int sg = out.rho[i] > 0.0 ? 1 : -1;
    if (last != 0 && sg != last) {
      throw LensError(Errc::MVInconsistent, "fold angle changes sign along crease " + cs.name, cs.crease3d.s(i));
    }
    last = sg;
  }
  out.mv = last > 0 ? MV::Mountain : MV::Valley;
  const MV target = cs.expected.value_or(out.mv);
  const double sigma = target == MV::Mountain ? 1.0 : -1.0;
  double min_signed = std::numeric_limits<double>::infinity(), where = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (sigma * out.rho[i] < min_signed) {
      min_signed = sigma * out.rho[i];
      where = cs.crease3d.s(i);
    }
  }
  std::string detail = std::string(to_string(out.mv)) + ", min |rho| " + fmt(min_signed);
  if (cs.expected) detail += ", expected " + std::string(to_string(*cs.expected));
  out.record = make_record("fold_angle_" + cs.name, tol.fold_angle_floor - min_signed, 0.0, where, detail);
  return out;
}

CurvatureRelationResult check_curvature_relation(const CreaseSides& cs, const Tolerances& tol) {
  const std::size_t n = cs.crease3d.size();
  std::vector<double> khat(n), res(n), excess(n);
  double kmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& T = cs.T[i];
    const Vec3& kv = cs.kv[i];
    const double K = kv.norm();
    const double sB = T.cross(kv).dot(cs.P_L[i]) >= 0.0 ? 1.0 : -1.0;
    const double rho = fold_angle(cs.P_L[i], cs.P_R[i], T);
    khat[i] = cs.k[i];
    kmax = std::max(kmax, std::abs(khat[i]));
    res[i] = std::abs(sB * K * std::cos(0.5 * rho) - khat[i]);
    // Both sides vanish together at straight points.
    excess[i] = std::abs(khat[i]) <= tol.k_min ? -std::numeric_limits<double>::infinity() : std::abs(khat[i]) - K;
  }
  const auto worst = [&](const std::vector<double>& v) {
    const auto it = std::max_element(v.begin(), v.end());
    return std::pair{*it, cs.crease3d.s(static_cast<std::size_t>(it - v.begin()))};
  };
  const auto [r, rs] = worst(res);
  const auto [e, es] = worst(excess);
  CurvatureRelationResult out;
  out.relation = make_record("curvature_relation_" + cs.name, r / kmax, tol.curvature_relation, rs);
  out.increase = make_record("curvature_increase_" + cs.name, e, 0.0, es, "max of |k| - K, must be negative");
  out.increase.pass = e < 0.0;
  out.increase.status = out.increase.pass ? "pass" : "fail";
  return out;
}

CheckRecord check_geodesic_equality(const CreaseSides& cs, const Tolerances& tol) {
  const std::size_t n = cs.crease3d.size();
  double kmax = 0.0, worst = 0.0, where = 0.0;
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) {
    // (K N)·(P × T) on each side.
    const double gl = cs.kv[i].dot(cs.P_L[i].cross(cs.T[i]));
    const double gr = cs.kv[i].dot(cs.P_R[i].cross(cs.T[i]));
    const double k = cs.k[i];
    kmax = std::max(kmax, std::abs(k));
    diff[i] = std::max({std::abs(gl - gr), std::abs(gl - k), std::abs(gr - k)});
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (diff[i] / kmax > worst) {
      worst = diff[i] / kmax;
      where = cs.crease3d.s(i);
    }
  }
  return make_record("geodesic_" + cs.name, worst, tol.geo, where);
}

namespace {

struct PatchFrame {
  PatchId id;
  const RuledPatch* patch;
  const std::vector<Vec3>* normals;
  const CreaseSides* crease;  // crease the rulings start from
  bool left;                  // side of that crease
};

}  // namespace

namespace {

RulingMVResult ruling_mv_impl(const KiteModule& m, const CreaseSides& plus, const CreaseSides& minus,
                              const Tolerances& tol) {
  RulingMVResult out;
  out.crease_plus = check_fold_angle_and_MV(plus, tol).mv;
  out.crease_minus = check_fold_angle_and_MV(minus, tol).mv;

  const std::array<PatchFrame, 3> patches{PatchFrame{PatchId::U, &m.U, &plus.P_L, &plus, true},
                                          PatchFrame{PatchId::M, &m.M, &plus.P_R, &plus, false},
                                          PatchFrame{PatchId::L, &m.L, &minus.P_R, &minus, false}};
  const std::size_t n = m.t.size();
  double scale = (m.corner_10 - m.corner_00).norm();
  std::array<std::vector<std::optional<MV>>, 3> observed;
  for (const PatchFrame& pf : patches) {
    const int idx = static_cast<int>(pf.id);
    observed[idx].assign(n, std::nullopt);
    const RuledPatch& p = *pf.patch;
    const auto& P = *pf.normals;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const Vec3 R = p.to3[i] - p.from3[i];
      if (R.norm() < 1e-9 * scale) continue;
      const Vec3 Q = R.normalized().cross(P[i]);
      const Vec3 Ya = 0.5 * (p.from3[i - 1] + p.to3[i - 1]);
      const Vec3 Yb = 0.5 * (p.from3[i + 1] + p.to3[i + 1]);
      const double dtau = (Yb - Ya).dot(Q);
      if (std::abs(dtau) < 1e-14 * scale) continue;
      const double V = -Q.dot(P[i + 1] - P[i - 1]) / dtau;
      const MV obs = V > 0.0 ? MV::Valley : MV::Mountain;
      observed[idx][i] = obs;
      (obs == MV::Mountain ? out.mountain : out.valley)[idx] += 1;

      // Convex side: the ruling points away from the crease's curvature.
      const CreaseSides& cs = *pf.crease;
      const std::size_t j = i;
      const Vec2& t2 = cs.t[j];
      const double k = cs.k[j];
      const Vec2 curv = k * Vec2(-t2.y(), t2.x());
      const Vec2& r2 = pf.left ? cs.r_L[j] : cs.r_R[j];
      const bool convex = r2.dot(curv) < 0.0;
      const MV crease_mv = (&cs == &plus) ? out.crease_plus : out.crease_minus;
      MV predicted = convex ? crease_mv : opposite(crease_mv);
      if (pf.id == PatchId::M && opposite(out.crease_minus) != predicted) {
        // Both creases bound M on their concave side and must agree.
        out.violations.push_back({pf.id, m.t[i], predicted, opposite(out.crease_minus)});
      }
      if (obs != predicted) out.violations.push_back({pf.id, m.t[i], predicted, obs});
    }
  }
  // Left ruling bends valley exactly when N·P_L > 0.
  for (const auto& [cs, left_patch] : {std::pair{&plus, PatchId::U}, std::pair{&minus, PatchId::M}}) {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const auto& obs = observed[static_cast<int>(left_patch)][i];
      if (!obs) continue;
      if (std::abs(cs->k[i]) <= tol.k_min) continue;
      const bool valley = cs->kv[i].dot(cs->P_L[i]) > 0.0;
      if (valley != (*obs == MV::Valley)) ++out.normal_side_mismatches;
    }
  }
  const double bad = static_cast<double>(out.violations.size() + static_cast<std::size_t>(out.normal_side_mismatches));
  std::string detail = "U " + std::to_string(out.mountain[0]) + "M/" + std::to_string(out.valley[0]) + "V, M " +
                       std::to_string(out.mountain[1]) + "M/" + std::to_string(out.valley[1]) + "V, L " +
                       std::to_string(out.mountain[2]) + "M/" + std::to_string(out.valley[2]) + "V";
  out.record = make_record("ruling_mv", bad, 0.0, out.violations.empty() ? 0.0 : out.violations.front().t, detail);
  return out;
}

}  // namespace

RulingMVResult ruling_mv_analysis(const KiteModule& m, const Tolerances& tol) {
  return ruling_mv_impl(m, crease_sides(m, 1), crease_sides(m, -1), tol);
}

RulingMVResult check_ruling_MV_rules(const KiteModule& m, const Tolerances& tol) {
  RulingMVResult r = ruling_mv_analysis(m, tol);
  if (!r.violations.empty()) {
    const RulingViolation& v = r.violations.front();
    throw LensError(Errc::MVRuleViolation,
                    std::string("patch ") + to_string(v.patch) + " ruling bends " + to_string(v.observed) +
                        ", expected " + to_string(v.predicted),
                    v.t);
  }
  if (r.normal_side_mismatches > 0) {
    throw LensError(Errc::MVRuleViolation, "left-ruling bending disagrees with the sign of N·P_L");
  }
  return r;
}

TangentRulingResult tangent_ruling_analysis(const LensTessellation& tess, std::size_t n, const Tolerances& tol) {
  if (n < 2) throw LensError(Errc::InvalidConfig, "need at least two samples");
  TangentRulingResult out;
  out.min_angle = std::numbers::pi;
  const auto line_angle = [](const Vec2& a, const Vec2& b) {
    const double x = angle_between(a, b);
    return std::min(x, std::numbers::pi - x);
  };
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n - 1);
    for (int sign : {1, -1}) {
      const Vec2 x = tess.crease_point(0, 0, sign, t);
      const Vec2 tangent = tess.crease_derivative(0, 0, sign, t);
      const Vec2 cone = tess.vertex(0, sign) - x;
      const double a = std::min(line_angle(tangent, cone), line_angle(tangent, Vec2(0.0, 1.0)));
      if (a < out.min_angle) {
        out.min_angle = a;
        out.t_at_min = t;
      }
    }
  }
  out.record = make_record("tangent_rulings", tol.ruling_angle_floor - out.min_angle, 0.0, out.t_at_min,
                           "min ruling/crease angle " + fmt(out.min_angle) + " rad");
  return out;
}

TangentRulingResult check_no_tangent_rulings(const LensTessellation& tess, std::size_t n, const Tolerances& tol) {
  TangentRulingResult r = tangent_ruling_analysis(tess, n, tol);
  if (!r.record.pass) {
    throw LensError(Errc::TangentRuling, "ruling nearly tangent to the crease (" + fmt(r.min_angle) + " rad)",
                    r.t_at_min);
  }
  return r;
}

double IsometryResult::max_error() const { return std::max({rulings, creases, coordinate_curves, chords}); }

namespace {

struct PatchMap {
  TriangleMesh mesh;
  std::vector<Eigen::Matrix<double, 3, 2>> jac;
  std::vector<Vec2> lo, hi;
  std::vector<double> cum_area;
};

PatchMap patch_map(const KiteModule& m, PatchId id) {
  PatchMap pm;
  pm.mesh = mesh_patch(m, id);
  double acc = 0.0;
  for (const auto& f : pm.mesh.faces) {
    const Vec2 &a = pm.mesh.uv[f[0]], &b = pm.mesh.uv[f[1]], &c = pm.mesh.uv[f[2]];
    Eigen::Matrix2d E;
    E << (b - a), (c - a);
    Eigen::Matrix<double, 3, 2> F;
    F << (pm.mesh.vertices[f[1]] - pm.mesh.vertices[f[0]]), (pm.mesh.vertices[f[2]] - pm.mesh.vertices[f[0]]);
    pm.jac.push_back(F * E.inverse());
    pm.lo.push_back(a.cwiseMin(b).cwiseMin(c));
    pm.hi.push_back(a.cwiseMax(b).cwiseMax(c));
    acc += 0.5 * cross2(b - a, c - a);
    pm.cum_area.push_back(acc);
  }
  return pm;
}

/// Lengths of the 2D segment q0→q1 covered by the patch and of its image.
std::pair<double, double> push_segment(const PatchMap& pm, const Vec2& q0, const Vec2& q1) {
  const Vec2 d = q1 - q0;
  const Vec2 slo = q0.cwiseMin(q1), shi = q0.cwiseMax(q1);
  double covered = 0.0, image = 0.0;
  for (std::size_t f = 0; f < pm.mesh.faces.size(); ++f) {
    if ((pm.lo[f].array() > shi.array()).any() || (pm.hi[f].array() < slo.array()).any()) continue;
    double lo = 0.0, hi = 1.0;
    const auto& face = pm.mesh.faces[f];
    for (int e = 0; e < 3 && lo < hi; ++e) {
      const Vec2& a = pm.mesh.uv[face[e]];
      const Vec2& b = pm.mesh.uv[face[(e + 1) % 3]];
      const double f0 = cross2(b - a, q0 - a);
      const double f1 = cross2(b - a, d);
      if (f1 == 0.0) {
        if (f0 < 0.0) hi = lo;
      } else if (f1 > 0.0) {
        lo = std::max(lo, -f0 / f1);
      } else {
        hi = std::min(hi, -f0 / f1);
      }
    }
    if (hi > lo) {
      covered += (hi - lo) * d.norm();
      image += (hi - lo) * (pm.jac[f] * d).norm();
    }
  }
  return {covered, image};
}

Vec2 random_point(const PatchMap& pm, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double pick = U(rng) * pm.cum_area.back();
  const std::size_t f = static_cast<std::size_t>(
      std::min<std::ptrdiff_t>(std::upper_bound(pm.cum_area.begin(), pm.cum_area.end(), pick) - pm.cum_area.begin(),
                               static_cast<std::ptrdiff_t>(pm.cum_area.size()) - 1));
  double r1 = U(rng), r2 = U(rng);
  if (r1 + r2 > 1.0) {
    r1 = 1.0 - r1;
    r2 = 1.0 - r2;
  }
  const auto& face = pm.mesh.faces[f];
  const Vec2& a = pm.mesh.uv[face[0]];
  return a + r1 * (pm.mesh.uv[face[1]] - a) + r2 * (pm.mesh.uv[face[2]] - a);
}

}  // namespace

IsometryResult check_isometry(const KiteModule& m, std::size_t chords_per_patch, std::uint64_t seed,
                              const Tolerances& tol) {
  IsometryResult out;
  double w_rul = 0.0, w_cr = 0.0, w_co = 0.0, w_ch = 0.0;
  const std::size_t n = m.t.size();

  for (PatchId id : {PatchId::U, PatchId::M, PatchId::L}) {
    const RuledPatch& p = m.patch(id);
    for (std::size_t i = 0; i < n; ++i) {
      const double l2 = (p.to2[i] - p.from2[i]).norm();
      if (l2 < 1e-12) continue;
      const double e = rel_err((p.to3[i] - p.from3[i]).norm(), l2);
      if (e > out.rulings) {
        out.rulings = e;
        w_rul = m.t[i];
      }
    }
  }

  for (int sign : {1, -1}) {
    const SampledCurve3D& c3 = sign > 0 ? m.folded_crease_plus : m.folded_crease_minus;
    const SampledCurve2D& c2 = sign > 0 ? m.crease_plus_2d : m.crease_minus_2d;
    const double e = rel_err(polyline_length3(c3.points()), polyline_length2(c2.points()));
    if (e > out.creases) {
      out.creases = e;
      w_cr = sign;
    }
  }

  // (s, ℓ)-coordinate lines: fixed fraction along cone rulings, fixed
  // fraction of ℓ across the lens.
  for (PatchId id : {PatchId::U, PatchId::L}) {
    const RuledPatch& p = m.patch(id);
    for (double lam : {0.25, 0.5, 0.75}) {
      std::vector<Vec3> a(n);
      std::vector<Vec2> b(n);
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = p.from3[i] + lam * (p.to3[i] - p.from3[i]);
        b[i] = p.from2[i] + lam * (p.to2[i] - p.from2[i]);
      }
      const double e = rel_err(polyline_length3(a), polyline_length2(b));
      if (e > out.coordinate_curves) {
        out.coordinate_curves = e;
        w_co = lam;
      }
    }
  }
  for (double alpha : {-0.5, 0.0, 0.5}) {
    std::vector<Vec3> a(n);
    std::vector<Vec2> b(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double f = 0.5 * (1.0 - alpha);  // fraction from γ⁺ to γ⁻
      a[i] = m.M.from3[i] + f * (m.M.to3[i] - m.M.from3[i]);
      b[i] = m.M.from2[i] + f * (m.M.to2[i] - m.M.from2[i]);
    }
    const double e = rel_err(polyline_length3(a), polyline_length2(b));
    if (e > out.coordinate_curves) {
      out.coordinate_curves = e;
      w_co = alpha;
    }
  }

  std::mt19937_64 rng(seed);
  for (PatchId id : {PatchId::U, PatchId::M, PatchId::L}) {
    const PatchMap pm = patch_map(m, id);
    std::size_t accepted = 0, attempts = 0;
    while (accepted < chords_per_patch && attempts < 1000 * chords_per_patch + 1000) {
      ++attempts;
      const Vec2 q0 = random_point(pm, rng);
      const Vec2 q1 = random_point(pm, rng);
      const double len = (q1 - q0).norm();
      if (len < 1e-6) continue;
      const auto [covered, image] = push_segment(pm, q0, q1);
      if (std::abs(covered - len) > 1e-9 * len) continue;  // leaves the patch
      ++accepted;
      const double e = rel_err(image, len);
      if (e > out.chords) {
        out.chords = e;
        w_ch = static_cast<double>(accepted);
      }
    }
    out.chord_count += accepted;
    if (accepted < chords_per_patch) out.chords = kNaN;
  }

  out.records.push_back(make_record("isometry_rulings", out.rulings, 1e-12, w_rul));
  out.records.push_back(make_record("isometry_creases", out.creases, tol.length, w_cr));
  out.records.push_back(make_record("isometry_coordinate_curves", out.coordinate_curves, tol.length, w_co));
  out.records.push_back(make_record("isometry_chords", out.chords, tol.chord, w_ch,
                                    std::to_string(out.chord_count) + " chords"));
  out.records.push_back(make_record("isometry", out.max_error(), tol.chord, 0.0));
  return out;
}

CheckRecord check_developability(const KiteModule& m, const Tolerances& tol) {
  const std::size_t n = m.t.size();
  const double scale = (m.corner_10 - m.corner_00).norm();
  double worst = 0.0, where = 0.0;
  for (PatchId id : {PatchId::U, PatchId::M, PatchId::L}) {
    const RuledPatch& p = m.patch(id);
    const bool cone = id != PatchId::M;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const Vec3 R = p.to3[i] - p.from3[i];
      if (R.norm() < 1e-9 * scale) continue;
      const auto normal = [&](double lam) {
        const Vec3 ya = p.from3[i - 1] + lam * (p.to3[i - 1] - p.from3[i - 1]);
        const Vec3 yb = p.from3[i + 1] + lam * (p.to3[i + 1] - p.from3[i + 1]);
        return Vec3(R.cross(yb - ya).normalized());
      };
      const Vec3 ref = normal(1.0);
      for (double lam : {0.0, 0.25, 0.5, 0.75}) {
        if (cone && lam == 0.0) continue;  // apex
        const double a = angle_between(ref, normal(lam));
        if (a > worst) {
          worst = a;
          where = m.t[i];
        }
      }
    }
  }
  return make_record("developability", worst, tol.developable, where);
}

CheckRecord check_semikink(const CreaseSides& cs, const Tolerances& tol) {
  const SampledCurve3D& c = cs.crease3d;
  const std::size_t n = c.size();
  std::vector<double> kappa(n);
  double d3max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = c.fd_jet_at(i);
    kappa[i] = curvature_vector(j.d1, j.d2).norm();
    d3max = std::max(d3max, j.d3.norm());
  }
  double worst = 0.0, where = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = c.s(i + 1) - c.s(i);
    const double r = std::abs(kappa[i + 1] - kappa[i]) / (h * d3max);
    if (r > worst) {
      worst = r;
      where = c.s(i);
    }
  }
  return make_record("semikink_" + cs.name, worst, tol.semikink_envelope, where);
}

namespace {

struct CreaseEnd {
  std::size_t tile;
  Vec3 p3, d3;
  Vec2 p2, d2;
};

std::array<Vec3, 4> tile_corners(const TiledFolding& tf, std::size_t i) {
  const KiteModule& m = *tf.module;
  const TileTransform& T = tf.tiles[i].map;
  return {T.apply(m.corner_00), T.apply(m.corner_10), T.apply(m.apex_upper), T.apply(m.apex_lower)};
}

double tiling_scale(const KiteModule& m) {
  return std::max({(m.corner_10 - m.corner_00).norm(), (m.apex_upper - m.apex_lower).norm(), 1.0});
}

}  // namespace

KinkResult check_kinks_at_vertices(const TiledFolding& tf, const Tolerances& tol) {
  const KiteModule& m = *tf.module;
  const double scale = tiling_scale(m);
  std::vector<CreaseEnd> ends;
  for (std::size_t ti = 0; ti < tf.tiles.size(); ++ti) {
    const Tile& tile = tf.tiles[ti];
    for (int sign : {1, -1}) {
      const SampledCurve3D& c3 = sign > 0 ? m.folded_crease_plus : m.folded_crease_minus;
      const SampledCurve2D& c2 = sign > 0 ? m.crease_plus_2d : m.crease_minus_2d;
      const std::size_t last = c3.size() - 1;
      ends.push_back({ti, tile.map.apply(c3.point(0)), tile.map.apply_vector(unit_tangent(c3, 0)),
                      tile.map2d.apply(c2.point(0)), tile.map2d.apply_vector(unit_tangent(c2, 0))});
      ends.push_back({ti, tile.map.apply(c3.point(last)), tile.map.apply_vector(Vec3(-unit_tangent(c3, last))),
                      tile.map2d.apply(c2.point(last)), tile.map2d.apply_vector(Vec2(-unit_tangent(c2, last)))});
    }
  }
  // Group crease ends meeting at the same vertex.
  std::vector<std::vector<std::size_t>> groups;
  std::vector<bool> used(ends.size(), false);
  for (std::size_t a = 0; a < ends.size(); ++a) {
    if (used[a]) continue;
    std::vector<std::size_t> g{a};
    used[a] = true;
    for (std::size_t b = a + 1; b < ends.size(); ++b) {
      if (!used[b] && (ends[b].p3 - ends[a].p3).norm() < 1e-9 * scale) {
        g.push_back(b);
        used[b] = true;
      }
    }
    groups.push_back(std::move(g));
  }
  KinkResult out;
  double worst = -std::numeric_limits<double>::infinity(), where = 0.0;
  for (auto& g : groups) {
    if (g.size() < 2) continue;
    std::sort(g.begin(), g.end(), [&](std::size_t x, std::size_t y) {
      return std::atan2(ends[x].d2.y(), ends[x].d2.x()) < std::atan2(ends[y].d2.y(), ends[y].d2.x());
    });
    const std::size_t k = g.size();
    for (std::size_t q = 0; q < (k == 2 ? 1 : k); ++q) {
      const CreaseEnd& a = ends[g[q]];
      const CreaseEnd& b = ends[g[(q + 1) % k]];
      if (a.tile == b.tile) continue;  // lens interior, not a cone region
      VertexKink vk{a.p3, a.p2, angle_between(a.d3, b.d3), angle_between(a.d2, b.d2)};
      out.kinks.push_back(vk);
      const double excess = vk.angle3d - (std::numbers::pi - 1e-3);
      if (excess > worst) {
        worst = excess;
        where = static_cast<double>(out.kinks.size() - 1);
      }
    }
  }
  if (out.kinks.empty()) {
    out.record = make_record("kinks", kNaN, 0.0, 0.0, "no shared vertices in the tiling");
    return out;
  }
  (void)tol;
  double max3 = 0.0;
  for (const auto& k : out.kinks) max3 = std::max(max3, k.angle3d);
  out.record = make_record("kinks", worst, 0.0, where,
                           std::to_string(out.kinks.size()) + " cone regions, max angle " + fmt(max3) + " rad");
  return out;
}

namespace {

double orient3(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) { return (b - a).cross(c - a).dot(d - a); }

bool segments_intersect_2d(const Vec2& p, const Vec2& q, const Vec2& a, const Vec2& b) {
  const auto side = [](const Vec2& o, const Vec2& x, const Vec2& y) { return cross2(x - o, y - o); };
  const double d1 = side(a, b, p), d2 = side(a, b, q), d3 = side(p, q, a), d4 = side(p, q, b);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  const auto on = [](const Vec2& o, const Vec2& x, const Vec2& y) {
    return std::min(o.x(), x.x()) <= y.x() && y.x() <= std::max(o.x(), x.x()) && std::min(o.y(), x.y()) <= y.y() &&
           y.y() <= std::max(o.y(), x.y());
  };
  return (d1 == 0 && on(a, b, p)) || (d2 == 0 && on(a, b, q)) || (d3 == 0 && on(p, q, a)) ||
         (d4 == 0 && on(p, q, b));
}

bool point_in_tri_2d(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
  const double d1 = cross2(b - a, p - a), d2 = cross2(c - b, p - b), d3 = cross2(a - c, p - c);
  return (d1 >= 0 && d2 >= 0 && d3 >= 0) || (d1 <= 0 && d2 <= 0 && d3 <= 0);
}

bool coplanar_overlap(const Vec3& a0, const Vec3& a1, const Vec3& a2, const Vec3& b0, const Vec3& b1,
                      const Vec3& b2) {
  const Vec3 nrm = (a1 - a0).cross(a2 - a0).cwiseAbs();
  int drop = 0;
  if (nrm.y() > nrm(drop)) drop = 1;
  if (nrm.z() > nrm(drop)) drop = 2;
  const auto proj = [drop](const Vec3& p) {
    return drop == 0 ? Vec2(p.y(), p.z()) : drop == 1 ? Vec2(p.x(), p.z()) : Vec2(p.x(), p.y());
  };
  const std::array<Vec2, 3> A{proj(a0), proj(a1), proj(a2)}, B{proj(b0), proj(b1), proj(b2)};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (segments_intersect_2d(A[i], A[(i + 1) % 3], B[j], B[(j + 1) % 3])) return true;
    }
  }
  return point_in_tri_2d(A[0], B[0], B[1], B[2]) || point_in_tri_2d(B[0], A[0], A[1], A[2]);
}

/// Segment pq against triangle abc (not coplanar).
bool segment_hits_triangle(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b, const Vec3& c) {
  const double dp = orient3(a, b, c, p), dq = orient3(a, b, c, q);
  if ((dp > 0 && dq > 0) || (dp < 0 && dq < 0) || (dp == 0 && dq == 0)) return false;
  const double s1 = orient3(p, q, a, b), s2 = orient3(p, q, b, c), s3 = orient3(p, q, c, a);
  return (s1 >= 0 && s2 >= 0 && s3 >= 0) || (s1 <= 0 && s2 <= 0 && s3 <= 0);
}

}  // namespace

bool triangles_intersect(const Vec3& a0, const Vec3& a1, const Vec3& a2, const Vec3& b0, const Vec3& b1,
                         const Vec3& b2) {
  const double scale = std::max({(a1 - a0).norm(), (a2 - a0).norm(), (b1 - b0).norm(), (b2 - b0).norm()});
  const Vec3 na = (a1 - a0).cross(a2 - a0);
  const double nn = na.norm();
  if (nn > 0.0) {
    const double eps = 1e-12 * scale;
    const double d0 = na.dot(b0 - a0) / nn, d1 = na.dot(b1 - a0) / nn, d2 = na.dot(b2 - a0) / nn;
    if ((d0 > eps && d1 > eps && d2 > eps) || (d0 < -eps && d1 < -eps && d2 < -eps)) return false;
    if (std::abs(d0) <= eps && std::abs(d1) <= eps && std::abs(d2) <= eps) {
      return coplanar_overlap(a0, a1, a2, b0, b1, b2);
    }
  }
  const std::array<Vec3, 3> A{a0, a1, a2}, B{b0, b1, b2};
  for (int i = 0; i < 3; ++i) {
    if (segment_hits_triangle(A[i], A[(i + 1) % 3], b0, b1, b2)) return true;
    if (segment_hits_triangle(B[i], B[(i + 1) % 3], a0, a1, a2)) return true;
  }
  return false;
}

CollisionResult check_collisions(const TiledFolding& tf, const Tolerances& tol) {
  const KiteModule& m = *tf.module;
  const double scale = tiling_scale(m);
  struct Tri {
    Vec3 a, b, c, lo, hi;
  };
  std::vector<Tri> base;
  for (PatchId id : {PatchId::U, PatchId::M, PatchId::L}) {
    const TriangleMesh mesh = mesh_patch(m, id);
    for (const auto& f : mesh.faces) {
      base.push_back({mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]], {}, {}});
    }
  }
  std::vector<std::vector<Tri>> tiles(tf.tiles.size());
  std::vector<Vec3> tlo(tf.tiles.size()), thi(tf.tiles.size());
  for (std::size_t i = 0; i < tf.tiles.size(); ++i) {
    const TileTransform& T = tf.tiles[i].map;
    tlo[i] = Vec3::Constant(std::numeric_limits<double>::infinity());
    thi[i] = -tlo[i];
    for (const Tri& t : base) {
      Tri x{T.apply(t.a), T.apply(t.b), T.apply(t.c), {}, {}};
      x.lo = x.a.cwiseMin(x.b).cwiseMin(x.c).array() - tol.contact;
      x.hi = x.a.cwiseMax(x.b).cwiseMax(x.c).array() + tol.contact;
      tlo[i] = tlo[i].cwiseMin(x.lo);
      thi[i] = thi[i].cwiseMax(x.hi);
      tiles[i].push_back(x);
    }
    std::sort(tiles[i].begin(), tiles[i].end(), [](const Tri& p, const Tri& q) { return p.lo.x() < q.lo.x(); });
  }
  CollisionResult out;
  for (std::size_t i = 0; i < tf.tiles.size(); ++i) {
    const auto ci = tile_corners(tf, i);
    for (std::size_t j = i + 1; j < tf.tiles.size(); ++j) {
      const auto cj = tile_corners(tf, j);
      bool shares = false;
      for (const Vec3& p : ci) {
        for (const Vec3& q : cj) shares = shares || (p - q).norm() < 1e-9 * scale;
      }
      if (shares) continue;
      ++out.pairs_tested;
      if ((tlo[i].array() > thi[j].array()).any() || (tlo[j].array() > thi[i].array()).any()) continue;
      // Sweep along x over both sorted lists.
      const auto& A = tiles[i];
      const auto& B = tiles[j];
      std::size_t start = 0;
      for (const Tri& a : A) {
        while (start < B.size() && B[start].hi.x() < a.lo.x() - (thi[j].x() - tlo[j].x())) ++start;
        for (std::size_t k = start; k < B.size() && B[k].lo.x() <= a.hi.x(); ++k) {
          const Tri& b = B[k];
          if ((a.lo.array() > b.hi.array()).any() || (b.lo.array() > a.hi.array()).any()) continue;
          if (triangles_intersect(a.a, a.b, a.c, b.a, b.b, b.c)) ++out.intersections;
        }
      }
    }
  }
  out.record = make_record("collisions", static_cast<double>(out.intersections), 0.0, 0.0,
                           std::to_string(out.pairs_tested) + " non-adjacent module pairs");
  return out;
}

std::vector<CheckRecord> check_seams(const TiledFolding& tf, const Tolerances& tol) {
  std::vector<CheckRecord> out;
  double gap = 0.0, nrm = 0.0, orient = 0.0;
  for (const Seam& s : tf.seams) {
    gap = std::max(gap, s.max_gap);
    nrm = std::max(nrm, s.normal_angle);
    orient = std::max(orient, std::abs(std::numbers::pi - s.normal_angle_raw));
  }
  const std::string count = std::to_string(tf.seams.size()) + " seams";
  out.push_back(make_record("seam_gap", gap, tol.seam, 0.0, count));
  out.push_back(make_record("seam_normals", nrm, tol.seam_normal, 0.0, count));
  out.push_back(make_record("seam_orientation", orient, tol.seam_normal, 0.0,
                            "normals anti-aligned before negating reflected copies"));

  // Reflected copies carry the odd-row creases, which must fold valley.
  const KiteModule& m = *tf.module;
  const CreaseSides plus = crease_sides(m, 1), minus = crease_sides(m, -1);
  double worst = -std::numeric_limits<double>::infinity(), where = 0.0;
  int valleys = 0, mountains = 0;
  for (std::size_t i = 0; i < tf.tiles.size(); ++i) {
    const Tile& t = tf.tiles[i];
    const MV expected = LensTessellation::crease_mv(t.row);
    for (const CreaseSides* cs : {&plus, &minus}) {
      const FoldAngleResult fa = check_fold_angle_and_MV(transform_sides(*cs, t.map, t.map2d, expected), tol);
      (fa.mv == MV::Valley ? valleys : mountains) += 1;
      if (fa.record.max_residual > worst) {
        worst = fa.record.max_residual;
        where = static_cast<double>(i);
      }
    }
  }
  out.push_back(make_record("tiling_mv", worst, 0.0, where,
                            std::to_string(mountains) + " mountain, " + std::to_string(valleys) + " valley creases"));
  return out;
}

double flat_correspondence_distance(const KiteModule& m) {
  double d = 0.0;
  for (PatchId id : {PatchId::U, PatchId::M, PatchId::L}) {
    const RuledPatch& p = m.patch(id);
    for (std::size_t i = 0; i < p.to3.size(); ++i) {
      d = std::max(d, (p.to3[i] - Vec3(p.to2[i].x(), p.to2[i].y(), 0.0)).norm());
      d = std::max(d, (p.from3[i] - Vec3(p.from2[i].x(), p.from2[i].y(), 0.0)).norm());
    }
  }
  return d;
}

double kite_diameter(const KiteModule& m) {
  const std::array<Vec2, 4> c{m.tess.vertex(0, 0), m.tess.vertex(1, 0), m.tess.vertex(0, 1), m.tess.vertex(0, -1)};
  double d = 0.0;
  for (const auto& a : c) {
    for (const auto& b : c) d = std::max(d, (a - b).norm());
  }
  return d;
}

const std::vector<std::string>& check_families() {
  static const std::vector<std::string> f{"bisection", "fold_angle", "curvature_relation", "geodesic",
                                          "ruling_mv", "isometry", "developability", "tangent_rulings",
                                          "semikink", "seams", "collisions", "kinks", "convergence"};
  return f;
}

bool FoldReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
}

double FoldReport::max_residual_ratio() const {
  double r = 0.0;
  for (const auto& c : checks) {
    if (!std::isfinite(c.max_residual)) return kNaN;
    if (c.tolerance > 0.0) r = std::max(r, c.max_residual / c.tolerance);
  }
  return r;
}

namespace {

template <typename F>
void guarded(std::vector<CheckRecord>& out, const std::string& name, F&& f) {
  try {
    f();
  } catch (const LensError& e) {
    CheckRecord r = make_record(name, kNaN, 0.0, e.where().value_or(0.0), e.what());
    r.status = "error";
    out.push_back(r);
  }
}

}  // namespace

FoldReport verify_module(const KiteModule& m, const VerifyOptions& opts) {
  FoldReport rep;
  rep.pattern_hash = pattern_hash(m.tess);
  rep.vstar = m.vstar;
  rep.n = m.t.size();
  const Tolerances& tol = opts.tol;
  auto& out = rep.checks;
  const CreaseSides sides[2] = {crease_sides(m, 1), crease_sides(m, -1)};
  for (const CreaseSides& cs : sides) {
    if (opts.is_enabled("bisection")) {
      guarded(out, "bisection_" + cs.name, [&] { out.push_back(check_bisection(cs, tol)); });
    }
    if (opts.is_enabled("fold_angle")) {
      guarded(out, "fold_angle_" + cs.name, [&] { out.push_back(check_fold_angle_and_MV(cs, tol).record); });
    }
    if (opts.is_enabled("curvature_relation")) {
      guarded(out, "curvature_relation_" + cs.name, [&] {
        auto r = check_curvature_relation(cs, tol);
        out.push_back(r.relation);
        out.push_back(r.increase);
      });
    }
    if (opts.is_enabled("geodesic")) {
      guarded(out, "geodesic_" + cs.name, [&] { out.push_back(check_geodesic_equality(cs, tol)); });
    }
    if (opts.is_enabled("semikink")) {
      guarded(out, "semikink_" + cs.name, [&] { out.push_back(check_semikink(cs, tol)); });
    }
  }
  if (opts.is_enabled("ruling_mv")) {
    guarded(out, "ruling_mv", [&] { out.push_back(ruling_mv_impl(m, sides[0], sides[1], tol).record); });
  }
  if (opts.is_enabled("isometry")) {
    guarded(out, "isometry", [&] {
      auto r = check_isometry(m, opts.chords_per_patch, opts.seed, tol);
      out.insert(out.end(), r.records.begin(), r.records.end());
    });
  }
  if (opts.is_enabled("developability")) {
    guarded(out, "developability", [&] { out.push_back(check_developability(m, tol)); });
  }
  if (opts.is_enabled("tangent_rulings")) {
    guarded(out, "tangent_rulings", [&] { out.push_back(tangent_ruling_analysis(m.tess, m.t.size(), tol).record); });
  }
  return rep;
}

void verify_tiling(const TiledFolding& tf, FoldReport& rep, const VerifyOptions& opts) {
  auto& out = rep.checks;
  if (opts.is_enabled("seams")) {
    guarded(out, "seams", [&] {
      auto r = check_seams(tf, opts.tol);
      out.insert(out.end(), r.begin(), r.end());
    });
  }
  if (opts.is_enabled("collisions")) {
    guarded(out, "collisions", [&] { out.push_back(check_collisions(tf, opts.tol).record); });
  }
  if (opts.is_enabled("kinks") && tf.tiles.size() > 1) {
    guarded(out, "kinks", [&] { out.push_back(check_kinks_at_vertices(tf, opts.tol).record); });
  }
}

double convergence_noise_floor(const std::string& family) {
  if (family == "bisection") return 1e-7;
  if (family == "curvature_relation") return 1e-8;
  return 1e-11;  // length ratios
}

void verify_convergence(const KiteModule& coarse, const KiteModule& fine, FoldReport& rep, const VerifyOptions& opts) {
  if (!opts.convergence || !opts.is_enabled("convergence")) return;
  const Tolerances& tol = opts.tol;
  auto& out = rep.checks;
  const auto compare = [&](const std::string& name, const std::string& family, double r1, double r2) {
    const double floor = convergence_noise_floor(family);
    std::string detail = "n: " + fmt(r1) + ", 2n: " + fmt(r2);
    if (r1 <= floor && r2 <= floor) {
      out.push_back(make_record("convergence_" + name, 0.0, 0.5, 0.0, detail + " (below noise floor)"));
      return;
    }
    out.push_back(make_record("convergence_" + name, r2 / r1, 0.5, 0.0, detail));
  };
  // The exact-jet residuals sit at rounding level; convergence is measured
  // on the sampled creases alone.
  guarded(out, "convergence_bisection", [&] {
    double a = 0.0, b = 0.0;
    for (int sign : {1, -1}) {
      a = std::max(a, check_bisection(module_sides(coarse, sign, true), tol).max_residual);
      b = std::max(b, check_bisection(module_sides(fine, sign, true), tol).max_residual);
    }
    compare("bisection", "bisection", a, b);
  });
  guarded(out, "convergence_curvature_relation", [&] {
    double a = 0.0, b = 0.0;
    for (int sign : {1, -1}) {
      a = std::max(a, check_curvature_relation(module_sides(coarse, sign, true), tol).relation.max_residual);
      b = std::max(b, check_curvature_relation(module_sides(fine, sign, true), tol).relation.max_residual);
    }
    compare("curvature_relation", "curvature_relation", a, b);
  });
  guarded(out, "convergence_isometry", [&] {
    const auto a = check_isometry(coarse, opts.chords_per_patch, opts.seed, tol);
    const auto b = check_isometry(fine, opts.chords_per_patch, opts.seed, tol);
    compare("isometry_creases", "isometry", a.creases, b.creases);
    compare("isometry_coordinate_curves", "isometry", a.coordinate_curves, b.coordinate_curves);
    compare("isometry_chords", "isometry", a.chords, b.chords);
  });
}

std::string pattern_hash(const LensTessellation& tess) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tess.canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace lensfold
