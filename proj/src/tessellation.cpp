#include "lensfold/tessellation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "lensfold/errors.hpp"

namespace lensfold {

namespace {

int floor_div2(int j) { return (j >= 0) ? j / 2 : -((-j + 1) / 2); }

std::string fmt(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

/// Minimizes f over [0,1]: dense scan, then Brent around the best sample.
template <typename F>
std::pair<double, double> minimize_on_unit(F f, std::size_t n) {
  double best_t = 0.0, best_f = std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n - 1);
    const double val = f(t);
    if (val < best_f) {
      best_f = val;
      best_t = t;
      best_k = k;
    }
  }
  const double lo = static_cast<double>(best_k == 0 ? 0 : best_k - 1) / static_cast<double>(n - 1);
  const double hi = static_cast<double>(std::min(best_k + 1, n - 1)) / static_cast<double>(n - 1);
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::brent_find_minima(f, lo, hi, 52, iters);
  if (r.second < best_f) return {r.first, r.second};
  return {best_t, best_f};
}

}  // namespace

LensTessellation::LensTessellation(LensProfile profile, double u, double v)
    : LensTessellation(std::move(profile), u, v, 0, true) {}

LensTessellation::LensTessellation(LensProfile profile, double u, double v, int shift, bool validate)
    : profile_(std::move(profile)), u_(u), v_(v), shift_(shift) {
  if (!validate) return;
  if (!(u >= 0.0 && u < 1.0)) throw LensError(Errc::InvalidPattern, "u must lie in [0,1)", u);
  if (!(v > 0.0) || !std::isfinite(v)) throw LensError(Errc::InvalidPattern, "v must be positive", v);
  const double gap = min_row_gap();
  if (!(gap > 0.0)) throw LensError(Errc::InvalidPattern, "creases of neighbouring rows intersect", gap);
}

LensTessellation LensTessellation::shifted(int n) const { return LensTessellation(profile_, u_, v_, shift_ + n, false); }

double LensTessellation::row_offset_x(int j) const { return (j % 2 == 0) ? 0.0 : u(); }

Vec2 LensTessellation::crease_point(int i, int j, int sign, double t) const {
  const double l = profile_(t);
  const int m = floor_div2(j);
  if (j % 2 == 0) return {t + i, sign * l + m * v_};
  return {1.0 - t + i + u(), sign * l + (m + 0.5) * v_};
}

Vec2 LensTessellation::crease_derivative(int, int j, int sign, double t) const {
  const double d = profile_.jet(t).d1;
  return {(j % 2 == 0) ? 1.0 : -1.0, sign * d};
}

Vec2 LensTessellation::crease_second_derivative(int, int, int sign, double t) const {
  return {0.0, sign * profile_.jet(t).d2};
}

Vec2 LensTessellation::vertex(int i, int j) const {
  const int m = floor_div2(j);
  if (j % 2 == 0) return {static_cast<double>(i), m * v_};
  return {i + u(), (m + 0.5) * v_};
}

SampledCurve2D LensTessellation::crease_curve(int i, int j, int sign, std::size_t n) const {
  const double length = profile_.total_arclength();
  // The evaluator outlives this object, so it holds its own copy.
  auto second = [self = *this, i, j, sign](double t, Vec2& d1, Vec2& d2) {
    const Vec2 g1 = self.crease_derivative(i, j, sign, t);
    const Vec2 g2 = self.crease_second_derivative(i, j, sign, t);
    const double sp2 = g1.squaredNorm();
    d1 = g1 / std::sqrt(sp2);
    d2 = (g2 - (g1.dot(g2) / sp2) * g1) / sp2;
  };
  SampledCurve2D::Evaluator eval = [self = *this, i, j, sign, length, second](double s) {
    const LensProfile& p = self.profile();
    SampledCurve2D::Jet jet;
    const double t = p.t_at_arclength(std::clamp(s, 0.0, length));
    jet.p = self.crease_point(i, j, sign, t);
    second(t, jet.d1, jet.d2);
    // Third derivative by central differences of the exact second one.
    const double h = 1e-4 * length;
    const double sa = std::max(0.0, s - h), sb = std::min(length, s + h);
    Vec2 a1, a2, b1, b2;
    second(p.t_at_arclength(sa), a1, a2);
    second(p.t_at_arclength(sb), b1, b2);
    jet.d3 = (b2 - a2) / (sb - sa);
    return jet;
  };
  return SampledCurve2D::from_evaluator(eval, length, n);
}

double LensTessellation::min_row_gap() const {
  // Upper crease of row 0 against the lower crease of row 1 above it, and
  // the lens height against the spacing of same-parity rows.
  const double uu = u();
  const auto gap = [&](double x) {
    const double i = std::floor(x - uu);
    const double t = std::clamp(1.0 + i + uu - x, 0.0, 1.0);
    return v_ / 2.0 - profile_(x) - profile_(t);
  };
  const auto best = minimize_on_unit(gap, 8193);
  return std::min(best.second, v_ - 2.0 * profile_.apex_value());
}

std::string LensTessellation::canonical() const {
  return profile_.canonical() + ";u=" + fmt(u_) + ";v=" + fmt(v_) + ";shift=" + std::to_string(shift_);
}

namespace {

struct Polyline {
  int i, j, sign;
  std::vector<Vec2> pts;
  struct Chunk {
    std::size_t begin, end;  // edge index range
    Vec2 lo, hi;
  };
  std::vector<Chunk> chunks;
};

constexpr std::size_t kChunk = 64;

Polyline make_polyline(const LensTessellation& tess, int i, int j, int sign, std::size_t n) {
  Polyline pl{i, j, sign, {}, {}};
  pl.pts.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    // Clustered at the ends, where steep profiles bend fastest.
    const double sigma = static_cast<double>(k) / static_cast<double>(n - 1);
    const double t = (k == 0) ? 0.0 : (k + 1 == n) ? 1.0 : 0.5 * (1.0 - std::cos(std::numbers::pi * sigma));
    pl.pts.push_back(tess.crease_point(i, j, sign, t));
  }
  for (std::size_t b = 0; b + 1 < n; b += kChunk) {
    const std::size_t e = std::min(b + kChunk, n - 1);
    Vec2 lo = pl.pts[b], hi = pl.pts[b];
    for (std::size_t k = b; k <= e; ++k) {
      lo = lo.cwiseMin(pl.pts[k]);
      hi = hi.cwiseMax(pl.pts[k]);
    }
    pl.chunks.push_back({b, e, lo, hi});
  }
  return pl;
}

/// True when segment PQ meets edge AB away from P and Q.
bool blocks(const Vec2& P, const Vec2& Q, const Vec2& A, const Vec2& B, double contact) {
  const Vec2 d = Q - P, e = B - A, w = A - P;
  const double len = d.norm();
  const double lo = contact / len, hi = 1.0 - contact / len;
  const double denom = cross2(d, e);
  const double scale = len * e.norm();
  if (std::abs(denom) > 1e-14 * scale) {
    const double sigma = cross2(w, e) / denom;
    const double tau = cross2(w, d) / denom;
    return tau >= 0.0 && tau <= 1.0 && sigma > lo && sigma < hi;
  }
  // Parallel: only collinear overlaps count.
  if (std::abs(cross2(w, d)) > 1e-14 * len * std::max(1.0, w.norm())) return false;
  const double sa = w.dot(d) / (len * len);
  const double sb = (B - P).dot(d) / (len * len);
  return std::max(std::min(sa, sb), lo) < std::min(std::max(sa, sb), hi);
}

struct Soup {
  std::vector<Polyline> lines;
};

Soup build_soup(const LensTessellation& tess, int imin, int imax, std::size_t n) {
  Soup soup;
  for (int j = -1; j <= 2; ++j) {
    for (int i = imin; i <= imax; ++i) {
      for (int sign : {1, -1}) soup.lines.push_back(make_polyline(tess, i, j, sign, n));
    }
  }
  return soup;
}

std::optional<VisibilityFailure> test_candidate(const LensTessellation& tess, const Soup& soup, int n,
                                                std::size_t n_samples, const Tolerances& tol) {
  const Vec2 V = tess.vertex(n, 1);
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n_samples - 1);
    const Vec2 P = tess.crease_point(0, 0, 1, t);
    const Vec2 side(-tess.profile().jet(t).d1, 1.0);
    if (!((V - P).dot(side) > 0.0)) return VisibilityFailure{n, t, "segment leaves on the concave side"};
    const Vec2 lo = P.cwiseMin(V).array() - tol.contact;
    const Vec2 hi = P.cwiseMax(V).array() + tol.contact;
    for (const Polyline& pl : soup.lines) {
      for (const auto& c : pl.chunks) {
        if ((c.lo.array() > hi.array()).any() || (c.hi.array() < lo.array()).any()) continue;
        for (std::size_t e = c.begin; e < c.end; ++e) {
          if (blocks(P, V, pl.pts[e], pl.pts[e + 1], tol.contact)) {
            return VisibilityFailure{n, t,
                                     "blocked by crease (" + std::to_string(pl.i) + "," + std::to_string(pl.j) +
                                         (pl.sign > 0 ? ",+)" : ",-)")};
          }
        }
      }
    }
  }
  return std::nullopt;
}

int nearest_candidate(const LensTessellation& tess) {
  return static_cast<int>(std::lround(tess.profile().apex_t() - tess.u()));
}

}  // namespace

std::optional<VisibilityFailure> check_vertex_visibility(const LensTessellation& tess, int candidate,
                                                         std::size_t n_samples, std::size_t crease_samples,
                                                         const Tolerances& tol) {
  if (n_samples < 2 || crease_samples < 2) throw LensError(Errc::InvalidConfig, "need at least two samples");
  const Soup soup = build_soup(tess, std::min(-2, candidate - 2), std::max(2, candidate + 2), crease_samples);
  return test_candidate(tess, soup, candidate, n_samples, tol);
}

VisibilityResult visibility_check(const LensTessellation& tess, std::size_t n_samples, std::size_t crease_samples,
                                  const Tolerances& tol) {
  if (n_samples < 2 || crease_samples < 2) throw LensError(Errc::InvalidConfig, "need at least two samples");
  const int n0 = nearest_candidate(tess);
  const Soup soup = build_soup(tess, std::min(-2, n0 - 5), std::max(2, n0 + 5), crease_samples);
  VisibilityResult out;
  const double apex = tess.profile().apex_t();
  double best = std::numeric_limits<double>::infinity();
  for (int n = n0 - 3; n <= n0 + 3; ++n) {
    if (auto fail = test_candidate(tess, soup, n, n_samples, tol)) {
      out.failures.push_back(*fail);
      continue;
    }
    out.passing.push_back(n);
    const double dist = std::abs(tess.u() + n - apex);
    if (dist < best) {
      best = dist;
      out.visible_vertex = n;
    }
  }
  return out;
}

VStarLimit vstar_limit(const LensTessellation& tess, std::size_t n_samples) {
  if (n_samples < 3) throw LensError(Errc::InvalidConfig, "need at least three samples");
  const LensProfile& p = tess.profile();
  const double u = tess.u(), v = tess.v();
  const auto support = [&](double t) {
    const ProfileJet j = p.jet(t);
    return v / 2.0 - (j.value + j.d1 * (u - t));
  };
  const auto F = [&](double t) {
    const ProfileJet j = p.jet(t);
    return 4.0 * support(t) / (1.0 + j.d1 * j.d1);
  };
  const auto [ts, ms] = minimize_on_unit(support, n_samples);
  if (!(ms > 0.0)) {
    throw LensError(Errc::InfeasiblePattern, "tangent line of the crease passes above the visible vertex", ts);
  }
  const auto [tf, mf] = minimize_on_unit(F, n_samples);
  return {v - mf, tf, ms};
}

}  // namespace lensfold
