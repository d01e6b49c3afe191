#include "lensfold/profile.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>

#include <Eigen/Core>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <unsupported/Eigen/Splines>

#include "lensfold/errors.hpp"

namespace lensfold {

namespace {

constexpr std::size_t kArcSegments = 256;
constexpr int kValidationSamples = 2001;

using Spline1 = Eigen::Spline<double, 1, 3>;

double segment_length(const std::function<double(double)>& speed, double a, double b) {
  if (b <= a) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 21>::integrate(speed, a, b, 10, 1e-11);
}

std::string fmt(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace

struct LensProfile::Impl {
  Kind kind;
  std::vector<double> params;
  // circular arc
  double radius = 0.0;
  double center_drop = 0.0;
  // tabulated
  std::optional<Spline1> spline;

  double apex_t = 0.5;
  std::vector<double> knot_t;   // t at the arclength table nodes
  std::vector<double> knot_s;   // cumulative arclength

  ProfileJet jet(double t) const {
    switch (kind) {
      case Kind::Sine: {
        const double a = params[0];
        const double w = std::numbers::pi;
        return {a * std::sin(w * t), a * w * std::cos(w * t), -a * w * w * std::sin(w * t)};
      }
      case Kind::CircularArc: {
        const double x = t - 0.5;
        const double q = std::sqrt(std::max(radius * radius - x * x, 0.0));
        return {q - center_drop, -x / q, -radius * radius / (q * q * q)};
      }
      case Kind::Polynomial: {
        double v = 0.0, d1 = 0.0, d2 = 0.0;
        for (std::size_t k = params.size(); k-- > 0;) {
          d2 = d2 * t + 2.0 * d1;
          d1 = d1 * t + v;
          v = v * t + params[k];
        }
        return {v, d1, d2};
      }
      case Kind::Tabulated: {
        const double tc = std::clamp(t, 0.0, 1.0);
        const auto d = spline->derivatives(tc, 2);
        return {d(0, 0), d(0, 1), d(0, 2)};
      }
    }
    return {};
  }

  double speed(double t) const {
    const double d = jet(t).d1;
    return std::sqrt(1.0 + d * d);
  }

  // Validates the lens shape, then locates the apex and tabulates arclength.
  void finish();
};

LensProfile::LensProfile(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

void LensProfile::Impl::finish() {
  Impl& p = *this;
  const auto bad = [](const std::string& msg, std::optional<double> where = std::nullopt) {
    return LensError(Errc::InvalidProfile, msg, where);
  };
  const double l0 = p.jet(0.0).value;
  const double l1 = p.jet(1.0).value;
  if (!std::isfinite(l0) || !std::isfinite(l1) || std::abs(l0) > 1e-12 || std::abs(l1) > 1e-12) {
    throw bad("profile must vanish at t = 0 and t = 1");
  }
  for (int i = 1; i < kValidationSamples - 1; ++i) {
    const double t = static_cast<double>(i) / (kValidationSamples - 1);
    const ProfileJet j = p.jet(t);
    if (!std::isfinite(j.value) || !std::isfinite(j.d1) || !std::isfinite(j.d2)) throw bad("non-finite profile", t);
    if (j.value <= 0.0) throw bad("profile must be positive inside (0,1)", t);
    if (j.d2 >= 0.0) throw bad("profile must be strictly concave inside (0,1)", t);
  }
  if (p.kind == LensProfile::Kind::Sine || p.kind == LensProfile::Kind::CircularArc) {
    p.apex_t = 0.5;
  } else {
    const auto d1 = [&p](double t) { return p.jet(t).d1; };
    const double a = d1(0.0), b = d1(1.0);
    if (!(a > 0.0 && b < 0.0)) throw bad("profile slope must change sign once on [0,1]");
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(d1, 0.0, 1.0, a, b,
                                                     boost::math::tools::eps_tolerance<double>(52), iters);
    p.apex_t = 0.5 * (r.first + r.second);
  }

  const std::function<double(double)> speed = [&p](double t) { return p.speed(t); };
  p.knot_t.resize(kArcSegments + 1);
  p.knot_s.resize(kArcSegments + 1);
  p.knot_t[0] = 0.0;
  p.knot_s[0] = 0.0;
  for (std::size_t k = 1; k <= kArcSegments; ++k) {
    p.knot_t[k] = static_cast<double>(k) / kArcSegments;
    p.knot_s[k] = p.knot_s[k - 1] + segment_length(speed, p.knot_t[k - 1], p.knot_t[k]);
  }
}

LensProfile LensProfile::sine(double amplitude) {
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
    throw LensError(Errc::InvalidProfile, "sine amplitude must be positive");
  }
  auto p = std::make_shared<Impl>();
  p->kind = Kind::Sine;
  p->params = {amplitude};
  p->finish();
  return LensProfile(p);
}

LensProfile LensProfile::circular_arc(double height) {
  if (!(height > 0.0 && height < 0.5)) {
    throw LensError(Errc::InvalidProfile, "circular arc height must lie in (0, 1/2)");
  }
  auto p = std::make_shared<Impl>();
  p->kind = Kind::CircularArc;
  p->params = {height};
  p->radius = (height * height + 0.25) / (2.0 * height);
  p->center_drop = p->radius - height;
  p->finish();
  return LensProfile(p);
}

LensProfile LensProfile::polynomial(std::vector<double> coefficients) {
  if (coefficients.size() < 3) throw LensError(Errc::InvalidProfile, "polynomial needs degree >= 2");
  auto p = std::make_shared<Impl>();
  p->kind = Kind::Polynomial;
  p->params = std::move(coefficients);
  p->finish();
  return LensProfile(p);
}

LensProfile LensProfile::tabulated(std::vector<double> t, std::vector<double> values) {
  if (t.size() != values.size() || t.size() < 4) {
    throw LensError(Errc::InvalidProfile, "tabulated profile needs >= 4 matching samples");
  }
  if (t.front() != 0.0 || t.back() != 1.0) throw LensError(Errc::InvalidProfile, "table must span t = 0..1");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw LensError(Errc::InvalidProfile, "table t must be strictly increasing", t[i]);
  }
  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::RowVectorXd pts(n), knots(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    pts(i) = values[static_cast<std::size_t>(i)];
    knots(i) = t[static_cast<std::size_t>(i)];
  }
  auto p = std::make_shared<Impl>();
  p->kind = Kind::Tabulated;
  p->spline = Eigen::SplineFitting<Spline1>::Interpolate(pts, 3, knots);
  p->params = t;
  p->params.insert(p->params.end(), values.begin(), values.end());
  // Interior knots are checked too, in case the validation grid misses them.
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    const ProfileJet j = p->jet(t[i]);
    if (j.value <= 0.0 || j.d2 >= 0.0) {
      throw LensError(Errc::InvalidProfile, "tabulated profile is not a convex lens", t[i]);
    }
  }
  p->finish();
  return LensProfile(p);
}

LensProfile::Kind LensProfile::kind() const { return impl_->kind; }

std::string LensProfile::kind_name() const {
  switch (impl_->kind) {
    case Kind::CircularArc: return "circular_arc";
    case Kind::Sine: return "sine";
    case Kind::Polynomial: return "polynomial";
    case Kind::Tabulated: return "tabulated";
  }
  return "unknown";
}

const std::vector<double>& LensProfile::parameters() const { return impl_->params; }

ProfileJet LensProfile::jet(double t) const {
  if (!(t >= -1e-12 && t <= 1.0 + 1e-12)) throw LensError(Errc::OutOfDomain, "profile parameter outside [0,1]", t);
  return impl_->jet(std::clamp(t, 0.0, 1.0));
}

double LensProfile::apex_t() const { return impl_->apex_t; }
double LensProfile::apex_value() const { return impl_->jet(impl_->apex_t).value; }

double LensProfile::arclength(double t) const {
  if (!(t >= -1e-12 && t <= 1.0 + 1e-12)) throw LensError(Errc::OutOfDomain, "profile parameter outside [0,1]", t);
  t = std::clamp(t, 0.0, 1.0);
  const auto& kt = impl_->knot_t;
  std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(t * kArcSegments), kArcSegments - 1);
  if (t == kt[k]) return impl_->knot_s[k];
  const std::function<double(double)> speed = [this](double x) { return impl_->speed(x); };
  return impl_->knot_s[k] + segment_length(speed, kt[k], t);
}

double LensProfile::total_arclength() const { return impl_->knot_s.back(); }

double LensProfile::t_at_arclength(double s) const {
  const double total = total_arclength();
  if (!(s >= -1e-12 * total && s <= total * (1.0 + 1e-12))) {
    throw LensError(Errc::OutOfDomain, "arclength outside the profile", s);
  }
  if (s <= 0.0) return 0.0;
  if (s >= total) return 1.0;
  const auto& ks = impl_->knot_s;
  const auto it = std::upper_bound(ks.begin(), ks.end(), s);
  const std::size_t k = static_cast<std::size_t>(it - ks.begin()) - 1;
  double lo = impl_->knot_t[k], hi = impl_->knot_t[k + 1];
  if (s == ks[k]) return lo;
  // Safeguarded Newton on arclength(t) - s; the speed is the derivative.
  double t = lo + (hi - lo) * (s - ks[k]) / (ks[k + 1] - ks[k]);
  for (int iter = 0; iter < 60; ++iter) {
    const double f = arclength(t) - s;
    if (f > 0.0) hi = t; else lo = t;
    if (std::abs(f) <= 1e-15 * std::max(1.0, total)) break;
    double next = t - f / impl_->speed(t);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == t) break;
    t = next;
  }
  return t;
}

std::string LensProfile::canonical() const {
  std::string out = kind_name() + "(";
  for (std::size_t i = 0; i < impl_->params.size(); ++i) {
    if (i) out += ",";
    out += fmt(impl_->params[i]);
  }
  return out + ")";
}

}  // namespace lensfold
