#pragma once

#include <memory>
#include <string>
#include <vector>

namespace lensfold {

struct ProfileJet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Upper half ℓ(t), t ∈ [0,1], of one lens. Construction validates that
/// ℓ(0) = ℓ(1) = 0, ℓ > 0 inside and ℓ'' < 0 inside (the lens is convex).
class LensProfile {
 public:
  enum class Kind { CircularArc, Sine, Polynomial, Tabulated };

  static LensProfile sine(double amplitude);
  /// Circular arc through (0,0), (1,0) with the given height; height < 1/2.
  static LensProfile circular_arc(double height);
  /// ℓ(t) = Σ c_k t^k.
  static LensProfile polynomial(std::vector<double> coefficients);
  /// C² cubic spline through (t_i, ℓ_i); t must run from 0 to 1.
  static LensProfile tabulated(std::vector<double> t, std::vector<double> values);

  Kind kind() const;
  std::string kind_name() const;
  /// Amplitude, height, coefficients, or the flattened table (t..., ℓ...).
  const std::vector<double>& parameters() const;

  double operator()(double t) const { return jet(t).value; }
  ProfileJet jet(double t) const;

  /// Location t* of the unique maximum.
  double apex_t() const;
  double apex_value() const;

  /// Arclength of the graph curve (t, ℓ(t)) from 0 to t.
  double arclength(double t) const;
  double total_arclength() const;
  /// Inverse of arclength(): the t at which the graph has arclength s.
  double t_at_arclength(double s) const;

  /// Canonical textual description, stable across runs (used for hashing).
  std::string canonical() const;

 private:
  struct Impl;
  explicit LensProfile(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

}  // namespace lensfold
