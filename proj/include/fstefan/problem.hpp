#pragma once

#include <string>
#include <vector>

#include "fstefan/fracops.hpp"
#include "fstefan/grid.hpp"

namespace fstefan {

/// Prescribed boundary flux h(t) >= 0 at the fixed face.
class BoundaryFlux {
 public:
  enum class Kind { Constant, Power, Table };

  BoundaryFlux() = default;

  static BoundaryFlux constant(double h0);
  /// h0 * t^p, p > -1 so that the injected heat stays finite.
  static BoundaryFlux power(double h0, double p);
  /// Piecewise-linear interpolation of (times, values), held constant outside.
  static BoundaryFlux table(std::vector<double> times, std::vector<double> values);

  Kind kind() const { return kind_; }
  double value(double t) const;
  double rate(double t) const;
  /// Exact integral over [t0, t1].
  double integral(double t0, double t1) const;
  double mean(double t0, double t1) const { return integral(t0, t1) / (t1 - t0); }
  /// sup over [t0, t1]; +inf for a power law with p < 0 and t0 = 0.
  double sup(double t0, double t1) const;
  bool identically_zero() const;

  /// Compact text form: "const:1", "power:1,-0.333", "table:t0=h0;t1=h1;...".
  std::string describe() const;
  static BoundaryFlux parse(const std::string& text);

  double amplitude() const { return h0_; }
  double exponent() const { return p_; }
  const std::vector<double>& table_times() const { return times_; }
  const std::vector<double>& table_values() const { return values_; }

 private:
  Kind kind_ = Kind::Constant;
  double h0_ = 0.0;
  double p_ = 0.0;
  std::vector<double> times_;
  std::vector<double> values_;
};

/// One-phase problem with initial front b > 0 (or the template of a b -> 0
/// sweep, where b and u0 are filled in per member).
struct StefanProblem {
  double alpha = 0.5;
  BoundaryFlux h;
  double b = 0.0;
  /// Initial temperature on the mapped nodes p_i = x_i / b; empty means zero.
  Samples u0;
  double t_start = 0.0;
  double horizon = 1.0;

  /// Throws std::invalid_argument naming the violated condition.
  void validate(const Grid& grid) const;
  /// M = sup h over [t_start, horizon].
  double flux_bound() const;
  bool zero_data() const;
  /// u0 <= M/Gamma(1+alpha) (b^alpha - x^alpha) on the nodes (within slack).
  bool envelope_hypothesis(const Grid& grid, double slack = 1e-12) const;
  Samples initial_profile(const Grid& grid) const;
};

}  // namespace fstefan
