#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fstefan/fbp.hpp"

namespace fstefan {

enum class PropertyStatus { Pass, Fail, NotApplicable };

const char* to_string(PropertyStatus s);

/// Outcome of one property check. For applicable checks,
/// status == Pass exactly when worst_violation <= tolerance.
struct PropertyReport {
  std::string name;
  PropertyStatus status = PropertyStatus::Pass;
  double worst_violation = 0.0;
  std::optional<double> x;
  std::optional<double> t;
  double tolerance = 0.0;
  std::string note;

  bool passed() const { return status == PropertyStatus::Pass; }
  std::string to_json() const;
  static PropertyReport from_json(const std::string& text);
};

std::string reports_to_json(const std::vector<PropertyReport>& reports);
std::vector<PropertyReport> reports_from_json(const std::string& text);

inline constexpr double kPositivityTol = 1e-8;
inline constexpr double kEnvelopeTol = 1e-6;
inline constexpr double kExponentTol = 0.02;

/// min u >= -tol over every frame and node.
PropertyReport check_positivity(const FbpRun& run, double tol = kPositivityTol);

/// u <= M/Gamma(1+alpha) (s^alpha - x^alpha) + tol. Not applicable when M is
/// infinite or u0 exceeds the same bound at t = 0.
PropertyReport check_envelope(const FbpRun& run, double tol = kEnvelopeTol);

/// Used velocities lie in [0, M] and the unclamped velocity stays <= M, up to
/// tol. The unclamped deficit below 0 is reported in the note only.
PropertyReport check_velocity_bounds(const FbpRun& run, double tol = 1e-8);

/// Fronts of runs ordered by their data are pointwise ordered at shared
/// instants. Throws std::invalid_argument for fewer than two runs.
PropertyReport check_front_ordering(const std::vector<FbpRun>& runs, double tol = 1e-6);

/// u(x) - u(0) = -c x^alpha / Gamma(1+alpha) fitted on the nodes with
/// x <= window_frac * s, for every frame after the start time; requires
/// |c - h(t)| <= tol h(t).
PropertyReport check_boundary_exponent(const FbpRun& run, double window_frac = 0.05, double tol = kExponentTol);

struct PowerFit {
  double coefficient = 0.0;
  double exponent = 0.0;
  std::size_t points = 0;
};

/// Least-squares fit of log(u(0) - u(x)) against log x over 0 < x <= window_frac * s.
/// Throws std::invalid_argument with fewer than four usable nodes.
PowerFit fit_boundary_power(const FbpRun& run, std::size_t frame, double window_frac = 0.05);

/// ||u(., t)||_{L2(0, s(t))} per frame.
Samples l2_monitor(const FbpRun& run);

/// True when the fine run's L2 series exceeds the coarse one by more than factor.
bool l2_growth_flag(const Samples& coarse, const Samples& fine, double factor = 10.0);

}  // namespace fstefan
