#pragma once

#include <cstddef>
#include <vector>

#include "fstefan/mbp.hpp"
#include "fstefan/mlf.hpp"

namespace fstefan {

enum class FbpMode { TimeMarching, FixedPoint };

const char* to_string(FbpMode m);

/// A finished free-boundary solve. `solution.front` is the computed front;
/// residuals are sampled at the frame instants.
struct FbpRun {
  StefanProblem problem;
  std::size_t n_cells = 0;
  double dt = 0.0;
  FbpMode mode = FbpMode::TimeMarching;
  SolutionField solution;
  Samples residuals;
  std::size_t iterations = 0;
  /// Largest excursion of the unclamped velocity outside [0, M], and its
  /// parts above M and below 0.
  double max_violation = 0.0;
  double max_excess = 0.0;
  double max_deficit = 0.0;
  /// sup_t |s_{k+1} - s_k| per fixed-point iteration.
  std::vector<double> contraction;

  const FrontPath& front() const { return solution.front; }
  double s_final() const { return solution.front.s_values.back(); }
  double max_residual() const;
};

struct FbpOptions {
  std::size_t output_every = 1;
  AdvectionMode advection = AdvectionMode::Implicit;
  Blend blend;
  /// Consecutive zero-velocity steps that trigger the stagnation alarm.
  std::size_t stagnation_window = 50;
};

/// Restart of the self-similar solution: b = s(t0), u0 = u(., t0) on the
/// mapped grid, h = h0 t^{-alpha/(1+alpha)} on [t0, horizon].
StefanProblem restart_problem(const AnalyticBenchmark& bench, double t0, double horizon, const Grid& grid);

/// Uniform instants t_start = t_0 < ... < t_n = horizon with spacing <= dt.
std::vector<double> time_grid(double t_start, double horizon, double dt);

/// Explicit front update s_{n+1} = s_n + dt clamp(-q_n, 0, M) followed by an
/// implicit step of the regular part on the new front.
FbpRun solve_fbp(const StefanProblem& problem, const Grid& grid, const FracWeights& w, double dt,
                 const FbpOptions& options = {});

/// Picard iteration s <- P s with the velocities projected onto [0, M] after
/// every application. The returned run is re-solved on the final front.
/// Throws SolverError (with the contraction history) after max_iters.
FbpRun fixed_point_P(const StefanProblem& problem, const FrontPath& s_init, std::size_t max_iters, double tol,
                     const Grid& grid, const FracWeights& w, const FbpOptions& options = {});

/// Front held at b on the given instants; always admissible.
FrontPath resting_front(double b, const std::vector<double>& times);

/// r(t) = s - b - int_0^t h - int_0^b u0 + int_0^s u at every frame. The flux
/// integral is exact; the spatial integrals are trapezoidal on the mapped grid.
Samples stefan_residual(const FbpRun& run);

struct BZeroResult {
  std::vector<int> m_list;
  std::vector<FbpRun> members;
  Samples times;
  Samples extrapolated;
  Samples error_estimate;
  /// Empirical convergence order in 1/m at each instant.
  Samples order;
  /// Largest increase of s^m with m; 0 for a properly nested family.
  double ordering_violation = 0.0;

  FrontPath front() const;
};

/// Solves b = 1/m, u0 = 0 for every m (in parallel) and extrapolates in 1/m.
/// Throws SolverError if the fronts are not nested within ordering_tol.
BZeroResult solve_b_zero(const StefanProblem& problem_template, const std::vector<int>& m_list, const Grid& grid,
                         const FracWeights& w, double dt, const FbpOptions& options = {},
                         double ordering_tol = 1e-6);

}  // namespace fstefan
