#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fstefan/fracops.hpp"
#include "fstefan/grid.hpp"
#include "fstefan/problem.hpp"

namespace fstefan {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CflError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Support of the quintic blend that switches phi from x^alpha/Gamma(1+alpha)
/// to zero. Any interval inside [1/2, 3/4] is admissible.
struct Blend {
  double lo = 0.5;
  double hi = 0.75;
};

/// Pointwise auxiliary function and its fractional derivatives.
double phi_value(double alpha, double x, Blend blend = {});
double phi_derivative(double alpha, double x, Blend blend = {});
/// D^alpha phi(x), adaptive quadrature.
double phi_caputo(double alpha, double x, Blend blend = {}, double tol = 1e-13);
/// d/dx D^alpha phi(x), adaptive quadrature.
double phi_flux_gradient(double alpha, double x, Blend blend = {}, double tol = 1e-13);

/// The singular part u_sin = -h s^alpha phi(x/s) carries the fractional
/// Neumann datum; the regular part v = w + h s^alpha phi has zero flux at 0.
struct SingularSplit {
  double alpha = 0.5;
  Blend blend;
  Samples phi;        // nodes
  Samples dphi;       // forward-difference slope of phi at nodes (0 at the last node)
  Samples face_flux;  // D^alpha phi at the N+2 faces
  Samples div_phi;    // dual-cell divergence of face_flux
  double front_flux = 0.0;  // D^alpha phi(1)
};

SingularSplit build_split(double alpha, const Grid& grid, const FracWeights& w, Blend blend = {});

/// Free boundary s(t) sampled at the step instants. s_dots[n] is the velocity
/// used over [t_n, t_{n+1}] (the last entry repeats the previous one).
struct FrontPath {
  std::vector<double> times;
  std::vector<double> s_values;
  std::vector<double> s_dots;

  std::size_t size() const { return times.size(); }
  /// Builds a path from positions, differencing for the velocities.
  static FrontPath from_positions(std::vector<double> times, std::vector<double> s_values);
  /// Throws std::invalid_argument if s decreases, s(0) != b, or velocities leave [0, M].
  void validate(double b, double velocity_bound, double slack = 1e-12) const;
};

struct Frame {
  double t = 0.0;
  double s = 0.0;
  double s_dot = 0.0;
  /// Singular amplitude h s^alpha in effect at t.
  double amplitude = 0.0;
  Samples v;
};

struct SolutionField {
  double alpha = 0.5;
  Samples phi;
  std::vector<Frame> frames;
  FrontPath front;
  /// D^alpha_x u at the front for every step instant.
  Samples front_flux;

  /// Reconstructed temperature u(p_i s, t) = v_i - amplitude * phi_i.
  Samples temperature(std::size_t frame) const;
};

/// Continuous source of the regular-part equation for the split w = v - h s^alpha phi:
///   g = (h' s^a + a h s^{a-1} s') phi - s' s^{a-1} h x phi'(x) - (h/s) d/dx D^a phi.
/// Uses the split's discrete slope and divergence for phi' and d/dx D^a phi.
Samples transformed_source(const SingularSplit& split, double h_val, double h_dot, double s_val, double s_dot,
                           const Grid& grid);

enum class AdvectionMode { Implicit, Explicit };

/// Per-step data: the front at the new level, its velocity over the step,
/// and the singular amplitude at both levels.
struct StepInput {
  double s_new = 1.0;
  double s_dot = 0.0;
  double amplitude_old = 0.0;
  double amplitude_new = 0.0;
  double dt = 1e-3;
};

/// Backward-Euler stepper for the regular part on the fixed cylinder. Holds a
/// reference to the weights, which must outlive it.
///
/// The diffusion (1/s^{1+a}) d/dx D^a v and, by default, the upwind advection
/// x (s'/s) v_x are implicit. Both stencils keep the system lower Hessenberg,
/// so every step costs O(N^2). The advection can be made explicit, in which
/// case the CFL restriction dt <= 0.5 h s / s' is enforced.
class MovingBoundaryStepper {
 public:
  MovingBoundaryStepper(const Grid& grid, const FracWeights& w, const SingularSplit& split,
                        AdvectionMode mode = AdvectionMode::Implicit);

  Samples step(std::span<const double> v, const StepInput& in) const;
  /// D^alpha_x u at x = s for the regular part v and the given amplitude.
  double front_flux(std::span<const double> v, double s, double amplitude) const;

  const Grid& grid() const { return grid_; }
  const SingularSplit& split() const { return split_; }
  const FracWeights& weights() const { return w_; }

 private:
  Grid grid_;
  const FracWeights& w_;
  SingularSplit split_;
  AdvectionMode mode_;
  DenseTable divergence_;  // nodal, N+1 square
};

/// One step with pointwise coefficients (amplitude h s^alpha and its exact
/// time derivative).
Samples step(std::span<const double> v, double s_val, double s_dot, double h_val, double h_dot, double dt,
             const Grid& grid, const FracWeights& w, const SingularSplit& split,
             AdvectionMode mode = AdvectionMode::Implicit);

double front_flux(std::span<const double> v, double s_val, double h_val, const FracWeights& w,
                  const SingularSplit& split);

struct MbpOptions {
  /// Keep every k-th step as a frame (first and last are always kept).
  std::size_t output_every = 1;
  AdvectionMode advection = AdvectionMode::Implicit;
  Blend blend;
};

/// Amplitude convention shared by the solvers: over [t_n, t_{n+1}] the face
/// sees the mean flux of that interval, and the level-(n+1) amplitude is
/// mean_n * s_{n+1}^alpha. Level 0 uses the first interval's mean.
double step_amplitude(const BoundaryFlux& h, double t0, double t1, double s, double alpha);

/// Solves the moving-boundary problem for a prescribed front.
SolutionField solve_mbp(const StefanProblem& problem, const FrontPath& front, const Grid& grid,
                        const FracWeights& w, const MbpOptions& options = {});

/// Same, reusing a split built by the caller.
SolutionField solve_mbp(const StefanProblem& problem, const FrontPath& front, const Grid& grid,
                        const FracWeights& w, const SingularSplit& split, const MbpOptions& options = {});

/// Lower-Hessenberg solve with adjacent-row pivoting, O(n^2). a is n x n and
/// is overwritten. Throws SolverError when a pivot collapses.
Samples solve_lower_hessenberg(DenseTable& a, Samples rhs);

}  // namespace fstefan
