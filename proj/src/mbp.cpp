#include "fstefan/mbp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fstefan/quadrature.hpp"

namespace fstefan {

namespace {

// Quintic smoothstep S(tau) and its first two tau-derivatives.
struct Step5 {
  double s, ds, dds;
};

Step5 smoothstep(double tau) {
  tau = std::clamp(tau, 0.0, 1.0);
  const double t2 = tau * tau;
  return {t2 * tau * (10.0 - 15.0 * tau + 6.0 * t2), 30.0 * t2 * (1.0 - tau) * (1.0 - tau),
          60.0 * tau * (1.0 - tau) * (1.0 - 2.0 * tau)};
}

void check_blend(const Blend& b) {
  if (!(b.lo >= 0.5 && b.hi <= 0.75 && b.hi > b.lo))
    throw std::invalid_argument("blend interval must be a nonempty subinterval of [1/2, 3/4]");
}

// chi = S((x-lo)/L) x^a / Gamma(1+a) is the part removed from x^a/Gamma(1+a);
// phi = x^a/Gamma(1+a) - chi. chi vanishes with two derivatives at lo.
double chi_derivative(double alpha, double p, const Blend& b, int order) {
  const double g0 = std::pow(p, alpha) / std::tgamma(1.0 + alpha);
  const double g1 = std::pow(p, alpha - 1.0) / std::tgamma(alpha);
  const double g2 = (alpha - 1.0) * std::pow(p, alpha - 2.0) / std::tgamma(alpha);
  if (p >= b.hi) return order == 1 ? g1 : g2;
  if (p <= b.lo) return 0.0;
  const double len = b.hi - b.lo;
  const Step5 st = smoothstep((p - b.lo) / len);
  if (order == 1) return st.ds / len * g0 + st.s * g1;
  return st.dds / (len * len) * g0 + 2.0 * st.ds / len * g1 + st.s * g2;
}

// (1/Gamma(1-a)) int_lo^x chi^{(order)}(p) (x-p)^{-a} dp. The substitution
// r = (x-p)^{1-a} removes the kernel singularity; the integral is split at hi
// where chi's third derivative jumps.
double chi_convolution(double alpha, double x, const Blend& b, int order, double tol) {
  if (x <= b.lo) return 0.0;
  const double beta = 1.0 - alpha;
  auto segment = [&](double a0, double a1) {
    const double r_lo = std::pow(x - a1, beta);
    const double r_hi = std::pow(x - a0, beta);
    auto f = [&](double r) { return chi_derivative(alpha, x - std::pow(r, 1.0 / beta), b, order); };
    // the map leaves an r^{a/(1-a)} kink at r = 0, which tanh-sinh absorbs
    return integrate(f, r_lo, r_hi, tol, QuadratureBackend::TanhSinh) / beta;
  };
  double acc = segment(b.lo, std::min(x, b.hi));
  if (x > b.hi) acc += segment(b.hi, x);
  return acc / std::tgamma(1.0 - alpha);
}

}  // namespace

double phi_value(double alpha, double x, Blend blend) {
  check_blend(blend);
  if (x >= blend.hi) return 0.0;
  const double g = std::pow(x, alpha) / std::tgamma(1.0 + alpha);
  if (x <= blend.lo) return g;
  return (1.0 - smoothstep((x - blend.lo) / (blend.hi - blend.lo)).s) * g;
}

double phi_derivative(double alpha, double x, Blend blend) {
  check_blend(blend);
  if (x >= blend.hi) return 0.0;
  const double g1 = std::pow(x, alpha - 1.0) / std::tgamma(alpha);
  if (x <= blend.lo) return g1;
  return g1 - chi_derivative(alpha, x, blend, 1);
}

double phi_caputo(double alpha, double x, Blend blend, double tol) {
  check_blend(blend);
  return 1.0 - chi_convolution(alpha, x, blend, 1, tol);
}

double phi_flux_gradient(double alpha, double x, Blend blend, double tol) {
  check_blend(blend);
  // d/dx D^a chi = (1/Gamma(1-a)) int chi'' (x-p)^{-a} since chi'(lo) = 0
  return -chi_convolution(alpha, x, blend, 2, tol);
}

SingularSplit build_split(double alpha, const Grid& grid, const FracWeights& w, Blend blend) {
  if (w.alpha != alpha || w.grid.n_cells() != grid.n_cells())
    throw std::invalid_argument("build_split: weights do not match alpha/grid");
  check_blend(blend);
  const std::size_t n = grid.n_cells();
  SingularSplit sp;
  sp.alpha = alpha;
  sp.blend = blend;
  sp.phi.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) sp.phi[i] = phi_value(alpha, grid.node(i), blend);
  sp.dphi.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) sp.dphi[i] = (sp.phi[i + 1] - sp.phi[i]) / grid.spacing();
  sp.face_flux.resize(n + 2);
  for (std::size_t k = 0; k < n + 2; ++k) sp.face_flux[k] = phi_caputo(alpha, grid.face(k), blend);
  sp.div_phi.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) sp.div_phi[i] = (sp.face_flux[i + 1] - sp.face_flux[i]) / grid.volume(i);
  sp.front_flux = sp.face_flux[n + 1];
  return sp;
}

FrontPath FrontPath::from_positions(std::vector<double> times, std::vector<double> s_values) {
  if (times.size() != s_values.size() || times.size() < 2)
    throw std::invalid_argument("FrontPath: need at least two matching samples");
  FrontPath p;
  p.s_dots.resize(times.size());
  for (std::size_t n = 0; n + 1 < times.size(); ++n)
    p.s_dots[n] = (s_values[n + 1] - s_values[n]) / (times[n + 1] - times[n]);
  p.s_dots.back() = p.s_dots[p.s_dots.size() - 2];
  p.times = std::move(times);
  p.s_values = std::move(s_values);
  return p;
}

void FrontPath::validate(double b, double velocity_bound, double slack) const {
  if (times.size() < 2 || s_values.size() != times.size() || s_dots.size() != times.size())
    throw std::invalid_argument("FrontPath: inconsistent lengths");
  if (std::abs(s_values.front() - b) > slack * std::max(1.0, b))
    throw std::invalid_argument("FrontPath: s(0) must equal b");
  for (std::size_t n = 0; n < times.size(); ++n) {
    if (n > 0 && !(times[n] > times[n - 1])) throw std::invalid_argument("FrontPath: times must increase");
    if (n > 0 && s_values[n] < s_values[n - 1] - slack) throw std::invalid_argument("FrontPath: s must be nondecreasing");
    if (s_dots[n] < -slack || s_dots[n] > velocity_bound + slack)
      throw std::invalid_argument("FrontPath: velocity outside [0, M]");
  }
}

Samples SolutionField::temperature(std::size_t frame) const {
  const Frame& f = frames.at(frame);
  Samples u(f.v.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = f.v[i] - f.amplitude * phi[i];
  return u;
}

Samples transformed_source(const SingularSplit& split, double h_val, double h_dot, double s_val, double s_dot,
                           const Grid& grid) {
  if (!(s_val > 0.0)) throw std::invalid_argument("transformed_source: s must be positive");
  const double a = split.alpha;
  const double sa = std::pow(s_val, a);
  const double sa1 = std::pow(s_val, a - 1.0);
  const double amp_rate = h_dot * sa + a * h_val * sa1 * s_dot;
  Samples g(grid.n_nodes());
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] = amp_rate * split.phi[i] - s_dot * sa1 * h_val * grid.node(i) * split.dphi[i] -
           h_val / s_val * split.div_phi[i];
  return g;
}

MovingBoundaryStepper::MovingBoundaryStepper(const Grid& grid, const FracWeights& w, const SingularSplit& split,
                                             AdvectionMode mode)
    : grid_(grid), w_(w), split_(split), mode_(mode), divergence_(nodal_divergence_matrix(w)) {
  if (w.grid.n_cells() != grid.n_cells() || split.phi.size() != grid.n_nodes())
    throw std::invalid_argument("MovingBoundaryStepper: grid, weights and split disagree");
}

Samples MovingBoundaryStepper::step(std::span<const double> v, const StepInput& in) const {
  const std::size_t n = grid_.n_cells();
  if (v.size() != n + 1) throw std::invalid_argument("step: length mismatch");
  if (v[n] != 0.0) throw std::invalid_argument("step: v(1) must be 0");
  if (!(in.dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  if (!(in.s_new > 0.0)) throw std::invalid_argument("step: s must be positive");

  const double h = grid_.spacing();
  const double alpha = split_.alpha;
  const double c_diff = std::pow(in.s_new, -(1.0 + alpha));
  const double adv = in.s_dot / in.s_new;
  const bool implicit_adv = mode_ == AdvectionMode::Implicit;
  if (!implicit_adv && in.s_dot > 0.0 && in.dt > 0.5 * h * in.s_new / in.s_dot) {
    std::ostringstream os;
    os << "CFL violation: dt = " << in.dt << " exceeds 0.5 h s / s_dot = " << 0.5 * h * in.s_new / in.s_dot;
    throw CflError(os.str());
  }
  const double amp_rate = (in.amplitude_new - in.amplitude_old) / in.dt;
  const double amp_adv = implicit_adv ? in.amplitude_new : in.amplitude_old;

  DenseTable m(n, n);
  Samples rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = grid_.node(i);
    const std::size_t last = std::min(i + 1, n - 1);
    for (std::size_t j = 0; j <= last; ++j) m(i, j) = -in.dt * c_diff * divergence_(i, j);
    m(i, i) += 1.0;
    const double g = amp_rate * split_.phi[i] - adv * p * amp_adv * split_.dphi[i] -
                     in.amplitude_new * c_diff * split_.div_phi[i];
    rhs[i] = v[i] + in.dt * g;
    const double a_coef = in.dt * adv * p / h;
    if (implicit_adv) {
      m(i, i) += a_coef;
      if (i + 1 < n) m(i, i + 1) -= a_coef;
    } else {
      rhs[i] += a_coef * (v[i + 1] - v[i]);
    }
  }
  Samples sol = solve_lower_hessenberg(m, std::move(rhs));
  sol.push_back(0.0);
  return sol;
}

double MovingBoundaryStepper::front_flux(std::span<const double> v, double s, double amplitude) const {
  if (!(s > 0.0)) throw std::invalid_argument("front_flux: s must be positive");
  const std::size_t n = grid_.n_cells();
  if (v.size() != n + 1) throw std::invalid_argument("front_flux: length mismatch");
  const auto row = w_.flux.row(n + 1);
  const double h = grid_.spacing();
  double dv = 0.0;
  for (std::size_t j = 0; j < n; ++j) dv += row[j] * (v[j + 1] - v[j]) / h;
  return std::pow(s, -split_.alpha) * (dv - amplitude * split_.front_flux);
}

Samples step(std::span<const double> v, double s_val, double s_dot, double h_val, double h_dot, double dt,
             const Grid& grid, const FracWeights& w, const SingularSplit& split, AdvectionMode mode) {
  const double a = split.alpha;
  const double amp = h_val * std::pow(s_val, a);
  const double amp_rate = h_dot * std::pow(s_val, a) + a * h_val * std::pow(s_val, a - 1.0) * s_dot;
  MovingBoundaryStepper stepper(grid, w, split, mode);
  return stepper.step(v, {s_val, s_dot, amp - dt * amp_rate, amp, dt});
}

double front_flux(std::span<const double> v, double s_val, double h_val, const FracWeights& w,
                  const SingularSplit& split) {
  MovingBoundaryStepper stepper(w.grid, w, split);
  return stepper.front_flux(v, s_val, h_val * std::pow(s_val, split.alpha));
}

double step_amplitude(const BoundaryFlux& h, double t0, double t1, double s, double alpha) {
  return h.mean(t0, t1) * std::pow(s, alpha);
}

SolutionField solve_mbp(const StefanProblem& problem, const FrontPath& front, const Grid& grid,
                        const FracWeights& w, const MbpOptions& options) {
  const SingularSplit split = build_split(problem.alpha, grid, w, options.blend);
  return solve_mbp(problem, front, grid, w, split, options);
}

SolutionField solve_mbp(const StefanProblem& problem, const FrontPath& front, const Grid& grid,
                        const FracWeights& w, const SingularSplit& split, const MbpOptions& options) {
  problem.validate(grid);
  if (!(problem.b > 0.0)) throw std::invalid_argument("solve_mbp: b must be positive (use the b -> 0 sweep)");
  front.validate(problem.b, problem.flux_bound(), 1e-9);
  if (std::abs(front.times.front() - problem.t_start) > 1e-12)
    throw std::invalid_argument("solve_mbp: front must start at the problem's start time");

  const std::size_t every = std::max<std::size_t>(1, options.output_every);
  const double alpha = problem.alpha;
  const std::size_t steps = front.size() - 1;
  MovingBoundaryStepper stepper(grid, w, split, options.advection);

  SolutionField out;
  out.alpha = alpha;
  out.phi = split.phi;
  out.front = front;
  out.front_flux.resize(front.size());

  double amp = step_amplitude(problem.h, front.times[0], front.times[1], front.s_values[0], alpha);
  Samples v = problem.initial_profile(grid);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += amp * split.phi[i];
  v.back() = 0.0;

  out.frames.push_back({front.times[0], front.s_values[0], front.s_dots[0], amp, v});
  out.front_flux[0] = stepper.front_flux(v, front.s_values[0], amp);
  for (std::size_t n = 0; n < steps; ++n) {
    const double t0 = front.times[n];
    const double t1 = front.times[n + 1];
    const double s1 = front.s_values[n + 1];
    const double sdot = (s1 - front.s_values[n]) / (t1 - t0);
    const double amp_new = step_amplitude(problem.h, t0, t1, s1, alpha);
    v = stepper.step(v, {s1, sdot, amp, amp_new, t1 - t0});
    amp = amp_new;
    out.front_flux[n + 1] = stepper.front_flux(v, s1, amp);
    if ((n + 1) % every == 0 || n + 1 == steps) out.frames.push_back({t1, s1, front.s_dots[n + 1], amp, v});
  }
  return out;
}

Samples solve_lower_hessenberg(DenseTable& a, Samples rhs) {
  const std::size_t n = a.rows();
  if (a.cols() != n || rhs.size() != n) throw std::invalid_argument("solve_lower_hessenberg: shape mismatch");
  // Index reversal turns the lower Hessenberg matrix into an upper Hessenberg
  // one: B(i,j) = A(n-1-i, n-1-j).
  auto B = [&](std::size_t i, std::size_t j) -> double& { return a(n - 1 - i, n - 1 - j); };
  auto R = [&](std::size_t i) -> double& { return rhs[n - 1 - i]; };

  double max_pivot = 0.0;
  double min_pivot = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (std::abs(B(k + 1, k)) > std::abs(B(k, k))) {
      for (std::size_t j = k; j < n; ++j) std::swap(B(k, j), B(k + 1, j));
      std::swap(R(k), R(k + 1));
    }
    const double piv = B(k, k);
    max_pivot = std::max(max_pivot, std::abs(piv));
    min_pivot = std::min(min_pivot, std::abs(piv));
    if (piv == 0.0) throw SolverError("singular linear system: zero pivot at row " + std::to_string(k));
    const double m = B(k + 1, k) / piv;
    if (m != 0.0) {
      for (std::size_t j = k + 1; j < n; ++j) B(k + 1, j) -= m * B(k, j);
      R(k + 1) -= m * R(k);
    }
    B(k + 1, k) = 0.0;
  }
  max_pivot = std::max(max_pivot, std::abs(B(n - 1, n - 1)));
  min_pivot = std::min(min_pivot, std::abs(B(n - 1, n - 1)));
  if (!(min_pivot > 1e-14 * max_pivot)) {
    std::ostringstream os;
    os << "singular linear system: pivot ratio " << (max_pivot > 0.0 ? min_pivot / max_pivot : 0.0)
       << " (condition diagnostic)";
    throw SolverError(os.str());
  }
  Samples y(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double acc = R(ii);
    for (std::size_t j = ii + 1; j < n; ++j) acc -= B(ii, j) * y[j];
    y[ii] = acc / B(ii, ii);
  }
  return Samples(y.rbegin(), y.rend());
}

}  // namespace fstefan
