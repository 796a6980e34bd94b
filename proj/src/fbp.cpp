#include "fstefan/fbp.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

namespace fstefan {

const char* to_string(FbpMode m) { return m == FbpMode::TimeMarching ? "time-marching" : "fixed-point"; }

double FbpRun::max_residual() const {
  double r = 0.0;
  for (double x : residuals) r = std::max(r, std::abs(x));
  return r;
}

std::vector<double> time_grid(double t_start, double horizon, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (!(horizon > t_start)) throw std::invalid_argument("horizon T must exceed the start time");
  const double span = horizon - t_start;
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / dt - 1e-9)));
  std::vector<double> t(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n) t[n] = t_start + span * static_cast<double>(n) / steps;
  t.back() = horizon;
  return t;
}

StefanProblem restart_problem(const AnalyticBenchmark& bench, double t0, double horizon, const Grid& grid) {
  if (!(t0 > 0.0)) throw std::invalid_argument("restart_problem: t0 must be positive");
  const double a = bench.alpha();
  StefanProblem pb;
  pb.alpha = a;
  pb.h = BoundaryFlux::power(bench.h0(), -a / (1.0 + a));
  pb.b = bench.front(t0);
  pb.t_start = t0;
  pb.horizon = horizon;
  pb.u0.resize(grid.n_nodes());
  for (std::size_t i = 0; i + 1 < grid.n_nodes(); ++i) pb.u0[i] = bench.temperature(grid.node(i) * pb.b, t0);
  pb.u0.back() = 0.0;
  return pb;
}

FrontPath resting_front(double b, const std::vector<double>& times) {
  return FrontPath::from_positions(times, std::vector<double>(times.size(), b));
}

Samples stefan_residual(const FbpRun& run) {
  const StefanProblem& pb = run.problem;
  const Grid grid(run.n_cells);
  const double initial_heat = pb.u0.empty() ? 0.0 : pb.b * grid.integrate(pb.u0);
  Samples r;
  r.reserve(run.solution.frames.size());
  for (std::size_t k = 0; k < run.solution.frames.size(); ++k) {
    const Frame& f = run.solution.frames[k];
    const Samples u = run.solution.temperature(k);
    const double heat = f.s * grid.integrate(u);
    r.push_back(f.s - pb.b - pb.h.integral(pb.t_start, f.t) - initial_heat + heat);
  }
  return r;
}

namespace {

void finish(FbpRun& run) {
  run.residuals = stefan_residual(run);
  for (double x : run.residuals)
    if (!std::isfinite(x)) throw SolverError("non-finite integral-condition residual");
}

bool nontrivial(const StefanProblem& pb) { return !pb.zero_data(); }

}  // namespace

FbpRun solve_fbp(const StefanProblem& problem, const Grid& grid, const FracWeights& w, double dt,
                 const FbpOptions& options) {
  problem.validate(grid);
  if (!(problem.b > 0.0)) throw std::invalid_argument("solve_fbp: b must be positive (use the b -> 0 sweep)");
  const std::vector<double> times = time_grid(problem.t_start, problem.horizon, dt);
  const double alpha = problem.alpha;
  const double bound = problem.flux_bound();
  const std::size_t steps = times.size() - 1;
  const std::size_t every = std::max<std::size_t>(1, options.output_every);

  const SingularSplit split = build_split(alpha, grid, w, options.blend);
  const MovingBoundaryStepper stepper(grid, w, split, options.advection);

  FbpRun run;
  run.problem = problem;
  run.n_cells = grid.n_cells();
  run.dt = times[1] - times[0];
  run.mode = FbpMode::TimeMarching;
  SolutionField& sol = run.solution;
  sol.alpha = alpha;
  sol.phi = split.phi;

  std::vector<double> s(steps + 1), sdot(steps + 1);
  sol.front_flux.resize(steps + 1);
  s[0] = problem.b;

  double amp = step_amplitude(problem.h, times[0], times[1], s[0], alpha);
  Samples v = problem.initial_profile(grid);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += amp * split.phi[i];
  v.back() = 0.0;

  std::vector<Frame> frames;
  std::size_t idle = 0;
  const bool can_stagnate = nontrivial(problem);
  for (std::size_t n = 0;; ++n) {
    const double q = stepper.front_flux(v, s[n], amp);
    sol.front_flux[n] = q;
    const double raw = -q;
    run.max_excess = std::max(run.max_excess, raw - bound);
    run.max_deficit = std::max(run.max_deficit, -raw);
    run.max_violation = std::max(run.max_excess, run.max_deficit);
    sdot[n] = std::clamp(raw, 0.0, bound);
    if (n % every == 0 || n == steps) {
      frames.push_back({times[n], s[n], sdot[n], amp, v});
    }
    if (n == steps) break;

    const double t0 = times[n];
    const double t1 = times[n + 1];
    idle = (sdot[n] == 0.0 && problem.h.sup(t0, t1) > 0.0 && can_stagnate) ? idle + 1 : 0;
    if (options.stagnation_window > 0 && idle >= options.stagnation_window) {
      std::ostringstream os;
      os << "front stagnation: zero velocity for " << idle << " steps up to t = " << t1 << " while h > 0";
      throw SolverError(os.str());
    }
    s[n + 1] = s[n] + (t1 - t0) * sdot[n];
    const double amp_new = step_amplitude(problem.h, t0, t1, s[n + 1], alpha);
    v = stepper.step(v, {s[n + 1], sdot[n], amp, amp_new, t1 - t0});
    amp = amp_new;
  }
  sol.front.times = times;
  sol.front.s_values = s;
  sol.front.s_dots = sdot;
  sol.frames = std::move(frames);
  finish(run);
  return run;
}

FbpRun fixed_point_P(const StefanProblem& problem, const FrontPath& s_init, std::size_t max_iters, double tol,
                     const Grid& grid, const FracWeights& w, const FbpOptions& options) {
  problem.validate(grid);
  if (!(tol > 0.0)) throw std::invalid_argument("fixed_point_P: tol must be positive");
  const double bound = problem.flux_bound();
  s_init.validate(problem.b, bound, 1e-9);
  const SingularSplit split = build_split(problem.alpha, grid, w, options.blend);
  const MbpOptions mopt{options.output_every, options.advection, options.blend};

  const std::vector<double>& times = s_init.times;
  const std::size_t n = times.size();
  FrontPath current = s_init;
  std::vector<double> history;
  double excess = 0.0;
  double deficit = 0.0;
  for (std::size_t k = 1; k <= max_iters; ++k) {
    const SolutionField field = solve_mbp(problem, current, grid, w, split, mopt);
    // (P s)(t_n) = b - trapezoid of the front flux; velocities projected to [0, M]
    std::vector<double> next(n), vel(n);
    next[0] = problem.b;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const double dt = times[j + 1] - times[j];
      const double raw = -0.5 * (field.front_flux[j] + field.front_flux[j + 1]);
      excess = std::max(excess, raw - bound);
      deficit = std::max(deficit, -raw);
      vel[j] = std::clamp(raw, 0.0, bound);
      next[j + 1] = next[j] + dt * vel[j];
    }
    vel[n - 1] = vel[n - 2];
    double diff = 0.0;
    for (std::size_t j = 0; j < n; ++j) diff = std::max(diff, std::abs(next[j] - current.s_values[j]));
    history.push_back(diff);
    current.s_values = std::move(next);
    current.s_dots = std::move(vel);
    if (diff <= tol) {
      FbpRun run;
      run.problem = problem;
      run.n_cells = grid.n_cells();
      run.dt = times[1] - times[0];
      run.mode = FbpMode::FixedPoint;
      run.solution = solve_mbp(problem, current, grid, w, split, mopt);
      run.iterations = k;
      run.max_excess = excess;
      run.max_deficit = deficit;
      run.max_violation = std::max(excess, deficit);
      run.contraction = history;
      finish(run);
      return run;
    }
  }
  std::ostringstream os;
  os << "fixed_point_P: no convergence after " << max_iters << " iterations; sup differences:";
  for (double d : history) os << ' ' << d;
  throw SolverError(os.str());
}

FrontPath BZeroResult::front() const {
  FrontPath p = FrontPath::from_positions(times, extrapolated);
  return p;
}

namespace {

// Order r with (m1^-r - m2^-r) / (m2^-r - m3^-r) = ratio; NaN if none in (0.1, 4).
double richardson_order(double m1, double m2, double m3, double ratio) {
  auto g = [&](double r) {
    return (std::pow(m1, -r) - std::pow(m2, -r)) / (std::pow(m2, -r) - std::pow(m3, -r)) - ratio;
  };
  double lo = 0.1, hi = 4.0;
  double glo = g(lo), ghi = g(hi);
  if (!(glo * ghi < 0.0)) return std::numeric_limits<double>::quiet_NaN();
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

BZeroResult solve_b_zero(const StefanProblem& problem_template, const std::vector<int>& m_list, const Grid& grid,
                         const FracWeights& w, double dt, const FbpOptions& options, double ordering_tol) {
  if (m_list.empty()) throw std::invalid_argument("solve_b_zero: m_list is empty");
  for (std::size_t i = 0; i < m_list.size(); ++i) {
    if (m_list[i] < 1) throw std::invalid_argument("solve_b_zero: m must be positive");
    if (i > 0 && m_list[i] <= m_list[i - 1]) throw std::invalid_argument("solve_b_zero: m_list must increase");
  }
  if (!problem_template.u0.empty())
    for (double v : problem_template.u0)
      if (v != 0.0) throw std::invalid_argument("solve_b_zero: members use zero initial data");

  std::vector<std::future<FbpRun>> jobs;
  for (int m : m_list) {
    StefanProblem pb = problem_template;
    pb.b = 1.0 / m;
    pb.u0.clear();
    jobs.push_back(std::async(std::launch::async, [pb, &grid, &w, dt, options] {
      return solve_fbp(pb, grid, w, dt, options);
    }));
  }
  BZeroResult out;
  out.m_list = m_list;
  for (auto& j : jobs) out.members.push_back(j.get());

  const FrontPath& ref = out.members.front().front();
  out.times = ref.times;
  const std::size_t nt = out.times.size();
  for (std::size_t k = 1; k < out.members.size(); ++k) {
    const auto& a = out.members[k - 1].front().s_values;
    const auto& b = out.members[k].front().s_values;
    for (std::size_t j = 0; j < nt; ++j) out.ordering_violation = std::max(out.ordering_violation, b[j] - a[j]);
  }
  if (out.ordering_violation > ordering_tol) {
    std::ostringstream os;
    os << "solve_b_zero: fronts not nested in m, violation " << out.ordering_violation << " > " << ordering_tol;
    throw SolverError(os.str());
  }

  const std::size_t k = out.members.size();
  out.extrapolated.resize(nt);
  out.error_estimate.resize(nt);
  out.order.resize(nt);
  for (std::size_t j = 0; j < nt; ++j) {
    const double s_last = out.members[k - 1].front().s_values[j];
    if (k == 1) {
      out.extrapolated[j] = s_last;
      out.error_estimate[j] = std::numeric_limits<double>::infinity();
      out.order[j] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double m2 = m_list[k - 2], m3 = m_list[k - 1];
    const double s2 = out.members[k - 2].front().s_values[j];
    double r = 1.0;
    if (k >= 3) {
      const double m1 = m_list[k - 3];
      const double s1 = out.members[k - 3].front().s_values[j];
      const double d2 = s2 - s_last;
      if (d2 > 0.0) {
        const double est = richardson_order(m1, m2, m3, (s1 - s2) / d2);
        if (std::isfinite(est)) r = est;
      }
    }
    // s^m = S + C m^-r through the last two members
    const double c = (s2 - s_last) / (std::pow(m2, -r) - std::pow(m3, -r));
    out.extrapolated[j] = s_last - c * std::pow(m3, -r);
    out.error_estimate[j] = std::abs(out.extrapolated[j] - s_last);
    out.order[j] = r;
  }
  return out;
}

}  // namespace fstefan
