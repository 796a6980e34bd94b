// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Thresholds and runtime budgets are fixed here, not configurable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fstefan/fbp.hpp"
#include "fstefan/fracops.hpp"
#include "fstefan/io.hpp"
#include "fstefan/mlf.hpp"
#include "fstefan/props.hpp"
#include "oracles.hpp"

using namespace fstefan;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAILED[" << what << "]";
    }
  }
};

double order(double coarse, double fine) { return std::log2(coarse / fine); }

StefanProblem constant_flux(double alpha, double h, double b, double horizon) {
  StefanProblem pb;
  pb.alpha = alpha;
  pb.h = BoundaryFlux::constant(h);
  pb.b = b;
  pb.horizon = horizon;
  return pb;
}

void c1(Outcome& o) {
  double worst_order = 1e300;
  for (double a : {0.3, 0.5, 0.8}) {
    std::vector<double> errs;
    for (std::size_t n : {64, 128, 256}) {
      const Grid g(n);
      const FracWeights w = build_weights(a, g);
      Samples f(g.n_nodes());
      for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::cos(g.node(i));
      const Samples back = rl_derivative(frac_integral(f, w), w);
      double e = 0.0;
      for (std::size_t i = 0; i < back.size(); ++i) e = std::max(e, std::abs(back[i] - f[i + 1]));
      errs.push_back(e);
      bool zero = true;
      for (double d : caputo_derivative(Samples(g.n_nodes(), 2.5), w)) zero = zero && d == 0.0;
      o.require(zero, "Caputo of a constant is not exactly 0");
    }
    worst_order = std::min({worst_order, order(errs[0], errs[1]), order(errs[1], errs[2])});
  }
  o.require(worst_order >= 1.0, "left-inverse order < 1");

  double worst_x = 0.0;
  for (std::size_t n : {64, 128, 256}) {
    const Grid g(n);
    const FracWeights w = build_weights(0.5, g);
    Samples x(g.n_nodes());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = g.node(i);
    const Samples d = caputo_derivative(x, w);
    for (std::size_t k = 1; k <= n; ++k)
      worst_x = std::max(worst_x, std::abs(d[k] - std::sqrt(g.face(k)) / std::tgamma(1.5)));
  }
  o.require(worst_x <= 1e-12, "D^0.5 x at half-nodes");
  o.detail << "left-inverse order " << worst_order << ", D^0.5 x error " << worst_x;
}

void c2(Outcome& o) {
  double worst = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double z = -5.0 + 0.5 * i;
    worst = std::max(worst, std::abs(ml3({1, 1, 1}, z).value - std::exp(z)) / std::exp(z));
  }
  const double e12 = std::abs(ml3({1, 2, 1}, -1.0).value - (1.0 - std::exp(-1.0)));
  o.require(worst <= 1e-13, "E_{1,1} vs exp");
  o.require(e12 <= 1e-13, "E_{1,2}(-1)");
  o.detail << "max rel error vs exp " << worst << ", E_{1,2}(-1) error " << e12;
}

void c3(Outcome& o) {
  double worst_res = 0.0, worst_gap = 0.0;
  for (double a : {0.3, 0.5, 0.8}) {
    for (double h0 : {0.5, 1.0}) {
      const double eta = eta_solve(a, h0, 1e-12);
      const double eta_ts = eta_solve(a, h0, 1e-12, QuadratureBackend::TanhSinh);
      const double res = std::abs(h_alpha(a, h0, eta, 1e-14) - eta);
      worst_res = std::max(worst_res, res);
      worst_gap = std::max(worst_gap, std::abs(eta - eta_ts));
      o.require(eta > 0.0 && eta < h0 * (1.0 + a), "eta outside (0, h0(1+alpha))");
    }
  }
  o.require(worst_res <= 1e-10, "|H(eta) - eta|");
  o.require(worst_gap <= 1e-8, "backend agreement");
  o.detail << "max |H(eta)-eta| " << worst_res << ", backend gap " << worst_gap;
}

void c4(Outcome& o) {
  const AnalyticBenchmark bench(0.5, 1.0);
  double worst = 0.0;
  for (double t : {0.25, 0.5, 1.0}) worst = std::max(worst, std::abs(bench.integral_condition_residual(t)));
  o.require(worst <= 1e-8, "integral condition residual");
  o.detail << "max residual " << worst;
}

void c5(Outcome& o) {
  const AnalyticBenchmark bench(0.5, 1.0);
  std::vector<double> err_s, err_u;
  const std::vector<std::pair<std::size_t, double>> ladder{{64, 4e-3}, {128, 2e-3}, {256, 1e-3}};
  for (const auto& [n, dt] : ladder) {
    const Grid g(n);
    const FracWeights w = build_weights(0.5, g);
    FbpOptions opt;
    opt.output_every = 1000000;
    const FbpRun run = solve_fbp(restart_problem(bench, 0.1, 1.0, g), g, w, dt, opt);
    double es = 0.0;
    const FrontPath& f = run.front();
    for (std::size_t j = 0; j < f.size(); ++j)
      es = std::max(es, std::abs(f.s_values[j] - bench.front(f.times[j])) / bench.front(f.times[j]));
    err_s.push_back(es);
    const Frame& last = run.solution.frames.back();
    const Samples u = run.solution.temperature(run.solution.frames.size() - 1);
    double eu = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double exact = bench.temperature(g.node(i) * last.s, last.t);
      eu = std::max(eu, std::abs(u[i] - exact));
      scale = std::max(scale, exact);
    }
    err_u.push_back(eu / scale);
  }
  const double p1 = order(err_s[0], err_s[1]), p2 = order(err_s[1], err_s[2]);
  o.require(err_s[1] < err_s[0] && err_s[2] < err_s[1], "s error not monotone");
  o.require(std::min(p1, p2) >= 1.0, "observed order < 1");
  o.require(err_s[2] <= 0.01, "final s error > 1%");
  o.require(err_u[2] <= 0.02, "u error at T > 2%");
  o.detail << "s errors " << err_s[0] << ", " << err_s[1] << ", " << err_s[2] << " (orders " << p1 << ", " << p2
           << "), u error " << err_u[2];
}

void c6(Outcome& o) {
  const Grid g(128);
  const double T = 1.0;
  for (double a : {0.3, 0.7}) {
    const FracWeights w = build_weights(a, g);
    StefanProblem tpl;
    tpl.alpha = a;
    tpl.h = BoundaryFlux::power(1.0, -a / (1.0 + a));
    tpl.horizon = T;
    const BZeroResult r = solve_b_zero(tpl, {4, 8, 16, 32}, g, w, 1e-3);
    // least-squares slope of log s against log t on [T/2, T]
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (std::size_t j = 0; j < r.times.size(); ++j) {
      if (r.times[j] < 0.5 * T) continue;
      const double x = std::log(r.times[j]), y = std::log(r.extrapolated[j]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++cnt;
    }
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    const double target = 1.0 / (1.0 + a);
    const double rel = std::abs(slope - target) / target;
    o.require(rel <= 0.02, "slope off by more than 2%");
    o.detail << "alpha " << a << ": slope " << slope << " vs " << target << " (" << 100 * rel << "%); ";
  }
}

void c7(Outcome& o) {
  const double a = 0.5;
  const Grid g(128);
  const FracWeights w = build_weights(a, g);
  StefanProblem tpl;
  tpl.alpha = a;
  tpl.h = BoundaryFlux::constant(1.0);
  tpl.horizon = 0.5;
  const BZeroResult r = solve_b_zero(tpl, {4, 8, 16, 32}, g, w, 1e-3, {}, 1e300);
  o.require(r.ordering_violation <= 1e-6, "fronts not decreasing in m");

  const FbpRun h_lo = solve_fbp(constant_flux(a, 0.5, 0.25, 0.5), g, w, 1e-3);
  const FbpRun h_hi = solve_fbp(constant_flux(a, 1.0, 0.25, 0.5), g, w, 1e-3);
  const PropertyReport by_h = check_front_ordering({h_lo, h_hi}, 1e-6);
  o.require(by_h.passed(), "fronts not increasing in h");

  const RunConfig cfg = parse_config_text("alpha = 0.5\nh_spec = const:1\nb = 0.25\nT = 0.5\nn_cells = 128\ndt = 0.001\n");
  auto once = [&] {
    const Grid gg(cfg.n_cells);
    const FracWeights ww = build_weights(cfg.alpha, gg);
    const FbpRun run = solve_fbp(make_problem(cfg, gg), gg, ww, cfg.dt);
    return front_csv(run) + run_csv(run) + frames_v_csv(run);
  };
  o.require(once() == once(), "identical configs differ");
  o.detail << "m-nesting violation " << r.ordering_violation << ", h-ordering worst " << by_h.worst_violation
           << ", determinism byte-identical";
}

void c8(Outcome& o) {
  const double a = 0.5, M = 1.0;
  const Grid g(256);
  const FracWeights w = build_weights(a, g);
  const FbpRun run = solve_fbp(constant_flux(a, M, 0.5, 1.0), g, w, 1e-3);
  const PropertyReport pos = check_positivity(run, 1e-8);
  const PropertyReport env = check_envelope(run, 1e-6);
  double vmin = 1e300, vmax = -1e300;
  for (double v : run.front().s_dots) {
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  o.require(pos.passed(), "min u < -1e-8");
  o.require(env.passed(), "envelope exceeded");
  o.require(vmin >= 0.0 && vmax <= M + 1e-8, "front velocity outside [0, M]");
  o.require(run.max_excess <= 1e-8, "unclamped velocity above M");
  o.detail << "min-u violation " << pos.worst_violation << ", envelope excess " << env.worst_violation
           << ", velocity in [" << vmin << ", " << vmax << "], unclamped excess " << run.max_excess
           << ", unclamped deficit " << run.max_deficit;
}

void c9(Outcome& o) {
  const double a = 0.999;
  const double classical = oracle::classical_similarity_root(1.0);
  const AnalyticBenchmark bench(a, 1.0);
  const double rel = std::abs(bench.eta() - classical) / classical;
  o.require(rel <= 0.02, "eta vs classical root");

  const Grid g(256);
  const FracWeights w = build_weights(a, g);
  FbpOptions opt;
  opt.output_every = 100;
  const FbpRun run = solve_fbp(restart_problem(bench, 0.1, 0.5, g), g, w, 1e-3, opt);
  const PowerFit fit = fit_boundary_power(run, run.solution.frames.size() - 1);
  o.require(std::abs(fit.exponent - 1.0) <= 0.02, "boundary exponent");
  o.detail << "eta " << bench.eta() << " vs classical " << classical << " (" << 100 * rel << "%), fitted exponent "
           << fit.exponent;
}

void c10(Outcome& o) {
  const double a = 0.5;
  std::vector<double> res;
  for (std::size_t n : {64, 128, 256}) {
    const Grid g(n);
    const FracWeights w = build_weights(a, g);
    res.push_back(solve_fbp(constant_flux(a, 1.0, 0.5, 1.0), g, w, 0.128 / n).max_residual());
  }
  const double r1 = res[1] / res[0], r2 = res[2] / res[1];
  o.require(r1 <= 0.6 && r2 <= 0.6, "residual ratio > 0.6");
  o.detail << "max residual " << res[0] << ", " << res[1] << ", " << res[2] << " (ratios " << r1 << ", " << r2 << ")";
}

struct Criterion {
  const char* id;
  const char* name;
  double budget_s;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"C1", "operator identities", 1.0, c1},   {"C2", "Mittag-Leffler sanity", 1.0, c2},
      {"C3", "similarity root", 10.0, c3},      {"C4", "kernel consistency", 5.0, c4},
      {"C5", "benchmark convergence", 120.0, c5}, {"C6", "exponent law", 180.0, c6},
      {"C7", "ordering suites", 120.0, c7},     {"C8", "positivity and envelope", 60.0, c8},
      {"C9", "classical limit", 60.0, c9},      {"C10", "mass balance", 120.0, c10},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) o.require(false, "runtime over budget");
    if (!o.pass) ++failed;
    std::printf("[%s] %s %s: %s (%.2f s of %.0f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.str().c_str(), secs, c.budget_s);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
