// Command-line front end: solve, bzero, benchmark, eta, verify, sweep.
//
// Exit status: 0 success, 1 usage/config error, 2 solver error,
// 3 verification failure.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "fstefan/io.hpp"
#include "fstefan/props.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace fstefan;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSolver = 2;
constexpr int kExitVerify = 3;

struct Flags {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::vector<std::string> sets;
  std::string input_dir;
};

void add_config_flags(CLI::App* sub, Flags& flags) {
  sub->add_option("--config", flags.config_path, "Flat key=value config file");
  sub->add_option("--set", flags.sets, "Override any config key: key=value (repeatable)");
  for (const std::string& key : config_keys()) {
    if (key == "subcommand" || key == "schema_version") continue;
    sub->add_option("--" + key, flags.values[key], "config key '" + key + "'");
  }
  sub->add_option("--n", flags.values["n_cells"], "alias of --n_cells");
  sub->add_option("--m", flags.values["m_list"], "alias of --m_list");
}

RunConfig resolve_config(const std::string& subcommand, const Flags& flags) {
  RunConfig cfg = flags.config_path.empty() ? RunConfig{} : load_config(flags.config_path);
  cfg.subcommand = subcommand;
  if (const char* env = std::getenv("FSTEFAN_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
  for (const auto& [key, value] : flags.values)
    if (!value.empty()) set_config_value(cfg, key, value);
  for (const std::string& kv : flags.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  validate_config(cfg);
  return cfg;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

FbpOptions fbp_options(const RunConfig& cfg) {
  FbpOptions o;
  o.output_every = cfg.output_every;
  o.advection = cfg.advection == "explicit" ? AdvectionMode::Explicit : AdvectionMode::Implicit;
  o.blend = {cfg.blend_lo, cfg.blend_hi};
  return o;
}

FbpRun solve_from_config(const RunConfig& cfg) {
  const Grid grid(cfg.n_cells);
  const FracWeights w = build_weights(cfg.alpha, grid);
  if (cfg.dump_weights) write_weight_tables(w, cfg.output_dir);
  const StefanProblem pb = make_problem(cfg, grid);
  if (cfg.mode == "fixed-point") {
    const FrontPath guess = resting_front(pb.b, time_grid(pb.t_start, pb.horizon, cfg.dt));
    return fixed_point_P(pb, guess, cfg.max_iters, cfg.fp_tol, grid, w, fbp_options(cfg));
  }
  return solve_fbp(pb, grid, w, cfg.dt, fbp_options(cfg));
}

int cmd_solve(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const FbpRun run = solve_from_config(cfg);
  write_run_artifacts(run, cfg, cfg.output_dir);
  std::printf("s_final=%.12g max_residual=%.3e wall=%.2fs\n", run.s_final(), run.max_residual(), seconds_since(t0));
  return kExitOk;
}

double loglog_slope(const Samples& t, const Samples& s, double from) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (t[j] < from - 1e-12 || !(s[j] > 0.0)) continue;
    const double x = std::log(t[j]), y = std::log(s[j]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

int cmd_bzero(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const Grid grid(cfg.n_cells);
  const FracWeights w = build_weights(cfg.alpha, grid);
  StefanProblem tmpl = make_problem(cfg, grid);
  tmpl.u0.clear();
  tmpl.t_start = 0.0;
  const BZeroResult res = solve_b_zero(tmpl, cfg.m_list, grid, w, cfg.dt, fbp_options(cfg), cfg.tol_ordering);

  std::string csv = "t";
  for (int m : res.m_list) csv += ",s_m" + std::to_string(m);
  csv += ",extrapolated,error_estimate,order\n";
  for (std::size_t j = 0; j < res.times.size(); ++j) {
    csv += fmt17(res.times[j]);
    for (const auto& run : res.members) csv += "," + fmt17(run.front().s_values[j]);
    csv += "," + fmt17(res.extrapolated[j]) + "," + fmt17(res.error_estimate[j]) + "," + fmt17(res.order[j]) + "\n";
  }
  write_atomic(fs::path(cfg.output_dir) / "bzero_fronts.csv", csv);

  const double slope = loglog_slope(res.times, res.extrapolated, 0.5 * cfg.T);
  nlohmann::json j;
  j["alpha"] = cfg.alpha;
  j["h_spec"] = tmpl.h.describe();
  j["m_list"] = res.m_list;
  j["N"] = cfg.n_cells;
  j["dt"] = cfg.dt;
  j["ordering_violation"] = res.ordering_violation;
  j["s_final_extrapolated"] = res.extrapolated.back();
  j["error_estimate_final"] = res.error_estimate.back();
  j["loglog_slope_second_half"] = slope;
  j["expected_slope"] = 1.0 / (1.0 + cfg.alpha);
  j["config_hash"] = config_hash(cfg);
  write_atomic(fs::path(cfg.output_dir) / "bzero.json", j.dump(2) + "\n");
  std::printf("s_final=%.12g (extrapolated, +-%.2e) slope=%.5f expected=%.5f ordering_violation=%.2e wall=%.2fs\n",
              res.extrapolated.back(), res.error_estimate.back(), slope, 1.0 / (1.0 + cfg.alpha),
              res.ordering_violation, seconds_since(t0));
  return kExitOk;
}

int cmd_benchmark(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const double restart = cfg.t0 > 0.0 ? cfg.t0 : 0.1;
  const AnalyticBenchmark bench(cfg.alpha, cfg.h0);
  std::string csv = "N,dt,err_s,err_u,max_residual\n";
  std::printf("%6s %10s %12s %12s %12s %8s\n", "N", "dt", "err_s", "err_u", "residual", "order_s");
  double prev = 0.0;
  for (int level : {4, 2, 1}) {
    const std::size_t n = cfg.n_cells / level;
    const double dt = cfg.dt * level;
    const Grid grid(n);
    const FracWeights w = build_weights(cfg.alpha, grid);
    const StefanProblem pb = restart_problem(bench, restart, cfg.T, grid);
    const FbpRun run = solve_fbp(pb, grid, w, dt, fbp_options(cfg));
    double es = 0.0;
    for (std::size_t k = 0; k < run.front().size(); ++k) {
      const double exact = bench.front(run.front().times[k]);
      es = std::max(es, std::abs(run.front().s_values[k] - exact) / exact);
    }
    const Samples u = run.solution.temperature(run.solution.frames.size() - 1);
    const double s = run.s_final();
    double eu = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double exact = bench.temperature(grid.node(i) * s, cfg.T);
      eu = std::max(eu, std::abs(u[i] - exact));
      scale = std::max(scale, std::abs(exact));
    }
    eu /= scale;
    const double order = prev > 0.0 ? std::log2(prev / es) : std::nan("");
    prev = es;
    std::printf("%6zu %10.3e %12.4e %12.4e %12.4e %8.3f\n", n, dt, es, eu, run.max_residual(), order);
    csv += std::to_string(n) + "," + fmt17(dt) + "," + fmt17(es) + "," + fmt17(eu) + "," + fmt17(run.max_residual()) +
           "\n";
  }
  write_atomic(fs::path(cfg.output_dir) / "benchmark.csv", csv);
  std::printf("eta=%.12g wall=%.2fs\n", bench.eta(), seconds_since(t0));
  return kExitOk;
}

int cmd_eta(const RunConfig& cfg) {
  const double eta = eta_solve(cfg.alpha, cfg.h0, 1e-12);
  const double res = std::abs(h_alpha(cfg.alpha, cfg.h0, eta, 1e-14) - eta);
  std::printf("%s,%s,%s,%s\n", fmt17(cfg.alpha).c_str(), fmt17(cfg.h0).c_str(), fmt17(eta).c_str(),
              fmt17(res).c_str());
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg, const std::string& input) {
  const fs::path dir = input.empty() ? fs::path(cfg.output_dir) : fs::path(input);
  const FbpRun run = load_run_artifacts(dir);
  std::vector<PropertyReport> reports;
  reports.push_back(check_positivity(run, cfg.tol_positivity));
  reports.push_back(check_envelope(run, cfg.tol_envelope));
  reports.push_back(check_velocity_bounds(run, cfg.tol_positivity));
  try {
    reports.push_back(check_boundary_exponent(run, cfg.window_frac, cfg.tol_exponent));
  } catch (const std::invalid_argument& e) {
    PropertyReport r;
    r.name = "boundary-exponent";
    r.status = PropertyStatus::NotApplicable;
    r.tolerance = cfg.tol_exponent;
    r.note = e.what();
    reports.push_back(r);
  }
  write_atomic(dir / "verify.json", reports_to_json(reports) + "\n");
  bool ok = true;
  std::printf("%-18s %-15s %14s %12s\n", "property", "status", "worst", "tolerance");
  for (const auto& r : reports) {
    std::printf("%-18s %-15s %14.4e %12.3e\n", r.name.c_str(), to_string(r.status), r.worst_violation, r.tolerance);
    ok = ok && r.status != PropertyStatus::Fail;
  }
  return ok ? kExitOk : kExitVerify;
}

int cmd_sweep(const RunConfig& cfg) {
  const auto eq = cfg.vary.find('=');
  if (eq == std::string::npos) throw ConfigError("sweep needs vary = key=v1,v2,...");
  const std::string key = cfg.vary.substr(0, eq);
  std::vector<std::string> values;
  {
    std::stringstream ss(cfg.vary.substr(eq + 1));
    std::string v;
    while (std::getline(ss, v, ',')) values.push_back(v);
  }
  std::vector<RunConfig> members;
  for (std::size_t k = 0; k < values.size(); ++k) {
    RunConfig m = cfg;
    m.subcommand = "solve";
    m.vary.clear();
    set_config_value(m, key, values[k]);
    m.output_dir = (fs::path(cfg.output_dir) / ("member_" + std::to_string(k))).string();
    validate_config(m);
    members.push_back(m);
  }
  const std::size_t workers =
      std::max<std::size_t>(1, cfg.workers ? cfg.workers : std::thread::hardware_concurrency());
  std::vector<nlohmann::json> rows(members.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < members.size();) {
      nlohmann::json row{{"index", k}, {"key", key}, {"value", values[k]}, {"output_dir", members[k].output_dir},
                         {"config_hash", config_hash(members[k])}};
      try {
        const FbpRun run = solve_from_config(members[k]);
        write_run_artifacts(run, members[k], members[k].output_dir);
        row["status"] = "ok";
        row["s_final"] = run.s_final();
        row["max_residual"] = run.max_residual();
      } catch (const std::exception& e) {
        row["status"] = "error";
        row["error"] = e.what();
        failed = true;
      }
      rows[k] = row;
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < std::min(workers, members.size()); ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  nlohmann::json manifest{{"vary", cfg.vary}, {"config_hash", config_hash(cfg)}, {"members", rows}};
  write_atomic(fs::path(cfg.output_dir) / "sweep.json", manifest.dump(2) + "\n");
  for (const auto& r : rows)
    std::printf("%s=%s %s\n", key.c_str(), r["value"].get<std::string>().c_str(),
                r["status"] == "ok" ? ("s_final=" + fmt17(r["s_final"].get<double>())).c_str()
                                    : r["error"].get<std::string>().c_str());
  return failed ? kExitSolver : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Space-fractional one-phase Stefan problem solver"};
  app.require_subcommand(1);
  std::map<std::string, Flags> flags;
  const std::vector<std::pair<std::string, std::string>> subs = {
      {"solve", "Time-marching or fixed-point free-boundary solve"},
      {"bzero", "b -> 0 limit through b = 1/m with extrapolation"},
      {"benchmark", "Refinement ladder against the self-similar solution"},
      {"eta", "Self-similar front coefficient"},
      {"verify", "Property checks on stored run artifacts"},
      {"sweep", "Parallel runs over one varied config key"}};
  for (const auto& [name, help] : subs) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_config_flags(sub, flags[name]);
    if (name == "verify") sub->add_option("--input", flags[name].input_dir, "Run artifact directory");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  RunConfig cfg;
  try {
    cfg = resolve_config(name, flags[name]);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  try {
    if (name == "solve") return cmd_solve(cfg);
    if (name == "bzero") return cmd_bzero(cfg);
    if (name == "benchmark") return cmd_benchmark(cfg);
    if (name == "eta") return cmd_eta(cfg);
    if (name == "verify") return cmd_verify(cfg, flags[name].input_dir);
    if (name == "sweep") return cmd_sweep(cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  }
  return kExitUsage;
}
