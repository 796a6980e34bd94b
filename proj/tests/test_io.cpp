#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include "doctest.h"
#include "fstefan/io.hpp"
#include "fstefan/props.hpp"

using namespace fstefan;
namespace fs = std::filesystem;

namespace {

struct ScratchDir {
  fs::path path;
  ScratchDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("fstefan_io_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

RunConfig small_config() {
  return parse_config_text(
      "alpha = 0.5\n"
      "h_spec = const:1\n"
      "b = 0.5\n"
      "u0 = envelope:0.5\n"
      "T = 0.2\n"
      "n_cells = 32\n"
      "dt = 0.005\n"
      "output_every = 4\n");
}

FbpRun solve_config(const RunConfig& cfg) {
  const Grid g(cfg.n_cells);
  const FracWeights w = build_weights(cfg.alpha, g);
  FbpOptions opt;
  opt.output_every = cfg.output_every;
  return solve_fbp(make_problem(cfg, g), g, w, cfg.dt, opt);
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = parse_config_text(
      "# comment line\n"
      "alpha = 0.3   # trailing comment\n"
      "\n"
      "h_spec = power:1,-0.25\n"
      "m_list = 4, 8, 16, 32\n"
      "dump_weights = true\n"
      "output_dir = results/run one\n");
  CHECK(c.alpha == 0.3);
  CHECK(c.h_spec == "power:1,-0.25");
  CHECK(c.m_list == std::vector<int>{4, 8, 16, 32});
  CHECK(c.dump_weights);
  CHECK(c.output_dir == "results/run one");
  CHECK(c.b == RunConfig{}.b);

  CHECK_THROWS_WITH_AS(parse_config_text("alpha = 0.5\nbogus = 1\n", "x.cfg"), doctest::Contains("x.cfg:2"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("alpha 0.5\n", "y.cfg"), doctest::Contains("y.cfg:1"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("alpha = half\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("n_cells = 12.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("schema_version = 99\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/fstefan.cfg"), ConfigError);

  for (const auto& key : config_keys()) {
    RunConfig x;
    CHECK_NOTHROW(set_config_value(x, key, get_config_value(c, key)));
    CHECK(get_config_value(x, key) == get_config_value(c, key));
  }
}

TEST_CASE("config validation names the violated invariant") {
  RunConfig c;
  CHECK_NOTHROW(validate_config(c));
  c.alpha = 1.2;
  CHECK_THROWS_WITH_AS(validate_config(c), doctest::Contains("alpha must lie in (0,1)"), ConfigError);
  c = RunConfig{};
  c.n_cells = 8;
  CHECK_THROWS_WITH_AS(validate_config(c), doctest::Contains("n_cells"), ConfigError);
  c = RunConfig{};
  c.t0 = 2.0;
  CHECK_THROWS_AS(validate_config(c), ConfigError);
  c = RunConfig{};
  c.m_list = {8, 4};
  CHECK_THROWS_AS(validate_config(c), ConfigError);
  c = RunConfig{};
  c.blend_lo = 0.4;
  CHECK_THROWS_AS(validate_config(c), ConfigError);
  c = RunConfig{};
  c.h_spec = "table:0=1;1=-1";
  CHECK_THROWS_AS(validate_config(c), ConfigError);
}

TEST_CASE("config hash is canonical") {
  const RunConfig a = parse_config_text("alpha = 0.5\nb = 0.25\n");
  const RunConfig b = parse_config_text("b = 0.250\n\nalpha=0.50\n");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  RunConfig c = a;
  c.dt = 2e-3;
  CHECK(config_hash(c) != config_hash(a));
  CHECK(canonical_config(a) == canonical_config(b));
  RunConfig moved = a;
  moved.output_dir = "elsewhere";
  moved.workers = 3;
  CHECK(config_hash(moved) == config_hash(a));
}

TEST_CASE("17-digit formatting round-trips doubles") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = std::ldexp(U(rng), static_cast<int>(rng() % 60) - 30);
    CHECK(std::strtod(fmt17(x).c_str(), nullptr) == x);
  }
  CHECK(fmt17(0.5) == "0.5");
  CHECK(parse_int_list("1, 2,3") == std::vector<int>{1, 2, 3});
  CHECK_THROWS_AS(parse_int_list("1,x"), ConfigError);
}

TEST_CASE("atomic write and CSV reading") {
  ScratchDir dir;
  const fs::path p = dir.path / "sub" / "table.csv";
  write_atomic(p, "x,y\n0,1\n0.5,2.5\n");
  CHECK_FALSE(fs::exists(fs::path(p.string() + ".tmp")));
  const CsvTable t = read_csv(p);
  CHECK(t.header == std::vector<std::string>{"x", "y"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][1] == 2.5);
  write_atomic(p, "1,2\n");
  const CsvTable bare = read_csv(p);
  CHECK(bare.header.empty());
  CHECK(bare.rows.size() == 1);
  write_atomic(p, "1,oops\n");
  CHECK_THROWS(read_csv(p));
}

TEST_CASE("problems from config: presets and resampled tables") {
  ScratchDir dir;
  RunConfig c = small_config();
  const Grid g(c.n_cells);
  const StefanProblem env = make_problem(c, g);
  REQUIRE(env.u0.size() == g.n_nodes());
  CHECK(env.u0.back() == 0.0);
  CHECK(env.envelope_hypothesis(g));

  write_atomic(dir.path / "h.csv", "t,h\n0,1\n0.1,2\n0.2,0.5\n");
  c.h_spec = "file:" + (dir.path / "h.csv").string();
  CHECK(make_flux(c).value(0.05) == doctest::Approx(1.5));

  // u0 table on [0, b] with a linear profile resamples exactly
  write_atomic(dir.path / "u0.csv", "x,u\n0,0.5\n0.125,0.375\n0.25,0.25\n0.375,0.125\n0.5,0\n");
  c.u0 = "file:" + (dir.path / "u0.csv").string();
  const StefanProblem tab = make_problem(c, g);
  for (std::size_t i = 0; i < g.n_nodes(); ++i)
    CHECK(tab.u0[i] == doctest::Approx(0.5 * (1.0 - g.node(i))).epsilon(1e-12).scale(1.0));

  c.u0 = "lukewarm";
  CHECK_THROWS_AS(make_problem(c, g), ConfigError);
}

TEST_CASE("artifacts are deterministic and round-trip into the property checks") {
  ScratchDir dir;
  const RunConfig cfg = small_config();
  const FbpRun run = solve_config(cfg);
  write_run_artifacts(run, cfg, dir.path / "a");
  write_run_artifacts(solve_config(cfg), cfg, dir.path / "b");
  for (const char* f : {"frames_v.csv", "frames_u.csv", "front.csv", "run.csv", "summary.json"})
    CHECK(read_file(dir.path / "a" / f) == read_file(dir.path / "b" / f));

  const CsvTable front = read_csv(dir.path / "a" / "run.csv");
  CHECK(front.header == std::vector<std::string>{"t", "s", "s_dot", "residual"});
  CHECK(front.rows.size() == run.solution.frames.size());
  CHECK(read_file(dir.path / "a" / "summary.json").find(config_hash(cfg)) != std::string::npos);

  const FbpRun back = load_run_artifacts(dir.path / "a");
  CHECK(back.n_cells == run.n_cells);
  CHECK(back.problem.alpha == run.problem.alpha);
  REQUIRE(back.solution.frames.size() == run.solution.frames.size());
  for (std::size_t k = 0; k < back.solution.frames.size(); ++k) {
    CHECK(back.solution.temperature(k) == run.solution.temperature(k));
    CHECK(back.solution.frames[k].s == run.solution.frames[k].s);
  }
  CHECK(back.residuals == run.residuals);
  CHECK(check_positivity(back).worst_violation == check_positivity(run).worst_violation);
  CHECK(check_envelope(back).worst_violation == check_envelope(run).worst_violation);
}

TEST_CASE("weight tables dump") {
  ScratchDir dir;
  const Grid g(16);
  write_weight_tables(build_weights(0.5, g), dir.path);
  const CsvTable flux = read_csv(dir.path / "weights_flux.csv");
  CHECK(flux.rows.size() == g.n_faces());
  CHECK(flux.rows[0].size() == g.n_cells());
}
