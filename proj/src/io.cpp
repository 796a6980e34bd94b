#include "fstefan/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

// Boost 1.74's pchip calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include "json.hpp"

namespace fstefan {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  }
  if (trim(v.substr(used)) != "") throw ConfigError("key '" + key + "': trailing text in '" + v + "'");
  return x;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x < 0 || x != std::floor(x)) throw ConfigError("key '" + key + "': expected a nonnegative integer");
  return static_cast<std::size_t>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + v + "'");
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define FS_NUM(name) \
  { #name, {[](RunConfig& c, const std::string& v) { c.name = to_double(#name, v); }, \
            [](const RunConfig& c) { return fmt17(c.name); }} }
#define FS_SIZE(name) \
  { #name, {[](RunConfig& c, const std::string& v) { c.name = to_size(#name, v); }, \
            [](const RunConfig& c) { return std::to_string(c.name); }} }
#define FS_STR(name) \
  { #name, {[](RunConfig& c, const std::string& v) { c.name = v; }, [](const RunConfig& c) { return c.name; }} }

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      FS_STR(subcommand),
      {"schema_version",
       {[](RunConfig& c, const std::string& v) { c.schema_version = static_cast<int>(to_size("schema_version", v)); },
        [](const RunConfig& c) { return std::to_string(c.schema_version); }}},
      FS_NUM(alpha),
      FS_STR(h_spec),
      FS_NUM(b),
      FS_STR(u0),
      FS_NUM(T),
      FS_NUM(t0),
      FS_SIZE(n_cells),
      FS_NUM(dt),
      FS_STR(output_dir),
      {"m_list",
       {[](RunConfig& c, const std::string& v) { c.m_list = parse_int_list(v); },
        [](const RunConfig& c) { return join_ints(c.m_list); }}},
      FS_NUM(h0),
      FS_SIZE(output_every),
      FS_STR(advection),
      FS_STR(mode),
      FS_SIZE(max_iters),
      FS_NUM(fp_tol),
      FS_NUM(blend_lo),
      FS_NUM(blend_hi),
      FS_NUM(tol_positivity),
      FS_NUM(tol_envelope),
      FS_NUM(tol_exponent),
      FS_NUM(tol_ordering),
      FS_NUM(window_frac),
      FS_SIZE(workers),
      {"dump_weights",
       {[](RunConfig& c, const std::string& v) { c.dump_weights = to_bool("dump_weights", v); },
        [](const RunConfig& c) { return std::string(c.dump_weights ? "true" : "false"); }}},
      FS_STR(vary),
  };
  return table;
}

#undef FS_NUM
#undef FS_SIZE
#undef FS_STR

}  // namespace

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse integer '" + item + "' in list '" + text + "'");
    }
    if (used != item.size()) throw ConfigError("cannot parse integer '" + item + "' in list '" + text + "'");
    out.push_back(v);
  }
  return out;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, f] : fields()) k.push_back(name);
    return k;
  }();
  return keys;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto it = fields().find(key);
  if (it == fields().end()) throw ConfigError("unknown config key '" + key + "'");
  it->second.set(cfg, trim(value));
}

std::string get_config_value(const RunConfig& cfg, const std::string& key) {
  const auto it = fields().find(key);
  if (it == fields().end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second.get(cfg);
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    try {
      set_config_value(cfg, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  if (cfg.schema_version != kSchemaVersion)
    throw ConfigError(origin + ": unsupported schema_version " + std::to_string(cfg.schema_version));
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
  return parse_config_text(read_file(path), path.string());
}

void validate_config(const RunConfig& c) {
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
  if (!(c.T > 0.0)) throw ConfigError("T must be positive");
  if (!(c.T > c.t0) || c.t0 < 0.0) throw ConfigError("t0 must satisfy 0 <= t0 < T");
  if (c.n_cells < 16) throw ConfigError("n_cells must be at least 16");
  if (!(c.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(c.b >= 0.0)) throw ConfigError("b must be nonnegative");
  if (c.advection != "implicit" && c.advection != "explicit")
    throw ConfigError("advection must be 'implicit' or 'explicit'");
  if (c.mode != "time-marching" && c.mode != "fixed-point")
    throw ConfigError("mode must be 'time-marching' or 'fixed-point'");
  if (c.output_every == 0) throw ConfigError("output_every must be positive");
  if (!(c.blend_lo >= 0.5 && c.blend_hi <= 0.75 && c.blend_hi > c.blend_lo))
    throw ConfigError("blend interval must be a nonempty subinterval of [1/2, 3/4]");
  for (std::size_t i = 0; i < c.m_list.size(); ++i)
    if (c.m_list[i] < 1 || (i > 0 && c.m_list[i] <= c.m_list[i - 1]))
      throw ConfigError("m_list must be increasing positive integers");
  try {
    make_flux(c);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

bool is_placement_key(const std::string& key) { return key == "output_dir" || key == "workers"; }

std::string canonical_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& [key, f] : fields())
    if (!is_placement_key(key)) out += key + "=" + f.get(cfg) + "\n";
  return out;
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : canonical_config(cfg)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

BoundaryFlux make_flux(const RunConfig& cfg) {
  if (cfg.h_spec.rfind("file:", 0) == 0) {
    const CsvTable t = read_csv(cfg.h_spec.substr(5));
    std::vector<double> ts, hs;
    for (const auto& r : t.rows) {
      if (r.size() < 2) throw ConfigError("flux table rows need t,h");
      ts.push_back(r[0]);
      hs.push_back(r[1]);
    }
    return BoundaryFlux::table(ts, hs);
  }
  return BoundaryFlux::parse(cfg.h_spec);
}

StefanProblem make_problem(const RunConfig& cfg, const Grid& grid) {
  StefanProblem pb;
  pb.alpha = cfg.alpha;
  pb.h = make_flux(cfg);
  pb.b = cfg.b;
  pb.t_start = cfg.t0;
  pb.horizon = cfg.T;
  const std::string& u = cfg.u0;
  if (u == "zero") {
    pb.u0.clear();
  } else if (u.rfind("envelope:", 0) == 0) {
    const double theta = to_double("u0", u.substr(9));
    const double m = pb.flux_bound();
    if (!std::isfinite(m)) throw ConfigError("u0 envelope needs a bounded flux");
    pb.u0.resize(grid.n_nodes());
    const double scale = theta * m / std::tgamma(1.0 + cfg.alpha);
    for (std::size_t i = 0; i < grid.n_nodes(); ++i)
      pb.u0[i] = scale * pow_diff(cfg.b, grid.node(i) * cfg.b, cfg.alpha);
    pb.u0.back() = 0.0;
  } else if (u.rfind("file:", 0) == 0) {
    const CsvTable t = read_csv(u.substr(5));
    std::vector<double> xs, ys;
    for (const auto& r : t.rows) {
      if (r.size() < 2) throw ConfigError("u0 table rows need x,u");
      xs.push_back(r[0]);
      ys.push_back(r[1]);
    }
    if (xs.size() < 4) throw ConfigError("u0 table needs at least 4 rows");
    if (std::abs(xs.front()) > 1e-12 || std::abs(xs.back() - cfg.b) > 1e-9 * std::max(1.0, cfg.b))
      throw ConfigError("u0 table must span [0, b]");
    // monotone cubic resampling onto x = p_i b
    boost::math::interpolators::pchip<std::vector<double>> spline(std::move(xs), std::move(ys));
    pb.u0.resize(grid.n_nodes());
    for (std::size_t i = 0; i < grid.n_nodes(); ++i) pb.u0[i] = std::max(0.0, spline(grid.node(i) * cfg.b));
  } else {
    throw ConfigError("u0 must be 'zero', 'envelope:theta' or 'file:path'");
  }
  return pb;
}

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CsvTable read_csv(const fs::path& path) {
  std::stringstream ss(read_file(path));
  CsvTable t;
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(trim(cell));
    if (t.header.empty() && t.rows.empty()) {
      char* end = nullptr;
      std::strtod(cells[0].c_str(), &end);
      if (end == cells[0].c_str()) {
        t.header = cells;
        continue;
      }
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (end == c.c_str() || *end != '\0')
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": bad number '" + c + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

namespace {

std::string nodal_csv(const FbpRun& run, bool temperature) {
  std::string out = "t";
  for (std::size_t i = 0; i <= run.n_cells; ++i) out += ",p_" + std::to_string(i);
  out += "\n";
  for (std::size_t k = 0; k < run.solution.frames.size(); ++k) {
    const Frame& f = run.solution.frames[k];
    const Samples vals = temperature ? run.solution.temperature(k) : f.v;
    out += fmt17(f.t);
    for (double v : vals) out += "," + fmt17(v);
    out += "\n";
  }
  return out;
}

}  // namespace

std::string frames_v_csv(const FbpRun& run) { return nodal_csv(run, false); }
std::string frames_u_csv(const FbpRun& run) { return nodal_csv(run, true); }

std::string front_csv(const FbpRun& run) {
  std::string out = "t,s,s_dot,amplitude\n";
  for (const Frame& f : run.solution.frames)
    out += fmt17(f.t) + "," + fmt17(f.s) + "," + fmt17(f.s_dot) + "," + fmt17(f.amplitude) + "\n";
  return out;
}

std::string run_csv(const FbpRun& run) {
  std::string out = "t,s,s_dot,residual\n";
  for (std::size_t k = 0; k < run.solution.frames.size(); ++k) {
    const Frame& f = run.solution.frames[k];
    out += fmt17(f.t) + "," + fmt17(f.s) + "," + fmt17(f.s_dot) + "," + fmt17(run.residuals.at(k)) + "\n";
  }
  return out;
}

std::string summary_json(const FbpRun& run, const RunConfig& cfg) {
  json j;
  j["alpha"] = run.problem.alpha;
  j["b"] = run.problem.b;
  j["h_spec"] = run.problem.h.describe();
  j["N"] = run.n_cells;
  j["dt"] = run.dt;
  j["t0"] = run.problem.t_start;
  j["T"] = run.problem.horizon;
  j["s_final"] = run.s_final();
  j["max_residual"] = run.max_residual();
  j["iterations"] = run.iterations;
  j["mode"] = to_string(run.mode);
  j["max_velocity_excess"] = run.max_excess;
  j["max_velocity_deficit"] = run.max_deficit;
  j["config_hash"] = config_hash(cfg);
  j["schema_version"] = kSchemaVersion;
  json c;
  for (const auto& key : config_keys())
    if (!is_placement_key(key)) c[key] = get_config_value(cfg, key);
  j["config"] = c;
  j["grid"] = {{"n_cells", run.n_cells}, {"n_nodes", run.n_cells + 1}, {"spacing", 1.0 / run.n_cells}};
  return j.dump(2) + "\n";
}

void write_run_artifacts(const FbpRun& run, const RunConfig& cfg, const fs::path& dir) {
  fs::create_directories(dir);
  write_atomic(dir / "frames_v.csv", frames_v_csv(run));
  write_atomic(dir / "frames_u.csv", frames_u_csv(run));
  write_atomic(dir / "front.csv", front_csv(run));
  write_atomic(dir / "run.csv", run_csv(run));
  write_atomic(dir / "summary.json", summary_json(run, cfg));
}

FbpRun load_run_artifacts(const fs::path& dir) {
  const json j = json::parse(read_file(dir / "summary.json"));
  RunConfig cfg;
  for (const auto& [key, val] : j.at("config").items()) set_config_value(cfg, key, val.get<std::string>());
  FbpRun run;
  run.n_cells = j.at("N").get<std::size_t>();
  run.dt = j.at("dt").get<double>();
  run.mode = j.at("mode").get<std::string>() == "fixed-point" ? FbpMode::FixedPoint : FbpMode::TimeMarching;
  run.iterations = j.at("iterations").get<std::size_t>();
  run.max_excess = j.value("max_velocity_excess", 0.0);
  run.max_deficit = j.value("max_velocity_deficit", 0.0);
  run.max_violation = std::max(run.max_excess, run.max_deficit);
  const Grid grid(run.n_cells);
  run.problem = make_problem(cfg, grid);
  run.problem.b = j.at("b").get<double>();

  const CsvTable u = read_csv(dir / "frames_u.csv");
  const CsvTable r = read_csv(dir / "run.csv");
  if (u.rows.size() != r.rows.size()) throw std::runtime_error("frames_u.csv and run.csv disagree on frame count");
  run.solution.alpha = run.problem.alpha;
  run.solution.phi.assign(run.n_cells + 1, 0.0);
  for (std::size_t k = 0; k < u.rows.size(); ++k) {
    const auto& ur = u.rows[k];
    const auto& rr = r.rows[k];
    if (ur.size() != run.n_cells + 2 || rr.size() != 4) throw std::runtime_error("artifact row has wrong width");
    run.solution.frames.push_back({ur[0], rr[1], rr[2], 0.0, Samples(ur.begin() + 1, ur.end())});
    run.solution.front.times.push_back(rr[0]);
    run.solution.front.s_values.push_back(rr[1]);
    run.solution.front.s_dots.push_back(rr[2]);
    run.residuals.push_back(rr[3]);
  }
  return run;
}

void write_weight_tables(const FracWeights& w, const fs::path& dir) {
  auto dump = [](const DenseTable& t) {
    std::string out;
    for (std::size_t r = 0; r < t.rows(); ++r) {
      for (std::size_t c = 0; c < t.cols(); ++c) out += (c ? "," : "") + fmt17(t(r, c));
      out += "\n";
    }
    return out;
  };
  write_atomic(dir / "weights_integral.csv", dump(w.integral));
  write_atomic(dir / "weights_integral_complement.csv", dump(w.integral_complement));
  write_atomic(dir / "weights_flux.csv", dump(w.flux));
  write_atomic(dir / "weights_divergence.csv", dump(w.divergence));
}

}  // namespace fstefan
