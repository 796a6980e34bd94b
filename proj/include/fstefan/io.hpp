#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "fstefan/fbp.hpp"

namespace fstefan {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kSchemaVersion = 1;

/// Flat run configuration. Every field has a key of the same name in the
/// config file (see config_keys()).
struct RunConfig {
  std::string subcommand = "solve";
  int schema_version = kSchemaVersion;
  double alpha = 0.5;
  /// "const:h", "power:h0,p", "table:t=h;...", or "file:<csv of t,h>".
  std::string h_spec = "const:1";
  double b = 0.25;
  /// "zero", "envelope:theta" or "file:<csv of x,u0 on [0,b]>".
  std::string u0 = "zero";
  double T = 1.0;
  double t0 = 0.0;
  std::size_t n_cells = 128;
  double dt = 1e-3;
  std::string output_dir = "out";
  std::vector<int> m_list{4, 8, 16};
  double h0 = 1.0;
  std::size_t output_every = 1;
  std::string advection = "implicit";
  std::string mode = "time-marching";
  std::size_t max_iters = 50;
  double fp_tol = 1e-8;
  double blend_lo = 0.5;
  double blend_hi = 0.75;
  double tol_positivity = 1e-8;
  double tol_envelope = 1e-6;
  double tol_exponent = 0.02;
  double tol_ordering = 1e-6;
  double window_frac = 0.05;
  std::size_t workers = 0;
  bool dump_weights = false;
  /// Sweep axis, "key=v1,v2,...".
  std::string vary;
};

const std::vector<std::string>& config_keys();

/// Sets one key from its text form. Throws ConfigError naming the key.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& cfg, const std::string& key);

/// Parses "key = value" lines ('#' starts a comment). Unknown keys and
/// malformed lines raise ConfigError with the line number.
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError naming the violated invariant.
void validate_config(const RunConfig& cfg);

/// Keys that only say where and how wide a run executes (output_dir,
/// workers); they never change results and are left out of the hash.
bool is_placement_key(const std::string& key);

/// Canonical "key=value" dump (sorted keys, 17 significant digits) without
/// placement keys; the config hash is FNV-1a 64 over it.
std::string canonical_config(const RunConfig& cfg);
std::string config_hash(const RunConfig& cfg);

BoundaryFlux make_flux(const RunConfig& cfg);
/// Problem with u0 resampled onto the mapped grid p_i = x_i / b.
StefanProblem make_problem(const RunConfig& cfg, const Grid& grid);

/// 17 significant digits, '.' decimal point.
std::string fmt17(double x);
/// Parses "a,b,c" as integers.
std::vector<int> parse_int_list(const std::string& text);

/// Writes via a temporary sibling and rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);

std::string frames_v_csv(const FbpRun& run);
std::string frames_u_csv(const FbpRun& run);
std::string front_csv(const FbpRun& run);
std::string run_csv(const FbpRun& run);
std::string summary_json(const FbpRun& run, const RunConfig& cfg);

/// frames_v.csv, frames_u.csv, front.csv, run.csv and summary.json in dir.
void write_run_artifacts(const FbpRun& run, const RunConfig& cfg, const std::filesystem::path& dir);

/// Rebuilds a run from its artifacts. The regular part is replaced by the
/// stored temperature (phi = 0), which is all the property checks need.
FbpRun load_run_artifacts(const std::filesystem::path& dir);

/// Row-major CSV dump of the operator tables.
void write_weight_tables(const FracWeights& w, const std::filesystem::path& dir);

}  // namespace fstefan
