#include "fstefan/props.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace fstefan {

using nlohmann::json;

const char* to_string(PropertyStatus s) {
  switch (s) {
    case PropertyStatus::Pass: return "pass";
    case PropertyStatus::Fail: return "fail";
    case PropertyStatus::NotApplicable: return "not-applicable";
  }
  return "?";
}

namespace {

PropertyStatus status_from(const std::string& s) {
  if (s == "pass") return PropertyStatus::Pass;
  if (s == "fail") return PropertyStatus::Fail;
  if (s == "not-applicable") return PropertyStatus::NotApplicable;
  throw std::invalid_argument("unknown property status '" + s + "'");
}

json to_j(const PropertyReport& r) {
  json j;
  j["name"] = r.name;
  j["status"] = to_string(r.status);
  j["worst_violation"] = r.worst_violation;
  j["x"] = r.x ? json(*r.x) : json(nullptr);
  j["t"] = r.t ? json(*r.t) : json(nullptr);
  j["tolerance"] = r.tolerance;
  j["note"] = r.note;
  return j;
}

PropertyReport from_j(const json& j) {
  PropertyReport r;
  r.name = j.at("name").get<std::string>();
  r.status = status_from(j.at("status").get<std::string>());
  r.worst_violation = j.at("worst_violation").get<double>();
  if (!j.at("x").is_null()) r.x = j.at("x").get<double>();
  if (!j.at("t").is_null()) r.t = j.at("t").get<double>();
  r.tolerance = j.at("tolerance").get<double>();
  r.note = j.value("note", "");
  return r;
}

PropertyReport judged(PropertyReport r) {
  r.status = r.worst_violation <= r.tolerance ? PropertyStatus::Pass : PropertyStatus::Fail;
  return r;
}

PropertyReport not_applicable(std::string name, double tol, std::string why) {
  PropertyReport r;
  r.name = std::move(name);
  r.status = PropertyStatus::NotApplicable;
  r.tolerance = tol;
  r.note = std::move(why);
  return r;
}

}  // namespace

std::string PropertyReport::to_json() const { return to_j(*this).dump(); }

PropertyReport PropertyReport::from_json(const std::string& text) { return from_j(json::parse(text)); }

std::string reports_to_json(const std::vector<PropertyReport>& reports) {
  json a = json::array();
  for (const auto& r : reports) a.push_back(to_j(r));
  return a.dump(2);
}

std::vector<PropertyReport> reports_from_json(const std::string& text) {
  std::vector<PropertyReport> out;
  for (const auto& j : json::parse(text)) out.push_back(from_j(j));
  return out;
}

PropertyReport check_positivity(const FbpRun& run, double tol) {
  PropertyReport r;
  r.name = "positivity";
  r.tolerance = tol;
  const Grid grid(run.n_cells);
  for (std::size_t k = 0; k < run.solution.frames.size(); ++k) {
    const Samples u = run.solution.temperature(k);
    const double s = run.solution.frames[k].s;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (-u[i] > r.worst_violation) {
        r.worst_violation = -u[i];
        r.x = grid.node(i) * s;
        r.t = run.solution.frames[k].t;
      }
    }
  }
  return judged(r);
}

PropertyReport check_envelope(const FbpRun& run, double tol) {
  const StefanProblem& pb = run.problem;
  const Grid grid(run.n_cells);
  const double m = pb.flux_bound();
  if (!std::isfinite(m)) return not_applicable("envelope", tol, "flux bound M is infinite");
  if (!pb.envelope_hypothesis(grid, tol)) return not_applicable("envelope", tol, "u0 exceeds the envelope at t = 0");
  PropertyReport r;
  r.name = "envelope";
  r.tolerance = tol;
  const double a = pb.alpha;
  const double scale = m / std::tgamma(1.0 + a);
  for (std::size_t k = 0; k < run.solution.frames.size(); ++k) {
    const Samples u = run.solution.temperature(k);
    const double s = run.solution.frames[k].s;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double x = grid.node(i) * s;
      const double excess = u[i] - scale * pow_diff(s, x, a);
      if (excess > r.worst_violation) {
        r.worst_violation = excess;
        r.x = x;
        r.t = run.solution.frames[k].t;
      }
    }
  }
  return judged(r);
}

PropertyReport check_velocity_bounds(const FbpRun& run, double tol) {
  PropertyReport r;
  r.name = "velocity-bounds";
  r.tolerance = tol;
  const double m = run.problem.flux_bound();
  const FrontPath& f = run.front();
  double deficit = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) {
    // the raw velocity is -front_flux; the stored s_dot is already clamped.
    // Only the raw excess over M is judged: a raw deficit is clamped away and
    // is a discretization error of a zero flux, reported in the note.
    const double raw = n < run.solution.front_flux.size() ? -run.solution.front_flux[n] : f.s_dots[n];
    const double v = std::max({raw - m, -f.s_dots[n], f.s_dots[n] - m});
    if (v > r.worst_violation) {
      r.worst_violation = v;
      r.t = f.times[n];
    }
    deficit = std::max(deficit, -raw);
  }
  if (deficit > 0.0) r.note = "raw velocity deficit " + std::to_string(deficit);
  return judged(r);
}

PropertyReport check_front_ordering(const std::vector<FbpRun>& runs, double tol) {
  if (runs.size() < 2) throw std::invalid_argument("check_front_ordering needs at least two runs");
  PropertyReport r;
  r.name = "front-ordering";
  r.tolerance = tol;
  for (std::size_t k = 1; k < runs.size(); ++k) {
    const FrontPath& lo = runs[k - 1].front();
    const FrontPath& hi = runs[k].front();
    std::size_t j = 0;
    for (std::size_t i = 0; i < lo.size(); ++i) {
      while (j < hi.size() && hi.times[j] < lo.times[i] - 1e-12) ++j;
      if (j == hi.size()) break;
      if (std::abs(hi.times[j] - lo.times[i]) > 1e-12) continue;
      const double v = lo.s_values[i] - hi.s_values[j];
      if (v > r.worst_violation) {
        r.worst_violation = v;
        r.t = lo.times[i];
      }
    }
  }
  return judged(r);
}

PropertyReport check_boundary_exponent(const FbpRun& run, double window_frac, double tol) {
  const StefanProblem& pb = run.problem;
  const Grid grid(run.n_cells);
  const double g = std::tgamma(1.0 + pb.alpha);
  PropertyReport r;
  r.name = "boundary-exponent";
  r.tolerance = tol;
  bool tested = false;
  for (std::size_t k = 0; k < run.solution.frames.size(); ++k) {
    const Frame& f = run.solution.frames[k];
    // the initial frame is prescribed data, not bound by the flux condition
    if (f.t <= pb.t_start) continue;
    const double h = pb.h.value(f.t);
    if (!(h > 0.0) || !std::isfinite(h)) continue;
    const Samples u = run.solution.temperature(k);
    // least squares for d_i = c * a_i, a_i = -x_i^alpha / Gamma(1+alpha)
    double saa = 0, sad = 0;
    std::size_t pts = 0;
    for (std::size_t i = 1; i < u.size() && grid.node(i) <= window_frac + 1e-14; ++i) {
      const double a = -std::pow(grid.node(i) * f.s, pb.alpha) / g;
      saa += a * a;
      sad += a * (u[i] - u[0]);
      ++pts;
    }
    if (pts < 4) throw std::invalid_argument("check_boundary_exponent: fewer than 4 nodes in the fit window");
    const double c = sad / saa;
    tested = true;
    const double rel = std::abs(c - h) / h;
    if (rel >= r.worst_violation) {
      r.worst_violation = rel;
      r.t = f.t;
    }
  }
  if (!tested) return not_applicable("boundary-exponent", tol, "h vanishes at every frame");
  return judged(r);
}

PowerFit fit_boundary_power(const FbpRun& run, std::size_t frame, double window_frac) {
  const Grid grid(run.n_cells);
  const Frame& f = run.solution.frames.at(frame);
  const Samples u = run.solution.temperature(frame);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 1; i < u.size() && grid.node(i) <= window_frac + 1e-14; ++i) {
    const double drop = u[0] - u[i];
    if (!(drop > 0.0)) continue;
    const double lx = std::log(grid.node(i) * f.s);
    const double ly = std::log(drop);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 4) throw std::invalid_argument("fit_boundary_power: fewer than 4 nodes in the fit window");
  const double dn = static_cast<double>(n);
  PowerFit p;
  p.exponent = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
  p.coefficient = std::exp((sy - p.exponent * sx) / dn);
  p.points = n;
  return p;
}

Samples l2_monitor(const FbpRun& run) {
  const Grid grid(run.n_cells);
  Samples out;
  for (std::size_t k = 0; k < run.solution.frames.size(); ++k) {
    Samples u = run.solution.temperature(k);
    for (double& x : u) x *= x;
    out.push_back(std::sqrt(run.solution.frames[k].s * grid.integrate(u)));
  }
  return out;
}

bool l2_growth_flag(const Samples& coarse, const Samples& fine, double factor) {
  const double a = coarse.empty() ? 0.0 : *std::max_element(coarse.begin(), coarse.end());
  const double b = fine.empty() ? 0.0 : *std::max_element(fine.begin(), fine.end());
  return b > factor * std::max(a, std::numeric_limits<double>::min());
}

}  // namespace fstefan
