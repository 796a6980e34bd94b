#include "fstefan/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fstefan {

namespace {

std::string fmt17(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

double parse_number(const std::string& s, const std::string& context) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse number '" + s + "' in " + context);
  }
  if (used != s.size()) throw std::invalid_argument("trailing characters in number '" + s + "' in " + context);
  return v;
}

}  // namespace

BoundaryFlux BoundaryFlux::constant(double h0) {
  if (!(h0 >= 0.0) || !std::isfinite(h0)) throw std::invalid_argument("boundary flux must satisfy h(t) >= 0");
  BoundaryFlux f;
  f.kind_ = Kind::Constant;
  f.h0_ = h0;
  return f;
}

BoundaryFlux BoundaryFlux::power(double h0, double p) {
  if (!(h0 >= 0.0) || !std::isfinite(h0)) throw std::invalid_argument("boundary flux must satisfy h(t) >= 0");
  if (!(p > -1.0) || !std::isfinite(p)) throw std::invalid_argument("power-law flux exponent must exceed -1");
  BoundaryFlux f;
  f.kind_ = Kind::Power;
  f.h0_ = h0;
  f.p_ = p;
  return f;
}

BoundaryFlux BoundaryFlux::table(std::vector<double> times, std::vector<double> values) {
  if (times.empty() || times.size() != values.size())
    throw std::invalid_argument("flux table needs matching, non-empty time and value columns");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0) || !std::isfinite(values[i]))
      throw std::invalid_argument("flux table entry " + std::to_string(i) + " is negative; h(t) >= 0 is required");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw std::invalid_argument("flux table times must be strictly increasing");
  }
  BoundaryFlux f;
  f.kind_ = Kind::Table;
  f.times_ = std::move(times);
  f.values_ = std::move(values);
  return f;
}

double BoundaryFlux::value(double t) const {
  switch (kind_) {
    case Kind::Constant: return h0_;
    case Kind::Power:
      if (h0_ == 0.0) return 0.0;
      if (t <= 0.0) return p_ < 0.0 ? std::numeric_limits<double>::infinity() : (p_ == 0.0 ? h0_ : 0.0);
      return h0_ * std::pow(t, p_);
    case Kind::Table: {
      if (t <= times_.front()) return values_.front();
      if (t >= times_.back()) return values_.back();
      const auto it = std::upper_bound(times_.begin(), times_.end(), t);
      const std::size_t j = static_cast<std::size_t>(it - times_.begin());
      const double w = (t - times_[j - 1]) / (times_[j] - times_[j - 1]);
      return (1.0 - w) * values_[j - 1] + w * values_[j];
    }
  }
  return 0.0;
}

double BoundaryFlux::rate(double t) const {
  switch (kind_) {
    case Kind::Constant: return 0.0;
    case Kind::Power:
      if (h0_ == 0.0 || p_ == 0.0) return 0.0;
      if (t <= 0.0) return std::numeric_limits<double>::infinity();
      return h0_ * p_ * std::pow(t, p_ - 1.0);
    case Kind::Table: {
      if (t < times_.front() || t >= times_.back() || times_.size() < 2) return 0.0;
      const auto it = std::upper_bound(times_.begin(), times_.end(), t);
      const std::size_t j = static_cast<std::size_t>(it - times_.begin());
      return (values_[j] - values_[j - 1]) / (times_[j] - times_[j - 1]);
    }
  }
  return 0.0;
}

double BoundaryFlux::integral(double t0, double t1) const {
  if (t1 < t0) return -integral(t1, t0);
  switch (kind_) {
    case Kind::Constant: return h0_ * (t1 - t0);
    case Kind::Power: {
      if (h0_ == 0.0) return 0.0;
      const double q = p_ + 1.0;
      return h0_ * (std::pow(std::max(t1, 0.0), q) - std::pow(std::max(t0, 0.0), q)) / q;
    }
    case Kind::Table: {
      // exact for the piecewise-linear interpolant: split at breakpoints
      std::vector<double> cuts{t0};
      for (double tb : times_)
        if (tb > t0 && tb < t1) cuts.push_back(tb);
      cuts.push_back(t1);
      double acc = 0.0;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        acc += 0.5 * (value(cuts[i]) + value(cuts[i + 1])) * (cuts[i + 1] - cuts[i]);
      return acc;
    }
  }
  return 0.0;
}

double BoundaryFlux::sup(double t0, double t1) const {
  switch (kind_) {
    case Kind::Constant: return h0_;
    case Kind::Power:
      if (h0_ == 0.0) return 0.0;
      return p_ < 0.0 ? value(t0) : value(t1);
    case Kind::Table: {
      double m = std::max(value(t0), value(t1));
      for (std::size_t i = 0; i < times_.size(); ++i)
        if (times_[i] > t0 && times_[i] < t1) m = std::max(m, values_[i]);
      return m;
    }
  }
  return 0.0;
}

bool BoundaryFlux::identically_zero() const {
  switch (kind_) {
    case Kind::Constant:
    case Kind::Power: return h0_ == 0.0;
    case Kind::Table: return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
  }
  return true;
}

std::string BoundaryFlux::describe() const {
  switch (kind_) {
    case Kind::Constant: return "const:" + fmt17(h0_);
    case Kind::Power: return "power:" + fmt17(h0_) + "," + fmt17(p_);
    case Kind::Table: {
      std::string s = "table:";
      for (std::size_t i = 0; i < times_.size(); ++i) {
        if (i) s += ";";
        s += fmt17(times_[i]) + "=" + fmt17(values_[i]);
      }
      return s;
    }
  }
  return "";
}

BoundaryFlux BoundaryFlux::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("flux spec '" + text + "' lacks a kind prefix");
  const std::string kind = text.substr(0, colon);
  const std::string body = text.substr(colon + 1);
  if (kind == "const") return constant(parse_number(body, "const flux"));
  if (kind == "power") {
    const auto comma = body.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("power flux needs 'power:h0,p'");
    return power(parse_number(body.substr(0, comma), "power flux"), parse_number(body.substr(comma + 1), "power flux"));
  }
  if (kind == "table") {
    std::vector<double> ts, hs;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ';')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("table flux entries must be 't=h'");
      ts.push_back(parse_number(item.substr(0, eq), "flux table"));
      hs.push_back(parse_number(item.substr(eq + 1), "flux table"));
    }
    return table(std::move(ts), std::move(hs));
  }
  throw std::invalid_argument("unknown flux kind '" + kind + "'");
}

void StefanProblem::validate(const Grid& grid) const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  if (!(b >= 0.0) || !std::isfinite(b)) throw std::invalid_argument("initial front b must be nonnegative");
  if (!(horizon > t_start)) throw std::invalid_argument("horizon T must exceed the start time");
  if (!u0.empty()) {
    if (u0.size() != grid.n_nodes())
      throw std::invalid_argument("u0 must be sampled on the mapped grid (" + std::to_string(grid.n_nodes()) +
                                  " nodes)");
    double scale = 0.0;
    for (double v : u0) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("u0 must be nonnegative");
      scale = std::max(scale, v);
    }
    if (b > 0.0 && u0.back() > 1e-12 * std::max(1.0, scale))
      throw std::invalid_argument("u0 must vanish at the initial front (u0(b) = 0)");
  }
}

double StefanProblem::flux_bound() const { return h.sup(t_start, horizon); }

bool StefanProblem::zero_data() const {
  return h.identically_zero() && std::all_of(u0.begin(), u0.end(), [](double v) { return v == 0.0; });
}

bool StefanProblem::envelope_hypothesis(const Grid& grid, double slack) const {
  const double m = flux_bound();
  if (!std::isfinite(m)) return false;
  if (u0.empty()) return true;
  const double g = std::tgamma(1.0 + alpha);
  for (std::size_t i = 0; i < u0.size(); ++i) {
    const double x = grid.node(i) * b;
    const double bound = m / g * (std::pow(b, alpha) - std::pow(x, alpha));
    if (u0[i] > bound + slack) return false;
  }
  return true;
}

Samples StefanProblem::initial_profile(const Grid& grid) const {
  if (u0.empty()) return Samples(grid.n_nodes(), 0.0);
  return u0;
}

}  // namespace fstefan
