#include "fstefan/fracops.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fstefan {

namespace {

void check_length(std::span<const double> f, const FracWeights& w, const char* who) {
  if (f.size() != w.grid.n_nodes())
    throw std::invalid_argument(std::string(who) + ": expected " + std::to_string(w.grid.n_nodes()) +
                                " nodal samples, got " + std::to_string(f.size()));
}

Samples slopes(std::span<const double> f, double h) {
  Samples d(f.size() - 1);
  for (std::size_t j = 0; j + 1 < f.size(); ++j) d[j] = (f[j + 1] - f[j]) / h;
  return d;
}

// Product-trapezoidal weights for I^order on a uniform grid (exact for
// piecewise-linear data).
DenseTable integral_table(double order, std::size_t n_cells, double h) {
  const std::size_t n1 = n_cells + 1;
  DenseTable t(n1, n1);
  const double beta = order + 1.0;
  const double scale = std::pow(h, order) / std::tgamma(order + 2.0);
  for (std::size_t n = 1; n < n1; ++n) {
    const double dn = static_cast<double>(n);
    t(n, 0) = scale * (std::pow(dn - 1.0, beta) - (dn - order - 1.0) * std::pow(dn, order));
    for (std::size_t j = 1; j < n; ++j) {
      const double m = static_cast<double>(n - j);
      t(n, j) = scale * (pow_diff(m + 1.0, m, beta) - pow_diff(m, m - 1.0, beta));
    }
    t(n, n) = scale;
  }
  return t;
}

}  // namespace

double pow_diff(double x, double y, double beta) {
  if (y <= 0.0) return std::pow(x, beta);
  return std::pow(y, beta) * std::expm1(beta * std::log1p((x - y) / y));
}

Samples DenseTable::apply(std::span<const double> x) const {
  if (x.size() != cols_) throw std::invalid_argument("DenseTable::apply: length mismatch");
  Samples y(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    const double* a = data_.data() + r * cols_;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) acc += a[c] * x[c];
    y[r] = acc;
  }
  return y;
}

FracWeights build_weights(double alpha, const Grid& grid) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  if (grid.n_cells() < 4) throw std::invalid_argument("build_weights: n_cells must be at least 4");

  const std::size_t n = grid.n_cells();
  const double h = grid.spacing();
  FracWeights w;
  w.alpha = alpha;
  w.grid = grid;
  w.integral = integral_table(alpha, n, h);
  w.integral_complement = integral_table(1.0 - alpha, n, h);

  // Starting correction: fold E_i * (f0 - 2 f1 + f2) / (h^a (2^a - 2)) into the
  // first three columns, where E_i is the defect of the plain rule on x^alpha.
  // The corrected rule stays exact on 1 and x and becomes exact on x^alpha.
  {
    Samples xa(n + 1);
    for (std::size_t i = 0; i <= n; ++i) xa[i] = std::pow(grid.node(i), alpha);
    const Samples plain = w.integral_complement.apply(xa);
    const double denom = std::pow(h, alpha) * (std::pow(2.0, alpha) - 2.0);
    const double g = std::tgamma(1.0 + alpha);
    for (std::size_t i = 1; i <= n; ++i) {
      const double c = (g * grid.node(i) - plain[i]) / denom;
      w.integral_complement(i, 0) += c;
      w.integral_complement(i, 1) -= 2.0 * c;
      w.integral_complement(i, 2) += c;
    }
  }

  // Face fluxes: D^alpha f(x) = sum_j slope_j * omega_j(x), where omega_j is
  // the kernel moment of cell j, (x-p_j)^{1-a} - (x-p_{j+1})_+^{1-a}, over Gamma(2-a).
  const double beta = 1.0 - alpha;
  const double scale = std::pow(h, beta) / std::tgamma(2.0 - alpha);
  w.flux = DenseTable(n + 2, n);
  for (std::size_t k = 1; k <= n + 1; ++k) {
    // face position in units of h
    const double xf = (k == n + 1) ? static_cast<double>(n) : static_cast<double>(k) - 0.5;
    for (std::size_t j = 0; j < n; ++j) {
      const double left = xf - static_cast<double>(j);
      if (left <= 0.0) break;
      const double right = left - 1.0;
      w.flux(k, j) = scale * (right > 0.0 ? pow_diff(left, right, beta) : std::pow(left, beta));
    }
  }

  w.divergence = DenseTable(n + 1, n);
  for (std::size_t i = 0; i <= n; ++i) {
    const double vol = grid.volume(i);
    for (std::size_t j = 0; j < n; ++j) w.divergence(i, j) = (w.flux(i + 1, j) - w.flux(i, j)) / vol;
  }
  return w;
}

Samples frac_integral(std::span<const double> f, const FracWeights& w) {
  check_length(f, w, "frac_integral");
  return w.integral.apply(f);
}

Samples caputo_derivative(std::span<const double> f, const FracWeights& w) {
  check_length(f, w, "caputo_derivative");
  return w.flux.apply(slopes(f, w.grid.spacing()));
}

Samples rl_derivative(std::span<const double> f, const FracWeights& w) {
  check_length(f, w, "rl_derivative");
  const Samples g = w.integral_complement.apply(f);
  const std::size_t n = w.grid.n_cells();
  const double h = w.grid.spacing();
  Samples out(n - 1);
  for (std::size_t i = 1; i < n; ++i) out[i - 1] = (g[i + 1] - g[i - 1]) / (2.0 * h);
  return out;
}

Samples flux_divergence(std::span<const double> f, double left_flux, const FracWeights& w) {
  check_length(f, w, "flux_divergence");
  if (!std::isfinite(left_flux)) throw std::invalid_argument("flux_divergence: left_flux must be finite");
  Samples q = caputo_derivative(f, w);
  q[0] = -left_flux;
  Samples div(w.grid.n_nodes());
  for (std::size_t i = 0; i < div.size(); ++i) div[i] = (q[i + 1] - q[i]) / w.grid.volume(i);
  return div;
}

DenseTable nodal_divergence_matrix(const FracWeights& w) {
  const std::size_t n = w.grid.n_cells();
  const double h = w.grid.spacing();
  DenseTable a(n + 1, n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      const double from_left = j > 0 ? w.divergence(i, j - 1) : 0.0;
      const double from_right = j < n ? w.divergence(i, j) : 0.0;
      a(i, j) = (from_left - from_right) / h;
    }
  }
  return a;
}

Samples frac_integral_right(std::span<const double> f, const FracWeights& w) {
  check_length(f, w, "frac_integral_right");
  Samples reversed(f.rbegin(), f.rend());
  Samples out = w.integral.apply(reversed);
  return Samples(out.rbegin(), out.rend());
}

}  // namespace fstefan
