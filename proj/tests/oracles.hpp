#pragma once

// Reference computations written independently of the library, used as test
// oracles. Nothing here calls into fstefan.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

/// D^alpha x^beta = Gamma(beta+1)/Gamma(beta+1-alpha) x^{beta-alpha}.
inline double power_rule(double x, double beta, double alpha) {
  if (x == 0.0) return 0.0;
  return std::tgamma(beta + 1.0) / std::tgamma(beta + 1.0 - alpha) * std::pow(x, beta - alpha);
}

/// Composite 5-point Gauss-Legendre on `panels` equal panels.
inline double gauss_legendre(const std::function<double(double)>& f, double a, double b, int panels) {
  static const double xg[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                               0.9061798459386640};
  static const double wg[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                               0.2369268850561891};
  const double h = (b - a) / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double m = a + (p + 0.5) * h;
    for (int k = 0; k < 5; ++k) acc += wg[k] * f(m + 0.5 * h * xg[k]);
  }
  return 0.5 * h * acc;
}

/// Caputo derivative of a smooth-on-(0,x] function with derivative df:
/// (1/Gamma(1-a)) int_0^x df(p) (x-p)^{-a} dp, graded by p = x - (x) u^{1/(1-a)}.
inline double caputo(const std::function<double(double)>& df, double alpha, double x, int panels = 4000,
                     double from = 0.0) {
  if (x <= from) return 0.0;
  const double beta = 1.0 - alpha;
  const double top = std::pow(x - from, beta);
  // with r = (x-p)^beta: dp (x-p)^{-a} = dr / beta
  auto g = [&](double r) { return df(x - std::pow(r, 1.0 / beta)); };
  return gauss_legendre(g, 0.0, top, panels) / beta / std::tgamma(beta);
}

/// Three-parameter Prabhakar series summed term by term with lgamma.
inline double prabhakar(double a, double b, double g, double z, int terms = 200) {
  long double acc = 0.0L;
  for (int k = 0; k < terms; ++k) {
    const double lg = std::lgamma(g + k) - std::lgamma(g) - std::lgamma(k + 1.0) - std::lgamma(a * k + b);
    const long double term = std::exp(static_cast<long double>(lg)) * std::pow(static_cast<long double>(z), k);
    acc += term;
  }
  return static_cast<double>(acc);
}

/// Kilbas-Saigo E_{a,m,l}(z) from its product definition with direct Gamma calls.
inline double kilbas_saigo(double a, double m, double l, double z, int terms = 200) {
  long double acc = 1.0L, c = 1.0L, zk = 1.0L;
  for (int k = 1; k < terms; ++k) {
    const double j = k - 1;
    c *= std::exp(static_cast<long double>(std::lgamma(a * (j * m + l) + 1.0) - std::lgamma(a * (j * m + l + 1.0) + 1.0)));
    zk *= z;
    acc += c * zk;
  }
  return static_cast<double>(acc);
}

/// Classical (alpha = 1) Neumann-flux Stefan problem with flux h0 / sqrt(t):
/// u = f(x/sqrt t), f'' + (xi/2) f' = 0, f'(0) = -h0, f(eta) = 0 and
/// eta/2 = -f'(eta). Shoots on eta with RK4 for f'.
inline double classical_similarity_root(double h0) {
  auto slope_at = [&](double eta) {
    const int n = 4000;
    const double dx = eta / n;
    double y = -h0;
    for (int i = 0; i < n; ++i) {
      const double x = i * dx;
      auto f = [](double xi, double yv) { return -0.5 * xi * yv; };
      const double k1 = f(x, y), k2 = f(x + dx / 2, y + dx / 2 * k1), k3 = f(x + dx / 2, y + dx / 2 * k2),
                   k4 = f(x + dx, y + dx * k3);
      y += dx / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return y;
  };
  auto mismatch = [&](double eta) { return 0.5 * eta + slope_at(eta); };
  double lo = 1e-6, hi = 10.0 * (1.0 + h0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((mismatch(mid) < 0.0) == (mismatch(lo) < 0.0))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Dense Gaussian elimination with partial pivoting; a is row-major n x n.
inline std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i * n + k]) > std::abs(a[p * n + k])) p = i;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
      std::swap(b[k], b[p]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = a[i * n + k] / a[k * n + k];
      for (std::size_t j = k; j < n; ++j) a[i * n + j] -= m * a[k * n + j];
      b[i] -= m * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i * n + j] * x[j];
    x[i] = s / a[i * n + i];
  }
  return x;
}

/// One implicit-Euler step of u_t = u_xx on x_i = i/N with u_x(0) = 0
/// (ghost node) and u(1) = 0, solved by the Thomas algorithm.
inline std::vector<double> heat_step(const std::vector<double>& u, double dt) {
  const std::size_t n = u.size() - 1;
  const double h = 1.0 / n;
  const double r = dt / (h * h);
  std::vector<double> lower(n, -r), diag(n, 1.0 + 2.0 * r), upper(n, -r), rhs(u.begin(), u.end() - 1);
  upper[0] = -2.0 * r;
  for (std::size_t i = 1; i < n; ++i) {
    const double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  std::vector<double> out(n + 1, 0.0);
  out[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) out[i] = (rhs[i] - upper[i] * out[i + 1]) / diag[i];
  return out;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace oracle
