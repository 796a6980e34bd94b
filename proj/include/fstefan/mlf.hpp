#pragma once

#include <vector>

#include "fstefan/quadrature.hpp"

namespace fstefan {

/// Parameters of the three-parameter (Prabhakar) Mittag-Leffler function.
struct MLParams {
  double a = 1.0;
  double b = 1.0;
  double g = 1.0;
};

struct SeriesValue {
  double value = 0.0;
  int terms = 0;
  bool converged = false;
};

/// Series arguments beyond this radius are rejected.
inline constexpr double kSeriesRadius = 50.0;
inline constexpr int kMaxSeriesTerms = 10000;

/// E^g_{a,b}(z) = sum_k (g)_k z^k / (k! Gamma(a k + b)).
/// Stops once the geometric tail bound drops below 1e-15 relative; reports
/// converged = false if kMaxSeriesTerms are used first.
SeriesValue ml3(const MLParams& p, double z);

/// Kilbas-Saigo function E_{a,m,l}(z) = sum_k c_k z^k with c_0 = 1 and
///   c_k / c_{k-1} = Gamma(a((k-1)m + l) + 1) / Gamma(a((k-1)m + l + 1) + 1).
/// Coefficients are computed once at construction.
class KilbasSaigo {
 public:
  KilbasSaigo(double a, double m, double l);

  SeriesValue evaluate(double z) const;
  /// evaluate() that throws std::runtime_error when the series does not converge.
  double operator()(double z) const;

  double a() const { return a_; }

 private:
  double a_, m_, l_;
  std::vector<long double> ratio_;  // c_{k+1}/c_k, decreasing in k
};

/// Integrand kernel of the self-similar profile for one order alpha:
/// sigma(w) = w^{alpha-1} E_{alpha,1+1/alpha,1}(-w^{1+alpha}/(1+alpha)),
/// E being the Kilbas-Saigo function.
class SimilarityKernel {
 public:
  explicit SimilarityKernel(double alpha);

  double alpha() const { return alpha_; }
  double sigma(double w) const;
  /// E(-w^{1+alpha}/(1+alpha)), the regular factor of sigma.
  double regular_factor(double w) const;

  /// int_0^x w sigma(w) dw, via y = w^{1+alpha}.
  double first_moment(double x, double tol, QuadratureBackend backend) const;
  /// int_lo^hi sigma(w) dw, via y = w^alpha.
  double integral(double lo, double hi, double tol, QuadratureBackend backend) const;

 private:
  double alpha_;
  KilbasSaigo ml_;
};

double similarity_profile(double alpha, double w);

/// H(x) = h0 [(1+alpha) - (1/Gamma(alpha)) int_0^x w sigma(w) dw].
double h_alpha(double alpha, double h0, double x, double quad_tol,
               QuadratureBackend backend = QuadratureBackend::GaussKronrod);

/// Root of H(x) = x by bisection on [0, h0(1+alpha)], widened geometrically
/// (at most 60 times) if the upper end does not change sign.
double eta_solve(double alpha, double h0, double tol,
                 QuadratureBackend backend = QuadratureBackend::GaussKronrod);

/// Exact self-similar solution for the flux h(t) = h0 t^{-alpha/(1+alpha)}
/// and zero initial domain:
///   s(t) = eta t^{1/(1+alpha)},
///   u(x,t) = (h0/Gamma(alpha)) int_{x/t^{1/(1+alpha)}}^{eta} sigma(w) dw.
class AnalyticBenchmark {
 public:
  AnalyticBenchmark(double alpha, double h0, double quad_tol = 1e-12,
                    QuadratureBackend backend = QuadratureBackend::GaussKronrod);

  double alpha() const { return kernel_.alpha(); }
  double h0() const { return h0_; }
  double eta() const { return eta_; }
  double quad_tol() const { return quad_tol_; }
  /// |H(eta) - eta| at the solved root.
  double residual() const { return residual_; }

  double flux(double t) const;
  double front(double t) const;
  double front_velocity(double t) const;
  double temperature(double x, double t) const;
  /// (u, s) at (x, t).
  std::pair<double, double> pair(double x, double t) const;

  /// int_0^{s(t)} u dx by nested adaptive quadrature.
  double mass(double t) const;
  /// s(t) - int_0^t h - ... : the integral Stefan condition evaluated on the
  /// exact pair (zero initial domain), should vanish.
  double integral_condition_residual(double t) const;

  const SimilarityKernel& kernel() const { return kernel_; }

 private:
  SimilarityKernel kernel_;
  double h0_;
  double quad_tol_;
  QuadratureBackend backend_;
  double eta_;
  double residual_;
};

}  // namespace fstefan
