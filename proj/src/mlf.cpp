#include "fstefan/mlf.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace fstefan {

namespace {

constexpr double kTailRelTol = 1e-15;

// Gamma(x) / Gamma(x + delta).
long double gamma_ratio(long double x, long double delta) { return boost::math::tgamma_delta_ratio(x, delta); }

template <class Ratio>
SeriesValue sum_series(long double first, double z, Ratio ratio) {
  if (!std::isfinite(z)) throw std::invalid_argument("series argument must be finite");
  if (std::abs(z) > kSeriesRadius) {
    std::ostringstream os;
    os << "series argument |z| = " << std::abs(z) << " exceeds the guard radius " << kSeriesRadius;
    throw std::invalid_argument(os.str());
  }
  SeriesValue out;
  long double sum = first;
  long double term = first;
  const double az = std::abs(z);
  for (int k = 0; k < kMaxSeriesTerms; ++k) {
    const long double r = ratio(k);  // term_{k+1} / term_k / z
    const long double next = term * r * z;
    // ratio of term_{k+2} to term_{k+1}; coefficient ratios decrease in k
    const double rho = static_cast<double>(ratio(k + 1)) * az;
    if (rho < 1.0) {
      const long double tail = std::abs(next) / (1.0L - rho);
      if (tail <= kTailRelTol * std::abs(sum) || next == 0.0L) {
        sum += next;
        out.value = static_cast<double>(sum);
        out.terms = k + 2;
        out.converged = true;
        return out;
      }
    }
    sum += next;
    term = next;
  }
  out.value = static_cast<double>(sum);
  out.terms = kMaxSeriesTerms;
  out.converged = false;
  return out;
}

}  // namespace

SeriesValue ml3(const MLParams& p, double z) {
  if (!(p.a > 0.0 && p.b > 0.0 && p.g > 0.0) || !std::isfinite(p.a) || !std::isfinite(p.b) ||
      !std::isfinite(p.g))
    throw std::invalid_argument("ml3: parameters must be positive and finite");
  // Ratios in extended precision: at negative z the alternating sum cancels
  // and per-term rounding would otherwise dominate the result.
  auto ratio = [&](int k) {
    const long double dk = k;
    return (p.g + dk) / (dk + 1.0L) * gamma_ratio(p.a * dk + p.b, p.a);
  };
  return sum_series(1.0L / boost::math::tgamma(static_cast<long double>(p.b)), z, ratio);
}

KilbasSaigo::KilbasSaigo(double a, double m, double l) : a_(a), m_(m), l_(l) {
  if (!(a > 0.0) || !std::isfinite(m) || !std::isfinite(l))
    throw std::invalid_argument("KilbasSaigo: invalid parameters");
  ratio_.resize(kMaxSeriesTerms + 2);
  for (std::size_t k = 0; k < ratio_.size(); ++k) {
    const double base = a * (static_cast<double>(k) * m + l);
    const double lo = base + 1.0;
    const double hi = base + a + 1.0;
    if (!(lo > 0.0)) throw std::invalid_argument("KilbasSaigo: Gamma argument must stay positive");
    ratio_[k] = gamma_ratio(lo, hi - lo);
  }
}

SeriesValue KilbasSaigo::evaluate(double z) const {
  return sum_series(1.0, z, [this](int k) { return ratio_[static_cast<std::size_t>(k)]; });
}

double KilbasSaigo::operator()(double z) const {
  const SeriesValue v = evaluate(z);
  if (!v.converged) {
    std::ostringstream os;
    os << "Kilbas-Saigo series did not converge at z = " << z;
    throw std::runtime_error(os.str());
  }
  return v.value;
}

SimilarityKernel::SimilarityKernel(double alpha)
    : alpha_(alpha), ml_(alpha, 1.0 + 1.0 / alpha, 1.0) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
}

double SimilarityKernel::regular_factor(double w) const {
  return ml_(-std::pow(w, 1.0 + alpha_) / (1.0 + alpha_));
}

double SimilarityKernel::sigma(double w) const {
  if (w < 0.0) throw std::invalid_argument("similarity_profile: w must be nonnegative");
  if (w == 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(w, alpha_ - 1.0) * regular_factor(w);
}

double SimilarityKernel::first_moment(double x, double tol, QuadratureBackend backend) const {
  if (x < 0.0) throw std::invalid_argument("first_moment: x must be nonnegative");
  const double a1 = 1.0 + alpha_;
  const double top = std::pow(x, a1);
  auto f = [&](double y) { return ml_(-y / a1); };
  return integrate(f, 0.0, top, tol, backend) / a1;
}

double SimilarityKernel::integral(double lo, double hi, double tol, QuadratureBackend backend) const {
  if (lo < 0.0 || hi < 0.0) throw std::invalid_argument("SimilarityKernel::integral: negative bound");
  const double a1 = 1.0 + alpha_;
  const double expo = a1 / alpha_;
  auto f = [&](double y) { return ml_(-std::pow(y, expo) / a1); };
  return integrate(f, std::pow(lo, alpha_), std::pow(hi, alpha_), tol, backend) / alpha_;
}

double similarity_profile(double alpha, double w) { return SimilarityKernel(alpha).sigma(w); }

namespace {

double h_alpha_with(const SimilarityKernel& k, double h0, double x, double tol, QuadratureBackend backend) {
  const double a = k.alpha();
  return h0 * ((1.0 + a) - k.first_moment(x, tol, backend) / std::tgamma(a));
}

double eta_with(const SimilarityKernel& k, double h0, double tol, QuadratureBackend backend) {
  if (!(h0 > 0.0)) throw std::invalid_argument("eta_solve: h0 must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("eta_solve: tol must be positive");
  const double a = k.alpha();
  const double qtol = std::max(1e-15, 0.01 * tol);
  auto F = [&](double x) { return h_alpha_with(k, h0, x, qtol, backend) - x; };

  double lo = 0.0;
  double hi = h0 * (1.0 + a);
  double f_hi = F(hi);
  int widenings = 0;
  while (f_hi > 0.0) {
    if (++widenings > 60) throw std::runtime_error("eta_solve: no sign change after 60 bracket widenings");
    lo = hi;
    hi *= 2.0;
    f_hi = F(hi);
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = F(mid);
    if (std::abs(fm) <= 0.5 * tol || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return mid;
    if (fm > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double h_alpha(double alpha, double h0, double x, double quad_tol, QuadratureBackend backend) {
  if (x < 0.0) throw std::invalid_argument("h_alpha: x must be nonnegative");
  return h_alpha_with(SimilarityKernel(alpha), h0, x, quad_tol, backend);
}

double eta_solve(double alpha, double h0, double tol, QuadratureBackend backend) {
  return eta_with(SimilarityKernel(alpha), h0, tol, backend);
}

AnalyticBenchmark::AnalyticBenchmark(double alpha, double h0, double quad_tol, QuadratureBackend backend)
    : kernel_(alpha), h0_(h0), quad_tol_(quad_tol), backend_(backend) {
  eta_ = eta_with(kernel_, h0, std::max(quad_tol, 1e-13), backend);
  residual_ = std::abs(h_alpha_with(kernel_, h0, eta_, std::min(quad_tol, 1e-14), backend) - eta_);
}

double AnalyticBenchmark::flux(double t) const {
  if (!(t > 0.0)) throw std::invalid_argument("AnalyticBenchmark: t must be positive");
  const double a = alpha();
  return h0_ * std::pow(t, -a / (1.0 + a));
}

double AnalyticBenchmark::front(double t) const {
  if (!(t > 0.0)) throw std::invalid_argument("AnalyticBenchmark: t must be positive");
  return eta_ * std::pow(t, 1.0 / (1.0 + alpha()));
}

double AnalyticBenchmark::front_velocity(double t) const { return front(t) / ((1.0 + alpha()) * t); }

double AnalyticBenchmark::temperature(double x, double t) const {
  if (!(t > 0.0)) throw std::invalid_argument("AnalyticBenchmark: t must be positive");
  if (x < 0.0) throw std::invalid_argument("AnalyticBenchmark: x must be nonnegative");
  const double scale = std::pow(t, 1.0 / (1.0 + alpha()));
  const double xi = x / scale;
  if (xi >= eta_) return 0.0;
  return h0_ / std::tgamma(alpha()) * kernel_.integral(xi, eta_, quad_tol_, backend_);
}

std::pair<double, double> AnalyticBenchmark::pair(double x, double t) const {
  return {temperature(x, t), front(t)};
}

double AnalyticBenchmark::mass(double t) const {
  // u has an x^alpha term at the fixed face, which tanh-sinh absorbs; the
  // outer target sits above the inner one so inner noise cannot stall it.
  const double s = front(t);
  auto f = [&](double x) { return temperature(x, t); };
  return integrate(f, 0.0, s, 10.0 * quad_tol_, QuadratureBackend::TanhSinh);
}

double AnalyticBenchmark::integral_condition_residual(double t) const {
  const double a = alpha();
  const double injected = h0_ * (1.0 + a) * std::pow(t, 1.0 / (1.0 + a));
  return front(t) - injected + mass(t);
}

}  // namespace fstefan
