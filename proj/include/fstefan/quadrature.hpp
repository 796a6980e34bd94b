#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace fstefan {

enum class QuadratureBackend { GaussKronrod, TanhSinh };

const char* to_string(QuadratureBackend b);

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive integral of f over [a,b]. tol is an absolute target for integrals
/// of order one (the backends work relative to the L1 norm of f). Throws
/// QuadratureError if the backend's error estimate misses the target by more
/// than a factor of ten.
double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 QuadratureBackend backend = QuadratureBackend::GaussKronrod);

}  // namespace fstefan
