#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fstefan/grid.hpp"

namespace fstefan {

using Samples = std::vector<double>;

/// Row-major dense matrix. Only used for the small operator tables, so no
/// expression templates or aliasing tricks.
class DenseTable {
 public:
  DenseTable() = default;
  DenseTable(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> data() const { return data_; }

  Samples apply(std::span<const double> x) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Product-integration tables for the fractional operators of one order on
/// one grid. Immutable after build_weights().
///
/// The flux and divergence tables act on cell slopes (f_{j+1} - f_j)/h rather
/// than on nodal values, so a constant input produces an exact zero.
struct FracWeights {
  double alpha = 0.5;
  Grid grid{4};
  DenseTable integral;             // (N+1) x (N+1), I^alpha on nodes
  DenseTable integral_complement;  // (N+1) x (N+1), I^{1-alpha} with x^alpha starting correction
  DenseTable flux;                 // (N+2) x N, D^alpha at faces from cell slopes
  DenseTable divergence;           // (N+1) x N, dual-cell divergence of the face fluxes
};

FracWeights build_weights(double alpha, const Grid& grid);

/// (I^alpha f)(x_i) for the piecewise-linear interpolant of f.
Samples frac_integral(std::span<const double> f, const FracWeights& w);

/// D^alpha f at the N+2 faces: x = 0, the N half-nodes, x = 1.
Samples caputo_derivative(std::span<const double> f, const FracWeights& w);

/// RL derivative at the interior nodes x_1..x_{N-1} (N-1 values).
Samples rl_derivative(std::span<const double> f, const FracWeights& w);

/// Conservative d/dx D^alpha f on the N+1 dual cells.
///
/// left_flux is the prescribed value of -D^alpha f at x = 0; it replaces the
/// table value (which is always 0) as the flux through face 0. The result
/// satisfies sum_i volume(i) * div_i = q(1) - q(0).
Samples flux_divergence(std::span<const double> f, double left_flux, const FracWeights& w);

/// Nodal form of the divergence table: (N+1) x (N+1) matrix A with
/// A f = flux_divergence(f, 0, w). Lower Hessenberg.
DenseTable nodal_divergence_matrix(const FracWeights& w);

/// Right-sided integral I^alpha_- on [0,1] for piecewise-linear data.
Samples frac_integral_right(std::span<const double> f, const FracWeights& w);

/// x^beta - y^beta for x >= y >= 0 without cancellation when x ~ y.
double pow_diff(double x, double y, double beta);

}  // namespace fstefan
