#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fstefan {

/// Uniform partition of the fixed cylinder [0,1].
///
/// Nodes are x_i = i/N, i = 0..N. The dual control volume around node i is
/// bounded by the faces k = i and k = i+1, where face 0 is x = 0, face k
/// (1 <= k <= N) is the half-node (k - 1/2)/N and face N+1 is x = 1.
class Grid {
 public:
  explicit Grid(std::size_t n_cells);

  std::size_t n_cells() const { return n_cells_; }
  std::size_t n_nodes() const { return n_cells_ + 1; }
  std::size_t n_faces() const { return n_cells_ + 2; }
  double spacing() const { return spacing_; }

  std::span<const double> nodes() const { return nodes_; }
  double node(std::size_t i) const { return nodes_[i]; }

  /// Face abscissa, k = 0..N+1.
  double face(std::size_t k) const;

  /// Length of the dual cell around node i (spacing/2 at the two ends).
  double volume(std::size_t i) const;

  /// Trapezoidal integral over [0,1] of nodal samples.
  double integrate(std::span<const double> f) const;

 private:
  std::size_t n_cells_;
  double spacing_;
  std::vector<double> nodes_;
};

}  // namespace fstefan
