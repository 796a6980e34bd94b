#include "fstefan/grid.hpp"

#include <stdexcept>
#include <string>

namespace fstefan {

Grid::Grid(std::size_t n_cells) : n_cells_(n_cells) {
  if (n_cells == 0) throw std::invalid_argument("Grid: n_cells must be positive");
  spacing_ = 1.0 / static_cast<double>(n_cells);
  nodes_.resize(n_cells + 1);
  for (std::size_t i = 0; i <= n_cells; ++i)
    nodes_[i] = static_cast<double>(i) / static_cast<double>(n_cells);
}

double Grid::face(std::size_t k) const {
  if (k == 0) return 0.0;
  if (k == n_cells_ + 1) return 1.0;
  if (k > n_cells_ + 1) throw std::out_of_range("Grid::face: index " + std::to_string(k));
  return (static_cast<double>(k) - 0.5) / static_cast<double>(n_cells_);
}

double Grid::volume(std::size_t i) const {
  if (i == 0 || i == n_cells_) return 0.5 * spacing_;
  return spacing_;
}

double Grid::integrate(std::span<const double> f) const {
  if (f.size() != n_nodes()) throw std::invalid_argument("Grid::integrate: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += volume(i) * f[i];
  return acc;
}

}  // namespace fstefan
