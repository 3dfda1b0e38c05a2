#ifndef QCMOD_GRID_HPP
#define QCMOD_GRID_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

#include "qcmod/errors.hpp"
#include "qcmod/linalg.hpp"

namespace qcmod {

// Uniform cell decomposition of an axis-aligned box. Cells are indexed
// linearly with axis 0 fastest.
template <std::size_t N>
class UniformGrid {
 public:
  UniformGrid(const Point<N>& lower, const Point<N>& upper, std::size_t cells_per_axis)
      : lower_(lower), upper_(upper) {
    if (cells_per_axis == 0) throw ConfigError("grid: need at least one cell per axis");
    counts_.fill(cells_per_axis);
    init();
  }

  UniformGrid(const Point<N>& lower, const Point<N>& upper, std::array<std::size_t, N> counts)
      : lower_(lower), upper_(upper), counts_(counts) {
    for (auto c : counts_)
      if (c == 0) throw ConfigError("grid: need at least one cell per axis");
    init();
  }

  const Point<N>& lower() const { return lower_; }
  const Point<N>& upper() const { return upper_; }
  std::size_t count(std::size_t axis) const { return counts_[axis]; }
  double cell_size(std::size_t axis) const { return size_[axis]; }
  double max_cell_size() const { return *std::max_element(size_.begin(), size_.end()); }
  double min_cell_size() const { return *std::min_element(size_.begin(), size_.end()); }
  std::size_t cell_count() const { return total_; }
  double cell_volume() const { return volume_; }

  std::size_t linear(const std::array<std::size_t, N>& idx) const {
    std::size_t l = 0;
    for (std::size_t i = N; i-- > 0;) l = l * counts_[i] + idx[i];
    return l;
  }

  std::array<std::size_t, N> multi(std::size_t l) const {
    std::array<std::size_t, N> idx;
    for (std::size_t i = 0; i < N; ++i) {
      idx[i] = l % counts_[i];
      l /= counts_[i];
    }
    return idx;
  }

  Point<N> center(std::size_t l) const {
    const auto idx = multi(l);
    Point<N> c;
    for (std::size_t i = 0; i < N; ++i) c[i] = lower_[i] + (idx[i] + 0.5) * size_[i];
    return c;
  }

  // Cell containing x. Points within 1e-9 cells outside the box snap to the
  // boundary cell; anything farther is reported as absent.
  std::optional<std::size_t> locate(const Point<N>& x) const {
    std::array<std::size_t, N> idx;
    for (std::size_t i = 0; i < N; ++i) {
      const double t = (x[i] - lower_[i]) / size_[i];
      if (!(t >= -1e-9 && t <= counts_[i] + 1e-9)) return std::nullopt;
      const auto k = static_cast<long long>(std::floor(t));
      idx[i] = static_cast<std::size_t>(std::clamp<long long>(k, 0, static_cast<long long>(counts_[i]) - 1));
    }
    return linear(idx);
  }

  bool covers(const Point<N>& x) const { return locate(x).has_value(); }

  // Same grid geometry scaled about the origin by c > 0.
  UniformGrid scaled(double c) const { return UniformGrid(c * lower_, c * upper_, counts_); }

 private:
  void init() {
    total_ = 1;
    volume_ = 1.0;
    for (std::size_t i = 0; i < N; ++i) {
      if (!(upper_[i] > lower_[i])) throw ConfigError("grid: need lower < upper on every axis");
      size_[i] = (upper_[i] - lower_[i]) / counts_[i];
      total_ *= counts_[i];
      volume_ *= size_[i];
    }
  }

  Point<N> lower_;
  Point<N> upper_;
  std::array<std::size_t, N> counts_{};
  std::array<double, N> size_{};
  std::size_t total_ = 0;
  double volume_ = 0.0;
};

// Nonnegative piecewise-constant function on a UniformGrid.
template <std::size_t N>
class DensityField {
 public:
  explicit DensityField(UniformGrid<N> grid)
      : grid_(std::move(grid)), values_(grid_.cell_count(), 0.0) {}

  DensityField(UniformGrid<N> grid, std::vector<double> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.cell_count()) throw InvalidInput("density: size mismatch with grid");
    for (double v : values_)
      if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput("density: values must be finite and >= 0");
  }

  const UniformGrid<N>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t cell) const { return values_[cell]; }

  void set(std::size_t cell, double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput("density: values must be finite and >= 0");
    values_[cell] = v;
  }

  double at(const Point<N>& x) const {
    const auto c = grid_.locate(x);
    if (!c) throw DomainError("density: point outside grid");
    return values_[*c];
  }

  // sum_cells rho^p * vol
  double p_energy(double p) const {
    double s = 0.0;
    for (double v : values_)
      if (v > 0.0) s += std::pow(v, p);
    return s * grid_.cell_volume();
  }

  DensityField scaled(double c) const {
    DensityField d = *this;
    for (auto& v : d.values_) v *= c;
    return d;
  }

 private:
  UniformGrid<N> grid_;
  std::vector<double> values_;
};

}  // namespace qcmod

#endif  // QCMOD_GRID_HPP
