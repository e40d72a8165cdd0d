#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "hom/error.hpp"

namespace hom {

/// Uniform grid with both endpoints included.
///
/// All times are in units of the pulse duration (half width at 1/e of the
/// Gaussian envelope) and angular frequencies in units of its inverse.
class UniformGrid {
 public:
  UniformGrid(double first, double last, std::size_t n_points)
      : first_(first), last_(last), n_(n_points) {
    require(std::isfinite(first) && std::isfinite(last), ErrorKind::invalid_argument,
            "grid bounds must be finite");
    require(first < last, ErrorKind::invalid_argument,
            "grid lower bound must be below upper bound");
    require(n_points >= 2, ErrorKind::invalid_argument, "grid needs at least two points");
  }

  double first() const noexcept { return first_; }
  double last() const noexcept { return last_; }
  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return (last_ - first_) / static_cast<double>(n_ - 1); }
  double span() const noexcept { return last_ - first_; }

  double operator[](std::size_t i) const noexcept {
    return first_ + static_cast<double>(i) * spacing();
  }

  std::vector<double> points() const {
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = (*this)[i];
    return out;
  }

  bool contains(double x) const noexcept { return x >= first_ && x <= last_; }

  friend bool operator==(const UniformGrid&, const UniformGrid&) = default;

 private:
  double first_;
  double last_;
  std::size_t n_;
};

struct TimeGrid : UniformGrid {
  using UniformGrid::UniformGrid;
  double t_min() const noexcept { return first(); }
  double t_max() const noexcept { return last(); }
  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

struct FrequencyGrid : UniformGrid {
  using UniformGrid::UniformGrid;
  double omega_min() const noexcept { return first(); }
  double omega_max() const noexcept { return last(); }
  friend bool operator==(const FrequencyGrid&, const FrequencyGrid&) = default;
};

/// [-8, 8] with 4096 points: Gaussian pulses with |delay| <= 3 are truncated
/// far below double precision at the edges.
inline TimeGrid default_time_grid() { return TimeGrid(-8.0, 8.0, 4096); }

/// Frequency grid whose spacing makes an N-point DFT on `grid` exact:
/// d_omega * dt * N = 2 pi. The window is centred on `omega_center`.
inline FrequencyGrid conjugate_grid(const TimeGrid& grid, double omega_center = 0.0) {
  const auto n = grid.size();
  const double d_omega = 2.0 * std::numbers::pi / (static_cast<double>(n) * grid.spacing());
  const double first = omega_center - static_cast<double>(n / 2) * d_omega;
  return FrequencyGrid(first, first + static_cast<double>(n - 1) * d_omega, n);
}

/// Time grid conjugate to a frequency grid, centred on `t_center`.
inline TimeGrid conjugate_grid(const FrequencyGrid& grid, double t_center = 0.0) {
  const auto n = grid.size();
  const double dt = 2.0 * std::numbers::pi / (static_cast<double>(n) * grid.spacing());
  const double first = t_center - static_cast<double>(n / 2) * dt;
  return TimeGrid(first, first + static_cast<double>(n - 1) * dt, n);
}

inline bool are_conjugate(const UniformGrid& time, const UniformGrid& freq, double rel_tol = 1e-9) {
  if (time.size() != freq.size()) return false;
  const double product = time.spacing() * freq.spacing() * static_cast<double>(time.size());
  return std::abs(product - 2.0 * std::numbers::pi) <= rel_tol * 2.0 * std::numbers::pi;
}

/// Composite trapezoid rule over uniformly spaced samples.
template <typename T>
T trapezoid(std::span<const T> values, double spacing) {
  if (values.size() < 2) return T{};
  T sum = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
  return sum * spacing;
}

template <typename T>
T trapezoid(const std::vector<T>& values, double spacing) {
  return trapezoid(std::span<const T>(values), spacing);
}

}  // namespace hom
