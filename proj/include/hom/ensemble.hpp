#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hom/error.hpp"
#include "hom/format.hpp"
#include "hom/gaussian.hpp"
#include "hom/interference.hpp"
#include "hom/parallel.hpp"
#include "hom/quadrature.hpp"
#include "hom/wavepacket.hpp"

namespace hom {

/// Sampled series with labelled axes.
struct Curve {
  std::vector<double> x;
  std::vector<double> y;
  std::string x_label;
  std::string x_unit;
  std::string y_label;
  std::string y_unit;

  void validate() const {
    require(x.size() == y.size(), ErrorKind::length_mismatch, "curve axes differ in length");
    for (std::size_t i = 1; i < x.size(); ++i)
      require(x[i] > x[i - 1], ErrorKind::invalid_argument, "curve abscissa must increase strictly");
  }
};

/// Header `<x_label> [<x_unit>],<y_label> [<y_unit>]`, then one row per point.
inline void write_curve_csv(std::ostream& out, const Curve& curve) {
  curve.validate();
  out << curve.x_label << " [" << curve.x_unit << "]," << curve.y_label << " [" << curve.y_unit
      << "]\n";
  for (std::size_t i = 0; i < curve.x.size(); ++i) write_row(out, {curve.x[i], curve.y[i]});
}

struct EnsembleOptions {
  /// Grid for the t0 integrals. Must contain the pulses of the family.
  TimeGrid t0_grid = TimeGrid(-8.0, 8.0, 641);
  /// Gauss-Hermite nodes; the result is recomputed with twice as many to check convergence.
  std::size_t detuning_nodes = 64;
  double tolerance = 1e-5;
};

namespace detail {

// \int dt0 joint_density(t0, tau) for each tau, reusing the t0 samples. With
// both = true the dephased integrals follow as a second block of the result.
inline std::vector<double> coincidence_row(const ModePair& modes, std::span<const double> taus,
                                           const TimeGrid& grid, bool dephased, bool both = false) {
  const auto& [m1, m2] = modes;
  const auto early1 = m1.sample_on(grid);
  const auto early2 = m2.sample_on(grid);
  const std::size_t n = taus.size();
  std::vector<double> out(both ? 2 * n : n);
  std::vector<double> coherent(grid.size());
  std::vector<double> envelope(grid.size());
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double t1 = grid[i] + taus[k];
      const cplx late1 = m1(t1);
      const cplx late2 = m2(t1);
      if (!dephased || both) coherent[i] = 0.25 * std::norm(late1 * early2[i] - late2 * early1[i]);
      if (dephased || both)
        envelope[i] = 0.25 * (std::norm(early1[i]) * std::norm(late2) +
                              std::norm(early2[i]) * std::norm(late1));
    }
    if (both) {
      out[k] = trapezoid(coherent, grid.spacing());
      out[n + k] = trapezoid(envelope, grid.spacing());
    } else {
      out[k] = trapezoid(dephased ? envelope : coherent, grid.spacing());
    }
  }
  return out;
}

// Averages per-node rows of `row(delta)` over the detuning distribution with
// n and 2n Gauss-Hermite nodes, failing when they disagree beyond tolerance.
template <typename Row>
std::vector<double> detuning_average(Row&& row, std::size_t width, double delta_omega,
                                     const EnsembleOptions& opts) {
  if (delta_omega == 0.0) return row(0.0);
  auto average = [&](std::size_t nodes) {
    const auto rule = gauss_hermite(nodes);
    std::vector<std::vector<double>> rows(nodes);
    parallel_for(nodes, [&](std::size_t i) { rows[i] = row(delta_omega * rule.nodes[i]); });
    std::vector<double> acc(width, 0.0);
    for (std::size_t i = 0; i < nodes; ++i)  // fixed reduction order
      for (std::size_t k = 0; k < width; ++k) acc[k] += rule.weights[i] * rows[i][k];
    for (auto& v : acc) v /= std::sqrt(std::numbers::pi);
    return acc;
  };
  const auto coarse = average(opts.detuning_nodes);
  auto fine = average(2 * opts.detuning_nodes);
  double worst = 0.0;
  for (std::size_t k = 0; k < width; ++k) worst = std::max(worst, std::abs(fine[k] - coarse[k]));
  require(worst <= opts.tolerance, ErrorKind::quadrature_not_converged,
          "detuning quadrature changed by " + format_double(worst) + " between " +
              std::to_string(opts.detuning_nodes) + " and " +
              std::to_string(2 * opts.detuning_nodes) + " nodes");
  return fine;
}

inline void check_width(double delta_omega) {
  require(std::isfinite(delta_omega) && delta_omega >= 0.0, ErrorKind::invalid_argument,
          "delta_omega must be finite and >= 0");
}

}  // namespace detail

/// Coincidence density versus tau averaged over the carrier-difference spread:
/// y(tau) = \int dDelta f(Delta) \int dt0 joint_density.
inline Curve averaged_coincidence_curve(const PairFamily& family, double delta_omega,
                                        std::span<const double> tau_grid,
                                        const EnsembleOptions& opts = {}) {
  detail::check_width(delta_omega);
  auto row = [&](double delta) {
    return detail::coincidence_row(family(delta), tau_grid, opts.t0_grid, false);
  };
  Curve curve{{tau_grid.begin(), tau_grid.end()},
              detail::detuning_average(row, tau_grid.size(), delta_omega, opts),
              "tau", "pulse durations", "coincidence density", "1/pulse duration"};
  curve.validate();
  return curve;
}

/// Same average for the envelope-only (dephased) reference density.
inline Curve averaged_dephased_curve(const PairFamily& family, double delta_omega,
                                     std::span<const double> tau_grid,
                                     const EnsembleOptions& opts = {}) {
  detail::check_width(delta_omega);
  auto row = [&](double delta) {
    return detail::coincidence_row(family(delta), tau_grid, opts.t0_grid, true);
  };
  Curve curve{{tau_grid.begin(), tau_grid.end()},
              detail::detuning_average(row, tau_grid.size(), delta_omega, opts),
              "tau", "pulse durations", "dephased coincidence density", "1/pulse duration"};
  curve.validate();
  return curve;
}

/// Single-point convenience for averaged_coincidence_curve.
inline double averaged_coincidence(const PairFamily& family, double delta_omega, double tau,
                                   const EnsembleOptions& opts = {}) {
  const double taus[] = {tau};
  return averaged_coincidence_curve(family, delta_omega, taus, opts).y.front();
}

/// Total probability of one click per output port versus arrival delay,
/// averaged over the carrier-difference spread.
inline Curve total_coincidence_vs_delay(const DelayedPairFamily& family, double delta_omega,
                                        std::span<const double> delta_tau_grid,
                                        const EnsembleOptions& opts = {}) {
  detail::check_width(delta_omega);
  auto row = [&](double delta) {
    std::vector<double> out(delta_tau_grid.size());
    for (std::size_t k = 0; k < delta_tau_grid.size(); ++k) {
      const auto [m1, m2] = family(delta_tau_grid[k], delta);
      out[k] = opposite_port_probability(m1, m2, opts.t0_grid);
    }
    return out;
  };
  Curve curve{{delta_tau_grid.begin(), delta_tau_grid.end()},
              detail::detuning_average(row, delta_tau_grid.size(), delta_omega, opts),
              "delta_tau", "pulse durations", "total coincidence probability", "1"};
  curve.validate();
  return curve;
}

/// Coincidences restricted to |tau| < window, the same for the dephased
/// reference, and the resulting dip depth 1 - coincidence/reference.
struct FilteredCoincidence {
  double coincidence = 0.0;
  double reference = 0.0;
  double depth = 0.0;
};

/// Gaussian pulses, closed-form tau integrals of the detuning-averaged density.
inline FilteredCoincidence filtered_coincidence(double delta_omega, double window,
                                                double delta_tau) {
  detail::check_width(delta_omega);
  require(window > 0.0, ErrorKind::invalid_argument, "filter window must be positive");
  const double a = 1.0 + 0.25 * delta_omega * delta_omega;
  const double reference =
      0.25 * (std::erf(window - delta_tau) + std::erf(window + delta_tau));
  const double coherent =
      0.5 * std::exp(-delta_tau * delta_tau) * std::erf(std::sqrt(a) * window) / std::sqrt(a);
  const double coincidence = std::max(0.0, reference - coherent);
  const double depth = reference > 0.0 ? 1.0 - coincidence / reference : 0.0;
  return {coincidence, reference, depth};
}

/// Any pulse family: Simpson integration of the averaged curves over |tau| < window.
inline FilteredCoincidence filtered_coincidence(const PairFamily& family, double delta_omega,
                                                double window, const EnsembleOptions& opts = {},
                                                std::size_t panels = 64) {
  require(window > 0.0, ErrorKind::invalid_argument, "filter window must be positive");
  if (panels % 2 == 1) ++panels;
  std::vector<double> taus(panels + 1);
  for (std::size_t i = 0; i <= panels; ++i)
    taus[i] = -window + 2.0 * window * static_cast<double>(i) / static_cast<double>(panels);
  detail::check_width(delta_omega);
  // One pass yields both curves: coherent in [0, n), dephased in [n, 2n).
  auto row = [&](double delta) {
    return detail::coincidence_row(family(delta), taus, opts.t0_grid, false, true);
  };
  const auto both = detail::detuning_average(row, 2 * taus.size(), delta_omega, opts);
  auto integrate = [&](std::size_t offset) {
    const double h = 2.0 * window / static_cast<double>(panels);
    double sum = both[offset] + both[offset + panels];
    for (std::size_t i = 1; i < panels; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * both[offset + i];
    return sum * h / 3.0;
  };
  const double coincidence = std::max(0.0, integrate(0));
  const double reference = integrate(taus.size());
  return {coincidence, reference, reference > 0.0 ? 1.0 - coincidence / reference : 0.0};
}

}  // namespace hom
