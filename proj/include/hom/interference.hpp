#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "hom/error.hpp"
#include "hom/grid.hpp"
#include "hom/wavepacket.hpp"

namespace hom {

/// Output ports of the 50:50 beam splitter.
enum class Port { three = 3, four = 4 };

struct PortPair {
  Port first = Port::three;
  Port second = Port::four;

  bool same_port() const noexcept { return first == second; }
};

/// Single-photon state left behind by the first detection:
/// weight_mode1 |1_1 0_2> + weight_mode2 |0_1 1_2>.
struct ConditionalState {
  cplx weight_mode1;
  cplx weight_mode2;
};

namespace detail {

// zeta1(t0 + tau) zeta2(t0) -/+ zeta2(t0 + tau) zeta1(t0), the two-photon amplitude
// before the 1/2 prefactor.
inline cplx pair_amplitude(cplx z1_late, cplx z2_early, cplx z2_late, cplx z1_early, double sign) {
  return z1_late * z2_early + sign * (z2_late * z1_early);
}

}  // namespace detail

/// Density for a click in port 3 at t0 and port 4 at t0 + tau (either sign of tau).
inline double joint_density(const ModeFunction& m1, const ModeFunction& m2, double t0, double tau) {
  const double t1 = t0 + tau;
  return 0.25 * std::norm(detail::pair_amplitude(m1(t1), m2(t0), m2(t1), m1(t0), -1.0));
}

/// Ordered-time density for both photons in one port, (3,3) or (4,4) alike.
/// A physical event is counted once on the half plane tau >= 0.
inline double same_port_density(const ModeFunction& m1, const ModeFunction& m2, double t0,
                                double tau) {
  const double t1 = t0 + tau;
  return 0.25 * std::norm(detail::pair_amplitude(m1(t1), m2(t0), m2(t1), m1(t0), +1.0));
}

/// Intensity at either output port; carries no interference term.
inline double first_detection_density(const ModeFunction& m1, const ModeFunction& m2, Port /*port*/,
                                      double t0) {
  return 0.5 * (std::norm(m1(t0)) + std::norm(m2(t0)));
}

/// State of the remaining photon after a click in `first_port` at t0.
inline ConditionalState conditional_state(const ModeFunction& m1, const ModeFunction& m2, double t0,
                                          Port first_port = Port::three) {
  const cplx z1 = m1(t0);
  const cplx z2 = m2(t0);
  const double total = std::norm(z1) + std::norm(z2);
  require(total > 0.0, ErrorKind::zero_density_instant,
          "both envelopes vanish at t0; the conditioning event is impossible");
  const double scale = 1.0 / std::sqrt(total);
  // E4^+ = (E1^+ - E2^+)/sqrt2 flips the sign of the mode-1 component.
  const double sign = first_port == Port::three ? 1.0 : -1.0;
  return {sign * z2 * scale, z1 * scale};
}

/// Density of the second click in `port` at time t, given the conditional state.
inline double conditional_density(const ConditionalState& state, const ModeFunction& m1,
                                  const ModeFunction& m2, Port port, double t) {
  const double sign = port == Port::three ? 1.0 : -1.0;
  return 0.5 * std::norm(state.weight_mode1 * m1(t) + sign * state.weight_mode2 * m2(t));
}

/// Mutual-phase-averaged limit of joint_density: envelopes only.
inline double dephased_joint_density(const ModeFunction& m1, const ModeFunction& m2, double t0,
                                     double tau) {
  const double t1 = t0 + tau;
  return 0.25 * (detection_density(m1, t0) * detection_density(m2, t1) +
                 detection_density(m2, t0) * detection_density(m1, t1));
}

struct PortPairProbabilities {
  double same3 = 0.0;
  double same4 = 0.0;
  double opposite = 0.0;  // (3,4) and (4,3) together

  double total() const noexcept { return same3 + same4 + opposite; }
};

/// Event probabilities per output category from the mode overlap c:
/// opposite (1 - |c|^2)/2, each same-port category (1 + |c|^2)/4.
inline PortPairProbabilities port_pair_probabilities(const ModeFunction& m1, const ModeFunction& m2) {
  const double c2 = std::min(1.0, std::norm(overlap(m1, m2)));
  const double same = 0.25 * (1.0 + c2);
  return {same, same, 0.5 * (1.0 - c2)};
}

/// Grid used when integrating over time: the sampled side's grid, else the default.
inline TimeGrid integration_grid(const ModeFunction& m1, const ModeFunction& m2) {
  if (auto g = common_grid(m1, m2)) return *g;
  return default_time_grid();
}

/// \int dt0 joint_density(t0, tau) by trapezoid on `grid`.
inline double coincidence_at_delay(const ModeFunction& m1, const ModeFunction& m2, double tau,
                                   const TimeGrid& grid) {
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = joint_density(m1, m2, grid[i], tau);
  return trapezoid(values, grid.spacing());
}

/// \int dt0 dephased_joint_density(t0, tau) by trapezoid on `grid`.
inline double dephased_coincidence_at_delay(const ModeFunction& m1, const ModeFunction& m2,
                                            double tau, const TimeGrid& grid) {
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    values[i] = dephased_joint_density(m1, m2, grid[i], tau);
  return trapezoid(values, grid.spacing());
}

/// Brute-force 2D trapezoid sums of the pair densities over detection-time
/// pairs (t_a, t_b) on `grid`. Same-port pairs are halved to count each
/// unordered event once.
struct PlaneIntegrals {
  double opposite = 0.0;
  double same_port = 0.0;
  double dephased = 0.0;
};

inline PlaneIntegrals integrate_pair_densities(const ModeFunction& m1, const ModeFunction& m2,
                                               const TimeGrid& grid) {
  const auto z1 = m1.sample_on(grid);
  const auto z2 = m2.sample_on(grid);
  const std::size_t n = grid.size();
  auto weight = [n](std::size_t i) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; };
  double opposite = 0.0;
  double same = 0.0;
  double dephased = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    double row_opp = 0.0;
    double row_same = 0.0;
    double row_deph = 0.0;
    const double p1a = std::norm(z1[a]);
    const double p2a = std::norm(z2[a]);
    for (std::size_t b = 0; b < n; ++b) {
      const double w = weight(b);
      const cplx direct = z1[b] * z2[a];
      const cplx exchanged = z2[b] * z1[a];
      row_opp += w * std::norm(direct - exchanged);
      row_same += w * std::norm(direct + exchanged);
      row_deph += w * (p2a * std::norm(z1[b]) + p1a * std::norm(z2[b]));
    }
    const double w = weight(a);
    opposite += w * row_opp;
    same += w * row_same;
    dephased += w * row_deph;
  }
  const double cell = grid.spacing() * grid.spacing();
  return {0.25 * opposite * cell, 0.5 * 0.25 * same * cell, 0.25 * dephased * cell};
}

/// Probability of one click per output port from sampled norms and overlap:
/// (||z1||^2 ||z2||^2 - |<z1, z2>|^2) / 2, all by 1D trapezoid on `grid`.
inline double opposite_port_probability(const ModeFunction& m1, const ModeFunction& m2,
                                        const TimeGrid& grid) {
  const auto z1 = m1.sample_on(grid);
  const auto z2 = m2.sample_on(grid);
  std::vector<double> n1(z1.size());
  std::vector<double> n2(z1.size());
  std::vector<cplx> cross(z1.size());
  for (std::size_t i = 0; i < z1.size(); ++i) {
    n1[i] = std::norm(z1[i]);
    n2[i] = std::norm(z2[i]);
    cross[i] = std::conj(z1[i]) * z2[i];
  }
  const double dt = grid.spacing();
  return 0.5 * (trapezoid(n1, dt) * trapezoid(n2, dt) - std::norm(trapezoid(cross, dt)));
}

/// Both spectra mapped to the time domain on `grid`.
inline std::pair<ModeFunction, ModeFunction> modes_from_spectra(const SpectralAmplitude& s1,
                                                               const SpectralAmplitude& s2,
                                                               const TimeGrid& grid) {
  return {from_spectrum(s1, grid), from_spectrum(s2, grid)};
}

/// Joint density computed from spectral amplitudes (frequency-mode route).
inline double joint_density_spectral(const SpectralAmplitude& s1, const SpectralAmplitude& s2,
                                     double t0, double tau,
                                     const TimeGrid& grid = default_time_grid()) {
  const auto [m1, m2] = modes_from_spectra(s1, s2, grid);
  return joint_density(m1, m2, t0, tau);
}

/// Joint density on the outer product of t0 and tau values, row-major in t0.
inline std::vector<double> joint_density_spectral_surface(const SpectralAmplitude& s1,
                                                          const SpectralAmplitude& s2,
                                                          std::span<const double> t0_values,
                                                          std::span<const double> tau_values,
                                                          const TimeGrid& grid = default_time_grid()) {
  const auto [m1, m2] = modes_from_spectra(s1, s2, grid);
  std::vector<double> out;
  out.reserve(t0_values.size() * tau_values.size());
  for (double t0 : t0_values)
    for (double tau : tau_values) out.push_back(joint_density(m1, m2, t0, tau));
  return out;
}

}  // namespace hom
