#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "hom/error.hpp"
#include "hom/wavepacket.hpp"

namespace hom {

/// Photon-pair parameters in pulse-duration units (dt = 1).
struct PhotonPairConfig {
  double delta_tau = 0.0;    ///< arrival delay between the two wave packets
  double delta = 0.0;        ///< carrier difference omega2 - omega1
  double omega_mean = 0.0;   ///< mean carrier (omega1 + omega2)/2
  double delta_omega = 0.0;  ///< Gaussian spread of `delta` (half width at 1/e), >= 0

  /// Names of violated invariants; empty when valid.
  std::vector<std::string> issues() const {
    std::vector<std::string> out;
    if (!std::isfinite(delta_tau)) out.emplace_back("delta_tau must be finite");
    if (!std::isfinite(delta)) out.emplace_back("delta must be finite");
    if (!std::isfinite(omega_mean)) out.emplace_back("omega_mean must be finite");
    if (!std::isfinite(delta_omega)) out.emplace_back("delta_omega must be finite");
    else if (delta_omega < 0.0) out.emplace_back("delta_omega must be >= 0");
    return out;
  }

  void validate() const {
    if (auto list = issues(); !list.empty()) fail(ErrorKind::invalid_argument, list.front());
  }
};

/// The pulse pair: mode 1 centred at +delta_tau/2 with carrier omega - delta/2,
/// mode 2 at -delta_tau/2 with carrier omega + delta/2.
inline std::pair<ModeFunction, ModeFunction> gaussian_pair(const PhotonPairConfig& cfg) {
  return {make_gaussian_mode(0.5 * cfg.delta_tau, cfg.omega_mean - 0.5 * cfg.delta),
          make_gaussian_mode(-0.5 * cfg.delta_tau, cfg.omega_mean + 0.5 * cfg.delta)};
}

using ModePair = std::pair<ModeFunction, ModeFunction>;

/// Mode pair as a function of the carrier difference.
using PairFamily = std::function<ModePair(double delta)>;

/// Mode pair as a function of arrival delay and carrier difference.
using DelayedPairFamily = std::function<ModePair(double delta_tau, double delta)>;

inline PairFamily gaussian_family(double delta_tau = 0.0, double omega_mean = 0.0) {
  return [=](double delta) { return gaussian_pair({delta_tau, delta, omega_mean, 0.0}); };
}

inline DelayedPairFamily gaussian_delayed_family(double omega_mean = 0.0) {
  return [=](double delta_tau, double delta) {
    return gaussian_pair({delta_tau, delta, omega_mean, 0.0});
  };
}

namespace detail {

// cosh(x) * exp(e), finite whenever the product is.
inline double cosh_factor(double x, double e) {
  const double ax = std::abs(x);
  if (ax > 700.0) return 0.5 * std::exp(ax + e) + 0.5 * std::exp(e - ax);
  return std::cosh(x) * std::exp(e);
}

// (cosh(x) - cos(y)) * exp(e), stable when |x| is large and e very negative.
inline double beat_factor(double x, double y, double e) {
  if (std::abs(x) > 700.0) return cosh_factor(x, e) - std::cos(y) * std::exp(e);
  return (std::cosh(x) - std::cos(y)) * std::exp(e);
}

}  // namespace detail

/// Closed-form joint density for the Gaussian pair; omega_mean drops out.
inline double p_joint_gaussian(double t0, double tau, const PhotonPairConfig& cfg) {
  const double dtau = cfg.delta_tau;
  const double e = -4.0 * t0 * (t0 + tau) - dtau * dtau - 2.0 * tau * tau;
  return detail::beat_factor(2.0 * tau * dtau, tau * cfg.delta, e) / std::numbers::pi;
}

/// Coincidence density versus detection-time difference tau (t0 integrated out).
inline double p_2hnu(double tau, const PhotonPairConfig& cfg) {
  const double dtau = cfg.delta_tau;
  const double e = -dtau * dtau - tau * tau;
  return detail::beat_factor(2.0 * tau * dtau, tau * cfg.delta, e) /
         (2.0 * std::sqrt(std::numbers::pi));
}

/// Normalised Gaussian distribution of the carrier difference.
inline double freq_distribution(double delta, double delta_omega) {
  require(delta_omega >= 0.0 && std::isfinite(delta_omega), ErrorKind::invalid_argument,
          "delta_omega must be finite and >= 0");
  require(delta_omega > 0.0, ErrorKind::degenerate_width,
          "delta_omega = 0 is a point mass; use the deterministic-delta formulas");
  const double x = delta / delta_omega;
  return std::exp(-x * x) / (delta_omega * std::sqrt(std::numbers::pi));
}

/// p_2hnu at zero arrival delay averaged over the carrier-difference spread.
inline double p_inh(double tau, double delta_omega) {
  require(delta_omega >= 0.0, ErrorKind::invalid_argument, "delta_omega must be >= 0");
  if (delta_omega == 0.0) return 0.0;
  const double x = 0.5 * tau * delta_omega;
  return std::exp(-tau * tau) / (2.0 * std::sqrt(std::numbers::pi)) * -std::expm1(-x * x);
}

/// p_2hnu averaged over carrier differences spread around cfg.delta with
/// width cfg.delta_omega. Reduces to p_2hnu for delta_omega = 0 and to p_inh
/// for delta_tau = delta = 0.
inline double p_2hnu_averaged(double tau, const PhotonPairConfig& cfg) {
  require(cfg.delta_omega >= 0.0, ErrorKind::invalid_argument, "delta_omega must be >= 0");
  if (cfg.delta_omega == 0.0) return p_2hnu(tau, cfg);
  const double dtau = cfg.delta_tau;
  const double x = 0.5 * tau * cfg.delta_omega;
  const double e = -dtau * dtau - tau * tau;
  const double envelope = detail::cosh_factor(2.0 * tau * dtau, e);
  return (envelope - std::cos(tau * cfg.delta) * std::exp(e - x * x)) /
         (2.0 * std::sqrt(std::numbers::pi));
}

/// Envelope-only (dephased) reference for p_2hnu: no beat term.
inline double p_2hnu_dephased(double tau, double delta_tau) {
  const double e = -delta_tau * delta_tau - tau * tau;
  return detail::cosh_factor(2.0 * tau * delta_tau, e) /
         (2.0 * std::sqrt(std::numbers::pi));
}

/// Total probability of a click in each output port.
inline double p_total(double delta_tau, double delta_omega) {
  require(delta_omega >= 0.0, ErrorKind::invalid_argument, "delta_omega must be >= 0");
  return 0.5 - std::exp(-delta_tau * delta_tau) / std::sqrt(4.0 + delta_omega * delta_omega);
}

/// p_total for carrier differences spread around cfg.delta (not only 0).
inline double p_total_averaged(const PhotonPairConfig& cfg) {
  require(cfg.delta_omega >= 0.0, ErrorKind::invalid_argument, "delta_omega must be >= 0");
  const double s = 4.0 + cfg.delta_omega * cfg.delta_omega;
  return 0.5 - std::exp(-cfg.delta_tau * cfg.delta_tau - cfg.delta * cfg.delta / s) / std::sqrt(s);
}

}  // namespace hom
