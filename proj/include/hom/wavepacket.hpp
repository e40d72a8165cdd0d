#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <istream>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hom/error.hpp"
#include "hom/format.hpp"
#include "hom/fourier.hpp"
#include "hom/grid.hpp"

namespace hom {

using cplx = std::complex<double>;

/// Edge samples must stay below this fraction of the peak density.
inline constexpr double truncation_guard = 1e-8;

/// Sampled norms must match unity (or each other, under Fourier transforms) to this level.
inline constexpr double norm_tolerance = 1e-6;

/// Fourier-limited Gaussian pulse (2/pi)^{1/4} exp(-(t - center)^2 - i carrier t).
struct GaussianShape {
  double center = 0.0;
  double carrier = 0.0;

  static double amplitude() { return std::pow(2.0 / std::numbers::pi, 0.25); }

  cplx operator()(double t) const {
    const double dt = t - center;
    return std::polar(amplitude() * std::exp(-dt * dt), -carrier * t);
  }
};

/// Normalised single-photon mode function zeta(t) = eps(t) exp(-i phi(t)).
///
/// Either an analytic Gaussian (carrier kept explicit so it is never
/// undersampled) or samples on a uniform grid. Immutable; copies share the
/// sample buffer.
class ModeFunction {
 public:
  struct Sampled {
    TimeGrid grid;
    std::shared_ptr<const std::vector<cplx>> values;
  };

  static ModeFunction analytic(GaussianShape shape) { return ModeFunction(shape, 1.0); }

  static ModeFunction from_normalized_samples(TimeGrid grid, std::vector<cplx> values,
                                              double applied_factor) {
    return ModeFunction(
        Sampled{grid, std::make_shared<const std::vector<cplx>>(std::move(values))},
        applied_factor);
  }

  bool is_analytic() const noexcept { return std::holds_alternative<GaussianShape>(rep_); }

  const GaussianShape* gaussian() const noexcept { return std::get_if<GaussianShape>(&rep_); }

  const TimeGrid* grid() const noexcept {
    const auto* s = std::get_if<Sampled>(&rep_);
    return s ? &s->grid : nullptr;
  }

  /// Samples of a gridded mode; empty for analytic modes.
  std::span<const cplx> samples() const noexcept {
    const auto* s = std::get_if<Sampled>(&rep_);
    return s ? std::span<const cplx>(*s->values) : std::span<const cplx>{};
  }

  /// Factor that was multiplied into user-supplied samples to reach unit norm.
  double applied_normalization() const noexcept { return applied_factor_; }

  /// Off-grid values are linearly interpolated; zero outside the grid.
  cplx operator()(double t) const {
    if (const auto* g = std::get_if<GaussianShape>(&rep_)) return (*g)(t);
    const auto& s = std::get<Sampled>(rep_);
    const auto& v = *s.values;
    if (!(t >= s.grid.t_min() && t <= s.grid.t_max())) return {0.0, 0.0};
    const double pos = (t - s.grid.t_min()) / s.grid.spacing();
    auto idx = static_cast<std::size_t>(pos);
    if (idx >= v.size() - 1) idx = v.size() - 2;
    const double frac = pos - static_cast<double>(idx);
    return v[idx] + frac * (v[idx + 1] - v[idx]);
  }

  /// Values on `target`; exact copy when the mode already lives on that grid.
  std::vector<cplx> sample_on(const TimeGrid& target) const {
    if (const auto* g = grid(); g && *g == target) return {samples().begin(), samples().end()};
    std::vector<cplx> out(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) out[i] = (*this)(target[i]);
    return out;
  }

 private:
  ModeFunction(std::variant<GaussianShape, Sampled> rep, double factor)
      : rep_(std::move(rep)), applied_factor_(factor) {}

  std::variant<GaussianShape, Sampled> rep_;
  double applied_factor_ = 1.0;
};

/// Sampled spectral amplitude Phi(omega) with unit norm.
class SpectralAmplitude {
 public:
  SpectralAmplitude(FrequencyGrid grid, std::vector<cplx> values)
      : grid_(grid), values_(std::make_shared<const std::vector<cplx>>(std::move(values))) {
    require(values_->size() == grid_.size(), ErrorKind::length_mismatch,
            "spectrum has " + std::to_string(values_->size()) + " samples for a grid of " +
                std::to_string(grid_.size()));
  }

  const FrequencyGrid& grid() const noexcept { return grid_; }
  std::span<const cplx> values() const noexcept { return *values_; }

  double norm() const {
    std::vector<double> density(values_->size());
    std::transform(values_->begin(), values_->end(), density.begin(),
                   [](cplx v) { return std::norm(v); });
    return trapezoid(density, grid_.spacing());
  }

 private:
  FrequencyGrid grid_;
  std::shared_ptr<const std::vector<cplx>> values_;
};

namespace detail {

inline double sampled_norm(std::span<const cplx> values, double spacing) {
  std::vector<double> density(values.size());
  std::transform(values.begin(), values.end(), density.begin(), [](cplx v) { return std::norm(v); });
  return trapezoid(density, spacing);
}

inline void check_truncation(std::span<const cplx> values, ErrorKind kind) {
  double peak = 0.0;
  for (const auto& v : values) peak = std::max(peak, std::norm(v));
  const double edge = std::max(std::norm(values.front()), std::norm(values.back()));
  require(edge <= truncation_guard * peak, kind,
          "mode is truncated by the grid (edge/peak density " + format_double(edge / peak) + ")");
}

}  // namespace detail

/// Renormalises `amplitudes` to unit norm on `grid`; rejects all-zero input.
inline ModeFunction make_sampled_mode(const TimeGrid& grid, std::vector<cplx> amplitudes) {
  require(amplitudes.size() == grid.size(), ErrorKind::length_mismatch,
          "got " + std::to_string(amplitudes.size()) + " samples for a grid of " +
              std::to_string(grid.size()));
  for (const auto& a : amplitudes)
    require(std::isfinite(a.real()) && std::isfinite(a.imag()), ErrorKind::invalid_argument,
            "mode samples must be finite");
  const double norm = detail::sampled_norm(amplitudes, grid.spacing());
  require(norm > 0.0, ErrorKind::not_normalizable, "envelope is identically zero");
  detail::check_truncation(amplitudes, ErrorKind::grid_too_narrow);
  const double factor = 1.0 / std::sqrt(norm);
  for (auto& a : amplitudes) a *= factor;
  return ModeFunction::from_normalized_samples(grid, std::move(amplitudes), factor);
}

/// zeta(t) = envelope(t) exp(-i phase(t)), envelope renormalised, phase kept.
inline ModeFunction make_sampled_mode(std::span<const double> envelope, std::span<const double> phase,
                                      const TimeGrid& grid) {
  require(envelope.size() == grid.size() && phase.size() == grid.size(), ErrorKind::length_mismatch,
          "envelope/phase lengths must equal the grid size " + std::to_string(grid.size()));
  std::vector<cplx> amplitudes(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(envelope[i] >= 0.0, ErrorKind::invalid_argument, "envelope must be nonnegative");
    amplitudes[i] = std::polar(envelope[i], -phase[i]);
  }
  return make_sampled_mode(grid, std::move(amplitudes));
}

inline ModeFunction make_gaussian_mode(double center, double carrier) {
  require(std::isfinite(center) && std::isfinite(carrier), ErrorKind::invalid_argument,
          "center and carrier must be finite");
  return ModeFunction::analytic({center, carrier});
}

/// Gaussian mode sampled on `grid`, which must cover center +- 5.
inline ModeFunction make_gaussian_mode(double center, double carrier, const TimeGrid& grid) {
  require(grid.t_min() <= center - 5.0 && grid.t_max() >= center + 5.0, ErrorKind::grid_too_narrow,
          "grid must span at least 5 pulse widths on each side of the centre");
  const GaussianShape shape{center, carrier};
  std::vector<cplx> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = shape(grid[i]);
  return make_sampled_mode(grid, std::move(values));
}

/// Same mode on a different grid (linear interpolation), renormalised.
inline ModeFunction resample(const ModeFunction& mode, const TimeGrid& grid) {
  return make_sampled_mode(grid, mode.sample_on(grid));
}

/// Single-photon detection density |zeta(t)|^2 = |eps(t)|^2.
inline double detection_density(const ModeFunction& mode, double t) { return std::norm(mode(t)); }

/// Grid shared by an operation on two modes: analytic modes adopt the sampled
/// side's grid; two sampled modes must agree.
inline std::optional<TimeGrid> common_grid(const ModeFunction& a, const ModeFunction& b) {
  const auto* ga = a.grid();
  const auto* gb = b.grid();
  if (ga && gb) {
    require(*ga == *gb, ErrorKind::grid_mismatch,
            "sampled modes live on different grids; resample one of them first");
    return *ga;
  }
  if (ga) return *ga;
  if (gb) return *gb;
  return std::nullopt;
}

/// \int dt conj(zeta1(t)) zeta2(t).
inline cplx overlap(const ModeFunction& m1, const ModeFunction& m2) {
  const auto grid = common_grid(m1, m2);
  if (!grid) {
    const auto& a = *m1.gaussian();
    const auto& b = *m2.gaussian();
    const double sep = a.center - b.center;
    const double kappa = a.carrier - b.carrier;
    const double mid = 0.5 * (a.center + b.center);
    return std::polar(std::exp(-0.5 * sep * sep - 0.125 * kappa * kappa), kappa * mid);
  }
  const auto z1 = m1.sample_on(*grid);
  const auto z2 = m2.sample_on(*grid);
  std::vector<cplx> product(z1.size());
  for (std::size_t i = 0; i < z1.size(); ++i) product[i] = std::conj(z1[i]) * z2[i];
  return trapezoid(product, grid->spacing());
}

/// Phi(omega) of `mode` on `freq`; convention zeta(t) = (2 pi)^{-1/2} \int Phi e^{-i omega t}.
///
/// Analytic modes are sampled on the time grid conjugate to `freq` (centred
/// at t = 0). Throws AliasingRisk when the window cannot hold the spectrum.
inline SpectralAmplitude to_spectrum(const ModeFunction& mode, const FrequencyGrid& freq) {
  std::vector<cplx> samples;
  TimeGrid time = conjugate_grid(freq);
  if (const auto* g = mode.gaussian()) {
    require(g->carrier - 10.0 >= freq.omega_min() && g->carrier + 10.0 <= freq.omega_max(),
            ErrorKind::aliasing_risk, "carrier band lies outside the frequency window");
    samples = mode.sample_on(time);
    detail::check_truncation(samples, ErrorKind::grid_too_narrow);
  } else {
    time = *mode.grid();
    const double nyquist_band = 2.0 * std::numbers::pi / time.spacing();
    require(freq.span() <= nyquist_band * (1.0 + 1e-9), ErrorKind::aliasing_risk,
            "frequency window is wider than the sampling band 2 pi / dt");
    samples.assign(mode.samples().begin(), mode.samples().end());
  }
  SpectralAmplitude spectrum(freq, fourier::time_to_frequency(samples, time, freq));
  const double norm = spectrum.norm();
  require(std::abs(norm - 1.0) <= norm_tolerance, ErrorKind::aliasing_risk,
          "spectral norm " + format_double(norm) + " deviates from 1; widen the frequency window");
  return spectrum;
}

/// Inverse of to_spectrum onto `time`.
inline ModeFunction from_spectrum(const SpectralAmplitude& spectrum, const TimeGrid& time) {
  const auto& freq = spectrum.grid();
  const auto values = spectrum.values();
  require(time.span() < 2.0 * std::numbers::pi / freq.spacing() * (1.0 + 1e-9),
          ErrorKind::aliasing_risk, "time window exceeds the period 2 pi / d_omega of the spectrum");
  double peak = 0.0;
  for (const auto& v : values) peak = std::max(peak, std::norm(v));
  require(peak > 0.0, ErrorKind::not_normalizable, "spectrum is identically zero");
  std::size_t lo = 0;
  std::size_t hi = values.size() - 1;
  while (std::norm(values[lo]) <= 1e-12 * peak) ++lo;
  while (std::norm(values[hi]) <= 1e-12 * peak) --hi;
  // Baseband criterion: samples must resolve the highest occupied frequency,
  // since the result is interpolated linearly between nodes.
  const double highest = std::max(std::abs(freq[lo]), std::abs(freq[hi]));
  require(highest * time.spacing() <= std::numbers::pi, ErrorKind::aliasing_risk,
          "occupied band exceeds the Nyquist frequency of the time grid");

  auto samples = fourier::frequency_to_time(values, freq, time);
  const double target = spectrum.norm();
  const double norm = detail::sampled_norm(samples, time.spacing());
  require(std::abs(norm - target) <= norm_tolerance, ErrorKind::aliasing_risk,
          "time-domain norm " + format_double(norm) + " differs from spectral norm " +
              format_double(target));
  try {
    return make_sampled_mode(time, std::move(samples));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::grid_too_narrow)
      fail(ErrorKind::aliasing_risk, std::string("time-domain result wraps around: ") + e.what());
    throw;
  }
}

/// Writes `t,re,im` rows. Analytic modes are sampled on `grid`.
inline void write_mode_csv(std::ostream& out, const ModeFunction& mode,
                           const TimeGrid& grid = default_time_grid()) {
  const TimeGrid& g = mode.grid() ? *mode.grid() : grid;
  const auto values = mode.sample_on(g);
  out << "t,re,im\n";
  for (std::size_t i = 0; i < g.size(); ++i) write_row(out, {g[i], values[i].real(), values[i].imag()});
}

/// Reads `t,re,im` rows on a uniform time grid and renormalises.
inline ModeFunction read_mode_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::invalid_argument, "empty mode CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "t,re,im", ErrorKind::invalid_argument, "mode CSV header must be 't,re,im'");
  std::vector<double> times;
  std::vector<cplx> values;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = split_fields(line);
    require(fields.size() == 3, ErrorKind::invalid_argument, "mode CSV rows need 3 fields");
    times.push_back(parse_double(fields[0]));
    values.emplace_back(parse_double(fields[1]), parse_double(fields[2]));
  }
  require(times.size() >= 2, ErrorKind::invalid_argument, "mode CSV needs at least two rows");
  const TimeGrid grid(times.front(), times.back(), times.size());
  for (std::size_t i = 0; i < times.size(); ++i)
    require(std::abs(times[i] - grid[i]) <= 1e-9 * std::max(1.0, grid.span()),
            ErrorKind::invalid_argument, "mode CSV time column is not uniformly spaced");
  return make_sampled_mode(grid, std::move(values));
}

}  // namespace hom
