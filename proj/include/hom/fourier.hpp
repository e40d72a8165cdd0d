#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include "hom/grid.hpp"

namespace hom::fourier {

using cplx = std::complex<double>;

namespace detail {

// FFTW planning is not thread-safe; execution on a private plan is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

inline std::vector<cplx> dft(std::vector<cplx> data, int sign) {
  const int n = static_cast<int>(data.size());
  std::vector<cplx> out(data.size());
  auto* in_ptr = reinterpret_cast<fftw_complex*>(data.data());
  auto* out_ptr = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(n, in_ptr, out_ptr, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace detail

/// Phi(w) = (2 pi)^{-1/2} \int dt zeta(t) e^{+i w t}, sampled on `freq`.
///
/// Uses an FFT when the grids are conjugate, otherwise a direct trapezoid sum.
inline std::vector<cplx> time_to_frequency(std::span<const cplx> samples, const TimeGrid& time,
                                           const FrequencyGrid& freq) {
  const double norm = time.spacing() / std::sqrt(2.0 * std::numbers::pi);
  const std::size_t n = time.size();
  if (are_conjugate(time, freq)) {
    const double t0 = time.first();
    const double w0 = freq.first();
    const double dt = time.spacing();
    const double dw = freq.spacing();
    std::vector<cplx> x(n);
    for (std::size_t j = 0; j < n; ++j)
      x[j] = samples[j] * std::polar(1.0, w0 * static_cast<double>(j) * dt);
    auto spectrum = detail::dft(std::move(x), FFTW_BACKWARD);
    for (std::size_t k = 0; k < n; ++k)
      spectrum[k] *= norm * std::polar(1.0, w0 * t0 + static_cast<double>(k) * dw * t0);
    return spectrum;
  }
  std::vector<cplx> spectrum(freq.size());
  for (std::size_t k = 0; k < freq.size(); ++k) {
    const double w = freq[k];
    cplx acc = 0.5 * (samples[0] * std::polar(1.0, w * time[0]) +
                      samples[n - 1] * std::polar(1.0, w * time[n - 1]));
    for (std::size_t j = 1; j + 1 < n; ++j) acc += samples[j] * std::polar(1.0, w * time[j]);
    spectrum[k] = norm * acc;
  }
  return spectrum;
}

/// zeta(t) = (2 pi)^{-1/2} \int dw Phi(w) e^{-i w t}, sampled on `time`.
inline std::vector<cplx> frequency_to_time(std::span<const cplx> spectrum, const FrequencyGrid& freq,
                                           const TimeGrid& time) {
  const double norm = freq.spacing() / std::sqrt(2.0 * std::numbers::pi);
  const std::size_t n = freq.size();
  if (are_conjugate(time, freq)) {
    const double t0 = time.first();
    const double w0 = freq.first();
    const double dt = time.spacing();
    const double dw = freq.spacing();
    std::vector<cplx> x(n);
    for (std::size_t k = 0; k < n; ++k)
      x[k] = spectrum[k] * std::polar(1.0, -static_cast<double>(k) * dw * t0);
    auto samples = detail::dft(std::move(x), FFTW_FORWARD);
    for (std::size_t j = 0; j < n; ++j)
      samples[j] *= norm * std::polar(1.0, -w0 * t0 - w0 * static_cast<double>(j) * dt);
    return samples;
  }
  std::vector<cplx> samples(time.size());
  for (std::size_t j = 0; j < time.size(); ++j) {
    const double t = time[j];
    cplx acc = 0.5 * (spectrum[0] * std::polar(1.0, -freq[0] * t) +
                      spectrum[n - 1] * std::polar(1.0, -freq[n - 1] * t));
    for (std::size_t k = 1; k + 1 < n; ++k) acc += spectrum[k] * std::polar(1.0, -freq[k] * t);
    samples[j] = norm * acc;
  }
  return samples;
}

}  // namespace hom::fourier
