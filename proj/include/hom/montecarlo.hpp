#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "hom/error.hpp"
#include "hom/format.hpp"
#include "hom/gaussian.hpp"
#include "hom/interference.hpp"
#include "hom/parallel.hpp"
#include "hom/random.hpp"
#include "hom/wavepacket.hpp"

namespace hom {

/// Two clicks, stored in time order.
struct DetectionPair {
  Port first_port = Port::three;
  double first_time = 0.0;
  Port second_port = Port::four;
  double second_time = 0.0;

  bool opposite_ports() const noexcept { return first_port != second_port; }

  /// t(port 4) - t(port 3) for opposite-port pairs, second - first otherwise.
  double signed_delay() const noexcept {
    const double d = second_time - first_time;
    return (opposite_ports() && first_port == Port::four) ? -d : d;
  }

  friend bool operator==(const DetectionPair&, const DetectionPair&) = default;
};

/// Proposals allowed per drawn time before giving up.
inline constexpr int rejection_budget = 10000;

/// Draws detection times from |zeta(t)|^2 of one mode.
///
/// Gaussian modes are sampled exactly (normal with sigma = 1/2). Sampled modes
/// use rejection against a piecewise-constant envelope: on each grid cell the
/// interpolated density is bounded by the larger endpoint value, since |.|^2
/// is convex along the linear interpolant.
class DensitySampler {
 public:
  explicit DensitySampler(const ModeFunction& mode) : mode_(mode) {
    if (mode.is_analytic()) return;
    const auto& grid = *mode.grid();
    const auto values = mode.samples();
    cumulative_.resize(values.size() - 1);
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < values.size(); ++j) {
      acc += std::max(std::norm(values[j]), std::norm(values[j + 1])) * grid.spacing();
      cumulative_[j] = acc;
    }
  }

  double operator()(Xoshiro256& rng) const {
    if (const auto* g = mode_.gaussian()) return g->center + 0.5 * rng.normal();
    const auto& grid = *mode_.grid();
    const auto values = mode_.samples();
    const double total = cumulative_.back();
    for (int attempt = 0; attempt < rejection_budget; ++attempt) {
      const double u = rng.uniform() * total;
      auto cell = static_cast<std::size_t>(
          std::upper_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin());
      cell = std::min(cell, cumulative_.size() - 1);
      const double bound = std::max(std::norm(values[cell]), std::norm(values[cell + 1]));
      const double t = grid[cell] + rng.uniform() * grid.spacing();
      if (rng.uniform() * bound < detection_density(mode_, t)) return t;
    }
    fail(ErrorKind::rejection_budget_exceeded,
         "no detection time accepted after " + std::to_string(rejection_budget) + " proposals");
  }

 private:
  ModeFunction mode_;
  std::vector<double> cumulative_;
};

/// Exact sampler for the two-click distribution of a mode pair.
///
/// One click is drawn from the port-symmetric intensity (|z1|^2 + |z2|^2)/2 in a
/// uniformly chosen port; the second from the conditional single-photon state
/// that click leaves behind. The port of the second click is decided at its
/// time by the ratio of the port densities. The induced category frequencies
/// are those of port_pair_probabilities.
class PairSampler {
 public:
  PairSampler(const ModeFunction& m1, const ModeFunction& m2)
      : m1_(m1), m2_(m2), s1_(m1), s2_(m2) {}

  DetectionPair operator()(Xoshiro256& rng) const {
    const Port port_a = rng.uniform() < 0.5 ? Port::three : Port::four;
    const double t_a = rng.uniform() < 0.5 ? s1_(rng) : s2_(rng);
    const auto state = conditional_state(m1_, m2_, t_a, port_a);
    const double t_b = rng.uniform() < std::norm(state.weight_mode1) ? s1_(rng) : s2_(rng);
    const cplx a = state.weight_mode1 * m1_(t_b);
    const cplx b = state.weight_mode2 * m2_(t_b);
    const double total = std::norm(a) + std::norm(b);
    const double to_three = total > 0.0 ? 0.5 * std::norm(a + b) / total : 1.0;
    const Port port_b = rng.uniform() < to_three ? Port::three : Port::four;
    if (t_b < t_a) return {port_b, t_b, port_a, t_a};
    return {port_a, t_a, port_b, t_b};
  }

 private:
  ModeFunction m1_;
  ModeFunction m2_;
  DensitySampler s1_;
  DensitySampler s2_;
};

/// One pair drawn for the mode pair (m1, m2).
inline DetectionPair sample_pair(const ModeFunction& m1, const ModeFunction& m2, Xoshiro256& rng) {
  return PairSampler(m1, m2)(rng);
}

/// Run inputs and outcomes; (config, family, seed, n_pairs) determine `events`.
struct EventLog {
  PhotonPairConfig config;
  std::string family = "gaussian";
  std::uint64_t seed = 0;
  std::string rng = std::string(Xoshiro256::algorithm);
  std::size_t chunk_size = 0;
  std::vector<DetectionPair> events;

  std::size_t n_pairs() const noexcept { return events.size(); }
};

/// Pairs per independent generator stream. Stream c covers pairs
/// [c * chunk, (c + 1) * chunk), so results do not depend on the thread count.
inline constexpr std::size_t experiment_chunk = 1u << 16;

/// Draws `n_pairs` independent events. With delta_omega > 0 every pair first
/// draws its carrier difference from the Gaussian spread centred on cfg.delta.
inline EventLog run_experiment(const PhotonPairConfig& cfg, std::size_t n_pairs, std::uint64_t seed,
                               const DelayedPairFamily& family = gaussian_delayed_family(),
                               std::string family_name = "gaussian") {
  cfg.validate();
  require(n_pairs >= 1, ErrorKind::invalid_argument, "n_pairs must be at least 1");
  EventLog log;
  log.config = cfg;
  log.family = std::move(family_name);
  log.seed = seed;
  log.chunk_size = experiment_chunk;
  log.events.resize(n_pairs);

  const auto fixed_pair = family(cfg.delta_tau, cfg.delta);
  std::optional<PairSampler> fixed;
  if (cfg.delta_omega == 0.0) fixed.emplace(fixed_pair.first, fixed_pair.second);
  const double spread = cfg.delta_omega / std::numbers::sqrt2;

  const std::size_t chunks = (n_pairs + experiment_chunk - 1) / experiment_chunk;
  parallel_for(chunks, [&](std::size_t c) {
    Xoshiro256 rng(seed, c);
    const std::size_t begin = c * experiment_chunk;
    const std::size_t end = std::min(n_pairs, begin + experiment_chunk);
    for (std::size_t i = begin; i < end; ++i) {
      if (fixed) {
        log.events[i] = (*fixed)(rng);
      } else {
        const double delta = cfg.delta + spread * rng.normal();
        const auto [m1, m2] = family(cfg.delta_tau, delta);
        log.events[i] = PairSampler(m1, m2)(rng);
      }
    }
  });
  return log;
}

/// Counts by delay. Bins are centred on k * bin_width for |k| <= K with
/// K = floor(range / bin_width); opposite-port pairs use the signed delay
/// t(port 4) - t(port 3), same-port pairs the nonnegative delay.
struct CoincidenceHistogram {
  double bin_width = 0.0;
  std::vector<double> bin_edges;
  std::vector<std::size_t> opposite;
  std::vector<std::size_t> same3;
  std::vector<std::size_t> same4;
  std::size_t n_pairs = 0;
  std::size_t out_of_range = 0;

  std::size_t bins() const noexcept { return opposite.size(); }
  double center(std::size_t k) const noexcept { return 0.5 * (bin_edges[k] + bin_edges[k + 1]); }

  /// counts / (n_pairs * bin_width): estimates the coincidence density.
  double opposite_density(std::size_t k) const noexcept {
    return static_cast<double>(opposite[k]) / (static_cast<double>(n_pairs) * bin_width);
  }

  std::size_t total() const noexcept {
    std::size_t sum = 0;
    for (std::size_t k = 0; k < bins(); ++k) sum += opposite[k] + same3[k] + same4[k];
    return sum;
  }
};

inline CoincidenceHistogram coincidence_histogram(const EventLog& log, double bin_width,
                                                  double range) {
  require(bin_width > 0.0 && std::isfinite(bin_width), ErrorKind::invalid_argument,
          "bin_width must be positive");
  require(range >= 0.5 * bin_width && std::isfinite(range), ErrorKind::empty_range,
          "range must hold at least the central bin");
  const auto half_bins = static_cast<std::size_t>(std::floor(range / bin_width + 1e-9));
  const std::size_t n = 2 * half_bins + 1;
  CoincidenceHistogram h;
  h.bin_width = bin_width;
  h.n_pairs = log.n_pairs();
  h.bin_edges.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k)
    h.bin_edges[k] = (static_cast<double>(k) - static_cast<double>(half_bins) - 0.5) * bin_width;
  h.opposite.assign(n, 0);
  h.same3.assign(n, 0);
  h.same4.assign(n, 0);
  for (const auto& e : log.events) {
    const double x = e.signed_delay() / bin_width + static_cast<double>(half_bins) + 0.5;
    if (!(x >= 0.0 && x < static_cast<double>(n))) {
      ++h.out_of_range;
      continue;
    }
    const auto k = static_cast<std::size_t>(x);
    if (e.opposite_ports())
      ++h.opposite[k];
    else if (e.first_port == Port::three)
      ++h.same3[k];
    else
      ++h.same4[k];
  }
  return h;
}

/// Opposite-port fraction with a 95% Wilson score interval.
struct CoincidenceEstimate {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t coincidences = 0;
  std::size_t n_pairs = 0;
};

inline CoincidenceEstimate estimate_total_coincidence(const EventLog& log) {
  const std::size_t n = log.n_pairs();
  require(n >= 100, ErrorKind::too_few_events, "need at least 100 pairs, got " + std::to_string(n));
  const auto k = static_cast<std::size_t>(
      std::count_if(log.events.begin(), log.events.end(),
                    [](const DetectionPair& e) { return e.opposite_ports(); }));
  constexpr double z = 1.959963984540054;
  const double nd = static_cast<double>(n);
  const double p = static_cast<double>(k) / nd;
  const double denom = 1.0 + z * z / nd;
  const double centre = (p + z * z / (2.0 * nd)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nd + z * z / (4.0 * nd * nd)) / denom;
  return {p, std::max(0.0, centre - half), std::min(1.0, centre + half), k, n};
}

/// `first_port,first_time,second_port,second_time` rows.
inline void write_event_log_csv(std::ostream& out, const EventLog& log) {
  out << "first_port,first_time,second_port,second_time\n";
  for (const auto& e : log.events) {
    out << static_cast<int>(e.first_port) << ',' << format_double(e.first_time) << ','
        << static_cast<int>(e.second_port) << ',' << format_double(e.second_time) << '\n';
  }
}

inline std::vector<DetectionPair> read_event_log_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) &&
              line.rfind("first_port,first_time,second_port,second_time", 0) == 0,
          ErrorKind::invalid_argument, "event CSV header missing");
  auto port = [](std::string_view s) {
    const double v = parse_double(s);
    require(v == 3.0 || v == 4.0, ErrorKind::invalid_argument, "ports are labelled 3 or 4");
    return v == 3.0 ? Port::three : Port::four;
  };
  std::vector<DetectionPair> events;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_fields(line);
    require(f.size() == 4, ErrorKind::invalid_argument, "event rows need 4 fields");
    events.push_back({port(f[0]), parse_double(f[1]), port(f[2]), parse_double(f[3])});
  }
  return events;
}

}  // namespace hom
