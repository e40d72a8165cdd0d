#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hom/wavepacket.hpp"
#include "oracles.hpp"

using namespace hom;

namespace {

const TimeGrid grid = default_time_grid();

double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

double sampled_norm(const ModeFunction& m) {
  std::vector<double> d(m.samples().size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::norm(m.samples()[i]);
  return trapezoid(d, m.grid()->spacing());
}

// The five pulse shapes used for the Fourier round trip.
std::vector<ModeFunction> shape_family() {
  std::vector<ModeFunction> out;
  const auto n = grid.size();
  std::vector<double> env(n), phase(n, 0.0);
  out.push_back(make_gaussian_mode(0.4, 1.5, grid));
  for (std::size_t i = 0; i < n; ++i) env[i] = std::exp(-2.0 * std::abs(grid[i] + 0.3));
  out.push_back(make_sampled_mode(env, phase, grid));
  for (std::size_t i = 0; i < n; ++i) env[i] = std::abs(grid[i]) <= 1.5 ? 1.0 : 0.0;
  out.push_back(make_sampled_mode(env, phase, grid));
  for (std::size_t i = 0; i < n; ++i) {
    env[i] = std::exp(-grid[i] * grid[i]);
    phase[i] = 2.0 * grid[i] + 1.5 * grid[i] * grid[i];
  }
  out.push_back(make_sampled_mode(env, phase, grid));
  for (std::size_t i = 0; i < n; ++i) {
    env[i] = std::exp(-(grid[i] - 1.5) * (grid[i] - 1.5) * 2.0) +
             0.7 * std::exp(-(grid[i] + 1.5) * (grid[i] + 1.5) * 2.0);
    phase[i] = grid[i] < 0 ? 1.0 : 0.0;
  }
  out.push_back(make_sampled_mode(env, phase, grid));
  return out;
}

}  // namespace

TEST(Grid, RejectsDegenerateBounds) {
  EXPECT_THROW(TimeGrid(1.0, 1.0, 10), Error);
  EXPECT_THROW(TimeGrid(0.0, 1.0, 1), Error);
  const TimeGrid g(-1.0, 1.0, 5);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.5);
  EXPECT_DOUBLE_EQ(g[4], 1.0);
}

TEST(Grid, ConjugateGridsSatisfyDftRelation) {
  const auto freq = conjugate_grid(grid, 3.0);
  EXPECT_TRUE(are_conjugate(grid, freq));
  EXPECT_NEAR(freq.spacing() * grid.spacing() * static_cast<double>(grid.size()), 2.0 * oracle::pi,
              1e-12);
  const auto back = conjugate_grid(freq);
  EXPECT_NEAR(back.spacing(), grid.spacing(), 1e-15);
}

TEST(MakeGaussianMode, AnalyticHasUnitNormAndPeak) {
  const auto m = make_gaussian_mode(0.0, 0.0);
  const double norm = oracle::adaptive_simpson([&](double t) { return detection_density(m, t); }, -10, 10);
  EXPECT_NEAR(norm, 1.0, 1e-9);
  EXPECT_NEAR(std::abs(m(0.0)), std::pow(2.0 / oracle::pi, 0.25), 1e-15);
  const auto shifted = make_gaussian_mode(1.25, 3.0);
  EXPECT_NEAR(std::abs(shifted(1.25)), std::pow(2.0 / oracle::pi, 0.25), 1e-15);
}

TEST(MakeGaussianMode, ReproducesPulseOneOfThePair) {
  const double dtau = 0.8, delta = 2.0, omega = 5.0;
  const auto m = make_gaussian_mode(dtau / 2, omega - delta / 2);
  for (double t : {-1.3, 0.0, 0.4, 2.2})
    EXPECT_LT(std::abs(m(t) - oracle::gaussian_mode(t, dtau / 2, omega - delta / 2)), 1e-15);
}

TEST(MakeGaussianMode, GriddedRequiresFiveWidths) {
  EXPECT_THROW(make_gaussian_mode(4.0, 0.0, grid), Error);
  try {
    make_gaussian_mode(0.0, 0.0, TimeGrid(-4, 4, 100));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::grid_too_narrow);
  }
  const auto m = make_gaussian_mode(0.5, 1.0, grid);
  EXPECT_NEAR(sampled_norm(m), 1.0, 1e-12);
  EXPECT_NEAR(m.applied_normalization(), 1.0, 1e-9);
}

TEST(MakeSampledMode, ErrorsAndNormalisation) {
  std::vector<double> zero(grid.size(), 0.0);
  try {
    make_sampled_mode(zero, zero, grid);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_normalizable);
  }
  std::vector<double> short_env(10, 1.0);
  try {
    make_sampled_mode(short_env, zero, grid);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::length_mismatch);
  }
  std::vector<double> flat(grid.size(), 1.0);
  try {
    make_sampled_mode(flat, zero, grid);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::grid_too_narrow);
  }
}

TEST(MakeSampledMode, GaussianSamplesMatchAnalyticConstructor) {
  std::vector<double> env(grid.size()), phase(grid.size());
  const double c = -0.7, w = 2.5;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    env[i] = 3.0 * std::exp(-(grid[i] - c) * (grid[i] - c));  // unnormalised on purpose
    phase[i] = w * grid[i];
  }
  const auto sampled = make_sampled_mode(env, phase, grid);
  const auto analytic = make_gaussian_mode(c, w);
  for (std::size_t i = 0; i < grid.size(); ++i)
    ASSERT_LT(std::abs(sampled.samples()[i] - analytic(grid[i])), 1e-6);
  EXPECT_NEAR(sampled.applied_normalization(), 1.0 / (3.0 * std::pow(oracle::pi / 2, 0.25)), 1e-9);
}

TEST(MakeSampledMode, RectangleHasPeakDensityOneOverWidth) {
  std::vector<double> env(grid.size(), 0.0), phase(grid.size(), 0.0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (std::abs(grid[i]) <= 2.0) {
      env[i] = 5.0;
      ++count;
    }
  const double width = static_cast<double>(count) * grid.spacing();
  const auto m = make_sampled_mode(env, phase, grid);
  EXPECT_NEAR(detection_density(m, 0.0), 1.0 / width, 1e-12);
}

TEST(DetectionDensity, GaussianValueAndPhaseInvariance) {
  const auto m = make_gaussian_mode(0.0, 0.0);
  EXPECT_NEAR(detection_density(m, 0.0), std::sqrt(2.0 / oracle::pi), 1e-15);
  EXPECT_NEAR(detection_density(m, 0.0), 0.797884560802865, 1e-14);

  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::vector<double> env(grid.size()), flat(grid.size(), 0.0), random_phase(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    env[i] = std::exp(-grid[i] * grid[i]);
    random_phase[i] = u(gen);
  }
  const auto plain = make_sampled_mode(env, flat, grid);
  const auto modulated = make_sampled_mode(env, random_phase, grid);
  for (std::size_t i = 0; i < grid.size(); i += 7)
    ASSERT_NEAR(detection_density(plain, grid[i]), detection_density(modulated, grid[i]), 1e-14);
}

TEST(DetectionDensity, IntegratesToOneForRandomModes) {
  std::mt19937_64 gen(5);
  for (int k = 0; k < 5; ++k) {
    const auto m = oracle::random_mode(gen);
    double nodes = 0.0;
    for (const auto& z : m.samples()) nodes += std::norm(z);
    nodes -= 0.5 * (std::norm(m.samples().front()) + std::norm(m.samples().back()));
    EXPECT_NEAR(nodes * m.grid()->spacing(), 1.0, 1e-12);
    // Between nodes the amplitude is interpolated linearly, which costs O(h^2 omega^2).
    const double integral =
        oracle::adaptive_simpson([&](double t) { return detection_density(m, t); }, -8, 8, 1e-10);
    EXPECT_NEAR(integral, 1.0, 2e-4);
  }
}

TEST(Overlap, SelfOverlapIsOne) {
  std::mt19937_64 gen(1);
  const auto m = oracle::random_mode(gen);
  EXPECT_NEAR(std::abs(overlap(m, m) - 1.0), 0.0, 1e-12);
  const auto g = make_gaussian_mode(0.3, 2.0);
  EXPECT_NEAR(std::abs(overlap(g, g) - 1.0), 0.0, 1e-15);
}

TEST(Overlap, GaussianPairMagnitudeMatchesQuadrature) {
  for (auto [dtau, delta] : {std::pair{0.0, 0.0}, {1.0, 0.0}, {0.5, 3.0}, {2.0, -1.5}}) {
    const auto m1 = make_gaussian_mode(dtau / 2, 1.0 - delta / 2);
    const auto m2 = make_gaussian_mode(-dtau / 2, 1.0 + delta / 2);
    const double re = oracle::adaptive_simpson(
        [&](double t) {
          return (std::conj(oracle::gaussian_mode(t, dtau / 2, 1.0 - delta / 2)) *
                  oracle::gaussian_mode(t, -dtau / 2, 1.0 + delta / 2)).real();
        }, -10, 10);
    const double im = oracle::adaptive_simpson(
        [&](double t) {
          return (std::conj(oracle::gaussian_mode(t, dtau / 2, 1.0 - delta / 2)) *
                  oracle::gaussian_mode(t, -dtau / 2, 1.0 + delta / 2)).imag();
        }, -10, 10);
    const cplx c = overlap(m1, m2);
    EXPECT_NEAR(c.real(), re, 1e-10);
    EXPECT_NEAR(c.imag(), im, 1e-10);
    EXPECT_NEAR(std::abs(c), std::exp(-dtau * dtau / 2 - delta * delta / 8), 1e-10);
    // Mixed analytic/sampled evaluates on the sampled grid.
    const auto s2 = make_gaussian_mode(-dtau / 2, 1.0 + delta / 2, grid);
    EXPECT_NEAR(std::abs(overlap(m1, s2) - c), 0.0, 1e-9);
  }
}

TEST(Overlap, FarSeparatedPulsesVanish) {
  const auto a = make_gaussian_mode(10.0, 0.0);
  const auto b = make_gaussian_mode(-10.0, 0.0);
  EXPECT_LT(std::abs(overlap(a, b)), 1e-40);
}

TEST(Overlap, DifferentSampledGridsAreRejected) {
  const auto a = make_gaussian_mode(0.0, 0.0, grid);
  const auto b = make_gaussian_mode(0.0, 0.0, TimeGrid(-8, 8, 2048));
  try {
    overlap(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::grid_mismatch);
  }
  EXPECT_NEAR(std::abs(overlap(a, resample(b, grid))), 1.0, 1e-6);
}

TEST(Overlap, CauchySchwarzOnRandomPairs) {
  std::mt19937_64 gen(99);
  for (int k = 0; k < 30; ++k) {
    const auto a = oracle::random_mode(gen);
    const auto b = oracle::random_mode(gen);
    EXPECT_LE(std::abs(overlap(a, b)), 1.0 + 1e-9);
  }
}

TEST(Spectrum, GaussianSpectrumMatchesClosedForm) {
  const double center = 0.6, carrier = -2.0;
  const auto m = make_gaussian_mode(center, carrier, grid);
  const auto freq = conjugate_grid(grid);
  const auto s = to_spectrum(m, freq);
  EXPECT_NEAR(s.norm(), 1.0, 1e-6);
  double worst = 0.0;
  for (std::size_t k = 0; k < freq.size(); ++k)
    worst = std::max(worst, std::abs(s.values()[k] - oracle::gaussian_spectrum(freq[k], center, carrier)));
  EXPECT_LT(worst, 1e-9);
  // |Phi|^2 peaks at the carrier.
  std::size_t peak = 0;
  for (std::size_t k = 0; k < freq.size(); ++k)
    if (std::norm(s.values()[k]) > std::norm(s.values()[peak])) peak = k;
  EXPECT_NEAR(freq[peak], carrier, freq.spacing());
}

TEST(Spectrum, AnalyticModeUsesConjugateTimeGrid) {
  const auto freq = conjugate_grid(grid, 1.0);
  const auto s = to_spectrum(make_gaussian_mode(-0.5, 1.0), freq);
  for (std::size_t k = 0; k < freq.size(); k += 97)
    ASSERT_LT(std::abs(s.values()[k] - oracle::gaussian_spectrum(freq[k], -0.5, 1.0)), 1e-9);
}

TEST(Spectrum, DirectSumPathAgreesWithFft) {
  const auto m = make_gaussian_mode(0.2, 1.0, TimeGrid(-8, 8, 512));
  const FrequencyGrid narrow(-12.0, 14.0, 301);
  const auto s = to_spectrum(m, narrow);
  for (std::size_t k = 0; k < narrow.size(); k += 10)
    ASSERT_LT(std::abs(s.values()[k] - oracle::gaussian_spectrum(narrow[k], 0.2, 1.0)), 1e-9);
  const auto back = from_spectrum(s, TimeGrid(-8, 8, 400));
  for (double t : {-1.0, 0.0, 0.5, 1.7})
    EXPECT_LT(std::abs(back(t) - oracle::gaussian_mode(t, 0.2, 1.0)), 1e-3);
}

TEST(Spectrum, RoundTripOnPulseFamily) {
  const auto freq = conjugate_grid(grid);
  for (const auto& m : shape_family()) {
    const auto s = to_spectrum(m, freq);
    EXPECT_NEAR(s.norm(), 1.0, 1e-6);
    const auto back = from_spectrum(s, grid);
    EXPECT_LT(max_abs_diff(back.samples(), m.samples()), 1e-6);
    EXPECT_NEAR(sampled_norm(back), 1.0, 1e-6);
  }
}

TEST(Spectrum, AliasingIsReported) {
  // Carrier far outside the window.
  const auto freq = FrequencyGrid(-20.0, 20.0, 201);
  try {
    to_spectrum(make_gaussian_mode(0.0, 50.0), freq);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::aliasing_risk);
  }
  // Window narrower than the pulse bandwidth loses norm.
  try {
    to_spectrum(make_gaussian_mode(0.0, 0.0, grid), FrequencyGrid(-1.0, 1.0, 101));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::aliasing_risk);
  }
  // Time grid too coarse for the occupied band.
  const auto s = to_spectrum(make_gaussian_mode(0.0, 30.0, grid), conjugate_grid(grid));
  try {
    from_spectrum(s, TimeGrid(-8, 8, 64));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::aliasing_risk);
  }
}

TEST(ModeCsv, WriteThenReadPreservesSamples) {
  std::mt19937_64 gen(3);
  const auto m = oracle::random_mode(gen, TimeGrid(-8, 8, 257));
  std::stringstream ss;
  write_mode_csv(ss, m);
  EXPECT_EQ(ss.str().substr(0, 8), "t,re,im\n");
  const auto back = read_mode_csv(ss);
  EXPECT_EQ(*back.grid(), *m.grid());
  EXPECT_LT(max_abs_diff(back.samples(), m.samples()), 1e-15);
}

TEST(ModeCsv, RejectsBadInput) {
  std::stringstream bad_header("x,y,z\n0,1,0\n");
  EXPECT_THROW(read_mode_csv(bad_header), Error);
  std::stringstream uneven("t,re,im\n0,0,0\n1,1,0\n3,0,0\n");
  EXPECT_THROW(read_mode_csv(uneven), Error);
}

TEST(ModeFunction, LinearInterpolationBetweenSamples) {
  const TimeGrid g(-8, 8, 17);
  std::vector<cplx> v(17, 0.0);
  v[8] = 1.0;
  v[9] = cplx(0.0, 1.0);
  const auto m = make_sampled_mode(g, v);
  const double f = m.applied_normalization();
  EXPECT_NEAR(std::abs(m(0.5) - f * cplx(0.5, 0.5)), 0.0, 1e-15);
  EXPECT_EQ(m(9.0), cplx(0.0, 0.0));
}
