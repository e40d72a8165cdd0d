#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "hom/error.hpp"

namespace hom {

/// Nodes and weights for \int dx exp(-x^2) g(x) ~ sum_i w_i g(x_i).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Newton iteration on orthonormal Hermite recurrences with asymptotic
/// starting guesses; stable well beyond a few hundred nodes.
inline GaussHermiteRule gauss_hermite(std::size_t n) {
  require(n >= 1, ErrorKind::invalid_argument, "Gauss-Hermite rule needs at least one node");
  constexpr int max_iter = 100;
  const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
  GaussHermiteRule rule{std::vector<double>(n), std::vector<double>(n)};
  const std::size_t m = (n + 1) / 2;
  const double nd = static_cast<double>(n);
  double z = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * nd + 1.0) - 1.85575 * std::pow(2.0 * nd + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(nd, 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * rule.nodes[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * rule.nodes[1];
    else
      z = 2.0 * z - rule.nodes[i - 2];
    double pp = 0.0;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
      double p1 = pim4;
      double p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jd = static_cast<double>(j);
        p1 = z * std::sqrt(2.0 / (jd + 1.0)) * p2 - std::sqrt(jd / (jd + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * nd) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    require(iter < max_iter, ErrorKind::quadrature_not_converged,
            "Gauss-Hermite root iteration did not converge");
    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    rule.weights[i] = 2.0 / (pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  // Ascending order.
  std::vector<double> nodes(n);
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i] = rule.nodes[n - 1 - i];
    weights[i] = rule.weights[n - 1 - i];
  }
  return {std::move(nodes), std::move(weights)};
}

/// Expectation of g(Delta) over the normalised Gaussian
/// exp(-(Delta/width)^2) / (width sqrt(pi)), by Gauss-Hermite with `rule`.
template <typename F>
double gaussian_average(F&& g, double width, const GaussHermiteRule& rule) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * g(width * rule.nodes[i]);
  return sum / std::sqrt(std::numbers::pi);
}

/// Simpson's rule on [a, b] with an even number of panels.
template <typename F>
double simpson(F&& f, double a, double b, std::size_t panels) {
  if (panels % 2 == 1) ++panels;
  const double h = (b - a) / static_cast<double>(panels);
  double sum = f(a) + f(b);
  for (std::size_t i = 1; i < panels; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
  return sum * h / 3.0;
}

}  // namespace hom
