#include "modalctl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "modalctl/errors.hpp"

namespace modalctl {

void gauss_legendre(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 2 || n > 64) {
    throw ConfigError("gauss_legendre: node count must be in [2, 64]");
  }
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    // Chebyshev-based initial guess, then Newton on P_n(z)
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jd = static_cast<double>(j);
        p1 = ((2.0 * jd - 1.0) * z * p2 - (jd - 1.0) * p3) / jd;
      }
      pp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    nodes[i] = -z;
    nodes[n - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

PanelGrid::PanelGrid(double length, std::size_t panel_count, std::size_t n)
    : panels(panel_count), nodes_per_panel(n) {
  if (panel_count < 1) {
    throw ConfigError("PanelGrid: panel count must be positive");
  }
  std::vector<double> gx, gw;
  gauss_legendre(n, gx, gw);
  points.reserve(panel_count * n);
  weights.reserve(panel_count * n);
  const double h = length / static_cast<double>(panel_count);
  for (std::size_t p = 0; p < panel_count; ++p) {
    const double left = static_cast<double>(p) * h;
    for (std::size_t i = 0; i < n; ++i) {
      points.push_back(left + 0.5 * h * (1.0 + gx[i]));
      weights.push_back(0.5 * h * gw[i]);
    }
  }
}

std::size_t suggested_panels(double max_freq, double tau, std::size_t nodes) {
  // Half-width in radians an n-point panel handles with truncation error
  // below roundoff; conservative fit to (x^{2n})/(2n)! <= 1e-14.
  const double x_max = std::max(0.8, 0.30 * static_cast<double>(nodes) - 1.5);
  const double needed = tau * std::max(max_freq, 0.0) / (2.0 * x_max);
  return std::max<std::size_t>(32, static_cast<std::size_t>(std::ceil(needed)) + 1);
}

}  // namespace modalctl
