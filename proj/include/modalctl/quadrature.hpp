#pragma once

#include <cstddef>
#include <vector>

namespace modalctl {

/// Gauss-Legendre rule on [-1, 1]: ascending nodes, positive weights.
/// Newton iteration on the Legendre recurrence; n in [2, 64].
void gauss_legendre(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights);

/// Composite rule over [0, length]: `panels` equal panels of an n-point rule.
/// Node and weight order is fixed (panel-major, ascending), so any summation
/// that walks the grid front to back is deterministic.
struct PanelGrid {
  std::vector<double> points;
  std::vector<double> weights;
  std::size_t panels = 0;
  std::size_t nodes_per_panel = 0;

  PanelGrid(double length, std::size_t panels, std::size_t nodes_per_panel);
  std::size_t size() const { return points.size(); }
};

/// Panel count for which an n-point Gauss panel resolves oscillations up to
/// max_freq (rad/time) over [0, tau] to near machine accuracy.
std::size_t suggested_panels(double max_freq, double tau, std::size_t nodes);

}  // namespace modalctl
