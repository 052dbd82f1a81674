#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "modalctl/modal_system.hpp"
#include "modalctl/state_vector.hpp"

namespace modalctl {

/// Kernel execution policy. `parallel` runs the OpenMP kernels; `serial` runs
/// the reference loops. Both call the same per-block/per-chunk routines and
/// reduce in the same fixed order, so results are identical bit for bit.
enum class ExecPolicy { serial, parallel };

struct PropagationConfig {
  std::size_t truncation = 0;  // M: flexible blocks simulated (blocks 0..M)
  std::size_t steps = 64;      // quadrature panels over [0, tau]
  std::size_t nodes = 8;       // Gauss-Legendre nodes per panel
};

/// x -> e^{tA} x over blocks 0..M, exact per block. The support of x must not
/// extend past block M.
StateVector transition(const ModalSystem& system, double t, std::size_t M, const StateVector& x);

/// Mild solution at time tau:
///   x(tau) = e^{tau A} x0 + int_0^tau e^{(tau-s)A} B u(s) ds,
/// restricted to blocks 0..cfg.truncation. The convolution integral is a
/// composite Gauss-Legendre sum with exact block exponentials at the nodes;
/// the homogeneous term reuses transition(), so u == 0 reproduces the free
/// motion exactly.
StateVector propagate(const ModalSystem& system, const StateVector& x0,
                      const std::function<double(double)>& u, double tau,
                      const PropagationConfig& cfg, ExecPolicy policy = ExecPolicy::parallel);

/// Uniformly sampled trajectory over [0, tau]: samples+1 rows including both
/// endpoints. Advances blockwise interval by interval; quadrature effort per
/// interval is cfg.steps scaled down by the sample count.
struct Trajectory {
  std::size_t truncation = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> states;  // dense rows of size 2(M+1)
};

Trajectory sample_trajectory(const ModalSystem& system, const StateVector& x0,
                             const std::function<double(double)>& u, double tau,
                             std::size_t samples, const PropagationConfig& cfg,
                             ExecPolicy policy = ExecPolicy::parallel);

/// CSV rows (t, xi_0, eta_0, ..., xi_M, eta_M) at 17 significant digits.
std::string trajectory_csv(const Trajectory& trajectory);

}  // namespace modalctl
