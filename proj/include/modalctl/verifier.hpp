#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "modalctl/synthesis.hpp"

namespace modalctl {

/// Knobs shared by every row of a steering study. panels/steps of 0 select a
/// frequency-resolved automatic value.
struct SteerSettings {
  double tau = 5.0;
  double weight_q = 1.0;
  std::size_t gram_panels = 0;
  std::size_t gram_nodes = 8;
  std::size_t prop_steps = 0;
  std::size_t prop_nodes = 8;
  double epsilon_target = 1e-2;
  double ridge = 0.0;
  ExecPolicy policy = ExecPolicy::parallel;
};

/// Measured evidence for one (N, M) steering run: exact steering on the
/// reduced coordinates, the leaked motion of the simulated-but-unsteered
/// blocks, and an analytic bound on everything beyond block M.
struct SteeringReport {
  std::size_t design_truncation = 0;    // N
  std::size_t simulation_truncation = 0;  // M >= N
  std::size_t reduced_dim = 0;          // d_N
  double projected_residual = 0.0;      // ||P_N (x(tau) - x1)||
  double full_residual = 0.0;           // ||x(tau) - x1|| over blocks 0..M
  double tail_bound = 0.0;              // bound on the remainder beyond block M
  double qnb_norm = 0.0;                // ||Q_N B||
  double u_l2 = 0.0;                    // L2 norm of the synthesized control
  double product = 0.0;                 // qnb_norm * u_l2
  double cost = 0.0;                    // J = nu' W nu
  double condition_estimate = 0.0;
  double solve_residual = 0.0;
  double epsilon_target = 0.0;
  bool pass = false;                    // full_residual + tail_bound < epsilon
  bool approximate_interpolation = false;  // ridge was active
};

/// Synthesizes at order N, propagates the order-M truncation under the
/// synthesized control, and fills every report field. The tail bound is
///   sqrt(sum_{n>M} b_n^2 ((w_n+kappa)/mu_n)^2) * ||u||_L2 * sqrt(tau),
/// mu_n = sqrt(w_n^2 - kappa^2), from ||e^{sA_n}|| <= ((w_n+kappa)/mu_n)
/// e^{-kappa s}; it is infinite if a tail mode is not underdamped.
SteeringReport steer_and_verify(const ModalSystem& system, std::size_t N, std::size_t M,
                                const StateVector& x0, const StateVector& x1,
                                const SteerSettings& settings);

struct ConvergenceReport {
  std::vector<SteeringReport> rows;  // strictly increasing N
};

/// One report per truncation order, all rows sharing (x0, x1, tau, M). Rows
/// are independent; jobs > 0 bounds the worker count. Row results do not
/// depend on the worker count.
ConvergenceReport convergence_sweep(const ModalSystem& system, std::vector<std::size_t> orders,
                                    std::size_t M, const StateVector& x0, const StateVector& x1,
                                    const SteerSettings& settings, std::size_t jobs = 0);

/// CSV with header N,d_N,projected_residual,full_residual,tail_bound,
/// qnb_norm,u_l2,product,cost_J,cond_estimate,pass; floats at 17 significant
/// digits.
std::string convergence_csv(const ConvergenceReport& report);

/// Minimal SVG line chart of log10(full_residual) against N.
std::string convergence_svg(const ConvergenceReport& report);

}  // namespace modalctl
