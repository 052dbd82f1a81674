#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <nlohmann/json_fwd.hpp>

#include "modalctl/modal_system.hpp"
#include "modalctl/propagator.hpp"
#include "modalctl/state_vector.hpp"

namespace modalctl {

/// Symmetric positive definite control weight (m x m). The modal model is
/// single-input (m = 1), but the synthesis layer is written for general m.
class WeightMatrix {
 public:
  explicit WeightMatrix(Eigen::MatrixXd q);
  static WeightMatrix scalar(double q);

  std::size_t dim() const { return static_cast<std::size_t>(q_.rows()); }
  const Eigen::MatrixXd& matrix() const { return q_; }
  /// Q^{-1} rhs.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

 private:
  Eigen::MatrixXd q_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// Blocks 0..N of the generator with the matching input slice; the reduced
/// state lives on the first d_N = 2(N+1) coordinates of l^2.
struct ReducedSystem {
  std::size_t truncation = 0;       // N
  std::size_t dim = 0;              // d_N = 2(N+1)
  std::vector<BlockSpec> blocks;    // N+1 blocks, rigid first
  Eigen::MatrixXd input;            // d_N x m
  std::uint64_t system_fingerprint = 0;

  /// Dense d_N x d_N block-diagonal generator (diagnostics and tests).
  Eigen::MatrixXd dense_generator() const;
  /// e^{tA_N} x, exact per block; x is d_N x c.
  Eigen::MatrixXd expm_apply(double t, const Eigen::MatrixXd& x) const;
  /// e^{tA_N'} x.
  Eigen::MatrixXd expm_transpose_apply(double t, const Eigen::MatrixXd& x) const;
};

ReducedSystem reduced_matrices(const ModalSystem& system, std::size_t N);

/// Controllability Gramian W = int_0^tau e^{sA_N} B_N Q^{-1} B_N' e^{sA_N'} ds.
struct Gramian {
  Eigen::MatrixXd w;                 // symmetrized assembly, exactly symmetric
  double condition_estimate = 0.0;   // lambda_max / lambda_min, inf if not PD
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  std::size_t panels = 0;
  std::size_t nodes = 0;
};

/// Composite Gauss-Legendre assembly with exact block exponentials at the
/// nodes. Panel contributions are computed in fixed chunks and reduced in
/// chunk order, so serial and parallel runs agree bit for bit.
Gramian gramian(const ReducedSystem& reduced, double tau, const WeightMatrix& weight,
                std::size_t panels, std::size_t nodes, ExecPolicy policy = ExecPolicy::parallel);

/// Minimum-energy control for steering the reduced system:
///   u(t) = Q^{-1} B_N' e^{(tau-t)A_N'} nu,   W nu = P_N x1 - e^{tau A_N} P_N x0.
struct ControlLaw {
  ReducedSystem reduced;
  WeightMatrix weight;
  Eigen::VectorXd nu;
  double tau = 0.0;
  double solve_residual = 0.0;       // ||W nu - rhs|| / ||rhs||
  double condition_estimate = 0.0;
  double ridge = 0.0;                // > 0 marks approximate interpolation
  std::size_t panels = 0;            // Gramian quadrature used at synthesis
  std::size_t nodes = 0;
  Eigen::MatrixXd gramian_w;         // empty after deserialization

  bool has_gramian() const { return gramian_w.size() > 0; }
  bool regularized() const { return ridge > 0.0; }
};

/// Synthesizes the law. The Gramian solve is an LLT factorization with
/// iterative refinement (extended-precision residuals); the relative residual
/// is stored on the law. A Gramian whose condition estimate exceeds 1e14 (or
/// whose smallest eigenvalue is not positive) raises NumericalError rather
/// than returning a silently meaningless law. A zero right-hand side
/// short-circuits to nu = 0. ridge > 0 solves (W + ridge I) nu = rhs instead
/// and marks the law as approximate.
ControlLaw synthesize(const ModalSystem& system, std::size_t N, double tau,
                      const WeightMatrix& weight, const StateVector& x0, const StateVector& x1,
                      std::size_t panels, std::size_t nodes, double ridge = 0.0,
                      ExecPolicy policy = ExecPolicy::parallel);

/// u(t) as an m-vector; t must lie in [0, tau].
Eigen::VectorXd eval_control(const ControlLaw& law, double t);
/// Single-input convenience accessor.
double eval_control_scalar(const ControlLaw& law, double t);

/// J = nu' W nu when the Gramian is attached, otherwise the quadrature of
/// u'Qu with the law's stored rule. Equals int_0^tau u'Qu dt either way.
double control_cost(const ControlLaw& law);
/// (int_0^tau |u(t)|^2 dt)^{1/2} by quadrature on eval_control.
double control_l2_norm(const ControlLaw& law);

/// Serialization: {N, tau, nu[], q, system fingerprint, solver residual,
/// condition estimate, ridge, quadrature}. Decimal round-trip is bit-exact.
nlohmann::json law_to_json(const ControlLaw& law);
/// Rebuilds the law against `system`; the fingerprint must match.
ControlLaw law_from_json(const nlohmann::json& j, const ModalSystem& system);

}  // namespace modalctl
