#include "modalctl/synthesis.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <nlohmann/json.hpp>

#include "modalctl/quadrature.hpp"

namespace modalctl {

namespace {

constexpr double kConditionLimit = 1e14;

// Residual r = rhs - W x with long double accumulation; drives the iterative
// refinement below the plain double rounding floor.
Eigen::VectorXd refined_residual(const Eigen::MatrixXd& w, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& rhs) {
  const Eigen::Index n = w.rows();
  Eigen::VectorXd r(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    long double acc = static_cast<long double>(rhs[i]);
    for (Eigen::Index j = 0; j < n; ++j) {
      acc -= static_cast<long double>(w(i, j)) * static_cast<long double>(x[j]);
    }
    r[i] = static_cast<double>(acc);
  }
  return r;
}

}  // namespace

WeightMatrix::WeightMatrix(Eigen::MatrixXd q) : q_(std::move(q)) {
  if (q_.rows() != q_.cols() || q_.rows() < 1) {
    throw ConfigError("WeightMatrix: weight must be square and nonempty");
  }
  if (!q_.allFinite()) {
    throw ConfigError("WeightMatrix: weight has non-finite entries");
  }
  if (q_ != q_.transpose().eval()) {
    throw ConfigError("WeightMatrix: weight must be exactly symmetric");
  }
  llt_.compute(q_);
  if (llt_.info() != Eigen::Success) {
    throw ConfigError("WeightMatrix: weight is not positive definite");
  }
}

WeightMatrix WeightMatrix::scalar(double q) {
  Eigen::MatrixXd m(1, 1);
  m(0, 0) = q;
  return WeightMatrix(std::move(m));
}

Eigen::MatrixXd WeightMatrix::solve(const Eigen::MatrixXd& rhs) const {
  return llt_.solve(rhs);
}

Eigen::MatrixXd ReducedSystem::dense_generator() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                            static_cast<Eigen::Index>(dim));
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const Eigen::Index r = static_cast<Eigen::Index>(2 * k);
    if (blocks[k].rigid) {
      a(r, r + 1) = 1.0;
    } else {
      a(r, r + 1) = blocks[k].omega;
      a(r + 1, r) = -blocks[k].omega;
      a(r + 1, r + 1) = -2.0 * blocks[k].kappa;
    }
  }
  return a;
}

Eigen::MatrixXd ReducedSystem::expm_apply(double t, const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd y(x.rows(), x.cols());
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const Mat2 e = block_expm(blocks[k], t);
    const Eigen::Index r = static_cast<Eigen::Index>(2 * k);
    y.row(r) = e.m00 * x.row(r) + e.m01 * x.row(r + 1);
    y.row(r + 1) = e.m10 * x.row(r) + e.m11 * x.row(r + 1);
  }
  return y;
}

Eigen::MatrixXd ReducedSystem::expm_transpose_apply(double t, const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd y(x.rows(), x.cols());
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const Mat2 e = block_expm(blocks[k], t);
    const Eigen::Index r = static_cast<Eigen::Index>(2 * k);
    y.row(r) = e.m00 * x.row(r) + e.m10 * x.row(r + 1);
    y.row(r + 1) = e.m01 * x.row(r) + e.m11 * x.row(r + 1);
  }
  return y;
}

ReducedSystem reduced_matrices(const ModalSystem& system, std::size_t N) {
  if (N > system.mode_count()) {
    throw ConfigError("reduced_matrices: truncation exceeds stored mode count");
  }
  ReducedSystem out;
  out.truncation = N;
  out.dim = 2 * (N + 1);
  out.blocks.reserve(N + 1);
  out.input = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(out.dim), 1);
  for (std::size_t k = 0; k <= N; ++k) {
    out.blocks.push_back(system.block(k));
    out.input(static_cast<Eigen::Index>(2 * k + 1), 0) = system.input_coeff(k);
  }
  out.system_fingerprint = system.fingerprint();
  return out;
}

Gramian gramian(const ReducedSystem& reduced, double tau, const WeightMatrix& weight,
                std::size_t panels, std::size_t nodes, ExecPolicy policy) {
  if (!std::isfinite(tau) || tau <= 0.0) {
    throw ConfigError("gramian: horizon must be positive and finite");
  }
  if (static_cast<std::size_t>(reduced.input.cols()) != weight.dim()) {
    throw ConfigError("gramian: weight dimension does not match the input dimension");
  }
  const PanelGrid grid(tau, panels, nodes);
  const Eigen::Index d = static_cast<Eigen::Index>(reduced.dim);

  // Fixed chunking: chunk boundaries depend only on the panel count, so the
  // reduction order is identical for every policy and thread count.
  const std::size_t chunk_count = std::min<std::size_t>(panels, 64);
  std::vector<Eigen::MatrixXd> partial(chunk_count);

  const auto run_chunk = [&](std::size_t c) {
    const std::size_t panel_begin = c * panels / chunk_count;
    const std::size_t panel_end = (c + 1) * panels / chunk_count;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = panel_begin * nodes; i < panel_end * nodes; ++i) {
      const Eigen::MatrixXd v = reduced.expm_apply(grid.points[i], reduced.input);
      acc.noalias() += grid.weights[i] * (v * weight.solve(v.transpose()));
    }
    partial[c] = std::move(acc);
  };

  if (policy == ExecPolicy::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::size_t c = 0; c < chunk_count; ++c) {
      run_chunk(c);
    }
  } else {
    for (std::size_t c = 0; c < chunk_count; ++c) {
      run_chunk(c);
    }
  }

  Gramian out;
  out.w = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t c = 0; c < chunk_count; ++c) {
    out.w += partial[c];
  }
  out.w = (0.5 * (out.w + out.w.transpose())).eval();
  if (!out.w.allFinite()) {
    throw NumericalError("gramian: quadrature produced a non-finite entry");
  }
  out.panels = panels;
  out.nodes = nodes;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out.w, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = eig.eigenvalues().minCoeff();
  out.max_eigenvalue = eig.eigenvalues().maxCoeff();
  out.condition_estimate = (out.min_eigenvalue > 0.0)
                               ? out.max_eigenvalue / out.min_eigenvalue
                               : std::numeric_limits<double>::infinity();
  return out;
}

ControlLaw synthesize(const ModalSystem& system, std::size_t N, double tau,
                      const WeightMatrix& weight, const StateVector& x0, const StateVector& x1,
                      std::size_t panels, std::size_t nodes, double ridge, ExecPolicy policy) {
  if (ridge < 0.0 || !std::isfinite(ridge)) {
    throw ConfigError("synthesize: ridge must be finite and nonnegative");
  }
  ReducedSystem reduced = reduced_matrices(system, N);
  Gramian g = gramian(reduced, tau, weight, panels, nodes, policy);
  const Eigen::Index d = static_cast<Eigen::Index>(reduced.dim);

  const auto project_dense = [&](const StateVector& x) {
    const std::vector<double> v = x.project(N).to_dense(reduced.dim);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), d).eval();
  };
  const Eigen::VectorXd x0d = project_dense(x0);
  const Eigen::VectorXd x1d = project_dense(x1);
  const Eigen::VectorXd rhs = x1d - reduced.expm_apply(tau, x0d);

  ControlLaw law{std::move(reduced), weight, Eigen::VectorXd::Zero(d), tau,
                 0.0,               g.condition_estimate, ridge, panels,
                 nodes,             Eigen::MatrixXd()};

  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) {
    law.gramian_w = std::move(g.w);
    return law;  // free motion already attains the target
  }

  Eigen::MatrixXd w_solve = g.w;
  double min_eig = g.min_eigenvalue;
  double cond = g.condition_estimate;
  if (ridge > 0.0) {
    w_solve.diagonal().array() += ridge;
    min_eig += ridge;
    cond = (min_eig > 0.0) ? (g.max_eigenvalue + ridge) / min_eig
                           : std::numeric_limits<double>::infinity();
  }
  if (!(min_eig > 0.0) || cond > kConditionLimit) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "Gramian singular at this (N, tau, kappa): N=%zu tau=%.6g kappa=%.6g "
                  "condition estimate %.3e",
                  N, tau, system.kappa(), cond);
    throw NumericalError(buf);
  }

  Eigen::LLT<Eigen::MatrixXd> llt(w_solve);
  if (llt.info() != Eigen::Success) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "Gramian singular at this (N, tau, kappa): N=%zu tau=%.6g kappa=%.6g "
                  "factorization failed, condition estimate %.3e",
                  N, tau, system.kappa(), cond);
    throw NumericalError(buf);
  }

  Eigen::VectorXd nu = llt.solve(rhs);
  double residual_norm = refined_residual(w_solve, nu, rhs).norm();
  for (int pass = 0; pass < 3; ++pass) {
    if (residual_norm <= 1e-15 * rhs_norm) break;
    const Eigen::VectorXd r = refined_residual(w_solve, nu, rhs);
    const Eigen::VectorXd candidate = nu + llt.solve(r);
    const double candidate_norm = refined_residual(w_solve, candidate, rhs).norm();
    if (candidate_norm >= residual_norm) break;
    nu = candidate;
    residual_norm = candidate_norm;
  }

  law.nu = std::move(nu);
  law.solve_residual = residual_norm / rhs_norm;
  law.condition_estimate = cond;
  law.gramian_w = std::move(g.w);
  return law;
}

Eigen::VectorXd eval_control(const ControlLaw& law, double t) {
  if (!(t >= 0.0 && t <= law.tau)) {
    throw ConfigError("eval_control: time outside [0, tau]");
  }
  const Eigen::MatrixXd z = law.reduced.expm_transpose_apply(law.tau - t, law.nu);
  return law.weight.solve(law.reduced.input.transpose() * z);
}

double eval_control_scalar(const ControlLaw& law, double t) {
  return eval_control(law, t)[0];
}

double control_cost(const ControlLaw& law) {
  if (law.has_gramian()) {
    return law.nu.dot(law.gramian_w * law.nu);
  }
  const PanelGrid grid(law.tau, law.panels, law.nodes);
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Eigen::VectorXd u = eval_control(law, grid.points[i]);
    acc += grid.weights[i] * u.dot(law.weight.matrix() * u);
  }
  return acc;
}

double control_l2_norm(const ControlLaw& law) {
  const PanelGrid grid(law.tau, law.panels, law.nodes);
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    acc += grid.weights[i] * eval_control(law, grid.points[i]).squaredNorm();
  }
  return std::sqrt(acc);
}

nlohmann::json law_to_json(const ControlLaw& law) {
  nlohmann::json j;
  j["format"] = "modalctl-control-law";
  j["version"] = 1;
  j["N"] = law.reduced.truncation;
  j["tau"] = law.tau;
  j["nu"] = std::vector<double>(law.nu.data(), law.nu.data() + law.nu.size());
  std::vector<std::vector<double>> q;
  for (Eigen::Index r = 0; r < law.weight.matrix().rows(); ++r) {
    q.emplace_back(law.weight.matrix().row(r).begin(), law.weight.matrix().row(r).end());
  }
  j["q"] = q;
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(law.reduced.system_fingerprint));
  j["system_fingerprint"] = buf;
  j["solver_residual"] = law.solve_residual;
  j["condition_estimate"] = law.condition_estimate;
  j["ridge"] = law.ridge;
  j["gramian_quadrature"] = {{"panels", law.panels}, {"nodes", law.nodes}};
  return j;
}

ControlLaw law_from_json(const nlohmann::json& j, const ModalSystem& system) {
  try {
    if (j.at("format").get<std::string>() != "modalctl-control-law") {
      throw ConfigError("control law file: unrecognized format tag");
    }
    if (j.at("system_fingerprint").get<std::string>() != system.fingerprint_hex()) {
      throw ConfigError("control law file: system fingerprint does not match the configured system");
    }
    const std::size_t N = j.at("N").get<std::size_t>();
    ReducedSystem reduced = reduced_matrices(system, N);
    const auto q_rows = j.at("q").get<std::vector<std::vector<double>>>();
    const Eigen::Index m = static_cast<Eigen::Index>(q_rows.size());
    Eigen::MatrixXd q(m, m);
    for (Eigen::Index r = 0; r < m; ++r) {
      if (static_cast<Eigen::Index>(q_rows[static_cast<std::size_t>(r)].size()) != m) {
        throw ConfigError("control law file: weight matrix is not square");
      }
      for (Eigen::Index c = 0; c < m; ++c) {
        q(r, c) = q_rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      }
    }
    const auto nu_values = j.at("nu").get<std::vector<double>>();
    if (nu_values.size() != reduced.dim) {
      throw ConfigError("control law file: nu length does not match 2(N+1)");
    }
    ControlLaw law{std::move(reduced),
                   WeightMatrix(std::move(q)),
                   Eigen::Map<const Eigen::VectorXd>(nu_values.data(),
                                                     static_cast<Eigen::Index>(nu_values.size())),
                   j.at("tau").get<double>(),
                   j.at("solver_residual").get<double>(),
                   j.at("condition_estimate").get<double>(),
                   j.value("ridge", 0.0),
                   j.at("gramian_quadrature").at("panels").get<std::size_t>(),
                   j.at("gramian_quadrature").at("nodes").get<std::size_t>(),
                   Eigen::MatrixXd()};
    if (!(law.tau > 0.0) || !std::isfinite(law.tau)) {
      throw ConfigError("control law file: tau must be positive");
    }
    return law;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("control law file: ") + e.what());
  }
}

}  // namespace modalctl
