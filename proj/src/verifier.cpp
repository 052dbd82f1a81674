#include "modalctl/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>

#include "modalctl/quadrature.hpp"

namespace modalctl {

namespace {

double max_frequency(const ModalSystem& system, std::size_t upto) {
  double best = 0.0;
  for (std::size_t n = 1; n <= upto; ++n) {
    best = std::max(best, system.mode(n).omega);
  }
  return best;
}

double tail_remainder_bound(const ModalSystem& system, std::size_t M, double u_l2, double tau) {
  double sum = 0.0;
  const double kappa = system.kappa();
  for (std::size_t n = M + 1; n <= system.mode_count(); ++n) {
    const Mode& m = system.mode(n);
    const double disc = (m.omega - kappa) * (m.omega + kappa);
    if (disc <= 0.0) {
      return std::numeric_limits<double>::infinity();  // bound needs underdamped tail modes
    }
    // ||e^{sA_n}|| <= ((w+k)/mu) e^{-ks}; the off-diagonal part of A_n + kI
    // has singular values w +- k, so w/mu alone would undershoot
    const double gain = (m.omega + kappa) / std::sqrt(disc);
    sum += m.b * m.b * gain * gain;
  }
  return std::sqrt(sum) * u_l2 * std::sqrt(tau);
}

}  // namespace

SteeringReport steer_and_verify(const ModalSystem& system, std::size_t N, std::size_t M,
                                const StateVector& x0, const StateVector& x1,
                                const SteerSettings& settings) {
  if (N > M) {
    throw ConfigError("steer_and_verify: design truncation N must not exceed simulation M");
  }
  if (M > system.mode_count()) {
    throw ConfigError("steer_and_verify: simulation truncation exceeds stored mode count");
  }
  if ((!x0.empty() && x0.max_block() > M) || (!x1.empty() && x1.max_block() > M)) {
    throw ConfigError("steer_and_verify: endpoint support exceeds simulation truncation");
  }

  const double tau = settings.tau;
  const double design_freq = max_frequency(system, N);
  const std::size_t gram_panels = settings.gram_panels > 0
                                      ? settings.gram_panels
                                      : suggested_panels(2.0 * design_freq, tau, settings.gram_nodes);
  const std::size_t prop_steps =
      settings.prop_steps > 0
          ? settings.prop_steps
          : suggested_panels(max_frequency(system, M) + design_freq, tau, settings.prop_nodes);

  const WeightMatrix weight = WeightMatrix::scalar(settings.weight_q);
  const ControlLaw law = synthesize(system, N, tau, weight, x0, x1, gram_panels,
                                    settings.gram_nodes, settings.ridge, settings.policy);

  const PropagationConfig cfg{M, prop_steps, settings.prop_nodes};
  const StateVector reached = propagate(
      system, x0, [&law](double t) { return eval_control_scalar(law, t); }, tau, cfg,
      settings.policy);

  const StateVector residual = reached - x1;

  SteeringReport report;
  report.design_truncation = N;
  report.simulation_truncation = M;
  report.reduced_dim = law.reduced.dim;
  report.projected_residual = residual.project(N).norm();
  report.full_residual = residual.norm();
  report.u_l2 = control_l2_norm(law);
  report.tail_bound = tail_remainder_bound(system, M, report.u_l2, tau);
  report.qnb_norm = tail_input_norm(system, N);
  report.product = report.qnb_norm * report.u_l2;
  report.cost = control_cost(law);
  report.condition_estimate = law.condition_estimate;
  report.solve_residual = law.solve_residual;
  report.epsilon_target = settings.epsilon_target;
  report.pass = report.full_residual + report.tail_bound < settings.epsilon_target;
  report.approximate_interpolation = law.regularized();
  return report;
}

ConvergenceReport convergence_sweep(const ModalSystem& system, std::vector<std::size_t> orders,
                                    std::size_t M, const StateVector& x0, const StateVector& x1,
                                    const SteerSettings& settings, std::size_t jobs) {
  std::sort(orders.begin(), orders.end());
  if (std::adjacent_find(orders.begin(), orders.end()) != orders.end()) {
    throw ConfigError("convergence_sweep: truncation orders must be distinct");
  }
  if (orders.empty()) {
    throw ConfigError("convergence_sweep: empty truncation range");
  }
  if (orders.back() > M) {
    throw ConfigError("convergence_sweep: max truncation order exceeds simulation M");
  }

  ConvergenceReport report;
  report.rows.resize(orders.size());
  std::vector<std::exception_ptr> errors(orders.size());

  const auto run_row = [&](std::size_t i) {
    try {
      report.rows[i] = steer_and_verify(system, orders[i], M, x0, x1, settings);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  if (settings.policy == ExecPolicy::parallel) {
    const int threads = jobs > 0 ? static_cast<int>(jobs) : 0;
    if (threads > 0) {
#pragma omp parallel for schedule(dynamic) num_threads(threads)
      for (std::size_t i = 0; i < orders.size(); ++i) {
        run_row(i);
      }
    } else {
#pragma omp parallel for schedule(dynamic)
      for (std::size_t i = 0; i < orders.size(); ++i) {
        run_row(i);
      }
    }
  } else {
    for (std::size_t i = 0; i < orders.size(); ++i) {
      run_row(i);
    }
  }

  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return report;
}

std::string convergence_csv(const ConvergenceReport& report) {
  std::string out =
      "N,d_N,projected_residual,full_residual,tail_bound,qnb_norm,u_l2,product,cost_J,"
      "cond_estimate,pass\n";
  char buf[64];
  for (const SteeringReport& row : report.rows) {
    std::snprintf(buf, sizeof(buf), "%zu,%zu", row.design_truncation, row.reduced_dim);
    out += buf;
    const double values[] = {row.projected_residual, row.full_residual, row.tail_bound,
                             row.qnb_norm,           row.u_l2,          row.product,
                             row.cost,               row.condition_estimate};
    for (double v : values) {
      std::snprintf(buf, sizeof(buf), ",%.17g", v);
      out += buf;
    }
    out += row.pass ? ",1\n" : ",0\n";
  }
  return out;
}

std::string convergence_svg(const ConvergenceReport& report) {
  const int width = 640, height = 420, margin = 56;
  std::string svg;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                "viewBox=\"0 0 %d %d\">\n",
                width, height, width, height);
  svg += buf;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (report.rows.empty()) {
    svg += "</svg>\n";
    return svg;
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const SteeringReport& row : report.rows) {
    const double v = std::log10(std::max(row.full_residual, 1e-300));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo < 1e-9) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double n_min = static_cast<double>(report.rows.front().design_truncation);
  const double n_max = static_cast<double>(report.rows.back().design_truncation);
  const double n_span = std::max(n_max - n_min, 1.0);

  const auto map_x = [&](double n) {
    return margin + (n - n_min) / n_span * (width - 2 * margin);
  };
  const auto map_y = [&](double v) {
    return height - margin - (v - lo) / (hi - lo) * (height - 2 * margin);
  };

  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n"
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n",
                margin, height - margin, width - margin, height - margin, margin, margin, margin,
                height - margin);
  svg += buf;

  std::string path = "M";
  for (const SteeringReport& row : report.rows) {
    const double x = map_x(static_cast<double>(row.design_truncation));
    const double y = map_y(std::log10(std::max(row.full_residual, 1e-300)));
    std::snprintf(buf, sizeof(buf), " %.2f %.2f", x, y);
    path += buf;
    std::snprintf(buf, sizeof(buf), "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"#1f6fb2\"/>\n",
                  x, y);
    svg += buf;
  }
  std::snprintf(buf, sizeof(buf),
                "<path d=\"%s\" fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\"/>\n",
                path.c_str());
  svg += buf;

  for (const SteeringReport& row : report.rows) {
    const double x = map_x(static_cast<double>(row.design_truncation));
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.2f\" y=\"%d\" font-size=\"11\" text-anchor=\"middle\">%zu</text>\n",
                  x, height - margin + 16, row.design_truncation);
    svg += buf;
  }
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%d\" y=\"%d\" font-size=\"11\" text-anchor=\"middle\" "
                "transform=\"rotate(-90 14 %d)\">log10 residual</text>\n",
                14, height / 2, height / 2);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%d\" y=\"%d\" font-size=\"12\" text-anchor=\"middle\">truncation order "
                "N</text>\n",
                width / 2, height - 12);
  svg += buf;
  std::snprintf(buf, sizeof(buf), "<text x=\"%d\" y=\"20\" font-size=\"11\">log10 range [%.2f, %.2f]</text>\n",
                margin, lo, hi);
  svg += buf;
  svg += "</svg>\n";
  return svg;
}

}  // namespace modalctl
