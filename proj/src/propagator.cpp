#include "modalctl/propagator.hpp"

#include <cmath>
#include <cstdio>

#include "modalctl/quadrature.hpp"

namespace modalctl {

namespace {

void check_support(const ModalSystem& system, std::size_t M, const StateVector& x,
                   const char* who) {
  if (M > system.mode_count()) {
    throw ConfigError(std::string(who) + ": truncation exceeds stored mode count");
  }
  if (!x.empty() && x.max_block() > M) {
    throw ConfigError(std::string(who) + ": truncation too small for the state support");
  }
}

// Convolution contribution of one block over a node range [begin, end):
//   sum_i w_i u(s_i) e^{(t_end - s_i)A_blk} (0, c)'
// with c the block's input coefficient. Shared by the serial and the OpenMP
// path, and by the single-shot and the trajectory kernels.
Vec2 block_convolution(const BlockSpec& spec, double coeff, double t_end, const PanelGrid& grid,
                       const std::vector<double>& u_values, std::size_t begin, std::size_t end) {
  double acc0 = 0.0;
  double acc1 = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const Mat2 e = block_expm(spec, t_end - grid.points[i]);
    const double f = grid.weights[i] * u_values[i] * coeff;
    acc0 += f * e.m01;
    acc1 += f * e.m11;
  }
  return {acc0, acc1};
}

std::vector<double> sample_control(const std::function<double(double)>& u, const PanelGrid& grid,
                                   double offset) {
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    values[i] = u(offset + grid.points[i]);
    if (!std::isfinite(values[i])) {
      throw NumericalError("propagate: control value is not finite");
    }
  }
  return values;
}

}  // namespace

StateVector transition(const ModalSystem& system, double t, std::size_t M, const StateVector& x) {
  if (!std::isfinite(t)) {
    throw NumericalError("transition: non-finite time");
  }
  check_support(system, M, x, "transition");
  StateVector out;
  std::size_t block = 0;
  auto it = x.entries().begin();
  while (it != x.entries().end()) {
    block = it->first / 2;
    Vec2 v{0.0, 0.0};
    if (it->first % 2 == 0) {
      v.v0 = it->second;
      ++it;
    }
    if (it != x.entries().end() && it->first == 2 * block + 1) {
      v.v1 = it->second;
      ++it;
    }
    const Vec2 y = block_expm(system.block(block), t) * v;
    out.set(2 * block, y.v0);
    out.set(2 * block + 1, y.v1);
  }
  return out;
}

StateVector propagate(const ModalSystem& system, const StateVector& x0,
                      const std::function<double(double)>& u, double tau,
                      const PropagationConfig& cfg, ExecPolicy policy) {
  if (!std::isfinite(tau) || tau <= 0.0) {
    throw ConfigError("propagate: horizon must be positive and finite");
  }
  check_support(system, cfg.truncation, x0, "propagate");
  const std::size_t M = cfg.truncation;

  const PanelGrid grid(tau, cfg.steps, cfg.nodes);
  const std::vector<double> u_values = sample_control(u, grid, 0.0);

  const std::size_t block_count = M + 1;
  std::vector<double> dense = x0.to_dense(2 * block_count);
  std::vector<double> result(2 * block_count, 0.0);

  const auto run_block = [&](std::size_t blk) {
    const BlockSpec spec = system.block(blk);
    const Vec2 hom = block_expm(spec, tau) * Vec2{dense[2 * blk], dense[2 * blk + 1]};
    const Vec2 conv =
        block_convolution(spec, system.input_coeff(blk), tau, grid, u_values, 0, grid.size());
    result[2 * blk] = hom.v0 + conv.v0;
    result[2 * blk + 1] = hom.v1 + conv.v1;
  };

  if (policy == ExecPolicy::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::size_t blk = 0; blk < block_count; ++blk) {
      run_block(blk);
    }
  } else {
    for (std::size_t blk = 0; blk < block_count; ++blk) {
      run_block(blk);
    }
  }
  return StateVector::from_dense(result);
}

Trajectory sample_trajectory(const ModalSystem& system, const StateVector& x0,
                             const std::function<double(double)>& u, double tau,
                             std::size_t samples, const PropagationConfig& cfg,
                             ExecPolicy policy) {
  if (samples < 1) {
    throw ConfigError("sample_trajectory: need at least one sample interval");
  }
  if (!std::isfinite(tau) || tau <= 0.0) {
    throw ConfigError("sample_trajectory: horizon must be positive and finite");
  }
  check_support(system, cfg.truncation, x0, "sample_trajectory");
  const std::size_t M = cfg.truncation;
  const std::size_t block_count = M + 1;

  const double dt = tau / static_cast<double>(samples);
  const std::size_t panels_per_interval =
      std::max<std::size_t>(1, (cfg.steps + samples - 1) / samples);
  const PanelGrid grid(dt, panels_per_interval, cfg.nodes);

  // Per-block one-interval transition, reused across intervals.
  std::vector<Mat2> step_expm(block_count);
  for (std::size_t blk = 0; blk < block_count; ++blk) {
    step_expm[blk] = block_expm(system.block(blk), dt);
  }

  Trajectory out;
  out.truncation = M;
  out.times.reserve(samples + 1);
  out.states.reserve(samples + 1);

  std::vector<double> state = x0.to_dense(2 * block_count);
  out.times.push_back(0.0);
  out.states.push_back(state);

  std::vector<double> next(2 * block_count, 0.0);
  for (std::size_t k = 0; k < samples; ++k) {
    const double t_left = static_cast<double>(k) * dt;
    const std::vector<double> u_values = sample_control(u, grid, t_left);

    const auto run_block = [&](std::size_t blk) {
      const Vec2 hom = step_expm[blk] * Vec2{state[2 * blk], state[2 * blk + 1]};
      const Vec2 conv = block_convolution(system.block(blk), system.input_coeff(blk), dt, grid,
                                          u_values, 0, grid.size());
      next[2 * blk] = hom.v0 + conv.v0;
      next[2 * blk + 1] = hom.v1 + conv.v1;
    };

    if (policy == ExecPolicy::parallel) {
#pragma omp parallel for schedule(dynamic)
      for (std::size_t blk = 0; blk < block_count; ++blk) {
        run_block(blk);
      }
    } else {
      for (std::size_t blk = 0; blk < block_count; ++blk) {
        run_block(blk);
      }
    }
    state.swap(next);
    out.times.push_back(static_cast<double>(k + 1) * dt);
    out.states.push_back(state);
  }
  return out;
}

std::string trajectory_csv(const Trajectory& trajectory) {
  std::string out = "t";
  char buf[40];
  for (std::size_t blk = 0; blk <= trajectory.truncation; ++blk) {
    std::snprintf(buf, sizeof(buf), ",xi_%zu,eta_%zu", blk, blk);
    out += buf;
  }
  out += '\n';
  for (std::size_t row = 0; row < trajectory.times.size(); ++row) {
    std::snprintf(buf, sizeof(buf), "%.17g", trajectory.times[row]);
    out += buf;
    for (double v : trajectory.states[row]) {
      std::snprintf(buf, sizeof(buf), ",%.17g", v);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace modalctl
