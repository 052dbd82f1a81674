// Timing comparison between the serial reference kernels and the OpenMP
// kernels: Gramian assembly, mild-solution propagation, and a convergence
// sweep. Both paths produce bitwise-identical results (asserted here).
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "modalctl/verifier.hpp"

using namespace modalctl;

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <typename F>
double time_best_of(int repeats, F&& body) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    body();
    best = std::min(best, seconds_since(start));
  }
  return best;
}

void report(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-22s %10.4fs %10.4fs %8.2fx   %s\n", name, serial, parallel, serial / parallel,
              identical ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t modes = 64;
  if (argc > 1) modes = static_cast<std::size_t>(std::strtoull(argv[1], nullptr, 10));

  FrequencyPreset preset;
  preset.kind = FrequencyPreset::Kind::euler_bernoulli;
  const ModalSystem system = build_system(preset, modes, 0.01);
  const double tau = 5.0;
  const WeightMatrix weight = WeightMatrix::scalar(1.0);

#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled; both columns run the serial path\n");
#endif
  std::printf("%-22s %11s %11s %9s\n", "kernel", "serial", "parallel", "speedup");

  // Gramian assembly at N = 12
  const ReducedSystem reduced = reduced_matrices(system, std::min<std::size_t>(12, modes));
  Gramian gs, gp;
  const double g_serial = time_best_of(3, [&] {
    gs = gramian(reduced, tau, weight, 4096, 8, ExecPolicy::serial);
  });
  const double g_parallel = time_best_of(3, [&] {
    gp = gramian(reduced, tau, weight, 4096, 8, ExecPolicy::parallel);
  });
  report("gramian 4096x8", g_serial, g_parallel, gs.w == gp.w);

  // propagation of the full truncation under a smooth control
  const auto u = [](double t) { return std::sin(3.0 * t) + 0.25 * std::cos(11.0 * t); };
  StateVector x0;
  x0.set(0, 1.0);
  x0.set(5, -0.5);
  const PropagationConfig cfg{modes, 16384, 8};
  StateVector ps, pp;
  const double p_serial = time_best_of(3, [&] {
    ps = propagate(system, x0, u, tau, cfg, ExecPolicy::serial);
  });
  const double p_parallel = time_best_of(3, [&] {
    pp = propagate(system, x0, u, tau, cfg, ExecPolicy::parallel);
  });
  report("propagate 16384x8", p_serial, p_parallel, ps == pp);

  // convergence sweep rows
  std::vector<std::size_t> orders;
  for (std::size_t n = 2; n <= std::min<std::size_t>(10, modes); ++n) orders.push_back(n);
  SteerSettings settings;
  settings.tau = tau;
  settings.epsilon_target = 0.1;
  SteerSettings serial_settings = settings;
  serial_settings.policy = ExecPolicy::serial;
  ConvergenceReport rs, rp;
  const double s_serial = time_best_of(1, [&] {
    rs = convergence_sweep(system, orders, modes, StateVector{}, StateVector{{0, 1.0}},
                           serial_settings);
  });
  const double s_parallel = time_best_of(1, [&] {
    rp = convergence_sweep(system, orders, modes, StateVector{}, StateVector{{0, 1.0}}, settings);
  });
  report("sweep N=2..10", s_serial, s_parallel, convergence_csv(rs) == convergence_csv(rp));
  return 0;
}
