#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "modalctl/block2.hpp"

namespace modalctl {

/// One flexible mode: frequency (rad/time) and its control coefficient.
struct Mode {
  double omega = 0.0;
  double b = 0.0;
};

/// Block-diagonal single-input system: rigid block A0 = [[0,1],[0,0]] with
/// input component 1, followed by mode blocks An = [[0,w_n],[-w_n,-2k]] with
/// input component b_n. Immutable after construction; all invariants
/// (kappa >= 0, w_n > 0 distinct, b_n != 0, underdamped unless overridden)
/// are enforced by the constructor.
class ModalSystem {
 public:
  ModalSystem(double kappa, std::vector<Mode> modes, bool allow_overdamped = false);

  double kappa() const { return kappa_; }
  std::size_t mode_count() const { return modes_.size(); }
  const std::vector<Mode>& modes() const { return modes_; }
  const Mode& mode(std::size_t n) const;  // n in 1..mode_count
  double min_omega() const;

  /// Block n of the generator; n = 0 is the rigid block.
  BlockSpec block(std::size_t n) const;
  /// Input coefficient of block n: 1 for the rigid block, b_n otherwise.
  double input_coeff(std::size_t n) const;

  /// FNV-1a hash of the canonical parameter string; ties serialized control
  /// laws to the system they were synthesized for.
  std::uint64_t fingerprint() const;
  std::string fingerprint_hex() const;

 private:
  double kappa_ = 0.0;
  std::vector<Mode> modes_;
};

/// Frequency/coefficient generator for standard spectra.
struct FrequencyPreset {
  enum class Kind { euler_bernoulli, harmonic, explicit_list };

  Kind kind = Kind::euler_bernoulli;
  double scale = 1.0;       // omega_n = scale * n^2 (beam) or scale * n (harmonic)
  double beta = 1.0;        // b_n = beta * n^(-p)
  double p = 2.0;
  std::vector<double> omega;  // explicit_list only
  std::vector<double> b;      // explicit_list, or optional override for generated kinds

  /// First `count` frequencies of the preset.
  std::vector<double> frequencies(std::size_t count) const;
  /// First `count` control coefficients.
  std::vector<double> coefficients(std::size_t count) const;
};

/// Builds the system with `mode_count` flexible blocks plus the rigid block.
ModalSystem build_system(const FrequencyPreset& preset, std::size_t mode_count, double kappa,
                         bool allow_overdamped = false);

struct GapSeriesSum {
  double value = 0.0;      // sum over ordered pairs i != j, i,j <= K
  double increment = 0.0;  // value at K minus value at K-1
};

/// Partial sum of the spectral gap series sum_{i!=j<=K} 1/(w_i - w_j)^2 plus
/// its last increment. Repeated frequencies among the first K entries are a
/// degenerate spectrum and raise ConfigError.
GapSeriesSum gap_series_partial_sum(std::span<const double> omegas, std::size_t K);

/// ||Q_N B|| = sqrt(sum_{n>N} b_n^2) over the modes stored in the system.
double tail_input_norm(const ModalSystem& system, std::size_t N);

}  // namespace modalctl
