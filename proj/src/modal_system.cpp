#include "modalctl/modal_system.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace modalctl {

namespace {

void append_canonical(std::string& out, double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g;", value);
  out += buf;
}

}  // namespace

ModalSystem::ModalSystem(double kappa, std::vector<Mode> modes, bool allow_overdamped)
    : kappa_(kappa), modes_(std::move(modes)) {
  if (!std::isfinite(kappa_) || kappa_ < 0.0) {
    throw ConfigError("ModalSystem: damping coefficient must be finite and nonnegative");
  }
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const Mode& m = modes_[i];
    if (!std::isfinite(m.omega) || m.omega <= 0.0) {
      throw ConfigError("ModalSystem: every modal frequency must be finite and positive");
    }
    if (!std::isfinite(m.b) || m.b == 0.0) {
      throw ConfigError("ModalSystem: every control coefficient must be finite and nonzero");
    }
  }
  std::vector<double> sorted;
  sorted.reserve(modes_.size());
  for (const Mode& m : modes_) sorted.push_back(m.omega);
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ConfigError("ModalSystem: degenerate spectrum (repeated modal frequency)");
  }
  if (!modes_.empty() && !allow_overdamped && kappa_ >= sorted.front()) {
    throw ConfigError(
        "ModalSystem: not underdamped (kappa >= min omega); pass the overdamped "
        "override to proceed");
  }
}

const Mode& ModalSystem::mode(std::size_t n) const {
  if (n == 0 || n > modes_.size()) {
    throw std::out_of_range("ModalSystem::mode: index out of range");
  }
  return modes_[n - 1];
}

double ModalSystem::min_omega() const {
  double best = std::numeric_limits<double>::infinity();
  for (const Mode& m : modes_) best = std::min(best, m.omega);
  return best;
}

BlockSpec ModalSystem::block(std::size_t n) const {
  if (n == 0) return BlockSpec::rigid_body();
  return BlockSpec::mode(mode(n).omega, kappa_);
}

double ModalSystem::input_coeff(std::size_t n) const {
  if (n == 0) return 1.0;
  return mode(n).b;
}

std::uint64_t ModalSystem::fingerprint() const {
  std::string canon = "kappa=";
  append_canonical(canon, kappa_);
  for (const Mode& m : modes_) {
    canon += "w=";
    append_canonical(canon, m.omega);
    canon += "b=";
    append_canonical(canon, m.b);
  }
  std::uint64_t hash = 1469598103934665603ull;  // FNV-1a 64
  for (unsigned char c : canon) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string ModalSystem::fingerprint_hex() const {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fingerprint()));
  return buf;
}

std::vector<double> FrequencyPreset::frequencies(std::size_t count) const {
  std::vector<double> out;
  out.reserve(count);
  switch (kind) {
    case Kind::euler_bernoulli:
      for (std::size_t n = 1; n <= count; ++n) {
        out.push_back(scale * static_cast<double>(n) * static_cast<double>(n));
      }
      break;
    case Kind::harmonic:
      for (std::size_t n = 1; n <= count; ++n) {
        out.push_back(scale * static_cast<double>(n));
      }
      break;
    case Kind::explicit_list:
      if (omega.size() < count) {
        throw ConfigError("FrequencyPreset: explicit omega list shorter than requested mode count");
      }
      out.assign(omega.begin(), omega.begin() + static_cast<std::ptrdiff_t>(count));
      break;
  }
  return out;
}

std::vector<double> FrequencyPreset::coefficients(std::size_t count) const {
  if (kind == Kind::explicit_list || !b.empty()) {
    if (b.size() < count) {
      throw ConfigError("FrequencyPreset: explicit b list shorter than requested mode count");
    }
    return {b.begin(), b.begin() + static_cast<std::ptrdiff_t>(count)};
  }
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t n = 1; n <= count; ++n) {
    out.push_back(beta * std::pow(static_cast<double>(n), -p));
  }
  return out;
}

ModalSystem build_system(const FrequencyPreset& preset, std::size_t mode_count, double kappa,
                         bool allow_overdamped) {
  if (mode_count < 1) {
    throw ConfigError("build_system: mode_count must be at least 1");
  }
  if (preset.kind != FrequencyPreset::Kind::explicit_list) {
    if (!std::isfinite(preset.scale) || preset.scale <= 0.0) {
      throw ConfigError("build_system: preset scale must be positive");
    }
    if (preset.b.empty()) {
      if (!std::isfinite(preset.beta) || preset.beta == 0.0) {
        throw ConfigError("build_system: power-law beta must be nonzero");
      }
      if (!std::isfinite(preset.p) || preset.p < 0.0) {
        throw ConfigError("build_system: power-law exponent must be nonnegative");
      }
    }
  }
  const std::vector<double> omegas = preset.frequencies(mode_count);
  const std::vector<double> coeffs = preset.coefficients(mode_count);
  std::vector<Mode> modes(mode_count);
  for (std::size_t i = 0; i < mode_count; ++i) {
    modes[i] = {omegas[i], coeffs[i]};
  }
  return {kappa, std::move(modes), allow_overdamped};
}

GapSeriesSum gap_series_partial_sum(std::span<const double> omegas, std::size_t K) {
  if (K < 1) {
    throw ConfigError("gap_series_partial_sum: K must be at least 1");
  }
  if (omegas.size() < K) {
    throw ConfigError("gap_series_partial_sum: fewer than K frequencies supplied");
  }
  GapSeriesSum out;
  // S_K = S_{K-1} + 2 sum_{i<j} 1/(w_i - w_j)^2; the j loop order fixes the
  // summation order, so results are reproducible bit for bit.
  for (std::size_t j = 2; j <= K; ++j) {
    double inc = 0.0;
    for (std::size_t i = 0; i < j - 1; ++i) {
      const double gap = omegas[i] - omegas[j - 1];
      if (gap == 0.0) {
        throw ConfigError("gap_series_partial_sum: degenerate spectrum (repeated frequency)");
      }
      inc += 2.0 / (gap * gap);
    }
    out.value += inc;
    out.increment = inc;
  }
  return out;
}

double tail_input_norm(const ModalSystem& system, std::size_t N) {
  if (N > system.mode_count()) {
    throw ConfigError("tail_input_norm: truncation exceeds stored mode count");
  }
  double sum = 0.0;
  for (std::size_t n = N + 1; n <= system.mode_count(); ++n) {
    const double b = system.mode(n).b;
    sum += b * b;
  }
  return std::sqrt(sum);
}

}  // namespace modalctl
