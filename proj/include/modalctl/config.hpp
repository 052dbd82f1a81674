#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>

#include "modalctl/modal_system.hpp"
#include "modalctl/state_vector.hpp"

namespace modalctl {

/// Experiment description read from a JSON config file. Unknown fields are
/// rejected at every level; the exact schema is documented in the README.
struct ExperimentConfig {
  // system
  double kappa = 0.0;
  std::size_t mode_count = 1;
  FrequencyPreset preset;
  bool allow_overdamped = false;

  // steering problem
  double tau = 5.0;
  double weight_q = 1.0;
  std::optional<std::size_t> N;
  std::optional<std::pair<std::size_t, std::size_t>> N_range;  // inclusive
  std::size_t M = 1;
  StateVector x0;
  StateVector x1;
  double epsilon_target = 1e-2;

  // quadrature (0 = auto)
  std::size_t gram_panels = 0;
  std::size_t gram_nodes = 8;
  std::size_t prop_steps = 0;
  std::size_t prop_nodes = 8;

  std::size_t samples = 200;  // trajectory rows for simulate
  double ridge = 0.0;

  friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);

ExperimentConfig load_config_file(const std::string& path);

ModalSystem build_from_config(const ExperimentConfig& config);

}  // namespace modalctl
