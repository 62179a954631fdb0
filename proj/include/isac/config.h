#pragma once

// Experiment configuration: the JSON schema, validation, canonical hashing
// and per-trial seed derivation.

#include "isac/scenario.h"
#include "isac/solver.h"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace isac::harness {

enum class MethodId { imbo, zf, mmse };

/// "IMBO", "ZF", "MMSE".
std::string to_string(MethodId m);
/// Case-insensitive inverse of to_string; nullopt for unknown names.
std::optional<MethodId> parse_method(const std::string& name);

enum class SweepAxis { power_dbm, antennas };

std::string to_string(SweepAxis a);

struct SweepConfig {
  SweepAxis axis = SweepAxis::power_dbm;
  std::vector<double> values;
};

/// -90 to 90 degrees in 0.5 degree steps (361 points).
std::vector<double> default_theta_grid();

struct ExperimentConfig {
  scenario::GeometryConfig geometry;
  int M = 16;
  int K = 2;
  int N = 4;  // must equal geometry.sensing_angles_deg.size()
  double sigma2_dbm = -80.0;
  double p_max_dbm = 30.0;
  double gamma_th_dbm = 20.0;
  solver::ImboConfig solver;
  int trials = 100;
  std::uint64_t master_seed = 1;
  std::optional<SweepConfig> sweep;
  std::vector<MethodId> methods{MethodId::imbo, MethodId::zf, MethodId::mmse};
  std::vector<double> theta_grid_deg = default_theta_grid();

  /// Collects every violated invariant (including the nested geometry and
  /// solver settings) and throws ConfigError listing them field by field.
  void validate() const;

  scenario::LinkBudget budget() const;

  bool has_method(MethodId m) const;

  /// Copy with the sweep value at `index` applied to M or p_max_dbm.
  ExperimentConfig at_sweep_point(std::size_t index) const;

  /// Number of sweep points (1 when no sweep is configured).
  std::size_t sweep_points() const;
  /// The swept value at `index`; p_max_dbm when no sweep is configured.
  double sweep_value(std::size_t index) const;
};

/// Parses a JSON document. Missing keys keep their defaults; unknown keys,
/// wrong types and invariant violations are all reported in one ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Complete JSON echo (every field, defaults included).
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Reads and parses a JSON config file. IoError if unreadable, ConfigError
/// if malformed or invalid.
ExperimentConfig load_config(const std::filesystem::path& path);

/// FNV-1a 64 over the compact canonical dump of config_to_json (keys sorted).
std::uint64_t config_hash(const ExperimentConfig& cfg);
/// config_hash as 16 lower-case hex digits.
std::string config_hash_hex(const ExperimentConfig& cfg);

/// splitmix64 finalizer applied to master ^ mix(trial) ^ mix(sweep_index),
/// with distinct odd multipliers per coordinate so (trial, sweep) pairs do
/// not collide and neighbouring trials get decorrelated streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial,
                          std::uint64_t sweep_index);

}  // namespace isac::harness
