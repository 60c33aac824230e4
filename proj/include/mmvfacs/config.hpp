#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmvfacs/model.hpp"
#include "mmvfacs/solvers.hpp"

namespace mmvfacs {

enum class SweepAxis { M, L, Smnr };

const char* to_string(SweepAxis axis);

struct ExperimentConfig {
  std::size_t N = 0;
  std::size_t K = 0;
  std::size_t M = 0;  // base value when not the sweep axis
  std::size_t L = 1;  // base value when not the sweep axis
  double smnr_db = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> M_list;
  std::vector<std::size_t> L_list;
  std::vector<double> smnr_list;

  SignalKind signal_kind = SignalKind::Gaussian;
  std::vector<SolverId> solvers;
  std::vector<std::vector<SolverId>> fusion_combos;
  std::size_t n_trials = 0;
  std::uint64_t seed = 0;
  std::string output_path;

  SolverConfig solver_config;
  bool strict = true;
  bool full_records = false;
  bool prune_union = false;

  SweepAxis axis() const;
  std::size_t axis_size() const;
  double axis_value(std::size_t idx) const;
  // (M, L, smnr_db) at the given axis position.
  void resolve(std::size_t idx, std::size_t& m, std::size_t& l, double& smnr) const;
};

// Throws ConfigInvalid on any violated constraint (exactly one sweep axis,
// P·K <= M for every fusion combo unless prune_union, known solver ids, ...).
void validate(const ExperimentConfig& cfg);

ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

std::string fusion_label(const std::vector<SolverId>& combo);

}  // namespace mmvfacs
