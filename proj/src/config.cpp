#include "mmvfacs/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace mmvfacs {

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::M: return "M";
    case SweepAxis::L: return "L";
    case SweepAxis::Smnr: return "smnr_db";
  }
  return "?";
}

SweepAxis ExperimentConfig::axis() const {
  if (!M_list.empty()) return SweepAxis::M;
  if (!L_list.empty()) return SweepAxis::L;
  return SweepAxis::Smnr;
}

std::size_t ExperimentConfig::axis_size() const {
  switch (axis()) {
    case SweepAxis::M: return M_list.size();
    case SweepAxis::L: return L_list.size();
    case SweepAxis::Smnr: return smnr_list.size();
  }
  return 0;
}

double ExperimentConfig::axis_value(std::size_t idx) const {
  switch (axis()) {
    case SweepAxis::M: return static_cast<double>(M_list[idx]);
    case SweepAxis::L: return static_cast<double>(L_list[idx]);
    case SweepAxis::Smnr: return smnr_list[idx];
  }
  return 0.0;
}

void ExperimentConfig::resolve(std::size_t idx, std::size_t& m, std::size_t& l,
                               double& smnr) const {
  m = M;
  l = L;
  smnr = smnr_db;
  switch (axis()) {
    case SweepAxis::M: m = M_list[idx]; break;
    case SweepAxis::L: l = L_list[idx]; break;
    case SweepAxis::Smnr: smnr = smnr_list[idx]; break;
  }
}

void validate(const ExperimentConfig& cfg) {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::ConfigInvalid, msg);
  };
  const int axes = (!cfg.M_list.empty()) + (!cfg.L_list.empty()) +
                   (!cfg.smnr_list.empty());
  if (axes != 1) fail("exactly one of M_list, L_list, smnr_list must be set");
  if (cfg.N == 0) fail("N must be positive");
  if (cfg.K > cfg.N) fail("K must not exceed N");
  if (cfg.n_trials == 0) fail("n_trials must be positive");
  if (cfg.solvers.empty()) fail("solvers must be non-empty");
  if (cfg.axis() != SweepAxis::M && cfg.M == 0) fail("M must be positive");
  if (cfg.axis() != SweepAxis::L && cfg.L == 0) fail("L must be positive");
  if (cfg.signal_kind == SignalKind::Arbitrary) {
    fail("sweeps generate signals; use the real pipeline for imported data");
  }

  std::vector<std::size_t> ms =
      cfg.axis() == SweepAxis::M ? cfg.M_list : std::vector<std::size_t>{cfg.M};
  for (std::size_t m : ms) {
    if (m == 0) fail("swept M values must be positive");
    if (m > cfg.N) fail("M must not exceed N");
    if (cfg.K > m) fail("K must not exceed every swept M");
  }
  for (const auto& combo : cfg.fusion_combos) {
    if (combo.size() < 2) fail("fusion combos need at least two participants");
    for (SolverId id : combo) {
      if (id == SolverId::Oracle) fail("the oracle cannot participate in fusion");
      if (std::find(cfg.solvers.begin(), cfg.solvers.end(), id) ==
          cfg.solvers.end()) {
        fail("fusion combo references solver '" + std::string(to_string(id)) +
             "' that is not configured");
      }
    }
    if (!cfg.prune_union) {
      for (std::size_t m : ms) {
        if (combo.size() * cfg.K > m) {
          fail("fusion combo of size " + std::to_string(combo.size()) +
               " may exceed M=" + std::to_string(m) +
               " union atoms; enable prune_union or reduce participants");
        }
      }
    }
  }
}

namespace {

double smnr_from_json(const nlohmann::json& v) {
  if (v.is_null()) return std::numeric_limits<double>::infinity();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "infinity") {
      return std::numeric_limits<double>::infinity();
    }
    throw Error(ErrorCode::ConfigInvalid, "bad smnr value '" + s + "'");
  }
  return v.get<double>();
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    cfg.N = j.at("N").get<std::size_t>();
    cfg.K = j.at("K").get<std::size_t>();
    if (j.contains("M")) cfg.M = j.at("M").get<std::size_t>();
    if (j.contains("L")) cfg.L = j.at("L").get<std::size_t>();
    if (j.contains("smnr_db")) cfg.smnr_db = smnr_from_json(j.at("smnr_db"));
    if (j.contains("M_list")) {
      cfg.M_list = j.at("M_list").get<std::vector<std::size_t>>();
    }
    if (j.contains("L_list")) {
      cfg.L_list = j.at("L_list").get<std::vector<std::size_t>>();
    }
    if (j.contains("smnr_list")) {
      for (const auto& v : j.at("smnr_list")) {
        cfg.smnr_list.push_back(smnr_from_json(v));
      }
    }
    if (j.contains("signal_kind")) {
      cfg.signal_kind =
          signal_kind_from_string(j.at("signal_kind").get<std::string>());
    }
    for (const auto& s : j.at("solvers")) {
      cfg.solvers.push_back(solver_from_string(s.get<std::string>()));
    }
    if (j.contains("fusion_combos")) {
      for (const auto& combo : j.at("fusion_combos")) {
        std::vector<SolverId> ids;
        for (const auto& s : combo) {
          ids.push_back(solver_from_string(s.get<std::string>()));
        }
        cfg.fusion_combos.push_back(std::move(ids));
      }
    }
    cfg.n_trials = j.at("n_trials").get<std::size_t>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("output_path")) {
      cfg.output_path = j.at("output_path").get<std::string>();
    }
    if (j.contains("strict")) cfg.strict = j.at("strict").get<bool>();
    if (j.contains("full")) cfg.full_records = j.at("full").get<bool>();
    if (j.contains("prune_union")) {
      cfg.prune_union = j.at("prune_union").get<bool>();
    }
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      if (s.contains("max_iter")) {
        cfg.solver_config.max_iter = s.at("max_iter").get<std::size_t>();
      }
      if (s.contains("tol")) cfg.solver_config.tol = s.at("tol").get<double>();
      if (s.contains("focuss_p")) {
        cfg.solver_config.focuss_p = s.at("focuss_p").get<double>();
      }
      if (s.contains("focuss_eps_floor")) {
        cfg.solver_config.focuss_eps_floor =
            s.at("focuss_eps_floor").get<double>();
      }
      if (s.contains("bpdn_lambda") && !s.at("bpdn_lambda").is_null()) {
        cfg.solver_config.bpdn_lambda = s.at("bpdn_lambda").get<double>();
      }
      if (s.contains("bpdn_step_rule")) {
        const auto rule = s.at("bpdn_step_rule").get<std::string>();
        if (rule == "fixed_lipschitz") {
          cfg.solver_config.bpdn_step_rule = StepRule::FixedLipschitz;
        } else if (rule == "backtracking") {
          cfg.solver_config.bpdn_step_rule = StepRule::Backtracking;
        } else {
          throw Error(ErrorCode::ConfigInvalid, "bad step rule '" + rule + "'");
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw Error(ErrorCode::ConfigInvalid, "cannot open config " + path);
  }
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
  return config_from_json(j);
}

std::string fusion_label(const std::vector<SolverId>& combo) {
  std::string label = "facs(";
  for (std::size_t i = 0; i < combo.size(); ++i) {
    if (i) label += '+';
    label += to_string(combo[i]);
  }
  label += ')';
  return label;
}

}  // namespace mmvfacs
