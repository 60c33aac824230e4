// Command-line front end: instance generation, Monte-Carlo sweeps, theory
// bound reports, and the real-signal pipeline.
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmvfacs/csvio.hpp"
#include "mmvfacs/fusion.hpp"
#include "mmvfacs/harness.hpp"
#include "mmvfacs/metrics.hpp"
#include "mmvfacs/rng.hpp"
#include "mmvfacs/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

double parse_smnr(const std::string& s) {
  if (s == "inf" || s == "+inf" || s == "infinity") {
    return std::numeric_limits<double>::infinity();
  }
  return std::stod(s);
}

std::vector<mmvfacs::SolverId> parse_solver_list(const std::string& csv) {
  std::vector<mmvfacs::SolverId> ids;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t comma = csv.find(',', start);
    const std::string tok = csv.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!tok.empty()) ids.push_back(mmvfacs::solver_from_string(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return ids;
}

int cmd_gen(std::size_t M, std::size_t N, std::size_t K, std::size_t L,
            const std::string& kind, const std::string& smnr,
            std::uint64_t seed, const std::string& out) {
  mmvfacs::InstanceParams p;
  p.M = M;
  p.N = N;
  p.K = K;
  p.L = L;
  p.kind = mmvfacs::signal_kind_from_string(kind);
  p.smnr_db = parse_smnr(smnr);
  p.seed = seed;
  const mmvfacs::Instance inst = mmvfacs::make_instance(p);
  mmvfacs::save_instance(inst, out);
  std::cout << "wrote instance fixtures to " << out << "\n";
  return 0;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<std::string> out, bool full, std::optional<bool> strict,
            bool prune_union) {
  // Apply command-line overrides before the config is validated, so flags
  // like --prune-union can admit setups the file alone would reject.
  std::ifstream is(config_path, std::ios::binary);
  if (!is) {
    throw mmvfacs::Error(mmvfacs::ErrorCode::ConfigInvalid,
                         "cannot open config " + config_path);
  }
  json raw;
  try {
    is >> raw;
  } catch (const json::exception& e) {
    throw mmvfacs::Error(mmvfacs::ErrorCode::ConfigInvalid, e.what());
  }
  if (seed) raw["seed"] = *seed;
  if (out) raw["output_path"] = *out;
  if (strict) raw["strict"] = *strict;
  if (full) raw["full"] = true;
  if (prune_union) raw["prune_union"] = true;
  mmvfacs::ExperimentConfig cfg = mmvfacs::config_from_json(raw);
  if (cfg.output_path.empty()) cfg.output_path = "out";

  const mmvfacs::SweepOutput sweep = mmvfacs::run_sweep(cfg);
  mmvfacs::write_sweep_outputs(sweep, cfg.output_path, cfg.full_records);
  mmvfacs::write_sweep_csv(sweep, std::cout);
  return 0;
}

int cmd_real(const std::string& signal, const std::vector<std::size_t>& m_list,
             std::size_t K, std::size_t trials, std::uint64_t seed,
             const std::string& solvers, const std::string& smnr,
             std::optional<std::string> out, std::optional<bool> strict,
             bool prune_union, bool full) {
  mmvfacs::RealConfig cfg;
  cfg.signal_csv = signal;
  cfg.M_list = m_list;
  cfg.K = K;
  cfg.n_trials = trials;
  cfg.seed = seed;
  if (!solvers.empty()) cfg.solvers = parse_solver_list(solvers);
  cfg.smnr_db = parse_smnr(smnr);
  if (strict) cfg.strict = *strict;
  cfg.prune_union = prune_union;
  cfg.output_path = out.value_or("out");

  const mmvfacs::SweepOutput sweep = mmvfacs::run_real(cfg);
  mmvfacs::write_sweep_outputs(sweep, cfg.output_path, full);
  mmvfacs::write_sweep_csv(sweep, std::cout);
  return 0;
}

// Theory reports for seeded instances: restricted isometry constant, the
// reconstruction-error bound with its constants, per-participant gain and
// residual conditions, and the average-case selection bound.
int cmd_bounds(const std::string& config_path, std::optional<std::string> out) {
  std::ifstream is(config_path, std::ios::binary);
  if (!is) {
    throw mmvfacs::Error(mmvfacs::ErrorCode::ConfigInvalid,
                         "cannot open " + config_path);
  }
  json j;
  is >> j;

  mmvfacs::InstanceParams base;
  base.M = j.at("M").get<std::size_t>();
  base.N = j.at("N").get<std::size_t>();
  base.K = j.at("K").get<std::size_t>();
  base.L = j.value("L", std::size_t{1});
  base.kind = mmvfacs::signal_kind_from_string(j.value("signal_kind", "gaussian"));
  base.smnr_db = j.contains("smnr_db") && !j.at("smnr_db").is_null()
                     ? j.at("smnr_db").get<double>()
                     : std::numeric_limits<double>::infinity();
  const auto master_seed = j.at("seed").get<std::uint64_t>();
  const auto n_instances = j.value("n_instances", std::size_t{1});
  std::vector<mmvfacs::SolverId> solvers;
  for (const auto& s : j.at("solvers")) {
    solvers.push_back(mmvfacs::solver_from_string(s.get<std::string>()));
  }
  const std::string ric_method = j.value("ric_method", std::string("exact"));
  const auto ric_budget = j.value("ric_budget", mmvfacs::kRicDefaultBudget);
  const auto ric_samples = j.value("ric_samples", std::size_t{2000});

  ordered_json reports = ordered_json::array();
  for (std::size_t i = 0; i < n_instances; ++i) {
    mmvfacs::InstanceParams p = base;
    p.seed = mmvfacs::derive_seed(master_seed, i);
    const mmvfacs::Instance inst = mmvfacs::make_instance(p);
    const auto& A = inst.matrix.A;
    const auto& B = inst.obs.B;
    const auto& X = inst.signal.X;
    const auto& T = inst.signal.support;

    std::vector<mmvfacs::IndexSet> supports;
    std::vector<mmvfacs::SolverOutput> outs;
    for (mmvfacs::SolverId id : solvers) {
      outs.push_back(mmvfacs::run_solver(id, A, B, base.K, T, {}));
      supports.push_back(outs.back().support);
    }
    const mmvfacs::FusionOutput fused = mmvfacs::fuse(A, B, base.K, supports);
    const double measured_error = mmvfacs::fro_norm(mmvfacs::sub(X, fused.X_hat));
    const double fused_residual =
        (B.map() - A.map() * fused.X_hat.map()).norm();

    ordered_json rep;
    rep["instance_seed"] = p.seed;
    rep["gamma"] = fused.gamma.indices();
    rep["true_support"] = T.indices();

    const std::size_t order = fused.gamma.size() + base.K;
    mmvfacs::RicEstimate ric;
    if (ric_method == "exact") {
      ric = mmvfacs::ric_exact(A, order, ric_budget);
    } else {
      ric = mmvfacs::ric_random_lower_bound(A, order, ric_samples,
                                            mmvfacs::derive_seed(p.seed, 99));
    }
    rep["ric"] = {{"s", ric.s},
                  {"delta", ric.delta},
                  {"method", ric.method == mmvfacs::RicMethod::ExactEnumeration
                                 ? "exact_enumeration"
                                 : "random_lower_bound"}};

    if (ric.delta < 1.0) {
      const mmvfacs::Thm1Constants c =
          mmvfacs::thm1_constants(ric.delta, fused.gamma.size(), base.K);
      rep["bound"] = {
          {"C1", c.c1},
          {"C2", c.c2},
          {"C3", c.c3},
          {"nu", c.nu},
          {"error_bound",
           mmvfacs::thm1_bound(ric.delta, X, inst.obs.W, fused.gamma, base.K)},
          {"measured_error", measured_error},
      };
    } else {
      rep["bound"] = {{"flag", "delta_out_of_range"}, {"delta", ric.delta}};
    }

    ordered_json per_solver = ordered_json::array();
    for (std::size_t s = 0; s < solvers.size(); ++s) {
      ordered_json sj;
      sj["solver"] = mmvfacs::to_string(solvers[s]);
      sj["residual_fro"] = outs[s].residual_fro;
      sj["fused_residual_fro"] = fused_residual;
      if (ric.delta < 1.0) {
        try {
          const mmvfacs::BoundReport br = mmvfacs::thm1_report(
              ric.delta, X, inst.obs.W, fused.gamma, outs[s].support, base.K);
          sj["eta_i"] = br.eta_i;
          sj["zeta"] = br.zeta;
          sj["xi"] = br.xi;
          sj["gain_condition_holds"] = br.gain_condition_holds;
          sj["gain_factor"] = br.gain_factor;
          const mmvfacs::Prop2Condition p2 =
              mmvfacs::prop2_condition(br.eta_i, br.zeta, ric.delta);
          sj["residual_condition"] = {
              {"holds", p2.holds}, {"lhs", p2.lhs}, {"rhs", p2.rhs}};
        } catch (const mmvfacs::Error& e) {
          sj["flag"] = std::string("premise: ") + e.what();
        }
      }
      per_solver.push_back(std::move(sj));
    }
    rep["participants"] = std::move(per_solver);

    const std::vector<double> sigma(base.K, 1.0);
    const mmvfacs::AvgCaseReport avg = mmvfacs::thm2_bound(
        A, fused.gamma, T, sigma, inst.obs.W, base.L);
    rep["avg_case"] = {
        {"C2L", avg.c2l},
        {"A2L", avg.a2l},
        {"gamma", avg.gamma},
        {"eta_noise", avg.eta_noise},
        {"p_theta_lower", avg.p_theta_lower},
        {"assumption_holds", avg.assumption_holds},
    };
    reports.push_back(std::move(rep));
  }

  const fs::path out_dir = out.value_or("out");
  fs::create_directories(out_dir);
  std::ofstream os(out_dir / "bounds.json", std::ios::binary);
  os << reports.dump(2) << '\n';
  std::cout << reports.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint-sparse recovery by support fusion: experiment toolkit"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate seeded instance fixtures");
  std::size_t g_M = 20, g_N = 100, g_K = 5, g_L = 4;
  std::string g_kind = "gaussian", g_smnr = "inf", g_out = "out";
  std::uint64_t g_seed = 0;
  gen->add_option("--M", g_M, "measurement count");
  gen->add_option("--N", g_N, "signal dimension");
  gen->add_option("--K", g_K, "row sparsity");
  gen->add_option("--L", g_L, "measurement vectors");
  gen->add_option("--kind", g_kind, "gaussian|rademacher");
  gen->add_option("--smnr", g_smnr, "SMNR in dB, or 'inf'");
  gen->add_option("--seed", g_seed, "seed");
  gen->add_option("--out", g_out, "output directory");

  // run
  auto* run = app.add_subcommand("run", "Monte-Carlo sweep from a config file");
  std::string r_config;
  std::optional<std::uint64_t> r_seed;
  std::optional<std::string> r_out;
  bool r_full = false, r_prune = false;
  std::optional<bool> r_strict;
  run->add_option("--config", r_config, "JSON experiment config")->required();
  run->add_option("--seed", r_seed, "override config seed");
  run->add_option("--out", r_out, "override output directory");
  run->add_flag("--full", r_full, "write per-trial JSON records");
  run->add_flag("--strict,!--no-strict", r_strict,
                "abort on flagged trials (default on)");
  run->add_flag("--prune-union", r_prune, "prune oversized fusion unions");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "theory reports for seeded instances");
  std::string b_config;
  std::optional<std::string> b_out;
  bounds->add_option("--config", b_config, "JSON bounds config")->required();
  bounds->add_option("--out", b_out, "output directory");

  // real
  auto* real = app.add_subcommand("real", "compressible-signal pipeline from CSV");
  std::string re_signal, re_solvers, re_smnr = "inf";
  std::vector<std::size_t> re_m;
  std::size_t re_K = 50, re_trials = 10;
  std::uint64_t re_seed = 0;
  std::optional<std::string> re_out;
  std::optional<bool> re_strict;
  bool re_prune = false, re_full = false;
  real->add_option("--signal", re_signal, "CSV: time points x channels")->required();
  real->add_option("--M", re_m, "measurement counts to sweep")->required();
  real->add_option("--K", re_K, "assumed sparsity");
  real->add_option("--trials", re_trials, "trials per M");
  real->add_option("--seed", re_seed, "seed");
  real->add_option("--solvers", re_solvers, "comma-separated participant list");
  real->add_option("--smnr", re_smnr, "SMNR in dB, or 'inf'");
  real->add_option("--out", re_out, "output directory");
  real->add_flag("--strict,!--no-strict", re_strict, "abort on flagged trials");
  real->add_flag("--prune-union", re_prune, "prune oversized fusion unions");
  real->add_flag("--full", re_full, "write per-trial JSON records");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return cmd_gen(g_M, g_N, g_K, g_L, g_kind, g_smnr, g_seed, g_out);
    }
    if (run->parsed()) {
      return cmd_run(r_config, r_seed, r_out, r_full, r_strict, r_prune);
    }
    if (bounds->parsed()) {
      return cmd_bounds(b_config, b_out);
    }
    if (real->parsed()) {
      return cmd_real(re_signal, re_m, re_K, re_trials, re_seed, re_solvers,
                      re_smnr, re_out, re_strict, re_prune, re_full);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
