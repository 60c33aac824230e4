#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmvfacs/config.hpp"
#include "mmvfacs/mat.hpp"

namespace mmvfacs {

struct TrialRecord {
  std::size_t trial_index = 0;
  std::string method;
  double signal_energy = 0.0;
  double error_energy = 0.0;
  double support_precision = 0.0;
  double support_recall = 0.0;
  double residual_fro = 0.0;
  double realized_smnr_db = 0.0;
  std::vector<std::string> flags;

  // Bookkeeping outside the serialized schema.
  double gamma_recall = -1.0;  // fusion rows: recall of the union support
  bool excluded = false;       // dropped from aggregation (non-strict runs)
};

struct SweepResult {
  std::string axis_name;
  double axis_value = 0.0;
  std::string method;
  std::size_t n_trials = 0;
  double asrer_db = 0.0;  // 10·log10(Σ signal energy / Σ error energy)
  double mean_precision = 0.0;
  double mean_recall = 0.0;
};

struct SweepOutput {
  std::string axis_name;
  std::vector<double> axis_values;
  // trials[axis_index] holds n_trials · n_methods records in
  // (trial, method) order.
  std::vector<std::vector<TrialRecord>> trials;
  std::vector<SweepResult> results;
};

// Worker count: MMVFACS_THREADS caps the pool, 0 or unset means all cores.
int resolve_thread_count();

// Monte-Carlo sweep over the configured axis. Trials are independent seeded
// units; the OpenMP pool writes into per-trial slots so output does not
// depend on the thread count.
SweepOutput run_sweep(const ExperimentConfig& cfg);
// Serial reference implementation; produces identical output bit for bit.
SweepOutput run_sweep_serial(const ExperimentConfig& cfg);

struct RealConfig {
  std::filesystem::path signal_csv;
  std::vector<std::size_t> M_list;
  std::size_t K = 0;
  std::size_t n_trials = 0;
  std::uint64_t seed = 0;
  std::vector<SolverId> solvers = {SolverId::Momp, SolverId::Msp};
  bool fuse_participants = true;  // one fusion combo of all non-oracle solvers
  double smnr_db = std::numeric_limits<double>::infinity();
  SolverConfig solver_config;
  bool strict = true;
  bool prune_union = false;
  std::string output_path;
};

// Compressible-signal pipeline: the CSV (time points × channels) is the
// ground truth; a fresh Gaussian sensing matrix is drawn per trial and the
// sweep runs over M. Support metrics are scored against the top-K rows.
SweepOutput run_real(const RealConfig& cfg);
SweepOutput run_real_serial(const RealConfig& cfg);

void write_sweep_csv(const SweepOutput& out, std::ostream& os);
nlohmann::ordered_json sweep_to_json(const SweepOutput& out);
// Writes sweep.csv (and trials.json when `full`) under `dir`.
void write_sweep_outputs(const SweepOutput& out, const std::filesystem::path& dir,
                         bool full);

// Eq-style aggregation used everywhere: ratio of summed energies, in dB.
double asrer_db_from_energies(double signal_energy_sum, double error_energy_sum);

}  // namespace mmvfacs
