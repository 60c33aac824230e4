// Compares the OpenMP trial pool and subset enumeration against their serial
// reference implementations, and checks the outputs agree.
#include <chrono>
#include <cstdio>
#include <iostream>

#include "mmvfacs/harness.hpp"
#include "mmvfacs/model.hpp"
#include "mmvfacs/theory.hpp"

using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

void report(const char* name, double serial_s, double parallel_s, bool match) {
  std::printf("%-24s serial %8.3fs   parallel %8.3fs   speedup %5.2fx   %s\n",
              name, serial_s, parallel_s, serial_s / parallel_s,
              match ? "outputs match" : "OUTPUT MISMATCH");
}

}  // namespace

int main() {
  std::printf("worker pool: %d threads (MMVFACS_THREADS caps it)\n\n",
              mmvfacs::resolve_thread_count());

  // Monte-Carlo sweep.
  {
    mmvfacs::ExperimentConfig cfg;
    cfg.N = 100;
    cfg.K = 8;
    cfg.L = 10;
    cfg.smnr_db = 20.0;
    cfg.M_list = {24, 32, 40, 48};
    cfg.solvers = {mmvfacs::SolverId::Momp, mmvfacs::SolverId::Mfocuss,
                   mmvfacs::SolverId::Oracle};
    cfg.fusion_combos = {{mmvfacs::SolverId::Momp, mmvfacs::SolverId::Mfocuss}};
    cfg.n_trials = 50;
    cfg.seed = 20240601;
    cfg.solver_config.max_iter = 20000;

    auto t0 = clock_type::now();
    const auto serial = mmvfacs::run_sweep_serial(cfg);
    const double ts = seconds_since(t0);

    t0 = clock_type::now();
    const auto parallel = mmvfacs::run_sweep(cfg);
    const double tp = seconds_since(t0);

    bool match = serial.results.size() == parallel.results.size();
    for (std::size_t i = 0; match && i < serial.results.size(); ++i) {
      match = serial.results[i].asrer_db == parallel.results[i].asrer_db &&
              serial.results[i].mean_precision == parallel.results[i].mean_precision;
    }
    report("monte-carlo sweep", ts, tp, match);
  }

  // Restricted isometry constant by enumeration.
  {
    const auto mm = mmvfacs::gen_matrix(14, 24, 7);
    auto t0 = clock_type::now();
    const auto serial = mmvfacs::ric_exact_serial(mm.A, 6);
    const double ts = seconds_since(t0);

    t0 = clock_type::now();
    const auto parallel = mmvfacs::ric_exact(mm.A, 6);
    const double tp = seconds_since(t0);

    report("ric enumeration", ts, tp, serial.delta == parallel.delta);
    std::printf("  delta_6 = %.12f over C(24,6)=%llu subsets\n", parallel.delta,
                static_cast<unsigned long long>(mmvfacs::binomial_count(24, 6)));
  }
  return 0;
}
