#include "mmvfacs/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mmvfacs/csvio.hpp"
#include "mmvfacs/fusion.hpp"
#include "mmvfacs/metrics.hpp"
#include "mmvfacs/rng.hpp"

namespace mmvfacs {

int resolve_thread_count() {
  int max_threads = 1;
#ifdef _OPENMP
  max_threads = omp_get_max_threads();
#endif
  const char* env = std::getenv("MMVFACS_THREADS");
  if (!env || !*env) return max_threads;
  const long v = std::strtol(env, nullptr, 10);
  if (v <= 0) return max_threads;
  return static_cast<int>(std::min<long>(v, max_threads));
}

double asrer_db_from_energies(double signal_energy_sum, double error_energy_sum) {
  if (signal_energy_sum <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (error_energy_sum <= 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(signal_energy_sum / error_energy_sum);
}

namespace {

struct StoredError {
  bool set = false;
  ErrorCode code = ErrorCode::InvalidArgument;
  std::string message;
};

// Everything one trial needs, shared by the synthetic and real pipelines.
struct TrialContext {
  const Mat* A = nullptr;
  const Mat* B = nullptr;
  const Mat* X = nullptr;
  IndexSet truth;  // scoring support (true support / top-K rows for real data)
  std::size_t K = 0;
  double realized_smnr = 0.0;
  double signal_energy = 0.0;
};

TrialRecord record_for(const TrialContext& ctx, std::size_t trial,
                       const std::string& method, const IndexSet& support,
                       const Mat& x_hat, double residual) {
  TrialRecord rec;
  rec.trial_index = trial;
  rec.method = method;
  rec.signal_energy = ctx.signal_energy;
  rec.error_energy = std::pow(fro_norm(sub(*ctx.X, x_hat)), 2);
  const SupportScore score = support_score(support, ctx.truth, ctx.K);
  rec.support_precision = score.precision;
  rec.support_recall = score.recall;
  rec.residual_fro = residual;
  rec.realized_smnr_db = ctx.realized_smnr;
  return rec;
}

TrialRecord excluded_record(const TrialContext& ctx, std::size_t trial,
                            const std::string& method, std::string flag) {
  TrialRecord rec;
  rec.trial_index = trial;
  rec.method = method;
  rec.signal_energy = ctx.signal_energy;
  rec.realized_smnr_db = ctx.realized_smnr;
  rec.flags.push_back(std::move(flag));
  rec.excluded = true;
  return rec;
}

// Runs every configured solver and fusion combo for one prepared instance.
std::vector<TrialRecord> run_methods(const TrialContext& ctx,
                                     const std::vector<SolverId>& solvers,
                                     const std::vector<std::vector<SolverId>>& combos,
                                     const SolverConfig& solver_cfg,
                                     bool strict, bool prune_union,
                                     std::size_t trial) {
  std::vector<TrialRecord> records;
  std::map<SolverId, SolverOutput> outputs;
  std::map<SolverId, std::string> failed;

  for (SolverId id : solvers) {
    const std::string name = to_string(id);
    try {
      SolverOutput out = run_solver(id, *ctx.A, *ctx.B, ctx.K, ctx.truth,
                                    solver_cfg);
      if (!out.converged) {
        if (strict) {
          throw Error(ErrorCode::NonConvergence,
                      name + " hit max_iter without converging (trial " +
                          std::to_string(trial) + ")");
        }
        TrialRecord rec = excluded_record(ctx, trial, name, "nonconvergence");
        records.push_back(std::move(rec));
        failed[id] = "nonconvergence";
        continue;
      }
      TrialRecord rec =
          record_for(ctx, trial, name, out.support, out.X_hat, out.residual_fro);
      records.push_back(std::move(rec));
      outputs.emplace(id, std::move(out));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NonConvergence || strict) throw;
      records.push_back(excluded_record(ctx, trial, name,
                                        std::string("error:") +
                                            to_string(e.code())));
      failed[id] = e.what();
    }
  }

  for (const auto& combo : combos) {
    const std::string label = fusion_label(combo);
    bool participant_down = false;
    for (SolverId id : combo) {
      if (failed.count(id)) {
        records.push_back(
            excluded_record(ctx, trial, label,
                            std::string("participant_error:") + to_string(id)));
        participant_down = true;
        break;
      }
    }
    if (participant_down) continue;

    std::vector<IndexSet> supports;
    supports.reserve(combo.size());
    for (SolverId id : combo) supports.push_back(outputs.at(id).support);
    try {
      FusionOptions opts;
      opts.prune_union = prune_union;
      FusionOutput fused = fuse(*ctx.A, *ctx.B, ctx.K, supports, opts);
      const double residual =
          (ctx.B->map() - ctx.A->map() * fused.X_hat.map()).norm();
      TrialRecord rec =
          record_for(ctx, trial, label, fused.support, fused.X_hat, residual);
      if (fused.pruned) rec.flags.push_back("pruned_union");
      if (fused.rank_fallback) rec.flags.push_back("rank_fallback");
      rec.gamma_recall =
          ctx.truth.empty()
              ? 1.0
              : static_cast<double>(fused.gamma.intersection_size(ctx.truth)) /
                    static_cast<double>(ctx.truth.size());
      records.push_back(std::move(rec));
    } catch (const Error& e) {
      if (strict) throw;
      records.push_back(excluded_record(ctx, trial, label,
                                        std::string("error:") +
                                            to_string(e.code())));
    }
  }
  return records;
}

std::vector<TrialRecord> run_synthetic_trial(const ExperimentConfig& cfg,
                                             std::size_t axis_idx,
                                             std::size_t trial) {
  std::size_t m = 0, l = 0;
  double smnr = 0.0;
  cfg.resolve(axis_idx, m, l, smnr);
  InstanceParams params{m,   cfg.N, cfg.K, l, cfg.signal_kind, smnr,
                        derive_seed(cfg.seed, axis_idx, trial)};
  Instance inst = make_instance(params);

  TrialContext ctx;
  ctx.A = &inst.matrix.A;
  ctx.B = &inst.obs.B;
  ctx.X = &inst.signal.X;
  ctx.truth = inst.signal.support;
  ctx.K = cfg.K;
  ctx.realized_smnr = realized_smnr_db(inst.signal, inst.obs);
  const double fn = fro_norm(inst.signal.X);
  ctx.signal_energy = fn * fn;
  return run_methods(ctx, cfg.solvers, cfg.fusion_combos, cfg.solver_config,
                     cfg.strict, cfg.prune_union, trial);
}

// Shared sweep driver. The parallel and serial paths fill the same
// (axis, trial) slot grid; aggregation is an ordered reduction, so results
// are identical regardless of scheduling.
template <typename TrialFn>
SweepOutput drive_sweep(const std::string& axis_name,
                        const std::vector<double>& axis_values,
                        std::size_t n_trials, TrialFn&& one_trial,
                        bool parallel) {
  const std::size_t n_axis = axis_values.size();
  const std::size_t n_slots = n_axis * n_trials;
  std::vector<std::vector<TrialRecord>> slots(n_slots);
  std::vector<StoredError> errors(n_slots);

  auto body = [&](std::size_t slot) {
    const std::size_t axis_idx = slot / n_trials;
    const std::size_t trial = slot % n_trials;
    try {
      slots[slot] = one_trial(axis_idx, trial);
    } catch (const Error& e) {
      errors[slot] = {true, e.code(), e.message()};
    } catch (const std::exception& e) {
      errors[slot] = {true, ErrorCode::InvalidArgument, e.what()};
    }
  };

  if (parallel) {
    const int threads = resolve_thread_count();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
    for (long long slot = 0; slot < static_cast<long long>(n_slots); ++slot) {
      body(static_cast<std::size_t>(slot));
    }
    (void)threads;
  } else {
    for (std::size_t slot = 0; slot < n_slots; ++slot) body(slot);
  }

  // First error in deterministic slot order wins.
  for (const StoredError& e : errors) {
    if (e.set) throw Error(e.code, e.message);
  }

  SweepOutput out;
  out.axis_name = axis_name;
  out.axis_values = axis_values;
  out.trials.resize(n_axis);
  for (std::size_t a = 0; a < n_axis; ++a) {
    for (std::size_t t = 0; t < n_trials; ++t) {
      auto& src = slots[a * n_trials + t];
      out.trials[a].insert(out.trials[a].end(),
                           std::make_move_iterator(src.begin()),
                           std::make_move_iterator(src.end()));
    }
  }

  // Aggregate per (axis value, method), keeping first-seen method order.
  for (std::size_t a = 0; a < n_axis; ++a) {
    std::vector<std::string> method_order;
    std::map<std::string, std::array<double, 4>> acc;  // sig, err, prec, rec
    std::map<std::string, std::size_t> counts;
    for (const TrialRecord& rec : out.trials[a]) {
      if (!counts.count(rec.method)) method_order.push_back(rec.method);
      auto& sums = acc[rec.method];
      auto& n = counts[rec.method];
      if (rec.excluded) continue;
      sums[0] += rec.signal_energy;
      sums[1] += rec.error_energy;
      sums[2] += rec.support_precision;
      sums[3] += rec.support_recall;
      ++n;
    }
    for (const std::string& method : method_order) {
      SweepResult r;
      r.axis_name = axis_name;
      r.axis_value = axis_values[a];
      r.method = method;
      r.n_trials = counts[method];
      const auto& sums = acc[method];
      r.asrer_db = asrer_db_from_energies(sums[0], sums[1]);
      r.mean_precision = r.n_trials ? sums[2] / static_cast<double>(r.n_trials) : 0.0;
      r.mean_recall = r.n_trials ? sums[3] / static_cast<double>(r.n_trials) : 0.0;
      out.results.push_back(std::move(r));
    }
  }
  return out;
}

SweepOutput run_sweep_impl(const ExperimentConfig& cfg, bool parallel) {
  validate(cfg);
  std::vector<double> axis_values(cfg.axis_size());
  for (std::size_t i = 0; i < axis_values.size(); ++i) {
    axis_values[i] = cfg.axis_value(i);
  }
  return drive_sweep(
      to_string(cfg.axis()), axis_values, cfg.n_trials,
      [&](std::size_t axis_idx, std::size_t trial) {
        return run_synthetic_trial(cfg, axis_idx, trial);
      },
      parallel);
}

SweepOutput run_real_impl(const RealConfig& cfg, bool parallel) {
  if (cfg.M_list.empty() || cfg.n_trials == 0 || cfg.K == 0) {
    throw Error(ErrorCode::ConfigInvalid,
                "real pipeline needs M_list, n_trials and K");
  }
  const Mat X = read_matrix_csv(cfg.signal_csv);
  const std::size_t N = X.rows();
  if (cfg.K > N) {
    throw Error(ErrorCode::DimensionMismatch, "K exceeds signal length");
  }
  for (std::size_t m : cfg.M_list) {
    if (m == 0 || m > N) {
      throw Error(ErrorCode::DimensionMismatch,
                  "M=" + std::to_string(m) + " out of range for N=" +
                      std::to_string(N));
    }
  }

  const IndexSet truth = top_k_rows(X, cfg.K);
  const double fn = fro_norm(X);
  // Column-energy scale for noise: real signals are not unit-variance.
  const double mean_col_energy = fn * fn / static_cast<double>(X.cols());

  std::vector<std::vector<SolverId>> combos;
  if (cfg.fuse_participants) {
    std::vector<SolverId> combo;
    for (SolverId id : cfg.solvers) {
      if (id != SolverId::Oracle) combo.push_back(id);
    }
    if (combo.size() >= 2) combos.push_back(std::move(combo));
  }

  std::vector<double> axis_values(cfg.M_list.size());
  for (std::size_t i = 0; i < axis_values.size(); ++i) {
    axis_values[i] = static_cast<double>(cfg.M_list[i]);
  }

  return drive_sweep(
      "M", axis_values, cfg.n_trials,
      [&](std::size_t axis_idx, std::size_t trial) {
        const std::size_t m = cfg.M_list[axis_idx];
        const std::uint64_t seed = derive_seed(cfg.seed, axis_idx, trial);
        MeasurementMatrix mm = gen_matrix(m, N, derive_seed(seed, 0));

        Mat W(m, X.cols());
        double realized = std::numeric_limits<double>::infinity();
        if (!std::isinf(cfg.smnr_db)) {
          const double var =
              mean_col_energy /
              (static_cast<double>(m) * std::pow(10.0, cfg.smnr_db / 10.0));
          Rng rng(derive_seed(seed, 2));
          const double sd = std::sqrt(var);
          for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < X.cols(); ++j) {
              W(i, j) = rng.normal() * sd;
            }
          }
        }
        Mat B(m, X.cols());
        B.map() = mm.A.map() * X.map() + W.map();
        if (!std::isinf(cfg.smnr_db)) {
          double acc = 0.0;
          for (std::size_t j = 0; j < X.cols(); ++j) {
            double sx = 0.0, sw = 0.0;
            for (std::size_t i = 0; i < N; ++i) sx += X(i, j) * X(i, j);
            for (std::size_t i = 0; i < m; ++i) sw += W(i, j) * W(i, j);
            acc += sx / sw;
          }
          realized = 10.0 * std::log10(acc / static_cast<double>(X.cols()));
        }

        TrialContext ctx;
        ctx.A = &mm.A;
        ctx.B = &B;
        ctx.X = &X;
        ctx.truth = truth;
        ctx.K = cfg.K;
        ctx.realized_smnr = realized;
        ctx.signal_energy = fn * fn;
        return run_methods(ctx, cfg.solvers, combos, cfg.solver_config,
                           cfg.strict, cfg.prune_union, trial);
      },
      parallel);
}

}  // namespace

SweepOutput run_sweep(const ExperimentConfig& cfg) {
  return run_sweep_impl(cfg, /*parallel=*/true);
}

SweepOutput run_sweep_serial(const ExperimentConfig& cfg) {
  return run_sweep_impl(cfg, /*parallel=*/false);
}

SweepOutput run_real(const RealConfig& cfg) {
  return run_real_impl(cfg, /*parallel=*/true);
}

SweepOutput run_real_serial(const RealConfig& cfg) {
  return run_real_impl(cfg, /*parallel=*/false);
}

namespace {

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

void write_sweep_csv(const SweepOutput& out, std::ostream& os) {
  os << "axis_name,axis_value,method,n_trials,asrer_db,mean_precision,"
        "mean_recall\n";
  for (const SweepResult& r : out.results) {
    os << r.axis_name << ',' << fmt12(r.axis_value) << ',' << r.method << ','
       << r.n_trials << ',' << fmt12(r.asrer_db) << ','
       << fmt12(r.mean_precision) << ',' << fmt12(r.mean_recall) << '\n';
  }
}

nlohmann::ordered_json sweep_to_json(const SweepOutput& out) {
  nlohmann::ordered_json j;
  j["axis_name"] = out.axis_name;
  auto sweeps = nlohmann::ordered_json::array();
  for (std::size_t a = 0; a < out.axis_values.size(); ++a) {
    nlohmann::ordered_json sweep;
    sweep["axis_value"] = out.axis_values[a];
    auto trials = nlohmann::ordered_json::array();
    for (const TrialRecord& rec : out.trials[a]) {
      nlohmann::ordered_json r;
      r["trial_index"] = rec.trial_index;
      r["method"] = rec.method;
      r["signal_energy"] = rec.signal_energy;
      r["error_energy"] = rec.error_energy;
      r["support_precision"] = rec.support_precision;
      r["support_recall"] = rec.support_recall;
      r["residual_fro"] = rec.residual_fro;
      // Non-finite values (noiseless trials) serialize as null.
      r["realized_smnr_db"] = rec.realized_smnr_db;
      r["flags"] = rec.flags;
      trials.push_back(std::move(r));
    }
    sweep["trials"] = std::move(trials);
    sweeps.push_back(std::move(sweep));
  }
  j["sweeps"] = std::move(sweeps);
  return j;
}

void write_sweep_outputs(const SweepOutput& out, const std::filesystem::path& dir,
                         bool full) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream os(dir / "sweep.csv", std::ios::binary);
    if (!os) {
      throw Error(ErrorCode::InvalidArgument,
                  "cannot open " + (dir / "sweep.csv").string());
    }
    write_sweep_csv(out, os);
  }
  if (full) {
    std::ofstream os(dir / "trials.json", std::ios::binary);
    if (!os) {
      throw Error(ErrorCode::InvalidArgument,
                  "cannot open " + (dir / "trials.json").string());
    }
    os << sweep_to_json(out).dump(2) << '\n';
  }
}

}  // namespace mmvfacs
