#pragma once

#include <functional>
#include <optional>
#include <string>

#include "mmvfacs/mat.hpp"

namespace mmvfacs {

enum class SolverId { Momp, Msp, Mfocuss, Mbpdn, Oracle };

const char* to_string(SolverId id);
SolverId solver_from_string(const std::string& s);

enum class StepRule { FixedLipschitz, Backtracking };

struct SolverConfig {
  std::size_t max_iter = 200;
  double tol = 1e-6;
  double focuss_p = 0.8;
  double focuss_eps_floor = 1e-10;
  // Group-lasso weight; when unset, 0.1 · max row l2 norm of AᵀB.
  std::optional<double> bpdn_lambda;
  StepRule bpdn_step_rule = StepRule::FixedLipschitz;
  // Diagnostic hook: called with (iteration, current N×L estimate).
  std::function<void(std::size_t, const Mat&)> on_iterate;
};

struct SolverOutput {
  IndexSet support;     // exactly K indices
  Mat X_hat;            // N×L, zero off support
  double residual_fro;  // ‖B − A·X_hat‖_F recomputed at output time
  std::size_t iterations = 0;
  SolverId solver_id = SolverId::Momp;
  bool converged = true;
};

// Simultaneous orthogonal matching pursuit: K greedy atom selections by the
// largest row l2 norm of AᵀR, least-squares refit each step.
SolverOutput solve_momp(const Mat& A, const Mat& B, std::size_t K,
                        const SolverConfig& cfg = {});

// Simultaneous subspace pursuit: merge top-K correlation indices with the
// current support, solve on ≤2K atoms, prune to K, stop when the residual
// stops decreasing.
SolverOutput solve_msp(const Mat& A, const Mat& B, std::size_t K,
                       const SolverConfig& cfg = {});

// Iteratively reweighted minimum-norm solve with row-norm weights raised to
// 1 − p/2; top-K rows plus a least-squares refit at the end.
SolverOutput solve_mfocuss(const Mat& A, const Mat& B, std::size_t K,
                           const SolverConfig& cfg = {});

// Row-group l2,1-regularized least squares via accelerated proximal gradient;
// top-K rows plus a least-squares refit at the end.
SolverOutput solve_mbpdn(const Mat& A, const Mat& B, std::size_t K,
                         const SolverConfig& cfg = {});

// Least squares on the true support; benchmarking ceiling.
SolverOutput solve_oracle(const Mat& A, const Mat& B, const IndexSet& true_support,
                          std::size_t K);

SolverOutput run_solver(SolverId id, const Mat& A, const Mat& B, std::size_t K,
                        const IndexSet& true_support, const SolverConfig& cfg = {});

// Row-wise group soft threshold: each row r becomes r·max(0, 1 − t/‖r‖₂).
void group_soft_threshold(Mat& x, double t);

}  // namespace mmvfacs
