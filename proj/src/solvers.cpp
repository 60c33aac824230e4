#include "mmvfacs/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mmvfacs {

const char* to_string(SolverId id) {
  switch (id) {
    case SolverId::Momp: return "momp";
    case SolverId::Msp: return "msp";
    case SolverId::Mfocuss: return "mfocuss";
    case SolverId::Mbpdn: return "mbpdn";
    case SolverId::Oracle: return "oracle";
  }
  return "unknown";
}

SolverId solver_from_string(const std::string& s) {
  if (s == "momp") return SolverId::Momp;
  if (s == "msp") return SolverId::Msp;
  if (s == "mfocuss") return SolverId::Mfocuss;
  if (s == "mbpdn") return SolverId::Mbpdn;
  if (s == "oracle") return SolverId::Oracle;
  throw Error(ErrorCode::ConfigInvalid, "unknown solver '" + s + "'");
}

namespace {

double residual_norm(const Mat& A, const Mat& B, const Mat& x_hat) {
  return (B.map() - A.map() * x_hat.map()).norm();
}

// Least-squares fit restricted to `support`, scattered back to N×L.
Mat ls_on_support(const Mat& A, const Mat& B, const IndexSet& support) {
  Mat compact = lstsq(columns(A, support), B);
  return scatter_rows(compact, support, A.cols());
}

// Argmax over row l2 norms of AᵀR among indices not in `taken`; ties go to
// the smaller index.
std::size_t best_correlation_index(const Mat& A, const Mat& R,
                                   const IndexSet& taken) {
  Mat corr = transpose_mul(A, R);
  std::vector<double> norms = row_l2_norms(corr);
  std::size_t best = norms.size();
  double best_val = -1.0;
  for (std::size_t j = 0; j < norms.size(); ++j) {
    if (taken.contains(j)) continue;
    if (norms[j] > best_val) {
      best_val = norms[j];
      best = j;
    }
  }
  return best;
}

SolverOutput finish(SolverId id, const Mat& A, const Mat& B, IndexSet support,
                    Mat x_hat, std::size_t iterations, bool converged) {
  SolverOutput out;
  out.solver_id = id;
  out.support = std::move(support);
  out.residual_fro = residual_norm(A, B, x_hat);
  out.X_hat = std::move(x_hat);
  out.iterations = iterations;
  out.converged = converged;
  return out;
}

}  // namespace

void group_soft_threshold(Mat& x, double t) {
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) s += x(i, j) * x(i, j);
    const double nr = std::sqrt(s);
    const double scale = (nr > t) ? (1.0 - t / nr) : 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) *= scale;
  }
}

SolverOutput solve_momp(const Mat& A, const Mat& B, std::size_t K,
                        const SolverConfig& cfg) {
  if (K > A.rows()) {
    throw Error(ErrorCode::InvalidSparsity, "momp requires K <= M");
  }
  const std::size_t N = A.cols();
  IndexSet support;
  Mat x_hat(N, B.cols());
  Mat R = B;
  for (std::size_t t = 0; t < K; ++t) {
    const std::size_t j = best_correlation_index(A, R, support);
    support = support.set_union(IndexSet{j});
    x_hat = ls_on_support(A, B, support);
    R.map() = B.map() - A.map() * x_hat.map();
    if (cfg.on_iterate) cfg.on_iterate(t + 1, x_hat);
  }
  return finish(SolverId::Momp, A, B, std::move(support), std::move(x_hat), K,
                true);
}

SolverOutput solve_msp(const Mat& A, const Mat& B, std::size_t K,
                       const SolverConfig& cfg) {
  if (2 * K > A.rows()) {
    throw Error(ErrorCode::InvalidSparsity, "msp requires 2K <= M");
  }
  const std::size_t N = A.cols();
  if (K == 0) {
    return finish(SolverId::Msp, A, B, IndexSet{}, Mat(N, B.cols()), 0, true);
  }

  IndexSet support = top_k_rows(transpose_mul(A, B), K);
  Mat x_hat = ls_on_support(A, B, support);
  double res = residual_norm(A, B, x_hat);
  if (cfg.on_iterate) cfg.on_iterate(0, x_hat);

  std::size_t iters = 0;
  for (std::size_t t = 1; t <= cfg.max_iter; ++t) {
    Mat R(B.rows(), B.cols());
    R.map() = B.map() - A.map() * x_hat.map();
    IndexSet merged = support.set_union(top_k_rows(transpose_mul(A, R), K));
    Mat v = scatter_rows(lstsq(columns(A, merged), B), merged, N);
    IndexSet pruned = top_k_rows(v, K);
    Mat candidate = ls_on_support(A, B, pruned);
    const double cand_res = residual_norm(A, B, candidate);
    if (cand_res >= res) break;  // residual stopped decreasing
    support = std::move(pruned);
    x_hat = std::move(candidate);
    res = cand_res;
    iters = t;
    if (cfg.on_iterate) cfg.on_iterate(t, x_hat);
  }
  return finish(SolverId::Msp, A, B, std::move(support), std::move(x_hat), iters,
                true);
}

SolverOutput solve_mfocuss(const Mat& A, const Mat& B, std::size_t K,
                           const SolverConfig& cfg) {
  if (cfg.focuss_p <= 0.0 || cfg.focuss_p > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "focuss_p must lie in (0,1]");
  }
  const std::size_t N = A.cols();
  const std::size_t L = B.cols();
  const double eps = cfg.focuss_eps_floor;
  const double exponent = 1.0 - cfg.focuss_p / 2.0;

  // Regularized minimum-norm start: X0 = Aᵀ(AAᵀ + eps·I)⁻¹ B.
  Eigen::MatrixXd gram = A.map() * A.map().transpose();
  gram.diagonal().array() += eps;
  Mat x(N, L);
  x.map() = A.map().transpose() * gram.ldlt().solve(B.map());

  bool converged = false;
  std::size_t iters = 0;
  for (std::size_t t = 1; t <= cfg.max_iter; ++t) {
    std::vector<double> w = row_l2_norms(x);
    for (double& v : w) v = (v > 0.0) ? std::pow(v, exponent) : 0.0;

    // Column-scaled operator Aw = A·diag(w); next iterate diag(w)·Aw†B with a
    // Tikhonov floor on the M×M system.
    Eigen::MatrixXd aw = A.map();
    for (std::size_t j = 0; j < N; ++j) aw.col(static_cast<Eigen::Index>(j)) *= w[j];
    Eigen::MatrixXd g = aw * aw.transpose();
    g.diagonal().array() += eps;
    Eigen::MatrixXd q = aw.transpose() * g.ldlt().solve(B.map());
    Mat x_next(N, L);
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = 0; j < L; ++j) {
        x_next(i, j) = w[i] * q(static_cast<Eigen::Index>(i),
                                static_cast<Eigen::Index>(j));
      }
    }

    const double denom = std::max(fro_norm(x), 1e-300);
    const double rel_change = fro_norm(sub(x_next, x)) / denom;
    x = std::move(x_next);
    iters = t;
    if (cfg.on_iterate) cfg.on_iterate(t, x);
    if (rel_change < cfg.tol) {
      converged = true;
      break;
    }
  }

  IndexSet support = top_k_rows(x, K);
  Mat x_hat = ls_on_support(A, B, support);
  return finish(SolverId::Mfocuss, A, B, std::move(support), std::move(x_hat),
                iters, converged);
}

SolverOutput solve_mbpdn(const Mat& A, const Mat& B, std::size_t K,
                         const SolverConfig& cfg) {
  const std::size_t N = A.cols();
  const std::size_t L = B.cols();

  Mat atb = transpose_mul(A, B);
  double max_corr = 0.0;
  for (double v : row_l2_norms(atb)) max_corr = std::max(max_corr, v);
  const double lambda = cfg.bpdn_lambda.value_or(0.1 * max_corr);
  if (lambda < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "bpdn_lambda must be >= 0");
  }

  // Lipschitz constant of the gradient: largest eigenvalue of AᵀA.
  double lip = 1.0;
  {
    Eigen::MatrixXd gram = A.map().transpose() * A.map();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram,
                                                      Eigen::EigenvaluesOnly);
    lip = std::max(es.eigenvalues().maxCoeff(), 1e-12);
  }

  auto objective = [&](const Mat& x) {
    return 0.5 * std::pow((A.map() * x.map() - B.map()).norm(), 2) +
           lambda * mixed_norm(x, 2.0, 1.0);
  };
  auto fit_value = [&](const Mat& x) {
    return 0.5 * std::pow((A.map() * x.map() - B.map()).norm(), 2);
  };

  Mat x(N, L);
  Mat y = x;
  double tau = 1.0;
  double f_prev = objective(x);
  double step = 1.0 / lip;

  bool converged = false;
  std::size_t iters = 0;
  for (std::size_t t = 1; t <= cfg.max_iter; ++t) {
    Mat grad(N, L);
    grad.map() = A.map().transpose() * (A.map() * y.map() - B.map());

    Mat x_next(N, L);
    if (cfg.bpdn_step_rule == StepRule::FixedLipschitz) {
      x_next.map() = y.map() - step * grad.map();
      group_soft_threshold(x_next, lambda * step);
    } else {
      // Backtracking: grow the local Lipschitz estimate until the quadratic
      // model majorizes the fit at the prox point.
      const double fy = fit_value(y);
      for (;;) {
        x_next.map() = y.map() - step * grad.map();
        group_soft_threshold(x_next, lambda * step);
        Eigen::MatrixXd d = x_next.map() - y.map();
        const double quad = fy + (grad.map().array() * d.array()).sum() +
                            0.5 / step * d.squaredNorm();
        if (fit_value(x_next) <= quad + 1e-12 * std::abs(quad)) break;
        step *= 0.5;
        if (step < 1e-18) break;
      }
    }

    const double tau_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tau * tau));
    Mat y_next(N, L);
    y_next.map() =
        x_next.map() + ((tau - 1.0) / tau_next) * (x_next.map() - x.map());
    x = std::move(x_next);
    y = std::move(y_next);
    tau = tau_next;
    iters = t;
    if (cfg.on_iterate) cfg.on_iterate(t, x);

    const double f = objective(x);
    if (std::abs(f - f_prev) < cfg.tol * std::max(f_prev, 1e-300)) {
      converged = true;
      break;
    }
    f_prev = f;
  }

  IndexSet support = top_k_rows(x, K);
  Mat x_hat = ls_on_support(A, B, support);
  return finish(SolverId::Mbpdn, A, B, std::move(support), std::move(x_hat),
                iters, converged);
}

SolverOutput solve_oracle(const Mat& A, const Mat& B, const IndexSet& true_support,
                          std::size_t K) {
  if (true_support.size() != K) {
    throw Error(ErrorCode::InvalidArgument, "oracle support size != K");
  }
  Mat x_hat = ls_on_support(A, B, true_support);
  return finish(SolverId::Oracle, A, B, true_support, std::move(x_hat), 1, true);
}

SolverOutput run_solver(SolverId id, const Mat& A, const Mat& B, std::size_t K,
                        const IndexSet& true_support, const SolverConfig& cfg) {
  switch (id) {
    case SolverId::Momp: return solve_momp(A, B, K, cfg);
    case SolverId::Msp: return solve_msp(A, B, K, cfg);
    case SolverId::Mfocuss: return solve_mfocuss(A, B, K, cfg);
    case SolverId::Mbpdn: return solve_mbpdn(A, B, K, cfg);
    case SolverId::Oracle: return solve_oracle(A, B, true_support, K);
  }
  throw Error(ErrorCode::InvalidArgument, "unhandled solver id");
}

}  // namespace mmvfacs
