#include "mmvfacs/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mmvfacs/rng.hpp"

namespace mmvfacs {

namespace {

constexpr std::uint64_t kCountCap = std::numeric_limits<std::uint64_t>::max();

double subset_delta(const Mat& A, const std::vector<std::size_t>& subset,
                    Eigen::MatrixXd& cols_buf, Eigen::MatrixXd& gram_buf) {
  const auto m = static_cast<Eigen::Index>(A.rows());
  const auto s = static_cast<Eigen::Index>(subset.size());
  cols_buf.resize(m, s);
  for (Eigen::Index k = 0; k < s; ++k) {
    for (Eigen::Index i = 0; i < m; ++i) {
      cols_buf(i, k) = A(static_cast<std::size_t>(i), subset[static_cast<std::size_t>(k)]);
    }
  }
  gram_buf.noalias() = cols_buf.transpose() * cols_buf;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram_buf,
                                                    Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  return std::max(lmax - 1.0, 1.0 - lmin);
}

// Lexicographic successor of a size-s combination over {0..n-1}.
bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
  const std::size_t s = c.size();
  std::size_t i = s;
  while (i > 0) {
    --i;
    if (c[i] != n - s + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < s; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

// Combination with lexicographic rank r (combinatorial number system).
std::vector<std::size_t> unrank_combination(std::uint64_t r, std::size_t n,
                                            std::size_t s) {
  std::vector<std::size_t> c(s);
  std::size_t v = 0;
  for (std::size_t pos = 0; pos < s; ++pos) {
    for (;; ++v) {
      const std::uint64_t cnt = binomial_count(n - 1 - v, s - 1 - pos);
      if (r < cnt) {
        c[pos] = v;
        ++v;
        break;
      }
      r -= cnt;
    }
  }
  return c;
}

void check_ric_args(const Mat& A, std::size_t s) {
  if (s == 0 || s > A.cols()) {
    throw Error(ErrorCode::InvalidArgument, "ric order must be in [1, N]");
  }
}

}  // namespace

std::uint64_t binomial_count(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 res = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    res = res * (n - k + i) / i;
    if (res > kCountCap) return kCountCap;
  }
  return static_cast<std::uint64_t>(res);
}

RicEstimate ric_exact_serial(const Mat& A, std::size_t s, std::uint64_t budget) {
  check_ric_args(A, s);
  const std::size_t n = A.cols();
  const std::uint64_t total = binomial_count(n, s);
  if (total > budget) {
    throw Error(ErrorCode::BudgetExceeded,
                "C(" + std::to_string(n) + "," + std::to_string(s) +
                    ") exceeds enumeration budget");
  }
  std::vector<std::size_t> comb(s);
  for (std::size_t i = 0; i < s; ++i) comb[i] = i;
  Eigen::MatrixXd cols_buf, gram_buf;
  double delta = 0.0;
  do {
    delta = std::max(delta, subset_delta(A, comb, cols_buf, gram_buf));
  } while (next_combination(comb, n));
  return RicEstimate{s, delta, RicMethod::ExactEnumeration};
}

RicEstimate ric_exact(const Mat& A, std::size_t s, std::uint64_t budget) {
  check_ric_args(A, s);
  const std::size_t n = A.cols();
  const std::uint64_t total = binomial_count(n, s);
  if (total > budget) {
    throw Error(ErrorCode::BudgetExceeded,
                "C(" + std::to_string(n) + "," + std::to_string(s) +
                    ") exceeds enumeration budget");
  }
  double delta = 0.0;
#ifdef _OPENMP
#pragma omp parallel reduction(max : delta)
  {
    const auto tid = static_cast<std::uint64_t>(omp_get_thread_num());
    const auto nth = static_cast<std::uint64_t>(omp_get_num_threads());
    const std::uint64_t chunk = (total + nth - 1) / nth;
    const std::uint64_t lo = tid * chunk;
    const std::uint64_t hi = std::min<std::uint64_t>(total, lo + chunk);
    if (lo < hi) {
      std::vector<std::size_t> comb = unrank_combination(lo, n, s);
      Eigen::MatrixXd cols_buf, gram_buf;
      for (std::uint64_t r = lo; r < hi; ++r) {
        delta = std::max(delta, subset_delta(A, comb, cols_buf, gram_buf));
        next_combination(comb, n);
      }
    }
  }
#else
  return ric_exact_serial(A, s, budget);
#endif
  return RicEstimate{s, delta, RicMethod::ExactEnumeration};
}

RicEstimate ric_random_lower_bound(const Mat& A, std::size_t s,
                                   std::size_t samples, std::uint64_t seed) {
  check_ric_args(A, s);
  const std::size_t n = A.cols();
  Rng rng(seed);
  std::vector<std::size_t> pool(n);
  Eigen::MatrixXd cols_buf, gram_buf;
  double delta = 0.0;
  std::vector<std::size_t> subset(s);
  for (std::size_t t = 0; t < samples; ++t) {
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    for (std::size_t k = 0; k < s; ++k) {
      const std::size_t j = k + static_cast<std::size_t>(rng.below(n - k));
      std::swap(pool[k], pool[j]);
      subset[k] = pool[k];
    }
    std::sort(subset.begin(), subset.end());
    delta = std::max(delta, subset_delta(A, subset, cols_buf, gram_buf));
  }
  return RicEstimate{s, delta, RicMethod::RandomLowerBound};
}

Lemma1Check lemma1_check(const Mat& A, const Mat& X, std::size_t R, std::size_t K,
                         double delta) {
  Lemma1Check out;
  Mat ax = matmul(A, X);
  out.lhs = fro_norm(ax);
  const double rk = static_cast<double>(R + K);
  out.rhs = std::sqrt(1.0 + delta) *
            (fro_norm(X) + mixed_norm(X, 2.0, 1.0) / std::sqrt(rk));
  out.slack = out.rhs - out.lhs;
  out.holds = out.slack >= -1e-9 * std::max(1.0, out.rhs);
  return out;
}

Lemma2Check lemma2_check(const Mat& A, const IndexSet& t1, const IndexSet& t2,
                         const Mat& Y, double delta) {
  if (t1.intersection_size(t2) != 0) {
    throw Error(ErrorCode::InvalidArgument, "lemma2 sets must be disjoint");
  }
  Lemma2Check out;
  out.upper = fro_norm(Y);
  Mat resid = Y;
  if (!t2.empty()) {
    Mat a2 = columns(A, t2);
    Mat coef = lstsq_minnorm(a2, Y);
    resid.map() = Y.map() - a2.map() * coef.map();
  }
  out.residual_fro = fro_norm(resid);
  out.lower = (1.0 - delta / (1.0 - delta)) * out.upper;
  const double tol = 1e-9 * std::max(1.0, out.upper);
  out.lower_slack = out.residual_fro - out.lower;
  out.upper_slack = out.upper - out.residual_fro;
  out.holds = out.lower_slack >= -tol && out.upper_slack >= -tol;
  return out;
}

Thm1Constants thm1_constants(double delta, std::size_t R, std::size_t K) {
  if (delta < 0.0 || delta >= 1.0) {
    throw Error(ErrorCode::DeltaOutOfRange,
                "restricted isometry constant " + std::to_string(delta) +
                    " not in [0,1)");
  }
  Thm1Constants c;
  const double om = 1.0 - delta;
  c.nu = (3.0 - delta) / (om * om);
  c.c1 = 1.0 + c.nu * std::sqrt(1.0 + delta);
  c.c2 = c.nu * std::sqrt(1.0 + delta) / std::sqrt(static_cast<double>(R + K));
  c.c3 = (1.0 + delta) / (om * om);
  return c;
}

double thm1_bound(double delta, const Mat& X, const Mat& W, const IndexSet& gamma,
                  std::size_t K) {
  const std::size_t R = gamma.size();
  const Thm1Constants c = thm1_constants(delta, R, K);
  Mat tail = sub(X, best_k_rows(X, K));
  const double tail_fro = fro_norm(tail);
  const double tail_21 = mixed_norm(tail, 2.0, 1.0);
  const double off_gamma = fro_norm(rows_complement(X, gamma));
  return c.c1 * tail_fro + c.c2 * tail_21 + c.c3 * off_gamma +
         c.nu * fro_norm(W);
}

double eta_ratio(const Mat& X, const IndexSet& that_i, const IndexSet& gamma) {
  const double num = fro_norm(rows_complement(X, gamma));
  const double den = fro_norm(rows_complement(X, that_i));
  if (num == 0.0 || den == 0.0) {
    throw Error(ErrorCode::PremiseViolated,
                "off-support energy vanishes; gain condition premise fails");
  }
  return num / den;
}

double zeta_ratio(const Mat& W, const Mat& X, const IndexSet& gamma) {
  const double den = fro_norm(rows_complement(X, gamma));
  if (den == 0.0) {
    throw Error(ErrorCode::PremiseViolated, "off-union energy vanishes");
  }
  return fro_norm(W) / den;
}

double xi_term(double delta, std::size_t R, std::size_t K, const Mat& X,
               const IndexSet& gamma) {
  const double den = fro_norm(rows_complement(X, gamma));
  if (den == 0.0) {
    throw Error(ErrorCode::PremiseViolated, "off-union energy vanishes");
  }
  Mat tail = sub(X, best_k_rows(X, K));
  const double sq = std::sqrt(1.0 + delta);
  return (3.0 * sq + 1.0) * fro_norm(tail) / (3.0 * den) +
         sq / std::sqrt(static_cast<double>(R + K)) *
             mixed_norm(tail, 2.0, 1.0) / den;
}

GainCondition srer_gain_condition(double eta_i, double zeta, double xi,
                                  double delta) {
  if (eta_i <= 0.0) {
    throw Error(ErrorCode::PremiseViolated, "eta_i must be positive");
  }
  GainCondition g;
  const double om = 1.0 - delta;
  g.threshold = om * om / (1.0 + delta + 3.0 * zeta + 3.0 * xi);
  g.holds = eta_i < g.threshold;
  g.gain_factor = (g.threshold / eta_i) * (g.threshold / eta_i);
  return g;
}

BoundReport thm1_report(double delta, const Mat& X, const Mat& W,
                        const IndexSet& gamma, const IndexSet& that_i,
                        std::size_t K) {
  BoundReport r;
  const Thm1Constants c = thm1_constants(delta, gamma.size(), K);
  r.c1 = c.c1;
  r.c2 = c.c2;
  r.c3 = c.c3;
  r.nu = c.nu;
  r.error_bound = thm1_bound(delta, X, W, gamma, K);
  r.eta_i = eta_ratio(X, that_i, gamma);
  r.zeta = zeta_ratio(W, X, gamma);
  r.xi = xi_term(delta, gamma.size(), K, X, gamma);
  const GainCondition g = srer_gain_condition(r.eta_i, r.zeta, r.xi, delta);
  r.gain_condition_holds = g.holds;
  r.gain_factor = g.gain_factor;
  return r;
}

Prop2Condition prop2_condition(double eta_i, double zeta, double delta) {
  Prop2Condition p;
  if (delta >= 1.0 || delta < 0.0 || eta_i <= 0.0) {
    p.lhs = std::numeric_limits<double>::infinity();
    p.rhs = -std::numeric_limits<double>::infinity();
    p.holds = false;
    return p;
  }
  p.lhs = std::sqrt(1.0 + delta) / (1.0 - delta) * (1.0 + delta + 3.0 * zeta);
  p.rhs = (1.0 - 2.0 * delta) / (eta_i * std::sqrt(1.0 - delta)) - zeta;
  p.holds = p.lhs <= p.rhs;
  return p;
}

double c2_of_L(std::size_t L) {
  if (L == 0) throw Error(ErrorCode::InvalidArgument, "L must be >= 1");
  const double l = static_cast<double>(L);
  const double log_ratio = std::lgamma((l + 1.0) / 2.0) - std::lgamma(l / 2.0);
  return std::sqrt(2.0) * std::exp(log_ratio);
}

double a2_of_L(std::size_t L) {
  if (L == 0) throw Error(ErrorCode::InvalidArgument, "L must be >= 1");
  const double l = static_cast<double>(L);
  const double log_ratio = std::lgamma((l + 1.0) / 2.0) - std::lgamma(l / 2.0);
  return std::exp(2.0 * log_ratio);
}

AvgCaseReport thm2_bound(const Mat& A, const IndexSet& gamma, const IndexSet& T,
                         const std::vector<double>& sigma_diag, const Mat& W,
                         std::size_t L) {
  if (sigma_diag.size() != T.size()) {
    throw Error(ErrorCode::DimensionMismatch, "sigma diagonal size != |T|");
  }
  for (double v : sigma_diag) {
    if (v <= 0.0) {
      throw Error(ErrorCode::InvalidArgument, "sigma diagonal must be positive");
    }
  }

  AvgCaseReport rep;
  rep.c2l = c2_of_L(L);
  rep.a2l = a2_of_L(L);

  // Rows of A_Γ†·(A_T·Σ) and A_Γ†·W, via the factorization rather than an
  // explicitly formed pseudo-inverse.
  Mat a_gamma = columns(A, gamma);
  Mat at_sigma = columns(A, T);
  for (std::size_t k = 0; k < T.size(); ++k) {
    for (std::size_t i = 0; i < at_sigma.rows(); ++i) {
      at_sigma(i, k) *= sigma_diag[k];
    }
  }
  Mat signal_rows = lstsq_minnorm(a_gamma, at_sigma);  // |Γ|×K, T order
  Mat noise_rows = lstsq_minnorm(a_gamma, W);          // |Γ|×L

  const std::vector<double> sig_norms = row_l2_norms(signal_rows);
  const std::vector<double> noise_norms = row_l2_norms(noise_rows);
  double min_sig = std::numeric_limits<double>::infinity();
  double min_noise = std::numeric_limits<double>::infinity();
  double max_sig = 0.0, max_noise = 0.0;
  bool have_true = false;
  for (std::size_t pos = 0; pos < gamma.size(); ++pos) {
    const std::size_t atom = gamma[pos];
    const double s_norm = sig_norms[pos];
    const double n_norm = noise_norms[pos];
    if (T.contains(atom)) {
      have_true = true;
      min_sig = std::min(min_sig, s_norm);
      min_noise = std::min(min_noise, n_norm);
    } else {
      max_sig = std::max(max_sig, s_norm);
      max_noise = std::max(max_noise, n_norm);
    }
  }
  if (!have_true) {
    min_sig = 0.0;
    min_noise = 0.0;
  }

  rep.min_term = min_sig;
  rep.max_term = max_sig;  // 0 when Γ∖T is empty
  rep.eta_noise = min_noise + max_noise;

  const double denom = min_sig + max_sig;
  rep.gamma = (denom > 0.0)
                  ? std::min(1.0, (min_sig - max_sig - rep.eta_noise / rep.c2l) /
                                      denom)
                  : 0.0;
  rep.assumption_holds =
      have_true && (min_sig - max_sig > rep.eta_noise / rep.c2l);
  rep.p_theta_lower =
      1.0 - static_cast<double>(T.size()) *
                std::exp(-2.0 * rep.a2l * rep.gamma * rep.gamma);
  return rep;
}

}  // namespace mmvfacs
