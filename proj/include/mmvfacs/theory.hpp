#pragma once

#include <cstdint>
#include <vector>

#include "mmvfacs/mat.hpp"

namespace mmvfacs {

enum class RicMethod { ExactEnumeration, RandomLowerBound };

struct RicEstimate {
  std::size_t s = 0;
  double delta = 0.0;
  RicMethod method = RicMethod::ExactEnumeration;
};

inline constexpr std::uint64_t kRicDefaultBudget = 2'000'000;

// Exact restricted isometry constant of order s by enumerating every size-s
// column subset: delta_s = max over S of max(sigma_max²(A_S)−1, 1−sigma_min²(A_S)).
// Parallelized over the subset space with a deterministic max reduction.
RicEstimate ric_exact(const Mat& A, std::size_t s,
                      std::uint64_t budget = kRicDefaultBudget);
// Serial reference implementation; identical results to ric_exact.
RicEstimate ric_exact_serial(const Mat& A, std::size_t s,
                             std::uint64_t budget = kRicDefaultBudget);
// Certified lower bound from randomly sampled subsets.
RicEstimate ric_random_lower_bound(const Mat& A, std::size_t s,
                                   std::size_t samples, std::uint64_t seed);

std::uint64_t binomial_count(std::size_t n, std::size_t k);

struct Lemma1Check {
  bool holds = false;
  double lhs = 0.0;   // ‖AX‖_F
  double rhs = 0.0;   // √(1+δ)(‖X‖_F + ‖X‖_{2,1}/√(R+K))
  double slack = 0.0; // rhs − lhs
};
Lemma1Check lemma1_check(const Mat& A, const Mat& X, std::size_t R, std::size_t K,
                         double delta);

struct Lemma2Check {
  bool holds = false;
  double lower = 0.0;        // (1 − δ/(1−δ))‖Y‖_F
  double residual_fro = 0.0; // ‖Y − A_T2·A_T2†·Y‖_F
  double upper = 0.0;        // ‖Y‖_F
  double lower_slack = 0.0;  // residual − lower
  double upper_slack = 0.0;  // upper − residual
};
Lemma2Check lemma2_check(const Mat& A, const IndexSet& t1, const IndexSet& t2,
                         const Mat& Y, double delta);

struct Thm1Constants {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, nu = 0.0;
};
// Requires delta in [0,1); throws DeltaOutOfRange otherwise.
Thm1Constants thm1_constants(double delta, std::size_t R, std::size_t K);

// Reconstruction-error bound:
// C1‖X−X^K‖_F + C2‖X−X^K‖_{2,1} + C3‖X_{Γᶜ,:}‖_F + ν‖W‖_F.
double thm1_bound(double delta, const Mat& X, const Mat& W, const IndexSet& gamma,
                  std::size_t K);

// ‖X_{Γᶜ,:}‖_F / ‖X_{T̂ᵢᶜ,:}‖_F  (throws PremiseViolated on zero denominator).
double eta_ratio(const Mat& X, const IndexSet& that_i, const IndexSet& gamma);
// ‖W‖_F / ‖X_{Γᶜ,:}‖_F.
double zeta_ratio(const Mat& W, const Mat& X, const IndexSet& gamma);
// Arbitrary-signal correction term; zero for exactly K-row-sparse X.
double xi_term(double delta, std::size_t R, std::size_t K, const Mat& X,
               const IndexSet& gamma);

struct GainCondition {
  bool holds = false;
  double threshold = 0.0;    // (1−δ)² / (1+δ+3ζ+3ξ)
  double gain_factor = 0.0;  // (threshold/ηᵢ)²
};
GainCondition srer_gain_condition(double eta_i, double zeta, double xi,
                                  double delta);

struct BoundReport {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, nu = 0.0;
  double error_bound = 0.0;
  double eta_i = 0.0, zeta = 0.0, xi = 0.0;
  bool gain_condition_holds = false;
  double gain_factor = 0.0;
};
BoundReport thm1_report(double delta, const Mat& X, const Mat& W,
                        const IndexSet& gamma, const IndexSet& that_i,
                        std::size_t K);

struct Prop2Condition {
  bool holds = false;
  double lhs = 0.0;  // √(1+δ)/(1−δ) · (1+δ+3ζ)
  double rhs = 0.0;  // (1−2δ)/(ηᵢ√(1−δ)) − ζ
};
// Sufficient condition for the fused residual to be no larger than the i-th
// participant's; meaningful for delta in (0, 1/2).
Prop2Condition prop2_condition(double eta_i, double zeta, double delta);

// E‖Z‖₂ for an L-dimensional standard normal vector: √2·Γ((L+1)/2)/Γ(L/2).
double c2_of_L(std::size_t L);
// (Γ((L+1)/2)/Γ(L/2))², approaches L/2 for large L.
double a2_of_L(std::size_t L);

struct AvgCaseReport {
  double c2l = 0.0;
  double a2l = 0.0;
  double gamma = 0.0;          // separation ratio, clamped to <= 1
  double eta_noise = 0.0;      // noise term from the projected noise rows
  double min_term = 0.0;       // min over true atoms in Γ
  double max_term = 0.0;       // max over spurious atoms in Γ (0 if none)
  double p_theta_lower = 0.0;  // 1 − |T|·exp(−2·A₂(L)·γ²)
  bool assumption_holds = false;
};
// Average-case selection bound for a Gaussian row model X_{T,:} = Σ·Φ with
// positive diagonal Σ; probability that all true atoms in Γ survive the
// top-K selection.
AvgCaseReport thm2_bound(const Mat& A, const IndexSet& gamma, const IndexSet& T,
                         const std::vector<double>& sigma_diag, const Mat& W,
                         std::size_t L);

}  // namespace mmvfacs
