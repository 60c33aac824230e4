#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mmvfacs/model.hpp"
#include "mmvfacs/rng.hpp"
#include "mmvfacs/solvers.hpp"
#include "oracles.hpp"

using namespace mmvfacs;

namespace {

Instance noiseless_instance(std::size_t M, std::size_t N, std::size_t K,
                            std::size_t L, std::uint64_t seed) {
  InstanceParams p;
  p.M = M;
  p.N = N;
  p.K = K;
  p.L = L;
  p.seed = seed;
  return make_instance(p);
}

void check_output_invariants(const SolverOutput& out, const Mat& A, const Mat& B,
                             std::size_t K) {
  CHECK(out.support.size() == K);
  for (std::size_t i = 0; i < out.X_hat.rows(); ++i) {
    if (out.support.contains(i)) continue;
    for (std::size_t j = 0; j < out.X_hat.cols(); ++j) {
      CHECK(out.X_hat(i, j) == 0.0);
    }
  }
  CHECK(out.residual_fro >= 0.0);
  CHECK(out.residual_fro <= fro_norm(B) * (1.0 + 1e-12));
  CHECK(out.residual_fro ==
        doctest::Approx((B.map() - A.map() * out.X_hat.map()).norm())
            .epsilon(1e-12));
}

}  // namespace

TEST_CASE("momp: identity matrix picks the nonzero rows") {
  const std::size_t N = 8, K = 3, L = 2;
  Mat A = Mat::identity(N);
  auto sig = gen_signal(N, K, L, SignalKind::Gaussian, 3);
  Mat B = matmul(A, sig.X);
  auto out = solve_momp(A, B, K);
  CHECK(out.support == sig.support);
  CHECK(fro_norm(sub(out.X_hat, sig.X)) <= 1e-12);
  check_output_invariants(out, A, B, K);
}

TEST_CASE("momp: single atom, noiseless, exact") {
  auto inst = noiseless_instance(4, 8, 1, 3, 12);
  auto out = solve_momp(inst.matrix.A, inst.obs.B, 1);
  CHECK(out.support == inst.signal.support);
  CHECK(fro_norm(sub(out.X_hat, inst.signal.X)) <=
        1e-10 * fro_norm(inst.signal.X));
}

TEST_CASE("momp: agrees with the exhaustive support oracle") {
  auto inst = noiseless_instance(8, 12, 2, 3, 2024);
  auto out = solve_momp(inst.matrix.A, inst.obs.B, 2);
  auto best = oracles::best_support_by_enumeration(inst.matrix.A, inst.obs.B, 2);
  CHECK(out.support == best);
}

TEST_CASE("msp: identity matrix is exact immediately") {
  const std::size_t N = 10, K = 4, L = 3;
  Mat A = Mat::identity(N);
  auto sig = gen_signal(N, K, L, SignalKind::Gaussian, 5);
  Mat B = matmul(A, sig.X);
  auto out = solve_msp(A, B, K);
  CHECK(out.support == sig.support);
  CHECK(out.iterations <= 1);
  check_output_invariants(out, A, B, K);
}

TEST_CASE("msp: noiseless recovery matches the exhaustive oracle") {
  auto inst = noiseless_instance(10, 14, 2, 3, 31);
  auto out = solve_msp(inst.matrix.A, inst.obs.B, 2);
  CHECK(out.residual_fro <= 1e-9);
  auto best = oracles::best_support_by_enumeration(inst.matrix.A, inst.obs.B, 2);
  CHECK(out.support == best);
}

TEST_CASE("msp: per-iteration residuals never increase") {
  InstanceParams p;
  p.M = 16;
  p.N = 40;
  p.K = 5;
  p.L = 4;
  p.smnr_db = 10.0;
  p.seed = 77;
  Instance inst = make_instance(p);
  std::vector<double> residuals;
  SolverConfig cfg;
  cfg.on_iterate = [&](std::size_t, const Mat& x) {
    residuals.push_back((inst.obs.B.map() - inst.matrix.A.map() * x.map()).norm());
  };
  solve_msp(inst.matrix.A, inst.obs.B, p.K, cfg);
  for (std::size_t i = 1; i < residuals.size(); ++i) {
    CHECK(residuals[i] <= residuals[i - 1] * (1.0 + 1e-12));
  }
}

TEST_CASE("msp: rejects 2K > M") {
  auto inst = noiseless_instance(6, 12, 4, 2, 9);
  CHECK_THROWS_AS(solve_msp(inst.matrix.A, inst.obs.B, 4), Error);
}

TEST_CASE("mfocuss: zero measurements give the lexicographic support") {
  auto mm = gen_matrix(6, 10, 40);
  Mat B = Mat::zeros(6, 3);
  auto out = solve_mfocuss(mm.A, B, 2);
  CHECK(out.support.indices() == std::vector<std::size_t>{0, 1});
  CHECK(fro_norm(out.X_hat) == 0.0);
}

TEST_CASE("mfocuss: noiseless agrees with the exhaustive oracle") {
  auto inst = noiseless_instance(10, 16, 2, 4, 404);
  SolverConfig cfg;
  cfg.max_iter = 500;
  auto out = solve_mfocuss(inst.matrix.A, inst.obs.B, 2, cfg);
  auto best = oracles::best_support_by_enumeration(inst.matrix.A, inst.obs.B, 2);
  CHECK(out.support == best);
  CHECK(out.converged);
}

TEST_CASE("mfocuss: row-norm diversity is non-increasing on a seeded run") {
  auto inst = noiseless_instance(12, 24, 3, 4, 515);
  const double p = 0.8;
  std::vector<double> diversity;
  SolverConfig cfg;
  cfg.focuss_p = p;
  cfg.max_iter = 300;
  cfg.on_iterate = [&](std::size_t, const Mat& x) {
    double j = 0.0;
    for (double v : oracles::row_norms_direct(x)) j += std::pow(v, p);
    diversity.push_back(j);
  };
  solve_mfocuss(inst.matrix.A, inst.obs.B, 3, cfg);
  REQUIRE(diversity.size() >= 2);
  for (std::size_t i = 1; i < diversity.size(); ++i) {
    CHECK(diversity[i] <= diversity[i - 1] * (1.0 + 1e-9));
  }
}

TEST_CASE("mbpdn: lambda=0 over-determined matches plain least squares") {
  Mat A = oracles::random_mat(10, 6, 606);
  Mat B = oracles::random_mat(10, 3, 607);
  SolverConfig cfg;
  cfg.bpdn_lambda = 0.0;
  cfg.max_iter = 5000;
  cfg.tol = 1e-14;
  auto out = solve_mbpdn(A, B, 6, cfg);
  Mat ref = lstsq(A, B);
  CHECK(fro_norm(sub(out.X_hat, ref)) <= 1e-6 * std::max(1.0, fro_norm(ref)));
}

TEST_CASE("mbpdn: large lambda keeps the proximal iterates at zero") {
  auto inst = noiseless_instance(8, 16, 2, 3, 707);
  Mat atb = transpose_mul(inst.matrix.A, inst.obs.B);
  double max_row = 0.0;
  for (double v : row_l2_norms(atb)) max_row = std::max(max_row, v);
  SolverConfig cfg;
  cfg.bpdn_lambda = max_row * 1.000001;
  bool all_zero = true;
  cfg.on_iterate = [&](std::size_t, const Mat& x) {
    if (fro_norm(x) != 0.0) all_zero = false;
  };
  solve_mbpdn(inst.matrix.A, inst.obs.B, 2, cfg);
  CHECK(all_zero);
}

TEST_CASE("mbpdn: backtracking step rule reaches the same support") {
  InstanceParams p;
  p.M = 14;
  p.N = 28;
  p.K = 3;
  p.L = 4;
  p.smnr_db = 25.0;
  p.seed = 7171;
  Instance inst = make_instance(p);
  SolverConfig fixed_cfg;
  fixed_cfg.max_iter = 4000;
  SolverConfig bt_cfg = fixed_cfg;
  bt_cfg.bpdn_step_rule = StepRule::Backtracking;
  auto a = solve_mbpdn(inst.matrix.A, inst.obs.B, p.K, fixed_cfg);
  auto b = solve_mbpdn(inst.matrix.A, inst.obs.B, p.K, bt_cfg);
  CHECK(a.converged);
  CHECK(b.converged);
  CHECK(a.support == b.support);
}

TEST_CASE("group soft threshold matches the rowwise closed form") {
  Mat x = oracles::random_mat(9, 4, 808);
  const double t = 0.7;
  Mat got = x;
  group_soft_threshold(got, t);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double nr = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) nr += x(i, j) * x(i, j);
    nr = std::sqrt(nr);
    const double scale = std::max(0.0, 1.0 - t / nr);
    for (std::size_t j = 0; j < x.cols(); ++j) {
      CHECK(got(i, j) == doctest::Approx(x(i, j) * scale).epsilon(1e-14));
    }
  }
}

TEST_CASE("oracle solver: noiseless exact, noisy error equals projected noise") {
  auto inst = noiseless_instance(10, 20, 4, 3, 909);
  auto out = solve_oracle(inst.matrix.A, inst.obs.B, inst.signal.support, 4);
  CHECK(fro_norm(sub(out.X_hat, inst.signal.X)) <=
        1e-10 * fro_norm(inst.signal.X));

  InstanceParams p = inst.params;
  p.smnr_db = 12.0;
  Instance noisy = make_instance(p);
  auto nout = solve_oracle(noisy.matrix.A, noisy.obs.B, noisy.signal.support, 4);
  // On the true support the estimation error is the least-squares image of
  // the noise.
  Mat a_t = columns(noisy.matrix.A, noisy.signal.support);
  Mat pinv_w = lstsq(a_t, noisy.obs.W);
  Mat diff = sub(rows(nout.X_hat, noisy.signal.support),
                 rows(noisy.signal.X, noisy.signal.support));
  CHECK(fro_norm(sub(diff, pinv_w)) <= 1e-9 * std::max(1.0, fro_norm(pinv_w)));
}

TEST_CASE("oracle solver on the identity matrix returns B rows") {
  const std::size_t N = 7, K = 2, L = 2;
  Mat A = Mat::identity(N);
  auto sig = gen_signal(N, K, L, SignalKind::Gaussian, 11);
  Mat B = matmul(A, sig.X);
  auto out = solve_oracle(A, B, sig.support, K);
  CHECK(fro_norm(sub(rows(out.X_hat, sig.support), rows(B, sig.support))) <=
        1e-14);
}

TEST_CASE("all solvers: invariants and determinism on a noisy instance") {
  InstanceParams p;
  p.M = 16;
  p.N = 32;
  p.K = 4;
  p.L = 5;
  p.smnr_db = 15.0;
  p.seed = 1001;
  Instance inst = make_instance(p);
  SolverConfig cfg;
  cfg.max_iter = 2000;
  for (SolverId id : {SolverId::Momp, SolverId::Msp, SolverId::Mfocuss,
                      SolverId::Mbpdn, SolverId::Oracle}) {
    auto a = run_solver(id, inst.matrix.A, inst.obs.B, p.K, inst.signal.support,
                        cfg);
    auto b = run_solver(id, inst.matrix.A, inst.obs.B, p.K, inst.signal.support,
                        cfg);
    check_output_invariants(a, inst.matrix.A, inst.obs.B, p.K);
    CHECK(a.support == b.support);
    CHECK(a.X_hat == b.X_hat);
    CHECK(a.iterations == b.iterations);
  }
}

TEST_CASE("all solvers recover the noiseless top-K support on orthogonal A") {
  const std::size_t N = 12, K = 3, L = 4;
  Mat A = Mat::identity(N);
  auto sig = gen_signal(N, K, L, SignalKind::Gaussian, 2222);
  Mat B = matmul(A, sig.X);
  SolverConfig cfg;
  cfg.max_iter = 2000;
  for (SolverId id :
       {SolverId::Momp, SolverId::Msp, SolverId::Mfocuss, SolverId::Mbpdn}) {
    auto out = run_solver(id, A, B, K, sig.support, cfg);
    CHECK(out.support == sig.support);
    CHECK(fro_norm(sub(out.X_hat, sig.X)) <= 1e-9 * fro_norm(sig.X));
  }
}
