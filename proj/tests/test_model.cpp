#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mmvfacs/csvio.hpp"
#include "mmvfacs/model.hpp"
#include "mmvfacs/rng.hpp"
#include "oracles.hpp"

using namespace mmvfacs;

TEST_CASE("gen_matrix: 1x1 normalizes to unit magnitude") {
  auto mm = gen_matrix(1, 1, 5);
  CHECK(std::abs(std::abs(mm.A(0, 0)) - 1.0) <= 1e-15);
}

TEST_CASE("gen_matrix: unit column norms") {
  auto mm = gen_matrix(4, 8, 17);
  for (std::size_t j = 0; j < 8; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i) s += mm.A(i, j) * mm.A(i, j);
    CHECK(std::sqrt(s) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(gen_matrix(9, 8, 17), Error);
}

TEST_CASE("gen_matrix: entry variance ~ 1/M") {
  // Coordinates of normalized columns keep per-entry variance 1/M exactly in
  // expectation, so the sample variance over many seeded draws must land on
  // 1/25 well within 5%.
  const std::size_t M = 25, N = 100;
  double sum = 0.0, sum2 = 0.0;
  std::size_t count = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    auto mm = gen_matrix(M, N, seed);
    for (double v : mm.A.data()) {
      sum += v;
      sum2 += v * v;
      ++count;
    }
  }
  const double mean = sum / static_cast<double>(count);
  const double var = sum2 / static_cast<double>(count) - mean * mean;
  CHECK(var == doctest::Approx(1.0 / 25.0).epsilon(0.05));
}

TEST_CASE("gen_signal: zero sparsity") {
  auto sig = gen_signal(10, 0, 3, SignalKind::Gaussian, 1);
  CHECK(sig.support.empty());
  CHECK(fro_norm(sig.X) == 0.0);
}

TEST_CASE("gen_signal: Rademacher rows") {
  const std::size_t L = 6;
  auto sig = gen_signal(40, 7, L, SignalKind::Rademacher, 23);
  CHECK(sig.support.size() == 7);
  for (std::size_t i : sig.support) {
    double s = 0.0;
    for (std::size_t j = 0; j < L; ++j) {
      CHECK(std::abs(sig.X(i, j)) == 1.0);
      s += sig.X(i, j) * sig.X(i, j);
    }
    CHECK(std::sqrt(s) == doctest::Approx(std::sqrt(double(L))));
  }
}

TEST_CASE("gen_signal: Gaussian nonzero variance ~ 1") {
  const std::size_t N = 500, K = 20, L = 4;
  double sum = 0.0, sum2 = 0.0;
  std::size_t count = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    auto sig = gen_signal(N, K, L, SignalKind::Gaussian, seed);
    CHECK(sig.support.size() == K);
    for (std::size_t i : sig.support) {
      for (std::size_t j = 0; j < L; ++j) {
        sum += sig.X(i, j);
        sum2 += sig.X(i, j) * sig.X(i, j);
        ++count;
      }
    }
  }
  const double mean = sum / static_cast<double>(count);
  const double var = sum2 / static_cast<double>(count) - mean * mean;
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("gen_signal: rows off support are bitwise zero") {
  auto sig = gen_signal(30, 5, 3, SignalKind::Gaussian, 77);
  for (std::size_t i = 0; i < 30; ++i) {
    if (sig.support.contains(i)) continue;
    for (std::size_t j = 0; j < 3; ++j) CHECK(sig.X(i, j) == 0.0);
  }
}

TEST_CASE("observe: noiseless") {
  auto mm = gen_matrix(6, 12, 3);
  auto sig = gen_signal(12, 3, 2, SignalKind::Gaussian, 4);
  auto obs = observe(mm, sig, std::numeric_limits<double>::infinity(), 5);
  CHECK(fro_norm(obs.W) == 0.0);
  Mat ax = matmul(mm.A, sig.X);
  CHECK(fro_norm(sub(obs.B, ax)) == 0.0);
}

TEST_CASE("observe: noise variance closed form") {
  CHECK(noise_variance(20, 50, 20.0) == doctest::Approx(20.0 / (50.0 * 100.0)));
  CHECK(noise_variance(20, 50, std::numeric_limits<double>::infinity()) == 0.0);
}

TEST_CASE("observe: realized SMNR near the target") {
  const std::size_t M = 40, N = 100, K = 20, L = 10;
  auto mm = gen_matrix(M, N, 9);
  double acc = 0.0;
  const std::size_t trials = 1000;
  for (std::uint64_t t = 0; t < trials; ++t) {
    auto sig = gen_signal(N, K, L, SignalKind::Gaussian, derive_seed(100, t));
    auto obs = observe(mm, sig, 20.0, derive_seed(200, t));
    for (std::size_t j = 0; j < L; ++j) {
      double sx = 0.0, sw = 0.0;
      for (std::size_t i = 0; i < N; ++i) sx += sig.X(i, j) * sig.X(i, j);
      for (std::size_t i = 0; i < M; ++i) sw += obs.W(i, j) * obs.W(i, j);
      acc += sx / sw;
    }
  }
  const double db = 10.0 * std::log10(acc / static_cast<double>(trials * L));
  CHECK(db == doctest::Approx(20.0).epsilon(0.025));  // within ±0.5 dB
}

TEST_CASE("make_instance: reconstruction identity and determinism") {
  InstanceParams p;
  p.M = 10;
  p.N = 25;
  p.K = 4;
  p.L = 3;
  p.smnr_db = 15.0;
  p.seed = 4242;
  Instance a = make_instance(p);
  Instance b = make_instance(p);
  CHECK(a.matrix.A == b.matrix.A);
  CHECK(a.signal.X == b.signal.X);
  CHECK(a.obs.W == b.obs.W);
  CHECK(a.obs.B == b.obs.B);

  Mat recon(p.M, p.L);
  recon.map() = a.matrix.A.map() * a.signal.X.map() + a.obs.W.map();
  CHECK(fro_norm(sub(a.obs.B, recon)) <= 1e-12);

  p.seed = 4243;
  Instance c = make_instance(p);
  CHECK(!(c.matrix.A == a.matrix.A));
}

TEST_CASE("matrix CSV round-trips exactly") {
  Mat m = oracles::random_mat(7, 4, 123);
  std::stringstream ss;
  write_matrix_csv(m, ss);
  Mat back = read_matrix_csv(ss);
  CHECK(back == m);
}

TEST_CASE("matrix CSV rejects ragged and non-numeric input") {
  std::stringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(read_matrix_csv(ragged), Error);
  std::stringstream junk("1,abc\n");
  CHECK_THROWS_AS(read_matrix_csv(junk), Error);
}

TEST_CASE("instance JSON envelope round-trips bit for bit") {
  InstanceParams p;
  p.M = 8;
  p.N = 14;
  p.K = 3;
  p.L = 2;
  p.smnr_db = 10.0;
  p.seed = 99;
  Instance inst = make_instance(p);
  auto j = instance_to_json(inst);
  Instance back = instance_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.matrix.A == inst.matrix.A);
  CHECK(back.signal.X == inst.signal.X);
  CHECK(back.obs.W == inst.obs.W);
  CHECK(back.obs.B == inst.obs.B);
  CHECK(back.signal.support == inst.signal.support);
}

TEST_CASE("rng: derived seeds differ across streams") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0, 2) != derive_seed(1, 2, 0));
  Rng r(7);
  double a = r.normal(), b = r.normal();
  Rng r2(7);
  CHECK(r2.normal() == a);
  CHECK(r2.normal() == b);
}
