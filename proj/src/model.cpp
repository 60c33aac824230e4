#include "mmvfacs/model.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "mmvfacs/rng.hpp"

namespace mmvfacs {

const char* to_string(SignalKind kind) {
  switch (kind) {
    case SignalKind::Gaussian: return "gaussian";
    case SignalKind::Rademacher: return "rademacher";
    case SignalKind::Arbitrary: return "arbitrary";
  }
  return "unknown";
}

SignalKind signal_kind_from_string(const std::string& s) {
  if (s == "gaussian") return SignalKind::Gaussian;
  if (s == "rademacher") return SignalKind::Rademacher;
  if (s == "arbitrary") return SignalKind::Arbitrary;
  throw Error(ErrorCode::ConfigInvalid, "unknown signal kind '" + s + "'");
}

MeasurementMatrix gen_matrix(std::size_t M, std::size_t N, std::uint64_t seed) {
  if (M == 0 || N == 0 || M > N) {
    throw Error(ErrorCode::InvalidArgument, "gen_matrix requires 1 <= M <= N");
  }
  Rng rng(seed);
  Mat A(M, N);
  const double sd = 1.0 / std::sqrt(static_cast<double>(M));
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = 0; j < N; ++j) A(i, j) = rng.normal() * sd;
  }
  for (std::size_t j = 0; j < N; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < M; ++i) s += A(i, j) * A(i, j);
    const double norm = std::sqrt(s);
    if (norm < 1e-14) {
      throw Error(ErrorCode::DegenerateColumn,
                  "column " + std::to_string(j) + " nearly zero before scaling");
    }
    for (std::size_t i = 0; i < M; ++i) A(i, j) /= norm;
  }
  return MeasurementMatrix{std::move(A), M, N};
}

JointSparseSignal gen_signal(std::size_t N, std::size_t K, std::size_t L,
                             SignalKind kind, std::uint64_t seed) {
  if (K > N || L == 0) {
    throw Error(ErrorCode::InvalidArgument, "gen_signal requires K <= N, L >= 1");
  }
  if (kind == SignalKind::Arbitrary) {
    throw Error(ErrorCode::InvalidArgument,
                "arbitrary signals are imported, not generated");
  }
  Rng rng(seed);
  // Partial Fisher-Yates for a uniform K-subset without replacement.
  std::vector<std::size_t> pool(N);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(rng.below(N - k));
    std::swap(pool[k], pool[j]);
  }
  pool.resize(K);
  IndexSet support = IndexSet::from_unsorted(std::move(pool));

  Mat X(N, L);
  for (std::size_t i : support) {
    for (std::size_t j = 0; j < L; ++j) {
      X(i, j) = (kind == SignalKind::Rademacher) ? rng.rademacher() : rng.normal();
    }
  }
  return JointSparseSignal{std::move(X), std::move(support), kind};
}

double noise_variance(std::size_t K, std::size_t M, double smnr_db) {
  if (std::isinf(smnr_db)) return 0.0;
  const double smnr_linear = std::pow(10.0, smnr_db / 10.0);
  return static_cast<double>(K) / (static_cast<double>(M) * smnr_linear);
}

Observation observe(const MeasurementMatrix& mm, const JointSparseSignal& sig,
                    double smnr_db, std::uint64_t seed) {
  if (mm.A.cols() != sig.X.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "observe: A cols != X rows");
  }
  const std::size_t L = sig.X.cols();
  Mat W(mm.M, L);
  const double var = noise_variance(sig.support.size(), mm.M, smnr_db);
  if (var > 0.0) {
    Rng rng(seed);
    const double sd = std::sqrt(var);
    for (std::size_t i = 0; i < mm.M; ++i) {
      for (std::size_t j = 0; j < L; ++j) W(i, j) = rng.normal() * sd;
    }
  }
  Mat B(mm.M, L);
  B.map() = mm.A.map() * sig.X.map() + W.map();
  return Observation{std::move(B), std::move(W), smnr_db};
}

double realized_smnr_db(const JointSparseSignal& sig, const Observation& obs) {
  const std::size_t L = sig.X.cols();
  double acc = 0.0;
  for (std::size_t j = 0; j < L; ++j) {
    double sx = 0.0, sw = 0.0;
    for (std::size_t i = 0; i < sig.X.rows(); ++i) sx += sig.X(i, j) * sig.X(i, j);
    for (std::size_t i = 0; i < obs.W.rows(); ++i) sw += obs.W(i, j) * obs.W(i, j);
    if (sw == 0.0) return std::numeric_limits<double>::infinity();
    acc += sx / sw;
  }
  return 10.0 * std::log10(acc / static_cast<double>(L));
}

Instance make_instance(const InstanceParams& p) {
  Instance inst;
  inst.params = p;
  inst.matrix = gen_matrix(p.M, p.N, derive_seed(p.seed, 0));
  inst.signal = gen_signal(p.N, p.K, p.L, p.kind, derive_seed(p.seed, 1));
  inst.obs = observe(inst.matrix, inst.signal, p.smnr_db, derive_seed(p.seed, 2));
  return inst;
}

}  // namespace mmvfacs
