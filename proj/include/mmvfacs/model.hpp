#pragma once

#include <cstdint>
#include <string>

#include "mmvfacs/mat.hpp"

namespace mmvfacs {

enum class SignalKind { Gaussian, Rademacher, Arbitrary };

const char* to_string(SignalKind kind);
SignalKind signal_kind_from_string(const std::string& s);

// M×N sensing operator with unit-norm columns.
struct MeasurementMatrix {
  Mat A;
  std::size_t M = 0;
  std::size_t N = 0;
};

// N×L signal whose nonzero rows sit exactly on `support`.
struct JointSparseSignal {
  Mat X;
  IndexSet support;
  SignalKind kind = SignalKind::Gaussian;
};

// B = A·X + W; smnr_db is +inf for noiseless observations.
struct Observation {
  Mat B;
  Mat W;
  double smnr_db = 0.0;
};

// Entries i.i.d. N(0, 1/M), then each column scaled to unit l2 norm.
MeasurementMatrix gen_matrix(std::size_t M, std::size_t N, std::uint64_t seed);

// Support drawn uniformly without replacement; nonzero rows filled i.i.d.
// N(0,1) (Gaussian) or ±1 equiprobable (Rademacher).
JointSparseSignal gen_signal(std::size_t N, std::size_t K, std::size_t L,
                             SignalKind kind, std::uint64_t seed);

// Per-entry noise variance targeted at `smnr_db` in expectation:
// sigma² = K / (M · 10^(smnr_db/10)), using expected signal column energy K.
double noise_variance(std::size_t K, std::size_t M, double smnr_db);

Observation observe(const MeasurementMatrix& mm, const JointSparseSignal& sig,
                    double smnr_db, std::uint64_t seed);

// Mean over columns of ‖x‖²/‖w‖² in dB; +inf when noiseless.
double realized_smnr_db(const JointSparseSignal& sig, const Observation& obs);

struct InstanceParams {
  std::size_t M = 0, N = 0, K = 0, L = 1;
  SignalKind kind = SignalKind::Gaussian;
  double smnr_db = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
};

struct Instance {
  InstanceParams params;
  MeasurementMatrix matrix;
  JointSparseSignal signal;
  Observation obs;
};

// Deterministic instance from one seed; sub-seeds for (A, X, W) are derived
// with derive_seed(seed, {0,1,2}).
Instance make_instance(const InstanceParams& p);

}  // namespace mmvfacs
