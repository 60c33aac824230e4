#include "mmvfacs/metrics.hpp"

#include <cmath>
#include <limits>

namespace mmvfacs {

double srer(const Mat& x, const Mat& x_hat) {
  const double sig = fro_norm(x);
  if (sig == 0.0) {
    throw Error(ErrorCode::ZeroSignal, "srer of an all-zero signal");
  }
  const double err = std::pow(fro_norm(sub(x, x_hat)), 2);
  if (err < 1e-30) return std::numeric_limits<double>::infinity();
  return sig * sig / err;
}

SupportScore support_score(const IndexSet& estimated, const IndexSet& truth,
                           std::size_t K) {
  SupportScore s;
  const auto hits = static_cast<double>(estimated.intersection_size(truth));
  s.precision = (K > 0) ? hits / static_cast<double>(K) : 1.0;
  s.recall = truth.empty() ? 1.0 : hits / static_cast<double>(truth.size());
  return s;
}

}  // namespace mmvfacs
