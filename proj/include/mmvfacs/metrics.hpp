#pragma once

#include "mmvfacs/mat.hpp"

namespace mmvfacs {

// ‖X‖_F² / ‖X−X̂‖_F²; returns +inf when the error energy is below 1e-30.
double srer(const Mat& x, const Mat& x_hat);

inline double to_db(double ratio) { return 10.0 * std::log10(ratio); }

struct SupportScore {
  double precision = 0.0;  // |T̂∩T| / K
  double recall = 0.0;     // |T̂∩T| / |T|
};
SupportScore support_score(const IndexSet& estimated, const IndexSet& truth,
                           std::size_t K);

}  // namespace mmvfacs
