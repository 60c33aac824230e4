#pragma once

#include <span>
#include <vector>

#include "mmvfacs/mat.hpp"

namespace mmvfacs {

struct FusionOptions {
  // When the union exceeds M atoms, keep the M with the largest correlation
  // row norms instead of failing.
  bool prune_union = false;
};

struct FusionOutput {
  IndexSet gamma;    // union of the participating supports (possibly pruned)
  IndexSet support;  // final K-row support, subset of gamma
  Mat X_hat;         // N×L, zero off support
  Mat V;             // N×L least-squares solution on gamma, zero elsewhere
  bool pruned = false;
  bool rank_fallback = false;  // minimum-norm solve was needed
};

// Canonical sorted duplicate-free union.
IndexSet union_supports(std::span<const IndexSet> supports);

// Support fusion: union the P >= 2 participating support estimates, solve
// least squares on the union, keep the K rows of largest l2 norm, refit.
FusionOutput fuse(const Mat& A, const Mat& B, std::size_t K,
                  std::span<const IndexSet> supports,
                  const FusionOptions& opts = {});

}  // namespace mmvfacs
