#include "mmvfacs/fusion.hpp"

#include <algorithm>
#include <string>

namespace mmvfacs {

IndexSet union_supports(std::span<const IndexSet> supports) {
  IndexSet out;
  for (const IndexSet& s : supports) out = out.set_union(s);
  return out;
}

namespace {

// Top-k by l2 row norm restricted to `candidates`; ties to the smaller index.
IndexSet top_k_within(const Mat& x, const IndexSet& candidates, std::size_t k) {
  std::vector<double> norms = row_l2_norms(x);
  std::vector<std::size_t> order(candidates.begin(), candidates.end());
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (norms[a] != norms[b]) return norms[a] > norms[b];
    return a < b;
  });
  order.resize(k);
  return IndexSet::from_unsorted(std::move(order));
}

// Least squares on the atom set; falls back to the minimum-norm solution when
// the sub-matrix is numerically rank deficient.
Mat solve_on(const Mat& A, const Mat& B, const IndexSet& atoms, bool& fell_back) {
  Mat a_sub = columns(A, atoms);
  try {
    return lstsq(a_sub, B);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::RankDeficient) throw;
    fell_back = true;
    return lstsq_minnorm(a_sub, B);
  }
}

}  // namespace

FusionOutput fuse(const Mat& A, const Mat& B, std::size_t K,
                  std::span<const IndexSet> supports, const FusionOptions& opts) {
  if (supports.size() < 2) {
    throw Error(ErrorCode::InvalidArgument,
                "fusion requires at least two participating supports");
  }
  const std::size_t M = A.rows();
  const std::size_t N = A.cols();

  FusionOutput out;
  out.gamma = union_supports(supports);
  out.gamma.check_ambient(N);
  if (out.gamma.size() < K) {
    throw Error(ErrorCode::InvalidSparsity,
                "union has fewer than K atoms (" +
                    std::to_string(out.gamma.size()) + " < " + std::to_string(K) +
                    ")");
  }
  if (out.gamma.size() > M) {
    if (!opts.prune_union) {
      throw Error(ErrorCode::UnionTooLarge,
                  "union size " + std::to_string(out.gamma.size()) +
                      " exceeds measurement count " + std::to_string(M));
    }
    // Keep the M atoms whose columns correlate most with B.
    Mat corr = transpose_mul(columns(A, out.gamma), B);
    IndexSet kept_positions = top_k_rows(corr, M);
    std::vector<std::size_t> kept;
    kept.reserve(M);
    for (std::size_t pos : kept_positions) kept.push_back(out.gamma[pos]);
    out.gamma = IndexSet::from_unsorted(std::move(kept));
    out.pruned = true;
  }

  Mat v_compact = solve_on(A, B, out.gamma, out.rank_fallback);
  out.V = scatter_rows(v_compact, out.gamma, N);
  out.support = top_k_within(out.V, out.gamma, K);
  Mat x_compact = solve_on(A, B, out.support, out.rank_fallback);
  out.X_hat = scatter_rows(x_compact, out.support, N);
  return out;
}

}  // namespace mmvfacs
