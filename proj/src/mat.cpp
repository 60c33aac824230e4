#include "mmvfacs/mat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace mmvfacs {

namespace {

void check_finite(const std::vector<double>& data) {
  for (double v : data) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NonFinite, "matrix entry is NaN or Inf");
    }
  }
}

}  // namespace

Mat::Mat(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorCode::DimensionMismatch,
                "data length " + std::to_string(data_.size()) + " != " +
                    std::to_string(rows_) + "x" + std::to_string(cols_));
  }
  check_finite(data_);
}

Mat::Mat(std::initializer_list<std::initializer_list<double>> init) {
  rows_ = init.size();
  cols_ = rows_ ? init.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : init) {
    if (r.size() != cols_) {
      throw Error(ErrorCode::DimensionMismatch, "ragged initializer rows");
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
  check_finite(data_);
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::from_eigen(const Eigen::Ref<const EigenRowMat>& e) {
  Mat m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  Eigen::Map<EigenRowMat>(m.data().data(), e.rows(), e.cols()) = e;
  check_finite(m.data());
  return m;
}

IndexSet::IndexSet(std::vector<std::size_t> sorted_unique)
    : idx_(std::move(sorted_unique)) {
  for (std::size_t k = 1; k < idx_.size(); ++k) {
    if (idx_[k - 1] >= idx_[k]) {
      throw Error(ErrorCode::InvalidArgument,
                  "index set must be strictly increasing");
    }
  }
}

IndexSet IndexSet::from_unsorted(std::vector<std::size_t> indices) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  IndexSet s;
  s.idx_ = std::move(indices);
  return s;
}

bool IndexSet::contains(std::size_t i) const {
  return std::binary_search(idx_.begin(), idx_.end(), i);
}

std::size_t IndexSet::intersection_size(const IndexSet& other) const {
  std::size_t n = 0, a = 0, b = 0;
  while (a < idx_.size() && b < other.idx_.size()) {
    if (idx_[a] == other.idx_[b]) {
      ++n, ++a, ++b;
    } else if (idx_[a] < other.idx_[b]) {
      ++a;
    } else {
      ++b;
    }
  }
  return n;
}

IndexSet IndexSet::set_union(const IndexSet& other) const {
  std::vector<std::size_t> out;
  out.reserve(idx_.size() + other.idx_.size());
  std::set_union(idx_.begin(), idx_.end(), other.idx_.begin(), other.idx_.end(),
                 std::back_inserter(out));
  IndexSet s;
  s.idx_ = std::move(out);
  return s;
}

IndexSet IndexSet::set_minus(const IndexSet& other) const {
  std::vector<std::size_t> out;
  std::set_difference(idx_.begin(), idx_.end(), other.idx_.begin(),
                      other.idx_.end(), std::back_inserter(out));
  IndexSet s;
  s.idx_ = std::move(out);
  return s;
}

std::size_t IndexSet::position_of(std::size_t i) const {
  auto it = std::lower_bound(idx_.begin(), idx_.end(), i);
  if (it == idx_.end() || *it != i) {
    throw Error(ErrorCode::InvalidArgument,
                "index " + std::to_string(i) + " not in set");
  }
  return static_cast<std::size_t>(it - idx_.begin());
}

void IndexSet::check_ambient(std::size_t ambient) const {
  if (!idx_.empty() && idx_.back() >= ambient) {
    throw Error(ErrorCode::DimensionMismatch,
                "index " + std::to_string(idx_.back()) +
                    " out of range for dimension " + std::to_string(ambient));
  }
}

// --- kernels ---------------------------------------------------------------

Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "matmul inner dimensions");
  }
  Mat out(a.rows(), b.cols());
  out.map() = a.map() * b.map();
  return out;
}

Mat transpose_mul(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "transpose_mul row counts");
  }
  Mat out(a.cols(), b.cols());
  out.map() = a.map().transpose() * b.map();
  return out;
}

Mat sub(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "sub shapes");
  }
  Mat out(a.rows(), a.cols());
  out.map() = a.map() - b.map();
  return out;
}

Mat scale(const Mat& a, double s) {
  Mat out(a.rows(), a.cols());
  out.map() = a.map() * s;
  return out;
}

double fro_norm(const Mat& x) { return x.map().norm(); }

Mat columns(const Mat& a, const IndexSet& idx) {
  idx.check_ambient(a.cols());
  Mat out(a.rows(), idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    for (std::size_t i = 0; i < a.rows(); ++i) out(i, k) = a(i, idx[k]);
  }
  return out;
}

Mat rows(const Mat& x, const IndexSet& idx) {
  idx.check_ambient(x.rows());
  Mat out(idx.size(), x.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    for (std::size_t j = 0; j < x.cols(); ++j) out(k, j) = x(idx[k], j);
  }
  return out;
}

Mat rows_complement(const Mat& x, const IndexSet& idx) {
  idx.check_ambient(x.rows());
  Mat out(x.rows() - idx.size(), x.cols());
  std::size_t r = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (idx.contains(i)) continue;
    for (std::size_t j = 0; j < x.cols(); ++j) out(r, j) = x(i, j);
    ++r;
  }
  return out;
}

Mat scatter_rows(const Mat& compact, const IndexSet& idx, std::size_t n_rows) {
  if (compact.rows() != idx.size()) {
    throw Error(ErrorCode::DimensionMismatch, "scatter_rows index count");
  }
  idx.check_ambient(n_rows);
  Mat out(n_rows, compact.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    for (std::size_t j = 0; j < compact.cols(); ++j) {
      out(idx[k], j) = compact(k, j);
    }
  }
  return out;
}

std::vector<double> row_l2_norms(const Mat& x) {
  std::vector<double> norms(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) s += x(i, j) * x(i, j);
    norms[i] = std::sqrt(s);
  }
  return norms;
}

double mixed_norm(const Mat& x, double p, double q) {
  if (p < 1.0 || q < 1.0) {
    throw Error(ErrorCode::InvalidArgument, "mixed_norm requires p,q >= 1");
  }
  const bool p_inf = std::isinf(p);
  const bool q_inf = std::isinf(q);
  std::vector<double> rp(x.rows(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (p_inf) {
      double m = 0.0;
      for (std::size_t j = 0; j < x.cols(); ++j) m = std::max(m, std::abs(x(i, j)));
      rp[i] = m;
    } else if (p == 2.0) {
      double s = 0.0;
      for (std::size_t j = 0; j < x.cols(); ++j) s += x(i, j) * x(i, j);
      rp[i] = std::sqrt(s);
    } else {
      double s = 0.0;
      for (std::size_t j = 0; j < x.cols(); ++j) s += std::pow(std::abs(x(i, j)), p);
      rp[i] = std::pow(s, 1.0 / p);
    }
  }
  if (q_inf) {
    double m = 0.0;
    for (double v : rp) m = std::max(m, v);
    return m;
  }
  if (q == 2.0) {
    double s = 0.0;
    for (double v : rp) s += v * v;
    return std::sqrt(s);
  }
  double s = 0.0;
  for (double v : rp) s += std::pow(v, q);
  return std::pow(s, 1.0 / q);
}

IndexSet top_k_rows(const std::vector<double>& norms, std::size_t k) {
  if (k > norms.size()) {
    throw Error(ErrorCode::InvalidArgument, "top_k_rows: k exceeds row count");
  }
  std::vector<std::size_t> order(norms.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (norms[a] != norms[b]) return norms[a] > norms[b];
    return a < b;
  });
  order.resize(k);
  return IndexSet::from_unsorted(std::move(order));
}

IndexSet top_k_rows(const Mat& x, std::size_t k) {
  return top_k_rows(row_l2_norms(x), k);
}

Mat best_k_rows(const Mat& x, std::size_t k) {
  IndexSet keep = top_k_rows(x, k);
  Mat out(x.rows(), x.cols());
  for (std::size_t i : keep) {
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = x(i, j);
  }
  return out;
}

namespace {

// Shared SVD-based solver. `require_full_rank` distinguishes lstsq from the
// minimum-norm fallback.
Mat svd_solve(const Mat& a_sub, const Mat& b, double rtol, bool require_full_rank) {
  if (a_sub.rows() != b.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "lstsq: A has " + std::to_string(a_sub.rows()) + " rows, B has " +
                    std::to_string(b.rows()));
  }
  if (a_sub.cols() == 0) return Mat(0, b.cols());

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      a_sub.map(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  const double cutoff = rtol * smax;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff && sv(i) > 0.0) ++rank;
  }
  if (require_full_rank && rank < static_cast<Eigen::Index>(a_sub.cols())) {
    throw Error(ErrorCode::RankDeficient,
                "numerical rank " + std::to_string(rank) + " < " +
                    std::to_string(a_sub.cols()) + " columns");
  }
  // x = V Σ⁺ Uᵀ b, truncated at the rank cutoff.
  Eigen::MatrixXd ub = svd.matrixU().leftCols(rank).transpose() * b.map();
  for (Eigen::Index i = 0; i < rank; ++i) ub.row(i) /= sv(i);
  Mat out(a_sub.cols(), b.cols());
  out.map() = svd.matrixV().leftCols(rank) * ub;
  return out;
}

}  // namespace

Mat lstsq(const Mat& a_sub, const Mat& b, double rtol) {
  return svd_solve(a_sub, b, rtol, /*require_full_rank=*/true);
}

Mat lstsq_minnorm(const Mat& a_sub, const Mat& b, double rtol) {
  return svd_solve(a_sub, b, rtol, /*require_full_rank=*/false);
}

}  // namespace mmvfacs
