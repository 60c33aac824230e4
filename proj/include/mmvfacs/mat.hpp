#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

#include "mmvfacs/errors.hpp"

namespace mmvfacs {

using EigenRowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Dense real matrix, row-major, 64-bit entries. Entries are checked finite on
// construction; storage layout is fixed so CSV/JSON dumps are reproducible.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  Mat(std::size_t rows, std::size_t cols, std::vector<double> data);
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat zeros(std::size_t rows, std::size_t cols) { return Mat(rows, cols); }
  static Mat identity(std::size_t n);
  static Mat from_eigen(const Eigen::Ref<const EigenRowMat>& m);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const double& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  Eigen::Map<const EigenRowMat> map() const {
    return Eigen::Map<const EigenRowMat>(
        data_.data(), static_cast<Eigen::Index>(rows_),
        static_cast<Eigen::Index>(cols_));
  }
  Eigen::Map<EigenRowMat> map() {
    return Eigen::Map<EigenRowMat>(data_.data(),
                                   static_cast<Eigen::Index>(rows_),
                                   static_cast<Eigen::Index>(cols_));
  }

  bool operator==(const Mat& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Ordered, duplicate-free set of zero-based row/column indices.
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(std::vector<std::size_t> sorted_unique);
  IndexSet(std::initializer_list<std::size_t> sorted_unique)
      : IndexSet(std::vector<std::size_t>(sorted_unique)) {}

  static IndexSet from_unsorted(std::vector<std::size_t> indices);

  std::size_t size() const { return idx_.size(); }
  bool empty() const { return idx_.empty(); }
  std::size_t operator[](std::size_t k) const { return idx_[k]; }
  const std::vector<std::size_t>& indices() const { return idx_; }

  auto begin() const { return idx_.begin(); }
  auto end() const { return idx_.end(); }

  bool contains(std::size_t i) const;
  std::size_t intersection_size(const IndexSet& other) const;
  IndexSet set_union(const IndexSet& other) const;
  IndexSet set_minus(const IndexSet& other) const;
  // Position of index i within the set's canonical ordering.
  std::size_t position_of(std::size_t i) const;
  // Throws if any index >= ambient.
  void check_ambient(std::size_t ambient) const;

  bool operator==(const IndexSet& other) const = default;

 private:
  std::vector<std::size_t> idx_;
};

// Numerical-rank cutoff relative to the largest singular value.
inline constexpr double kRankRtol = 1e-10;

// --- core kernels ---------------------------------------------------------

Mat matmul(const Mat& a, const Mat& b);
// Aᵀ·B without forming Aᵀ.
Mat transpose_mul(const Mat& a, const Mat& b);
Mat sub(const Mat& a, const Mat& b);
Mat scale(const Mat& a, double s);
double fro_norm(const Mat& x);

// Column sub-matrix A[:, idx].
Mat columns(const Mat& a, const IndexSet& idx);
// Row sub-matrix X[idx, :].
Mat rows(const Mat& x, const IndexSet& idx);
// Complement rows X[idxᶜ, :].
Mat rows_complement(const Mat& x, const IndexSet& idx);
// N×cols matrix with `compact` placed on `idx` rows, zero elsewhere.
Mat scatter_rows(const Mat& compact, const IndexSet& idx, std::size_t n_rows);

std::vector<double> row_l2_norms(const Mat& x);
// (Σᵢ ‖Xᵢ,:‖_p^q)^(1/q); p or q may be +inf for the max norm.
double mixed_norm(const Mat& x, double p, double q);

// Indices of the K rows with largest ℓ2 norm, ties to the smaller index,
// result in canonical order.
IndexSet top_k_rows(const Mat& x, std::size_t k);
IndexSet top_k_rows(const std::vector<double>& norms, std::size_t k);
// X with all but its K largest-ℓ2-norm rows zeroed (same tie rule).
Mat best_k_rows(const Mat& x, std::size_t k);

// Least squares min ‖A_sub·X − B‖_F via SVD; requires full numerical column
// rank at rtol relative to the largest singular value.
Mat lstsq(const Mat& a_sub, const Mat& b, double rtol = kRankRtol);
// Minimum-norm least squares through a truncated SVD; never throws on rank.
Mat lstsq_minnorm(const Mat& a_sub, const Mat& b, double rtol = kRankRtol);

}  // namespace mmvfacs
