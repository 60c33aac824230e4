#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mmvfacs/mat.hpp"
#include "oracles.hpp"

using namespace mmvfacs;

TEST_CASE("Mat construction enforces invariants") {
  CHECK_THROWS_AS(Mat(2, 2, {1.0, 2.0, 3.0}), Error);
  CHECK_THROWS_AS(Mat(1, 2, {1.0, std::nan("")}), Error);
  CHECK_THROWS_AS(Mat(1, 2, {1.0, std::numeric_limits<double>::infinity()}),
                  Error);
  Mat m{{1.0, 2.0}, {3.0, 4.0}};
  CHECK(m(1, 0) == 3.0);
}

TEST_CASE("IndexSet canonical form and set algebra") {
  CHECK_THROWS_AS(IndexSet({3, 1}), Error);
  CHECK_THROWS_AS(IndexSet({1, 1}), Error);
  IndexSet s = IndexSet::from_unsorted({4, 1, 4, 2});
  CHECK(s.indices() == std::vector<std::size_t>{1, 2, 4});
  CHECK(s.contains(2));
  CHECK(!s.contains(3));
  CHECK(s.position_of(4) == 2);
  IndexSet t{2, 3};
  CHECK(s.set_union(t).indices() == std::vector<std::size_t>{1, 2, 3, 4});
  CHECK(s.set_minus(t).indices() == std::vector<std::size_t>{1, 4});
  CHECK(s.intersection_size(t) == 1);
  CHECK_THROWS_AS(s.check_ambient(4), Error);
}

TEST_CASE("lstsq identity case") {
  Mat a = Mat::identity(2);
  Mat b{{3.0, 1.0}, {-2.0, 5.0}};
  Mat x = lstsq(a, b);
  CHECK(fro_norm(sub(x, b)) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("lstsq averages two copies of one equation") {
  Mat a{{1.0}, {1.0}};
  Mat b{{1.0}, {3.0}};
  Mat x = lstsq(a, b);
  CHECK(x(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("lstsq matches the normal-equations oracle on well-conditioned input") {
  Mat a = oracles::random_mat(8, 3, 11);
  Mat b = oracles::random_mat(8, 2, 12);
  Mat x = lstsq(a, b);
  Mat ref = oracles::lstsq_normal_equations(a, b);
  CHECK(fro_norm(sub(x, ref)) <= 1e-10);
}

TEST_CASE("lstsq rejects rank-deficient systems; minnorm does not") {
  Mat a(4, 2);
  for (std::size_t i = 0; i < 4; ++i) {
    a(i, 0) = static_cast<double>(i + 1);
    a(i, 1) = 2.0 * static_cast<double>(i + 1);  // duplicate direction
  }
  Mat b = oracles::random_mat(4, 1, 13);
  CHECK_THROWS_AS(lstsq(a, b), Error);
  Mat x = lstsq_minnorm(a, b);
  CHECK(x.rows() == 2);
  // Minimum-norm solution still minimizes the residual over the column span.
  Mat ax = matmul(a, x);
  Mat col(4, 1);
  for (std::size_t i = 0; i < 4; ++i) col(i, 0) = a(i, 0);
  Mat proj = matmul(col, lstsq(col, b));
  CHECK(fro_norm(sub(ax, proj)) <= 1e-10);
}

TEST_CASE("lstsq residual is orthogonal to the column span") {
  for (std::uint64_t seed : {21, 22, 23, 24}) {
    Mat a = oracles::random_mat(10, 4, seed);
    Mat b = oracles::random_mat(10, 3, seed + 100);
    Mat x = lstsq(a, b);
    Mat resid = sub(b, matmul(a, x));
    Mat at_r = transpose_mul(a, resid);
    CHECK(fro_norm(at_r) <= 1e-8 * fro_norm(a) * fro_norm(b));
  }
}

TEST_CASE("row_l2_norms") {
  CHECK(row_l2_norms(Mat::zeros(3, 4)) == std::vector<double>{0.0, 0.0, 0.0});
  Mat x{{3.0, 4.0}, {0.0, 0.0}};
  auto norms = row_l2_norms(x);
  CHECK(norms[0] == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(norms[1] == 0.0);

  Mat r = oracles::random_mat(17, 5, 31);
  auto got = row_l2_norms(r);
  auto want = oracles::row_norms_direct(r);
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }
}

TEST_CASE("mixed_norm special cases") {
  CHECK(mixed_norm(Mat::identity(3), 2.0, 1.0) == doctest::Approx(3.0));
  Mat x{{3.0, 4.0}};
  CHECK(mixed_norm(x, 2.0, 1.0) == doctest::Approx(5.0));
  Mat r = oracles::random_mat(9, 6, 41);
  CHECK(mixed_norm(r, 2.0, 2.0) ==
        doctest::Approx(oracles::frobenius_direct(r)).epsilon(1e-12));
  CHECK_THROWS_AS(mixed_norm(r, 0.5, 1.0), Error);
}

TEST_CASE("norm ordering: (2,1) >= Frobenius >= (2,inf)") {
  const double inf = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed : {51, 52, 53, 54, 55}) {
    Mat x = oracles::random_mat(7, 4, seed);
    const double n21 = mixed_norm(x, 2.0, 1.0);
    const double nf = fro_norm(x);
    const double n2inf = mixed_norm(x, 2.0, inf);
    CHECK(n21 >= nf * (1.0 - 1e-12));
    CHECK(nf >= n2inf * (1.0 - 1e-12));
  }
}

TEST_CASE("top_k_rows selection and tie-breaking") {
  Mat x(4, 1);
  x(0, 0) = 1.0;
  x(1, 0) = 5.0;
  x(2, 0) = -5.0;
  x(3, 0) = 0.0;
  CHECK(top_k_rows(x, 2).indices() == std::vector<std::size_t>{1, 2});

  Mat ties(3, 2);
  for (std::size_t i = 0; i < 3; ++i) {
    ties(i, 0) = 2.0;
    ties(i, 1) = 0.0;
  }
  CHECK(top_k_rows(ties, 2).indices() == std::vector<std::size_t>{0, 1});

  Mat r = oracles::random_mat(50, 3, 61);
  CHECK(top_k_rows(r, 7) == oracles::top_k_by_sort(r, 7));

  // Determinism on identical bits.
  CHECK(top_k_rows(r, 7) == top_k_rows(r, 7));
  CHECK_THROWS_AS(top_k_rows(r, 51), Error);
}

TEST_CASE("best_k_rows zeroes everything but the top rows") {
  Mat r = oracles::random_mat(12, 4, 71);
  Mat bk = best_k_rows(r, 5);
  IndexSet keep = top_k_rows(r, 5);
  for (std::size_t i = 0; i < r.rows(); ++i) {
    for (std::size_t j = 0; j < r.cols(); ++j) {
      CHECK(bk(i, j) == (keep.contains(i) ? r(i, j) : 0.0));
    }
  }
}

TEST_CASE("scatter and gather row helpers") {
  Mat c{{1.0, 2.0}, {3.0, 4.0}};
  IndexSet idx{1, 3};
  Mat s = scatter_rows(c, idx, 5);
  CHECK(s.rows() == 5);
  CHECK(s(1, 0) == 1.0);
  CHECK(s(3, 1) == 4.0);
  CHECK(s(0, 0) == 0.0);
  CHECK(fro_norm(sub(rows(s, idx), c)) == 0.0);
  Mat comp = rows_complement(s, idx);
  CHECK(comp.rows() == 3);
  CHECK(fro_norm(comp) == 0.0);
}
