#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "spars/signal.hpp"
#include "spars/sparse.hpp"
#include "support/oracles.hpp"

using namespace spars;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix A(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) A(i, j) = gauss(rng);
    return A;
}

void check_certificate(const SparseSolveReport& report) {
    CHECK(report.residual_frobenius <=
          report.certificate_alpha * report.delta +
              report.certificate_beta * report.projected_residual);
}

}  // namespace

TEST_CASE("thresholded_rank counts singular values above delta") {
    const ThresholdedRank identity = thresholded_rank(Matrix::Identity(3, 3), 0.5);
    CHECK(identity.rank == 3);
    CHECK(identity.singular_values.size() == 3);

    Matrix diag = Matrix::Zero(3, 3);
    diag.diagonal() << 3.0, 1.0, 0.1;
    CHECK(thresholded_rank(diag, 0.5).rank == 2);

    CHECK(thresholded_rank(Matrix::Zero(4, 2), 0.5).rank == 0);

    CHECK_THROWS_AS(thresholded_rank(Matrix(), 0.5), ShapeError);
    CHECK_THROWS_AS(thresholded_rank(Matrix::Identity(2, 2), 0.0), RangeError);
}

TEST_CASE("sparse_lsq solves an exactly consistent system") {
    Matrix A(3, 2);
    A << 1, 0, 0, 1, 0, 0;
    Vector y(3);
    y << 1, 2, 0;
    const SparseSolveReport report = sparse_lsq(A, y, 1e-8);
    CHECK(report.solution(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.solution(1, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(report.nnz == 2);
    CHECK(report.residual_frobenius <= 1e-12);
    check_certificate(report);
}

TEST_CASE("sparse_lsq uses one column when columns are duplicated") {
    Matrix A(2, 2);
    A << 1, 1, 1, 1;
    Vector y(2);
    y << 2, 2;
    const SparseSolveReport report = sparse_lsq(A, y, 1e-8);
    CHECK(report.nnz == 1);
    CHECK(report.residual_frobenius <= 1e-12);
    // lowest index wins the correlation tie
    CHECK(report.solution(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(report.solution(1, 0) == 0.0);
}

TEST_CASE("sparse_lsq recovers a planted sparse solution") {
    std::mt19937_64 rng(11);
    const Matrix A = random_matrix(6, 4, rng);
    Vector coefficients(4);
    coefficients << 0, 3, 0, 0;
    const Vector y = A * coefficients;
    const SparseSolveReport report = sparse_lsq(A, y, 1e-8);
    CHECK(report.nnz == 1);
    CHECK(report.solution(1, 0) == doctest::Approx(3.0).epsilon(1e-8));

    // exhaustive support enumeration finds the same single-column support
    const oracles::BestSupport best = oracles::exhaustive_sparse_lsq(A, y, 2);
    REQUIRE(best.support.size() == 1);
    CHECK(best.support[0] == 1);
}

TEST_CASE("sparse_lsq error paths") {
    CHECK_THROWS_AS(sparse_lsq(Matrix::Identity(3, 3), Vector::Ones(2), 1e-8), ShapeError);
    CHECK_THROWS_AS(sparse_lsq(Matrix::Zero(3, 3), Vector::Ones(3), 1e-8),
                    RankDeficiencyError);
    CHECK_THROWS_AS(sparse_lsq(Matrix::Identity(3, 3), Vector::Ones(3), -1.0), RangeError);
}

TEST_CASE("certificate inequality holds as stored on random instances") {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> dim(1, 8);
    std::uniform_real_distribution<double> delta_dist(-6.0, 0.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int m = dim(rng) + 1;
        const int n = dim(rng);
        const int p = 1 + dim(rng) / 3;
        const Matrix A = random_matrix(m, n, rng);
        const Matrix Y = random_matrix(m, p, rng);
        const double delta = std::pow(10.0, delta_dist(rng));
        const ThresholdedRank rk = thresholded_rank(A, delta);
        if (rk.rank == 0) continue;
        const SparseSolveReport report = sparse_lsq(A, Y, delta);
        check_certificate(report);

        // per-column support bound
        for (Eigen::Index j = 0; j < report.solution.cols(); ++j)
            CHECK((report.solution.col(j).array() != 0.0).count() <= rk.rank);
    }
}

TEST_CASE("greedy residual is monotone in the support budget") {
    std::mt19937_64 rng(31);
    const Matrix A = random_matrix(10, 6, rng);
    const Vector y = random_matrix(10, 1, rng);
    double previous = y.norm();
    for (Eigen::Index budget = 1; budget <= 6; ++budget) {
        const SparseSolveReport report = sparse_lsq(A, y, 1e-10, budget);
        CHECK(report.residual_frobenius <= previous + 1e-12);
        previous = report.residual_frobenius;
    }
}

TEST_CASE("full-budget solution matches dense least squares") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix A = random_matrix(12, 5, rng);
        const Vector y = random_matrix(12, 1, rng);
        const SparseSolveReport report = sparse_lsq(A, y, 1e-12, 5);
        const Vector dense = A.colPivHouseholderQr().solve(y);
        CHECK((report.solution.col(0) - dense).norm() <= 1e-10 * (1.0 + dense.norm()));
    }
}

TEST_CASE("sparsify_matrix respects the M * rk bound") {
    // rank-1 trajectory matrix of a constant series
    const TrajectoryMatrix H_const = hankel(TimeSeries(Vector::Constant(12, 2.0)), 4);
    std::mt19937_64 rng(41);
    const Matrix A = random_matrix(4, 2, rng);
    const SparseSolveReport report = sparsify_matrix(H_const, A, 1e-8);
    CHECK(thresholded_rank(H_const.data, 1e-8).rank == 1);
    CHECK(report.nnz <= 2);
    // every column of H^T A is a multiple of the single left direction of H^T,
    // so one selected column reproduces it
    CHECK(report.residual_frobenius <= 1e-10);
    check_certificate(report);

    // period-2 series with asymmetric values: rk_delta = 2
    // (a pure +-1 alternation has collinear windows and rank 1)
    Vector alt(16);
    for (int t = 0; t < 16; ++t) alt[t] = (t % 2 == 0) ? 1.0 : -0.4;
    const TrajectoryMatrix H_alt = hankel(TimeSeries(alt), 5);
    CHECK(thresholded_rank(H_alt.data, 1e-8).rank == 2);
    const Matrix A3 = random_matrix(5, 3, rng);
    const SparseSolveReport alt_report = sparsify_matrix(H_alt, A3, 1e-8);
    CHECK(alt_report.nnz <= 6);
    CHECK(alt_report.residual_frobenius <= 1e-8);
    check_certificate(alt_report);

    // full-rank trajectory matrix: bound is vacuous, certificate still holds
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector noise(20);
    for (int i = 0; i < 20; ++i) noise[i] = gauss(rng);
    const TrajectoryMatrix H_full = hankel(TimeSeries(noise), 4);
    const Matrix A4 = random_matrix(4, 3, rng);
    const ThresholdedRank rk = thresholded_rank(H_full.data, 1e-8);
    const SparseSolveReport full_report = sparsify_matrix(H_full, A4, 1e-8);
    CHECK(full_report.nnz <= 3 * rk.rank);
    check_certificate(full_report);

    CHECK_THROWS_AS(sparsify_matrix(H_const, A, 1e6), RankDeficiencyError);
}
