#include "spars/linear_ar.hpp"

#include <string>

namespace spars {

namespace {

// Rows predict x_{L+j}; column i holds the lag-i regressor x_{L+j-i}, so the
// solved vector is already (c_1, ..., c_L).
struct ArSystem {
    Matrix design;
    Vector targets;
};

ArSystem ar_system(const TimeSeries& train, Eigen::Index L) {
    const Eigen::Index n = train.length();
    if (L < 1)
        throw RangeError("fit_ar: L must be >= 1");
    if (n < L + 2)
        throw RangeError("fit_ar: need at least L + 2 = " + std::to_string(L + 2) +
                         " samples, got " + std::to_string(n));
    const TrajectoryMatrix H = hankel(train.slice(1, n - 1), L);
    const Eigen::Index rows = H.data.cols();  // n - L
    ArSystem sys;
    sys.design.resize(rows, L);
    for (Eigen::Index i = 0; i < L; ++i)
        sys.design.col(i) = H.data.row(L - 1 - i).transpose();
    sys.targets = train.values().segment(L, rows);
    return sys;
}

}  // namespace

ArCoefficients fit_ar(const TimeSeries& train, Eigen::Index L, double delta) {
    const ArSystem sys = ar_system(train, L);
    const SparseSolveReport report = sparse_lsq(sys.design, sys.targets, delta);
    ArCoefficients coeffs;
    coeffs.c = report.solution.col(0);
    coeffs.L = L;
    coeffs.nnz = report.nnz;
    coeffs.delta = delta;
    return coeffs;
}

ArCoefficients fit_ar_dense(const TimeSeries& train, Eigen::Index L) {
    const ArSystem sys = ar_system(train, L);
    ArCoefficients coeffs;
    coeffs.c = sys.design.colPivHouseholderQr().solve(sys.targets);
    coeffs.L = L;
    coeffs.nnz = (coeffs.c.array() != 0.0).count();
    coeffs.delta = 0.0;
    return coeffs;
}

CompanionMatrix companion(const ArCoefficients& coeffs) {
    const Eigen::Index L = coeffs.L;
    if (L < 1 || coeffs.c.size() != L)
        throw ShapeError("companion: coefficient vector must have length L >= 1");
    CompanionMatrix C;
    C.data = Matrix::Zero(L, L);
    for (Eigen::Index i = 0; i + 1 < L; ++i)
        C.data(i, i + 1) = 1.0;
    C.data.row(L - 1) = coeffs.c.reverse().transpose();
    return C;
}

double predict_linear(const ArCoefficients& coeffs, const WindowVector& w) {
    if (w.lag() != coeffs.L)
        throw ShapeError("predict_linear: window length " + std::to_string(w.lag()) +
                         " does not match L = " + std::to_string(coeffs.L));
    // window is oldest-first, coefficients are most-recent-first
    return coeffs.c.dot(w.entries.reverse());
}

Matrix matrix_power(const Matrix& A, Eigen::Index power) {
    if (A.rows() != A.cols())
        throw ShapeError("matrix_power: matrix must be square");
    if (power < 0)
        throw RangeError("matrix_power: negative power");
    if (power <= 64) {
        Matrix result = Matrix::Identity(A.rows(), A.cols());
        for (Eigen::Index i = 0; i < power; ++i) result = result * A;
        return result;
    }
    Eigen::ComplexEigenSolver<Matrix> eig(A);
    if (eig.info() != Eigen::Success)
        throw DegenerateInputError("matrix_power: eigendecomposition failed");
    const Eigen::VectorXcd powered =
        eig.eigenvalues().array().pow(static_cast<double>(power));
    const Eigen::MatrixXcd V = eig.eigenvectors();
    return (V * powered.asDiagonal() * V.inverse()).real();
}

double shift_consistency(const ArCoefficients& coeffs, const TimeSeries& series,
                         Eigen::Index S) {
    const Eigen::Index n = series.length();
    const Eigen::Index L = coeffs.L;
    if (S < 1)
        throw RangeError("shift_consistency: S must be >= 1");
    if (n - S < L)
        throw RangeError("shift_consistency: series too short to form the shifted sample");
    const TimeSeries base = series.slice(1, n - S);
    const TimeSeries shifted = series.slice(S + 1, n);
    const Matrix Ht = hankel(base, L).data.transpose();
    const Matrix Ht_shifted = hankel(shifted, L).data.transpose();
    const Matrix Cs = matrix_power(companion(coeffs).data, S);
    return (Ht * Cs.transpose() - Ht_shifted).norm();
}

}  // namespace spars
