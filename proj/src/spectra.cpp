#include "spars/spectra.hpp"

#include <cmath>
#include <complex>
#include <string>

namespace spars {

namespace {

constexpr double kBreakdownTol = 1e-10;

}  // namespace

ApSection krylov_section(const CompanionMatrix& C, const WindowVector& x, Eigen::Index T) {
    const Eigen::Index L = C.L();
    if (x.lag() != L)
        throw ShapeError("krylov_section: window length " + std::to_string(x.lag()) +
                         " does not match L = " + std::to_string(L));
    if (T < 1)
        throw RangeError("krylov_section: T must be >= 1");
    const double initial_norm = x.entries.norm();
    if (initial_norm == 0.0)
        throw DegenerateInputError("krylov_section: zero start vector");

    Matrix W(L, std::min(T, L));
    W.col(0) = x.entries / initial_norm;
    Eigen::Index k = 1;
    while (k < std::min(T, L)) {
        Vector v = C.data * W.col(k - 1);
        // modified Gram-Schmidt, then one reorthogonalization pass
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index j = 0; j < k; ++j) v -= W.col(j).dot(v) * W.col(j);
        const double norm = v.norm();
        if (norm <= kBreakdownTol * initial_norm) break;
        W.col(k) = v / norm;
        ++k;
    }

    ApSection sec;
    sec.W = W.leftCols(k);
    sec.section = sec.W.transpose() * C.data * sec.W;
    sec.k = k;
    sec.T = T;
    sec.s = x.t;
    return sec;
}

SpectrumReport spectrum_report(const ApSection& sec) {
    if (sec.k < 1 || sec.section.rows() != sec.k || sec.section.cols() != sec.k)
        throw ShapeError("spectrum_report: invalid section");
    Eigen::ComplexEigenSolver<Matrix> eig(sec.section);
    if (eig.info() != Eigen::Success)
        throw DegenerateInputError("spectrum_report: eigensolver failed");

    SpectrumReport report;
    report.eigenvalues = eig.eigenvalues();
    report.powered_eigenvalues.resize(sec.k);
    report.max_unit_root_defect = 0.0;
    report.spectral_radius = 0.0;
    for (Eigen::Index i = 0; i < sec.k; ++i) {
        const std::complex<double> z = report.eigenvalues[i];
        const std::complex<double> zT = std::pow(z, static_cast<double>(sec.T));
        report.powered_eigenvalues[i] = zT;
        report.max_unit_root_defect =
            std::max(report.max_unit_root_defect, std::abs(zT - 1.0));
        report.spectral_radius = std::max(report.spectral_radius, std::abs(z));
    }
    const Matrix powered = matrix_power(sec.section, sec.T);
    const Matrix defect = powered - Matrix::Identity(sec.k, sec.k);
    report.mimicry_norm = defect.jacobiSvd().singularValues()[0];  // spectral norm
    report.inside_unit_disk = report.spectral_radius <= 1.0 + kUnitDiskTol;
    return report;
}

ApDiagnosis ap_diagnose(const ArCoefficients& ar, const TimeSeries& series, double epsilon) {
    ApDiagnosis diagnosis;
    diagnosis.profile = estimate_period(series, epsilon);
    diagnosis.tail_detected = diagnosis.profile.satisfied;

    const Eigen::Index L = ar.L;
    const Eigen::Index n = series.length();
    // anchor the first tail window; fall back to the last full window
    Eigen::Index s = diagnosis.tail_detected ? diagnosis.profile.S + L - 1 : n;
    if (s > n) {
        s = n;
        diagnosis.anchor_fallback = true;
    }
    if (s < L)
        throw RangeError("ap_diagnose: series does not cover one window of length L");

    const CompanionMatrix C = companion(ar);
    diagnosis.section = krylov_section(C, window(series, L, s), diagnosis.profile.T);
    diagnosis.report = spectrum_report(diagnosis.section);
    return diagnosis;
}

}  // namespace spars
