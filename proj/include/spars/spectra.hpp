#pragma once

#include <Eigen/Dense>

#include "spars/linear_ar.hpp"
#include "spars/series.hpp"
#include "spars/signal.hpp"

namespace spars {

/// Compression of the companion matrix onto the Krylov subspace spanned by
/// {x, Cx, C^2 x, ...}: section = W^T C W with W^T W = I_k.
struct ApSection {
    Matrix W;        // L x k, orthonormal columns
    Matrix section;  // k x k
    Eigen::Index k = 0;
    Eigen::Index T = 1;  // approximate period used to bound the Krylov dimension
    Eigen::Index s = 0;  // anchor index of the start window (1-based)
};

/// Eigenvalue diagnostics of a section. For a signal whose tail the linear
/// model captures, eigenvalues should sit near T-th roots of unity, the
/// T-th power of the section near the identity, and its spectrum near 1.
struct SpectrumReport {
    ComplexVector eigenvalues;          // k values, with multiplicity
    ComplexVector powered_eigenvalues;  // z^T per eigenvalue
    double max_unit_root_defect = 0.0;  // max |z^T - 1|
    double mimicry_norm = 0.0;          // ||section^T - I_k||_2
    double spectral_radius = 0.0;
    bool inside_unit_disk = true;       // radius <= 1 + kUnitDiskTol
};

/// Diagnosis of a fitted model against a signal: AEP profile, section and
/// spectrum, plus flags for the fallback paths.
struct ApDiagnosis {
    AepProfile profile;
    ApSection section;
    SpectrumReport report;
    bool tail_detected = true;    // false when the AEP inequality never held
    bool anchor_fallback = false; // true when S + L - 1 exceeded the sample
};

inline constexpr double kUnitDiskTol = 1e-6;

/// Arnoldi build of the section: modified Gram-Schmidt with one
/// reorthogonalization pass, stopping at T vectors or at breakdown
/// (new-vector norm <= 1e-10 * initial norm).
ApSection krylov_section(const CompanionMatrix& C, const WindowVector& x, Eigen::Index T);

SpectrumReport spectrum_report(const ApSection& sec);

/// Estimate (T, S) from the signal, anchor the window at s = S + L - 1 and
/// report the spectrum of the resulting section.
ApDiagnosis ap_diagnose(const ArCoefficients& ar, const TimeSeries& series, double epsilon);

}  // namespace spars
