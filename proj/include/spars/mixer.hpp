#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "spars/gru.hpp"
#include "spars/linear_ar.hpp"
#include "spars/series.hpp"
#include "spars/spectra.hpp"

namespace spars {

/// Affine map taking the training split into [-1, 1]; inverted at prediction
/// time. A constant split degenerates to pure centering (scale 1).
struct Normalization {
    double scale = 1.0;
    double offset = 0.0;

    double normalize(double x) const { return (x - offset) / scale; }
    double denormalize(double y) const { return y * scale + offset; }
    Vector normalize(const Vector& x) const { return (x.array() - offset) / scale; }

    static Normalization fit(const Vector& values);
};

struct SparsFitConfig {
    std::optional<Eigen::Index> lag_override;
    double delta = 1e-8;
    double fit_fraction = 0.5;   // fitting split for the blocks
    double mix_fraction = 0.25;  // split for the mixing weights
    Eigen::Index gru_blocks = 2;
    GruTrainConfig gru;
};

/// Per-stage residuals and nonzero counts, appended in execution order.
struct SparsFitReport {
    Eigen::Index L = 0;
    bool lag_fallback = false;
    double ar_residual = 0.0;
    Eigen::Index ar_nnz = 0;
    std::vector<double> gru_final_mse;
    std::vector<Eigen::Index> gru_input_nnz;
    double mix_residual = 0.0;
    Eigen::Index mix_nnz = 0;
    std::vector<std::string> stage_order;
};

/// Fitted semilinear sparse model: sparse AR block, GRU blocks and the fitted
/// mixing weights (mix[0] multiplies the linear block's output).
struct SparsModel {
    ArCoefficients ar;
    std::vector<GruParams> gru_blocks;
    Vector mix;
    Eigen::Index L = 0;
    Normalization normalization;
    SparsFitReport fit_report;
};

struct ForecastResult {
    std::vector<double> predictions;
    std::vector<double> per_step_abs_error;  // empty without truth
    double rmse = 0.0;
};

/// Run the fitting pipeline: lag estimate, sparse AR fit, GRU block training,
/// input-weight sparsification of the first block, then the sparse mixing fit
/// on the held-aside split.
SparsModel fit_spars(const TimeSeries& series, const SparsFitConfig& config);

/// Sparse fit of the mixing weights from a column-per-block prediction matrix
/// against the true next values.
Vector fit_mixing_weights(const Matrix& block_predictions, const Vector& targets,
                          double delta);

/// Per-block predictions for every window t = L .. N-1 of the (already
/// normalized) series; column 0 is the linear block, then one column per GRU
/// block with its hidden state threaded from the first window.
Matrix block_prediction_matrix(const ArCoefficients& ar,
                               const std::vector<GruParams>& gru_blocks,
                               const TimeSeries& normalized_series, Eigen::Index L);

/// Mixed one-step prediction from a raw window (normalized internally,
/// denormalized on return). GRU blocks step from a zero hidden state.
double predict_one(const SparsModel& model, const WindowVector& w);

/// Closed-loop forecast: each prediction is appended to the window for the
/// next step; GRU hidden states persist across steps. Throws DivergenceError
/// with the step index if a prediction becomes non-finite.
ForecastResult rolling_forecast(const SparsModel& model, const WindowVector& seed_window,
                                Eigen::Index horizon,
                                const std::optional<TimeSeries>& truth = std::nullopt);

/// One-step-ahead predictions of x_{t+1} for t+1 in [first, last] (1-based),
/// using true windows; the standard held-out evaluation.
ForecastResult evaluate_one_step(const SparsModel& model, const TimeSeries& series,
                                 Eigen::Index first, Eigen::Index last);

/// Spectrum diagnosis of the model's linear component: (T, S) estimated on the
/// raw series, the anchor window taken from the normalized series.
ApDiagnosis ap_diagnose(const SparsModel& model, const TimeSeries& series, double epsilon);

/// JSON container with an explicit format version; round-trips every
/// parameter array bit-exactly.
void save_model(const SparsModel& model, const std::string& path);
SparsModel load_model(const std::string& path);

}  // namespace spars
