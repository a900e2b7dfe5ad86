#include "spars/mixer.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>

#include "spars/sparse.hpp"

namespace spars {

using nlohmann::json;

namespace {

// Rethrow a stage failure with the Algorithm step named, preserving the type.
template <typename Fn>
auto run_stage(const char* stage, Fn&& fn) {
    const auto tag = [stage](const char* what) {
        return "fit_spars [" + std::string(stage) + "]: " + what;
    };
    try {
        return fn();
    } catch (const RangeError& e) {
        throw RangeError(tag(e.what()));
    } catch (const ShapeError& e) {
        throw ShapeError(tag(e.what()));
    } catch (const DegenerateInputError& e) {
        throw DegenerateInputError(tag(e.what()));
    } catch (const RankDeficiencyError& e) {
        throw RankDeficiencyError(tag(e.what()));
    } catch (const TrainingError& e) {
        throw TrainingError(tag(e.what()), e.epoch);
    }
}

}  // namespace

Normalization Normalization::fit(const Vector& values) {
    Normalization norm;
    const double lo = values.minCoeff();
    const double hi = values.maxCoeff();
    norm.offset = 0.5 * (hi + lo);
    norm.scale = 0.5 * (hi - lo);
    if (norm.scale == 0.0) norm.scale = 1.0;
    return norm;
}

Vector fit_mixing_weights(const Matrix& block_predictions, const Vector& targets,
                          double delta) {
    if (block_predictions.rows() != targets.size())
        throw ShapeError("fit_mixing_weights: row count does not match targets");
    return sparse_lsq(block_predictions, targets, delta).solution.col(0);
}

Matrix block_prediction_matrix(const ArCoefficients& ar,
                               const std::vector<GruParams>& gru_blocks,
                               const TimeSeries& normalized_series, Eigen::Index L) {
    const std::vector<WindowVector> windows = training_windows(normalized_series, L);
    const Eigen::Index rows = static_cast<Eigen::Index>(windows.size());
    Matrix P(rows, static_cast<Eigen::Index>(gru_blocks.size()) + 1);
    for (Eigen::Index i = 0; i < rows; ++i)
        P(i, 0) = predict_linear(ar, windows[static_cast<std::size_t>(i)]);
    for (std::size_t k = 0; k < gru_blocks.size(); ++k) {
        const GruState h0{Vector::Zero(gru_blocks[k].m)};
        const std::vector<double> predictions = gru_forward(gru_blocks[k], windows, h0);
        for (Eigen::Index i = 0; i < rows; ++i)
            P(i, static_cast<Eigen::Index>(k) + 1) = predictions[static_cast<std::size_t>(i)];
    }
    return P;
}

SparsModel fit_spars(const TimeSeries& series, const SparsFitConfig& config) {
    const Eigen::Index n = series.length();
    SparsModel model;

    // step 0: lag
    if (config.lag_override) {
        model.L = *config.lag_override;
        if (model.L < 1) throw RangeError("fit_spars: lag override must be >= 1");
    } else {
        const LagEstimate lag = estimate_lag(series);
        model.L = lag.L;
        model.fit_report.lag_fallback = lag.fallback;
    }
    model.fit_report.L = model.L;
    model.fit_report.stage_order.push_back("lag_estimate");
    if (n < 4 * model.L)
        throw RangeError("fit_spars: need at least 4L = " + std::to_string(4 * model.L) +
                         " samples, got " + std::to_string(n));

    if (config.fit_fraction <= 0.0 || config.mix_fraction <= 0.0 ||
        config.fit_fraction + config.mix_fraction > 1.0)
        throw RangeError("fit_spars: split fractions must be positive and sum to <= 1");
    const Eigen::Index n_fit = static_cast<Eigen::Index>(
        std::floor(static_cast<double>(n) * config.fit_fraction));
    const Eigen::Index n_mix = static_cast<Eigen::Index>(
        std::floor(static_cast<double>(n) * config.mix_fraction));
    if (n_fit < 2 * model.L || n_mix < 1)
        throw RangeError("fit_spars: splits too small for lag L = " + std::to_string(model.L));

    const TimeSeries fit_split = series.slice(1, n_fit);
    model.normalization = Normalization::fit(fit_split.values());
    const TimeSeries normalized(model.normalization.normalize(series.values()), series.name());
    const TimeSeries normalized_fit = normalized.slice(1, n_fit);

    // step 1: sparse AR
    model.ar = run_stage("linear_ar",
                         [&] { return fit_ar(normalized_fit, model.L, config.delta); });
    {
        const std::vector<WindowVector> windows = training_windows(normalized_fit, model.L);
        const std::vector<double> targets = training_targets(normalized_fit, model.L);
        double ss = 0.0;
        for (std::size_t i = 0; i < windows.size(); ++i) {
            const double e = predict_linear(model.ar, windows[i]) - targets[i];
            ss += e * e;
        }
        model.fit_report.ar_residual = std::sqrt(ss);
        model.fit_report.ar_nnz = model.ar.nnz;
    }
    model.fit_report.stage_order.push_back("linear_ar");

    // step 2: GRU blocks, independent seeds
    const GruState h0{Vector::Zero(config.gru.hidden)};
    for (Eigen::Index k = 0; k < config.gru_blocks; ++k) {
        GruTrainConfig block_config = config.gru;
        block_config.seed = config.gru.seed + static_cast<std::uint64_t>(k);
        const std::string stage = "gru_block_" + std::to_string(k + 1);
        model.gru_blocks.push_back(run_stage(
            stage.c_str(), [&] { return train_gru(normalized_fit, model.L, block_config); }));
        model.fit_report.gru_final_mse.push_back(
            gru_sequence_mse(model.gru_blocks.back(), training_windows(normalized_fit, model.L),
                             training_targets(normalized_fit, model.L), h0));
        model.fit_report.stage_order.push_back(stage);
    }

    // step 3: sparsify the first block's input weights
    if (!model.gru_blocks.empty()) {
        const TrajectoryMatrix H = hankel(normalized_fit, model.L);
        model.gru_blocks[0] = run_stage("sparsify_input_weights", [&] {
            return sparsify_input_weights(model.gru_blocks[0], H, config.delta);
        });
        const Eigen::Index nnz = (model.gru_blocks[0].W_ir.array() != 0.0).count() +
                                 (model.gru_blocks[0].W_iz.array() != 0.0).count() +
                                 (model.gru_blocks[0].W_in.array() != 0.0).count();
        model.fit_report.gru_input_nnz.push_back(nnz);
        model.fit_report.stage_order.push_back("sparsify_input_weights");
    }

    // step 4: mixing weights on the held-aside split
    {
        const TimeSeries mix_region = normalized.slice(1, n_fit + n_mix);
        const Matrix P_full =
            block_prediction_matrix(model.ar, model.gru_blocks, mix_region, model.L);
        const std::vector<double> targets_full = training_targets(mix_region, model.L);
        // keep only rows whose target lies in the mixing split
        const Eigen::Index total = P_full.rows();
        const Eigen::Index keep = std::min(n_mix, total);
        const Matrix P = P_full.bottomRows(keep);
        Vector targets(keep);
        for (Eigen::Index i = 0; i < keep; ++i)
            targets[i] = targets_full[static_cast<std::size_t>(total - keep + i)];
        model.mix = run_stage("mixing",
                              [&] { return fit_mixing_weights(P, targets, config.delta); });
        model.fit_report.mix_residual = (P * model.mix - targets).norm();
        model.fit_report.mix_nnz = (model.mix.array() != 0.0).count();
        model.fit_report.stage_order.push_back("mixing");
    }
    return model;
}

namespace {

double mixed_prediction(const SparsModel& model, const Vector& normalized_window,
                        std::vector<GruState>& states) {
    if (model.mix.size() != static_cast<Eigen::Index>(model.gru_blocks.size()) + 1)
        throw ShapeError("SparsModel: expected " +
                         std::to_string(model.gru_blocks.size() + 1) + " mixing weights, have " +
                         std::to_string(model.mix.size()));
    WindowVector w;
    w.entries = normalized_window;
    w.t = 0;
    double y = model.mix[0] * predict_linear(model.ar, w);
    for (std::size_t k = 0; k < model.gru_blocks.size(); ++k) {
        states[k] = gru_step(model.gru_blocks[k], w, states[k]);
        const double block_out = model.gru_blocks[k].w_A.dot(states[k].h) +
                                 model.gru_blocks[k].b_A;
        y += model.mix[static_cast<Eigen::Index>(k) + 1] * block_out;
    }
    return y;
}

std::vector<GruState> zero_states(const SparsModel& model) {
    std::vector<GruState> states;
    for (const GruParams& block : model.gru_blocks)
        states.push_back(GruState{Vector::Zero(block.m)});
    return states;
}

}  // namespace

double predict_one(const SparsModel& model, const WindowVector& w) {
    if (w.lag() != model.L)
        throw ShapeError("predict_one: window length " + std::to_string(w.lag()) +
                         " does not match L = " + std::to_string(model.L));
    std::vector<GruState> states = zero_states(model);
    const double y = mixed_prediction(model, model.normalization.normalize(w.entries), states);
    return model.normalization.denormalize(y);
}

ForecastResult rolling_forecast(const SparsModel& model, const WindowVector& seed_window,
                                Eigen::Index horizon,
                                const std::optional<TimeSeries>& truth) {
    if (horizon < 1)
        throw RangeError("rolling_forecast: horizon must be >= 1");
    if (seed_window.lag() != model.L)
        throw ShapeError("rolling_forecast: seed window length does not match L");

    ForecastResult result;
    Vector w = model.normalization.normalize(seed_window.entries);
    std::vector<GruState> states = zero_states(model);
    for (Eigen::Index step = 1; step <= horizon; ++step) {
        const double y = mixed_prediction(model, w, states);
        if (!std::isfinite(y))
            throw DivergenceError("rolling_forecast: non-finite prediction at step " +
                                      std::to_string(step),
                                  static_cast<std::size_t>(step));
        result.predictions.push_back(model.normalization.denormalize(y));
        // slide the window forward over the prediction
        if (model.L > 1) w.head(model.L - 1) = w.tail(model.L - 1).eval();
        w[model.L - 1] = y;
    }

    if (truth) {
        const Eigen::Index available =
            std::min<Eigen::Index>(truth->length(), horizon);
        double ss = 0.0;
        for (Eigen::Index i = 0; i < available; ++i) {
            const double err =
                std::abs(result.predictions[static_cast<std::size_t>(i)] - truth->at(i + 1));
            result.per_step_abs_error.push_back(err);
            ss += err * err;
        }
        result.rmse = available > 0 ? std::sqrt(ss / static_cast<double>(available)) : 0.0;
    }
    return result;
}

ForecastResult evaluate_one_step(const SparsModel& model, const TimeSeries& series,
                                 Eigen::Index first, Eigen::Index last) {
    const Eigen::Index n = series.length();
    if (first <= model.L || last > n || first > last)
        throw RangeError("evaluate_one_step: evaluation range [" + std::to_string(first) +
                         ", " + std::to_string(last) + "] invalid for L = " +
                         std::to_string(model.L) + ", N = " + std::to_string(n));

    const TimeSeries normalized(model.normalization.normalize(series.values()), series.name());
    ForecastResult result;
    std::vector<GruState> states = zero_states(model);
    double ss = 0.0;
    Eigen::Index count = 0;
    // thread the hidden state from the first window so evaluation matches fitting
    for (Eigen::Index t = model.L; t < last; ++t) {
        const Vector w = normalized.values().segment(t - model.L, model.L);
        const double y = mixed_prediction(model, w, states);
        if (t + 1 < first) continue;
        const double prediction = model.normalization.denormalize(y);
        const double err = std::abs(prediction - series.at(t + 1));
        result.predictions.push_back(prediction);
        result.per_step_abs_error.push_back(err);
        ss += err * err;
        ++count;
    }
    result.rmse = count > 0 ? std::sqrt(ss / static_cast<double>(count)) : 0.0;
    return result;
}

ApDiagnosis ap_diagnose(const SparsModel& model, const TimeSeries& series, double epsilon) {
    ApDiagnosis diagnosis;
    diagnosis.profile = estimate_period(series, epsilon);
    diagnosis.tail_detected = diagnosis.profile.satisfied;

    const Eigen::Index L = model.L;
    const Eigen::Index n = series.length();
    Eigen::Index s = diagnosis.tail_detected ? diagnosis.profile.S + L - 1 : n;
    if (s > n) {
        s = n;
        diagnosis.anchor_fallback = true;
    }
    if (s < L)
        throw RangeError("ap_diagnose: series does not cover one window of length L");

    const TimeSeries normalized(model.normalization.normalize(series.values()), series.name());
    diagnosis.section = krylov_section(companion(model.ar), window(normalized, L, s),
                                       diagnosis.profile.T);
    diagnosis.report = spectrum_report(diagnosis.section);
    return diagnosis;
}

// ---------------------------------------------------------------------------
// persistence

namespace {

constexpr int kFormatVersion = 1;

json matrix_to_json(const Matrix& M) {
    json entries = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) entries.push_back(M(i, j));
    return json{{"rows", M.rows()}, {"cols", M.cols()}, {"data", entries}};
}

Matrix matrix_from_json(const json& j) {
    const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows * cols)
        throw MalformedFileError("model file: matrix shape does not match data length");
    Matrix M(rows, cols);
    Eigen::Index idx = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j2 = 0; j2 < cols; ++j2) M(i, j2) = data.at(idx++).get<double>();
    return M;
}

json vector_to_json(const Vector& v) {
    json entries = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) entries.push_back(v[i]);
    return entries;
}

Vector vector_from_json(const json& j) {
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v[i] = j.at(static_cast<std::size_t>(i)).get<double>();
    return v;
}

json gru_to_json(const GruParams& p) {
    return json{{"m", p.m},
                {"L", p.L},
                {"W_ir", matrix_to_json(p.W_ir)},
                {"W_iz", matrix_to_json(p.W_iz)},
                {"W_in", matrix_to_json(p.W_in)},
                {"W_hr", matrix_to_json(p.W_hr)},
                {"W_hz", matrix_to_json(p.W_hz)},
                {"W_hn", matrix_to_json(p.W_hn)},
                {"b_r", vector_to_json(p.b_r)},
                {"b_z", vector_to_json(p.b_z)},
                {"b_n", vector_to_json(p.b_n)},
                {"w_A", vector_to_json(p.w_A)},
                {"b_A", p.b_A}};
}

GruParams gru_from_json(const json& j) {
    GruParams p;
    p.m = j.at("m").get<Eigen::Index>();
    p.L = j.at("L").get<Eigen::Index>();
    p.W_ir = matrix_from_json(j.at("W_ir"));
    p.W_iz = matrix_from_json(j.at("W_iz"));
    p.W_in = matrix_from_json(j.at("W_in"));
    p.W_hr = matrix_from_json(j.at("W_hr"));
    p.W_hz = matrix_from_json(j.at("W_hz"));
    p.W_hn = matrix_from_json(j.at("W_hn"));
    p.b_r = vector_from_json(j.at("b_r"));
    p.b_z = vector_from_json(j.at("b_z"));
    p.b_n = vector_from_json(j.at("b_n"));
    p.w_A = vector_from_json(j.at("w_A"));
    p.b_A = j.at("b_A").get<double>();
    return p;
}

}  // namespace

void save_model(const SparsModel& model, const std::string& path) {
    json j;
    j["format_version"] = kFormatVersion;
    j["kind"] = "spars-model";
    j["L"] = model.L;
    j["normalization"] = {{"scale", model.normalization.scale},
                          {"offset", model.normalization.offset}};
    j["ar"] = {{"c", vector_to_json(model.ar.c)},
               {"L", model.ar.L},
               {"nnz", model.ar.nnz},
               {"delta", model.ar.delta}};
    j["mix"] = vector_to_json(model.mix);
    json blocks = json::array();
    for (const GruParams& p : model.gru_blocks) blocks.push_back(gru_to_json(p));
    j["gru_blocks"] = blocks;
    j["fit_report"] = {{"L", model.fit_report.L},
                       {"lag_fallback", model.fit_report.lag_fallback},
                       {"ar_residual", model.fit_report.ar_residual},
                       {"ar_nnz", model.fit_report.ar_nnz},
                       {"gru_final_mse", model.fit_report.gru_final_mse},
                       {"gru_input_nnz", model.fit_report.gru_input_nnz},
                       {"mix_residual", model.fit_report.mix_residual},
                       {"mix_nnz", model.fit_report.mix_nnz},
                       {"stage_order", model.fit_report.stage_order}};

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("save_model: cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
    if (!out)
        throw IoError("save_model: write to " + path + " failed");
}

SparsModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("load_model: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw MalformedFileError("load_model: " + path + ": " + e.what());
    }
    try {
        const int version = j.at("format_version").get<int>();
        if (version != kFormatVersion)
            throw VersionError("load_model: unsupported format version " +
                               std::to_string(version));
        SparsModel model;
        model.L = j.at("L").get<Eigen::Index>();
        model.normalization.scale = j.at("normalization").at("scale").get<double>();
        model.normalization.offset = j.at("normalization").at("offset").get<double>();
        model.ar.c = vector_from_json(j.at("ar").at("c"));
        model.ar.L = j.at("ar").at("L").get<Eigen::Index>();
        model.ar.nnz = j.at("ar").at("nnz").get<Eigen::Index>();
        model.ar.delta = j.at("ar").at("delta").get<double>();
        model.mix = vector_from_json(j.at("mix"));
        for (const json& block : j.at("gru_blocks")) model.gru_blocks.push_back(gru_from_json(block));
        const json& report = j.at("fit_report");
        model.fit_report.L = report.at("L").get<Eigen::Index>();
        model.fit_report.lag_fallback = report.at("lag_fallback").get<bool>();
        model.fit_report.ar_residual = report.at("ar_residual").get<double>();
        model.fit_report.ar_nnz = report.at("ar_nnz").get<Eigen::Index>();
        model.fit_report.gru_final_mse =
            report.at("gru_final_mse").get<std::vector<double>>();
        model.fit_report.gru_input_nnz =
            report.at("gru_input_nnz").get<std::vector<Eigen::Index>>();
        model.fit_report.mix_residual = report.at("mix_residual").get<double>();
        model.fit_report.mix_nnz = report.at("mix_nnz").get<Eigen::Index>();
        model.fit_report.stage_order =
            report.at("stage_order").get<std::vector<std::string>>();
        if (model.mix.size() != static_cast<Eigen::Index>(model.gru_blocks.size()) + 1)
            throw MalformedFileError("load_model: mixing weight count does not match blocks");
        return model;
    } catch (const json::exception& e) {
        throw MalformedFileError("load_model: " + path + ": " + e.what());
    }
}

}  // namespace spars
