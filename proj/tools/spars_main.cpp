#include <CLI11.hpp>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spars/csv.hpp"
#include "spars/generators.hpp"
#include "spars/mixer.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitParse = 4;
constexpr int kExitNumerical = 5;

struct CommonOptions {
    std::string input;
    std::optional<std::string> column;
    double delta = 1e-8;
    std::optional<long> lag;
    std::vector<double> split{0.5, 0.25};
    long hidden = 8;
    long blocks = 2;
    long epochs = 500;
    double learning_rate = 0.05;
    std::uint64_t seed = 0;
    long horizon = 0;
    std::string out_dir = ".";
    double epsilon = -1.0;  // <0: 5% of the sample range
};

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::ostringstream out;
    out << std::put_time(std::gmtime(&t), "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

void add_common_flags(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--input", opt.input, "input CSV file")->required();
    cmd->add_option("--column", opt.column, "value column (name or 0-based index)");
    cmd->add_option("--delta", opt.delta, "sparsity threshold delta")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--lag", opt.lag, "override the estimated lag L");
    cmd->add_option("--split", opt.split, "fit,mix split fractions")
        ->delimiter(',')
        ->expected(2);
    cmd->add_option("--hidden", opt.hidden, "GRU hidden size m");
    cmd->add_option("--blocks", opt.blocks, "number of GRU blocks");
    cmd->add_option("--epochs", opt.epochs, "GRU training epochs");
    cmd->add_option("--lr", opt.learning_rate, "GRU learning rate");
    cmd->add_option("--seed", opt.seed, "global random seed")->envname("SPARS_SEED");
    cmd->add_option("--out", opt.out_dir, "output directory");
}

spars::SparsFitConfig to_fit_config(const CommonOptions& opt) {
    spars::SparsFitConfig config;
    if (opt.lag) config.lag_override = static_cast<Eigen::Index>(*opt.lag);
    config.delta = opt.delta;
    config.fit_fraction = opt.split.at(0);
    config.mix_fraction = opt.split.at(1);
    config.gru_blocks = static_cast<Eigen::Index>(opt.blocks);
    config.gru.hidden = static_cast<Eigen::Index>(opt.hidden);
    config.gru.epochs = static_cast<Eigen::Index>(opt.epochs);
    config.gru.learning_rate = opt.learning_rate;
    config.gru.seed = opt.seed;
    return config;
}

void write_report(const std::string& path, const std::vector<std::pair<std::string, std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw spars::IoError("cannot open " + path + " for writing");
    for (const auto& [key, value] : rows) out << key << "=" << value << "\n";
    if (!out)
        throw spars::IoError("write to " + path + " failed");
}

std::string format_double(double value) {
    std::ostringstream out;
    out << std::setprecision(17) << value;
    return out.str();
}

// Held-out evaluation range: everything after the fit and mix splits.
std::pair<Eigen::Index, Eigen::Index> eval_range(const spars::TimeSeries& series,
                                                 const CommonOptions& opt) {
    const auto n = series.length();
    const auto n_fit = static_cast<Eigen::Index>(std::floor(n * opt.split.at(0)));
    const auto n_mix = static_cast<Eigen::Index>(std::floor(n * opt.split.at(1)));
    return {n_fit + n_mix + 1, n};
}

int cmd_fit(const CommonOptions& opt) {
    const spars::TimeSeries series = spars::read_series_csv(opt.input, opt.column);
    const spars::SparsModel model = spars::fit_spars(series, to_fit_config(opt));

    std::filesystem::create_directories(opt.out_dir);
    const std::string model_path = opt.out_dir + "/model.json";
    spars::save_model(model, model_path);

    const auto [eval_first, eval_last] = eval_range(series, opt);
    double rmse = std::numeric_limits<double>::quiet_NaN();
    Eigen::Index eval_points = 0;
    if (eval_first <= eval_last && eval_first > model.L) {
        const spars::ForecastResult eval =
            spars::evaluate_one_step(model, series, eval_first, eval_last);
        rmse = eval.rmse;
        eval_points = static_cast<Eigen::Index>(eval.predictions.size());
    }

    std::vector<std::pair<std::string, std::string>> rows;
    rows.emplace_back("timestamp", iso_timestamp());
    rows.emplace_back("input", opt.input);
    rows.emplace_back("L", std::to_string(model.L));
    rows.emplace_back("lag_fallback", model.fit_report.lag_fallback ? "1" : "0");
    rows.emplace_back("delta", format_double(opt.delta));
    rows.emplace_back("ar_nnz", std::to_string(model.fit_report.ar_nnz));
    rows.emplace_back("ar_residual", format_double(model.fit_report.ar_residual));
    for (std::size_t k = 0; k < model.fit_report.gru_final_mse.size(); ++k)
        rows.emplace_back("gru" + std::to_string(k + 1) + "_mse",
                          format_double(model.fit_report.gru_final_mse[k]));
    if (!model.fit_report.gru_input_nnz.empty())
        rows.emplace_back("gru1_input_nnz",
                          std::to_string(model.fit_report.gru_input_nnz.front()));
    rows.emplace_back("mix_nnz", std::to_string(model.fit_report.mix_nnz));
    rows.emplace_back("mix_residual", format_double(model.fit_report.mix_residual));
    rows.emplace_back("eval_points", std::to_string(eval_points));
    rows.emplace_back("held_out_rmse", format_double(rmse));
    rows.emplace_back("model_file", model_path);
    write_report(opt.out_dir + "/fit_report.txt", rows);

    std::cout << "fitted " << opt.input << ": L=" << model.L
              << " ar_nnz=" << model.fit_report.ar_nnz << " held_out_rmse=" << rmse
              << "\nmodel: " << model_path << "\n";
    return 0;
}

int cmd_compare(const CommonOptions& opt) {
    const spars::TimeSeries series = spars::read_series_csv(opt.input, opt.column);
    const spars::SparsFitConfig config = to_fit_config(opt);
    const spars::SparsModel model = spars::fit_spars(series, config);

    // dense ordinary-least-squares baseline at the same lag
    const auto n = series.length();
    const auto n_fit = static_cast<Eigen::Index>(std::floor(n * opt.split.at(0)));
    spars::SparsModel baseline;
    baseline.L = model.L;
    baseline.normalization = model.normalization;
    {
        const spars::TimeSeries normalized_fit =
            spars::TimeSeries(baseline.normalization.normalize(series.values()))
                .slice(1, n_fit);
        baseline.ar = spars::fit_ar_dense(normalized_fit, model.L);
        baseline.mix = spars::Vector::Ones(1);
    }

    const auto [eval_first, eval_last] = eval_range(series, opt);
    const spars::ForecastResult spars_eval =
        spars::evaluate_one_step(model, series, eval_first, eval_last);
    const spars::ForecastResult dense_eval =
        spars::evaluate_one_step(baseline, series, eval_first, eval_last);

    std::filesystem::create_directories(opt.out_dir);
    std::vector<std::pair<std::string, std::string>> rows;
    rows.emplace_back("timestamp", iso_timestamp());
    rows.emplace_back("input", opt.input);
    rows.emplace_back("L", std::to_string(model.L));
    rows.emplace_back("spars_nnz", std::to_string(model.fit_report.ar_nnz));
    rows.emplace_back("dense_nnz", std::to_string(baseline.ar.nnz));
    rows.emplace_back("spars_rmse", format_double(spars_eval.rmse));
    rows.emplace_back("dense_rmse", format_double(dense_eval.rmse));
    rows.emplace_back("eval_points", std::to_string(spars_eval.predictions.size()));
    write_report(opt.out_dir + "/compare_report.txt", rows);

    std::cout << "sparse AR: nnz=" << model.fit_report.ar_nnz
              << " rmse=" << spars_eval.rmse << "\ndense  AR: nnz=" << baseline.ar.nnz
              << " rmse=" << dense_eval.rmse << "\n";
    return 0;
}

int cmd_spectra(const std::string& model_path, const CommonOptions& opt) {
    const spars::SparsModel model = spars::load_model(model_path);
    const spars::TimeSeries series = spars::read_series_csv(opt.input, opt.column);
    const double range =
        series.values().maxCoeff() - series.values().minCoeff();
    const double epsilon = opt.epsilon >= 0.0 ? opt.epsilon : 0.05 * range;
    const spars::ApDiagnosis diagnosis = spars::ap_diagnose(model, series, epsilon);

    std::filesystem::create_directories(opt.out_dir);
    const auto write_points = [&](const std::string& path, const spars::ComplexVector& zs) {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw spars::IoError("cannot open " + path + " for writing");
        out << "re,im\n" << std::setprecision(17);
        for (Eigen::Index i = 0; i < zs.size(); ++i)
            out << zs[i].real() << "," << zs[i].imag() << "\n";
    };
    write_points(opt.out_dir + "/section_eigenvalues.csv", diagnosis.report.eigenvalues);
    write_points(opt.out_dir + "/powered_eigenvalues.csv",
                 diagnosis.report.powered_eigenvalues);

    std::ofstream meta(opt.out_dir + "/spectra_metadata.csv", std::ios::binary);
    if (!meta)
        throw spars::IoError("cannot open spectra_metadata.csv for writing");
    meta << "T,k,mimicry_norm,spectral_radius,inside_unit_disk,tail_detected,anchor_fallback\n"
         << std::setprecision(17) << diagnosis.profile.T << "," << diagnosis.section.k << ","
         << diagnosis.report.mimicry_norm << "," << diagnosis.report.spectral_radius << ","
         << (diagnosis.report.inside_unit_disk ? 1 : 0) << ","
         << (diagnosis.tail_detected ? 1 : 0) << "," << (diagnosis.anchor_fallback ? 1 : 0)
         << "\n";

    std::cout << "T=" << diagnosis.profile.T << " k=" << diagnosis.section.k
              << " mimicry_norm=" << diagnosis.report.mimicry_norm
              << " spectral_radius=" << diagnosis.report.spectral_radius << "\n";
    return 0;
}

int cmd_generate(const std::string& kind, const spars::GeneratorParams& params,
                 const std::string& out_path) {
    const spars::TimeSeries series = spars::generate_series(kind, params);
    spars::write_series_csv(series, out_path);
    std::cout << "wrote " << series.length() << " samples to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semilinear sparse time-series models"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value configuration file");

    CommonOptions fit_opt;
    CLI::App* fit = app.add_subcommand("fit", "fit a model on a CSV signal");
    add_common_flags(fit, fit_opt);

    CommonOptions compare_opt;
    CLI::App* compare =
        app.add_subcommand("compare", "fit sparse and dense AR models side by side");
    add_common_flags(compare, compare_opt);

    CommonOptions spectra_opt;
    std::string model_path;
    CLI::App* spectra = app.add_subcommand("spectra", "emit eigenvalue point sets");
    spectra->add_option("--model", model_path, "fitted model file")->required();
    spectra->add_option("--input", spectra_opt.input, "input CSV file")->required();
    spectra->add_option("--column", spectra_opt.column, "value column");
    spectra->add_option("--epsilon", spectra_opt.epsilon,
                        "AEP tolerance (default: 5% of the sample range)");
    spectra->add_option("--out", spectra_opt.out_dir, "output directory");

    std::string kind;
    spars::GeneratorParams gen;
    std::string gen_out = "series.csv";
    CLI::App* generate = app.add_subcommand("generate", "write a fixture CSV");
    generate->add_option("--kind", kind, "series kind")
        ->required()
        ->check(CLI::IsMember(
            {"sine", "alternating", "aep", "noisy-periodic", "recurrence"}));
    generate->add_option("--n", gen.n, "sample count");
    generate->add_option("--period", gen.period, "pattern period");
    generate->add_option("--head", gen.head, "aperiodic head length");
    generate->add_option("--noise", gen.noise, "noise standard deviation");
    generate->add_option("--amplitude", gen.amplitude, "signal amplitude");
    generate->add_option("--seed", gen.seed, "random seed")->envname("SPARS_SEED");
    generate->add_option("--out", gen_out, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (fit->parsed()) return cmd_fit(fit_opt);
        if (compare->parsed()) return cmd_compare(compare_opt);
        if (spectra->parsed()) return cmd_spectra(model_path, spectra_opt);
        if (generate->parsed()) return cmd_generate(kind, gen, gen_out);
    } catch (const spars::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const spars::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const spars::MalformedFileError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const spars::VersionError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const spars::Error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}
