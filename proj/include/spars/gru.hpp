#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "spars/series.hpp"
#include "spars/signal.hpp"

namespace spars {

/// Parameters of one GRU block with its affine output head. Gate equations,
/// for input window x and previous hidden state h:
///   r = sigmoid(W_ir x + W_hr h + b_r)
///   z = sigmoid(W_iz x + W_hz h + b_z)
///   n = tanh(W_in x + b_n + r .* (W_hn h))     (reset gate on the hidden term only)
///   h' = (1 - z) .* n + z .* h
/// and the emitted prediction is w_A . h' + b_A.
struct GruParams {
    Matrix W_ir, W_iz, W_in;  // m x L
    Matrix W_hr, W_hz, W_hn;  // m x m
    Vector b_r, b_z, b_n;     // m
    Vector w_A;               // m
    double b_A = 0.0;
    Eigen::Index m = 0;
    Eigen::Index L = 0;

    static GruParams zeros(Eigen::Index m, Eigen::Index L);
};

struct GruState {
    Vector h;
};

/// Gradient of the sequence MSE with respect to every parameter array.
struct GruGradients {
    Matrix W_ir, W_iz, W_in;
    Matrix W_hr, W_hz, W_hn;
    Vector b_r, b_z, b_n;
    Vector w_A;
    double b_A = 0.0;

    double squared_norm() const;
    void scale(double factor);
};

struct GruTrainConfig {
    Eigen::Index hidden = 8;
    Eigen::Index epochs = 500;
    double learning_rate = 0.05;
    double gradient_clip = 1.0;
    std::uint64_t seed = 0;
};

GruState gru_step(const GruParams& params, const WindowVector& x, const GruState& h_prev);

/// Threads the hidden state through the window sequence and emits the affine
/// prediction at each step.
std::vector<double> gru_forward(const GruParams& params,
                                const std::vector<WindowVector>& windows,
                                const GruState& h0);

/// Analytic BPTT gradients of the mean squared error over the sequence.
GruGradients gru_gradients(const GruParams& params, const std::vector<WindowVector>& windows,
                           const std::vector<double>& targets, const GruState& h0);

double gru_sequence_mse(const GruParams& params, const std::vector<WindowVector>& windows,
                        const std::vector<double>& targets, const GruState& h0);

/// Full-batch gradient descent on one-step-ahead MSE over the windows of the
/// training series. Deterministic for a fixed seed.
GruParams train_gru(const TimeSeries& train, Eigen::Index L, const GruTrainConfig& config);

/// Replace each input weight matrix by its sparse re-representation against
/// the trajectory matrix H (hidden weights and biases untouched).
GruParams sparsify_input_weights(const GruParams& params, const TrajectoryMatrix& H,
                                 double delta);

/// One-step-ahead (window, next value) pairs covering t = L .. N-1.
std::vector<WindowVector> training_windows(const TimeSeries& series, Eigen::Index L);
std::vector<double> training_targets(const TimeSeries& series, Eigen::Index L);

}  // namespace spars
