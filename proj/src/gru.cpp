#include "spars/gru.hpp"

#include <cmath>
#include <random>
#include <string>

#include "spars/sparse.hpp"

namespace spars {

namespace {

Vector sigmoid(const Vector& x) {
    return (1.0 / (1.0 + (-x.array()).exp())).matrix();
}

void check_shapes(const GruParams& p) {
    const auto bad = [&](const Matrix& W, Eigen::Index r, Eigen::Index c) {
        return W.rows() != r || W.cols() != c;
    };
    if (bad(p.W_ir, p.m, p.L) || bad(p.W_iz, p.m, p.L) || bad(p.W_in, p.m, p.L) ||
        bad(p.W_hr, p.m, p.m) || bad(p.W_hz, p.m, p.m) || bad(p.W_hn, p.m, p.m) ||
        p.b_r.size() != p.m || p.b_z.size() != p.m || p.b_n.size() != p.m ||
        p.w_A.size() != p.m)
        throw ShapeError("GruParams: parameter arrays inconsistent with (m, L) = (" +
                         std::to_string(p.m) + ", " + std::to_string(p.L) + ")");
}

// Everything the backward pass needs from one forward step.
struct StepTrace {
    Vector x, h_prev, r, z, n, u;  // u = W_hn h_prev
    Vector h;
    double prediction = 0.0;
};

StepTrace forward_step(const GruParams& p, const Vector& x, const Vector& h_prev) {
    StepTrace s;
    s.x = x;
    s.h_prev = h_prev;
    s.r = sigmoid(p.W_ir * x + p.W_hr * h_prev + p.b_r);
    s.z = sigmoid(p.W_iz * x + p.W_hz * h_prev + p.b_z);
    s.u = p.W_hn * h_prev;
    s.n = (p.W_in * x + p.b_n + (s.r.array() * s.u.array()).matrix()).array().tanh();
    s.h = ((1.0 - s.z.array()) * s.n.array() + s.z.array() * s.h_prev.array()).matrix();
    s.prediction = p.w_A.dot(s.h) + p.b_A;
    return s;
}

}  // namespace

GruParams GruParams::zeros(Eigen::Index m, Eigen::Index L) {
    GruParams p;
    p.m = m;
    p.L = L;
    p.W_ir = Matrix::Zero(m, L);
    p.W_iz = Matrix::Zero(m, L);
    p.W_in = Matrix::Zero(m, L);
    p.W_hr = Matrix::Zero(m, m);
    p.W_hz = Matrix::Zero(m, m);
    p.W_hn = Matrix::Zero(m, m);
    p.b_r = Vector::Zero(m);
    p.b_z = Vector::Zero(m);
    p.b_n = Vector::Zero(m);
    p.w_A = Vector::Zero(m);
    p.b_A = 0.0;
    return p;
}

double GruGradients::squared_norm() const {
    return W_ir.squaredNorm() + W_iz.squaredNorm() + W_in.squaredNorm() +
           W_hr.squaredNorm() + W_hz.squaredNorm() + W_hn.squaredNorm() +
           b_r.squaredNorm() + b_z.squaredNorm() + b_n.squaredNorm() +
           w_A.squaredNorm() + b_A * b_A;
}

void GruGradients::scale(double factor) {
    W_ir *= factor;
    W_iz *= factor;
    W_in *= factor;
    W_hr *= factor;
    W_hz *= factor;
    W_hn *= factor;
    b_r *= factor;
    b_z *= factor;
    b_n *= factor;
    w_A *= factor;
    b_A *= factor;
}

GruState gru_step(const GruParams& params, const WindowVector& x, const GruState& h_prev) {
    check_shapes(params);
    if (x.lag() != params.L)
        throw ShapeError("gru_step: window length " + std::to_string(x.lag()) +
                         " does not match L = " + std::to_string(params.L));
    if (h_prev.h.size() != params.m)
        throw ShapeError("gru_step: hidden state size " + std::to_string(h_prev.h.size()) +
                         " does not match m = " + std::to_string(params.m));
    return {forward_step(params, x.entries, h_prev.h).h};
}

std::vector<double> gru_forward(const GruParams& params,
                                const std::vector<WindowVector>& windows,
                                const GruState& h0) {
    if (windows.empty())
        throw RangeError("gru_forward: window sequence must be nonempty");
    check_shapes(params);
    if (h0.h.size() != params.m)
        throw ShapeError("gru_forward: hidden state size does not match m");
    std::vector<double> predictions;
    predictions.reserve(windows.size());
    Vector h = h0.h;
    for (const WindowVector& w : windows) {
        if (w.lag() != params.L)
            throw ShapeError("gru_forward: window length does not match L");
        const StepTrace s = forward_step(params, w.entries, h);
        h = s.h;
        predictions.push_back(s.prediction);
    }
    return predictions;
}

double gru_sequence_mse(const GruParams& params, const std::vector<WindowVector>& windows,
                        const std::vector<double>& targets, const GruState& h0) {
    if (windows.size() != targets.size())
        throw ShapeError("gru_sequence_mse: windows and targets differ in length");
    const std::vector<double> predictions = gru_forward(params, windows, h0);
    double sum = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double e = predictions[i] - targets[i];
        sum += e * e;
    }
    return sum / static_cast<double>(targets.size());
}

GruGradients gru_gradients(const GruParams& params, const std::vector<WindowVector>& windows,
                           const std::vector<double>& targets, const GruState& h0) {
    if (windows.size() != targets.size())
        throw ShapeError("gru_gradients: windows and targets differ in length");
    if (windows.empty())
        throw RangeError("gru_gradients: window sequence must be nonempty");
    check_shapes(params);

    const std::size_t steps = windows.size();
    std::vector<StepTrace> trace;
    trace.reserve(steps);
    Vector h = h0.h;
    for (const WindowVector& w : windows) {
        if (w.lag() != params.L)
            throw ShapeError("gru_gradients: window length does not match L");
        trace.push_back(forward_step(params, w.entries, h));
        h = trace.back().h;
    }

    GruGradients g;
    g.W_ir = Matrix::Zero(params.m, params.L);
    g.W_iz = Matrix::Zero(params.m, params.L);
    g.W_in = Matrix::Zero(params.m, params.L);
    g.W_hr = Matrix::Zero(params.m, params.m);
    g.W_hz = Matrix::Zero(params.m, params.m);
    g.W_hn = Matrix::Zero(params.m, params.m);
    g.b_r = Vector::Zero(params.m);
    g.b_z = Vector::Zero(params.m);
    g.b_n = Vector::Zero(params.m);
    g.w_A = Vector::Zero(params.m);
    g.b_A = 0.0;

    const double inv_steps = 1.0 / static_cast<double>(steps);
    Vector dh_next = Vector::Zero(params.m);  // dL/dh_t carried from step t+1

    for (std::size_t t = steps; t-- > 0;) {
        const StepTrace& s = trace[t];
        const double dy = 2.0 * (s.prediction - targets[t]) * inv_steps;
        g.w_A += dy * s.h;
        g.b_A += dy;

        const Vector dh = dh_next + dy * params.w_A;
        const Vector dz = (dh.array() * (s.h_prev - s.n).array()).matrix();
        const Vector dn = (dh.array() * (1.0 - s.z.array())).matrix();
        const Vector da_n = (dn.array() * (1.0 - s.n.array().square())).matrix();
        const Vector dr = (da_n.array() * s.u.array()).matrix();
        const Vector du = (da_n.array() * s.r.array()).matrix();
        const Vector da_r = (dr.array() * s.r.array() * (1.0 - s.r.array())).matrix();
        const Vector da_z = (dz.array() * s.z.array() * (1.0 - s.z.array())).matrix();

        g.W_in += da_n * s.x.transpose();
        g.b_n += da_n;
        g.W_hn += du * s.h_prev.transpose();
        g.W_ir += da_r * s.x.transpose();
        g.b_r += da_r;
        g.W_hr += da_r * s.h_prev.transpose();
        g.W_iz += da_z * s.x.transpose();
        g.b_z += da_z;
        g.W_hz += da_z * s.h_prev.transpose();

        dh_next = (dh.array() * s.z.array()).matrix() + params.W_hn.transpose() * du +
                  params.W_hr.transpose() * da_r + params.W_hz.transpose() * da_z;
    }
    return g;
}

std::vector<WindowVector> training_windows(const TimeSeries& series, Eigen::Index L) {
    std::vector<WindowVector> windows;
    for (Eigen::Index t = L; t < series.length(); ++t)
        windows.push_back(window(series, L, t));
    return windows;
}

std::vector<double> training_targets(const TimeSeries& series, Eigen::Index L) {
    std::vector<double> targets;
    for (Eigen::Index t = L; t < series.length(); ++t)
        targets.push_back(series.at(t + 1));
    return targets;
}

GruParams train_gru(const TimeSeries& train, Eigen::Index L, const GruTrainConfig& config) {
    const Eigen::Index m = config.hidden;
    if (m < 1 || L < 1)
        throw RangeError("train_gru: hidden size and L must be >= 1");
    if (train.length() < L + m)
        throw RangeError("train_gru: need at least L + m samples to form m windows");

    // train inside [-1, 1] for the sake of the gate nonlinearities; the affine
    // map is folded back into the returned parameters afterwards
    const double hi = train.values().maxCoeff();
    const double lo = train.values().minCoeff();
    const double offset = 0.5 * (hi + lo);
    const double scale = (hi - lo) > 0.0 ? 0.5 * (hi - lo) : 1.0;
    const TimeSeries normalized((train.values().array() - offset) / scale);

    const std::vector<WindowVector> windows = training_windows(normalized, L);
    const std::vector<double> targets = training_targets(normalized, L);

    // uniform init in [-1/sqrt(m), 1/sqrt(m)]
    std::mt19937_64 rng(config.seed);
    const double bound = 1.0 / std::sqrt(static_cast<double>(m));
    std::uniform_real_distribution<double> dist(-bound, bound);
    const auto fill = [&](auto& array) {
        for (Eigen::Index i = 0; i < array.rows(); ++i)
            for (Eigen::Index j = 0; j < array.cols(); ++j) array(i, j) = dist(rng);
    };

    GruParams p = GruParams::zeros(m, L);
    fill(p.W_ir);
    fill(p.W_iz);
    fill(p.W_in);
    fill(p.W_hr);
    fill(p.W_hz);
    fill(p.W_hn);
    fill(p.b_r);
    fill(p.b_z);
    fill(p.b_n);
    fill(p.w_A);
    p.b_A = dist(rng);

    const GruState h0{Vector::Zero(m)};
    for (Eigen::Index epoch = 0; epoch < config.epochs; ++epoch) {
        GruGradients g = gru_gradients(p, windows, targets, h0);
        const double norm = std::sqrt(g.squared_norm());
        if (!std::isfinite(norm))
            throw TrainingError("train_gru: non-finite gradient at epoch " +
                                    std::to_string(epoch),
                                static_cast<std::size_t>(epoch));
        if (config.gradient_clip > 0.0 && norm > config.gradient_clip)
            g.scale(config.gradient_clip / norm);

        const double lr = config.learning_rate;
        p.W_ir -= lr * g.W_ir;
        p.W_iz -= lr * g.W_iz;
        p.W_in -= lr * g.W_in;
        p.W_hr -= lr * g.W_hr;
        p.W_hz -= lr * g.W_hz;
        p.W_hn -= lr * g.W_hn;
        p.b_r -= lr * g.b_r;
        p.b_z -= lr * g.b_z;
        p.b_n -= lr * g.b_n;
        p.w_A -= lr * g.w_A;
        p.b_A -= lr * g.b_A;

        const double loss = gru_sequence_mse(p, windows, targets, h0);
        if (!std::isfinite(loss))
            throw TrainingError("train_gru: loss diverged at epoch " + std::to_string(epoch),
                                static_cast<std::size_t>(epoch));
    }

    // fold x -> (x - offset)/scale into the input weights and gate biases, and
    // the output denormalization into the affine head; the result is an
    // equivalent network over the raw signal
    const double shift = offset / scale;
    for (Matrix* W : {&p.W_ir, &p.W_iz, &p.W_in}) {
        Vector* b = W == &p.W_ir ? &p.b_r : (W == &p.W_iz ? &p.b_z : &p.b_n);
        *b -= W->rowwise().sum() * shift;
        *W /= scale;
    }
    p.w_A *= scale;
    p.b_A = p.b_A * scale + offset;
    return p;
}

GruParams sparsify_input_weights(const GruParams& params, const TrajectoryMatrix& H,
                                 double delta) {
    check_shapes(params);
    GruParams out = params;
    for (Matrix* W : {&out.W_ir, &out.W_iz, &out.W_in}) {
        const SparseSolveReport report = sparsify_matrix(H, W->transpose(), delta);
        *W = report.solution.transpose();
    }
    return out;
}

}  // namespace spars
