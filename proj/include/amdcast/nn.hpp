#pragma once

#include "amdcast/matrix.hpp"
#include "amdcast/metrics.hpp"
#include "amdcast/timeseries.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace amdcast {

enum class ModelVariant { Fnn, Lstm, EncoderDecoder };

std::string to_string(ModelVariant variant);
ModelVariant variant_from_string(const std::string& name);

struct ModelSpec {
    ModelVariant variant = ModelVariant::EncoderDecoder;
    std::size_t window = 7;
    std::size_t feature_count = 7;
    std::size_t covariate_count = 2;
    std::vector<std::size_t> fnn_hidden = {64, 32};  ///< Fnn stack widths
    std::size_t hidden = 32;                         ///< LSTM cell width
    std::vector<std::size_t> head = {16};            ///< dense head before the output layer
    std::size_t output_count = 7;
};

struct DenseLayer {
    Matrix weights;  // out x in
    std::vector<double> bias;
    ActivationKind activation = ActivationKind::Identity;
};

/// output = activation(W x + b)
std::vector<double> dense_forward(const DenseLayer& layer, const std::vector<double>& x);

/// Gate parameters over the concatenated input [h_prev, x]. Also serves as
/// the gradient accumulator since gradients share these shapes.
struct LstmCellParams {
    Matrix w_f, w_i, w_c, w_o;  // hidden x (hidden + input)
    std::vector<double> b_f, b_i, b_c, b_o;

    std::size_t hidden_size() const { return w_f.rows(); }
    std::size_t input_size() const { return w_f.cols() - w_f.rows(); }
};

struct LstmState {
    std::vector<double> h;
    std::vector<double> c;
};

/// Everything the backward pass needs from one forward step.
struct LstmStepCache {
    std::vector<double> x;
    std::vector<double> h_prev, c_prev;
    std::vector<double> f, i, g, o;  // gate activations; g is the candidate tanh
    std::vector<double> c, tanh_c, h;
};

/// f = sigma(W_f [h,x] + b_f); i likewise; g = tanh(W_c [h,x] + b_c);
/// c' = f.c + i.g; o = sigma(W_o [h,x] + b_o); h' = o.tanh(c').
LstmState lstm_cell_forward(const LstmCellParams& params, const LstmState& state,
                            const std::vector<double>& x, LstmStepCache* cache = nullptr);

/// Backpropagation through time over a cached unroll. `dh_last` / `dc_last`
/// are the loss gradients at the final state; gate/weight gradients are
/// accumulated into `grads`. Returns the gradient w.r.t. the initial state.
/// When `dx` is non-null it receives the per-step input gradients.
LstmState lstm_backward(const LstmCellParams& params, const std::vector<LstmStepCache>& steps,
                        const std::vector<double>& dh_last, const std::vector<double>& dc_last,
                        LstmCellParams& grads, std::vector<std::vector<double>>* dx = nullptr);

struct ModelParams {
    std::vector<DenseLayer> dense;  ///< Fnn stack, or the dense head for the LSTM variants
    LstmCellParams encoder;
    LstmCellParams decoder;  ///< EncoderDecoder only
};

/// Uniform [-1/sqrt(fan_in), +1/sqrt(fan_in)] weights, zero biases except
/// the forget gate bias which starts at 1.
ModelParams init_params(const ModelSpec& spec, std::uint64_t seed);

/// Same shapes as `params`, all zeros.
ModelParams zero_clone(const ModelParams& params);

/// Pointers to every scalar parameter in a fixed traversal order.
std::vector<double*> param_pointers(ModelParams& params);

/// Prediction for one sample. Fnn flattens the window and appends the target
/// covariates (a window of 0 leaves just the covariates); Lstm unrolls over
/// the past rows; EncoderDecoder seeds a decoder step fed the target
/// covariates.
std::vector<double> model_forward(const ModelSpec& spec, const ModelParams& params,
                                  const WindowSample& sample);

/// loss = mean |p - t|; gradient d loss / d p with sign(0) := 0.
std::pair<double, std::vector<double>> mae_loss(const std::vector<double>& pred,
                                                const std::vector<double>& target);

struct AdamState {
    double alpha = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t step = 0;
    std::vector<double> m, v;

    AdamState() = default;
    AdamState(double alpha_, std::size_t count)
        : alpha(alpha_), m(count, 0.0), v(count, 0.0) {}
};

void adam_step(AdamState& state, const std::vector<double*>& params,
               const std::vector<double*>& grads);

struct TrainConfig {
    std::size_t epochs = 200;
    std::size_t batch_size = 4;
    double train_fraction = 0.7;
    double learning_rate = 1e-3;
    std::size_t patience = 0;  ///< 0 disables early stopping
    double clip_norm = 5.0;
    std::uint64_t seed = 0;
};

struct TrainHistory {
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    std::size_t best_epoch = 0;
    bool restored_best = false;
    std::size_t clip_events = 0;
};

std::pair<ModelParams, TrainHistory> train(const ModelSpec& spec, const WindowedDataset& dataset,
                                           const TrainConfig& config);

/// Overfit/underfit reading of a finished run, per the loss-ratio rule.
FitVerdict diagnose(const TrainHistory& history);

/// Central finite differences (step h) of an MSE surrogate loss against the
/// analytic gradients, over every parameter; returns the max relative error
/// |a - f| / max(1e-8, |a| + |f|).
double gradient_check(const ModelSpec& spec, ModelParams& params, const WindowSample& sample,
                      double h);

/// Default epoch budget per variant and window; 200 otherwise.
std::size_t preset_epochs(ModelVariant variant, std::size_t window);

struct Checkpoint {
    ModelSpec spec;
    ModelParams params;
    ScalerParams scaler;
    std::uint64_t seed = 0;
};

/// JSON checkpoint; doubles survive the round trip bit-exactly.
void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

} // namespace amdcast
