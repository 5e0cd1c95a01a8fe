#include "amdcast/nn.hpp"

#include "amdcast/errors.hpp"
#include "amdcast/rng.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

namespace amdcast {

namespace {

std::vector<double> matvec(const Matrix& w, const std::vector<double>& x,
                           const std::vector<double>& b) {
    if (w.cols() != x.size() || w.rows() != b.size()) {
        throw DimensionError("matvec: " + std::to_string(w.rows()) + "x" +
                             std::to_string(w.cols()) + " against input " +
                             std::to_string(x.size()));
    }
    std::vector<double> out(b);
    for (std::size_t r = 0; r < w.rows(); ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < w.cols(); ++c) {
            acc += w(r, c) * x[c];
        }
        out[r] += acc;
    }
    return out;
}

double apply_activation(ActivationKind kind, double a) {
    switch (kind) {
    case ActivationKind::Sigmoid: return sigmoid(a);
    case ActivationKind::Tanh: return std::tanh(a);
    case ActivationKind::Relu: return a > 0.0 ? a : 0.0;
    case ActivationKind::Identity: return a;
    }
    return a;
}

double activation_slope(ActivationKind kind, double a) {
    switch (kind) {
    case ActivationKind::Sigmoid: {
        const double s = sigmoid(a);
        return s * (1.0 - s);
    }
    case ActivationKind::Tanh: {
        const double t = std::tanh(a);
        return 1.0 - t * t;
    }
    case ActivationKind::Relu: return a > 0.0 ? 1.0 : 0.0;
    case ActivationKind::Identity: return 1.0;
    }
    return 1.0;
}

struct DenseCache {
    std::vector<double> input;
    std::vector<double> pre;
};

std::vector<double> dense_stack_forward(const std::vector<DenseLayer>& layers,
                                        std::vector<double> x, std::vector<DenseCache>* caches) {
    for (const DenseLayer& layer : layers) {
        std::vector<double> pre = matvec(layer.weights, x, layer.bias);
        std::vector<double> out(pre.size());
        for (std::size_t j = 0; j < pre.size(); ++j) {
            out[j] = apply_activation(layer.activation, pre[j]);
        }
        if (caches != nullptr) {
            caches->push_back({std::move(x), std::move(pre)});
        }
        x = std::move(out);
    }
    return x;
}

/// Gradient of the stack w.r.t. its input; weight/bias gradients are
/// accumulated into `grads` (same layer shapes).
std::vector<double> dense_stack_backward(const std::vector<DenseLayer>& layers,
                                         const std::vector<DenseCache>& caches,
                                         std::vector<double> dout,
                                         std::vector<DenseLayer>& grads) {
    for (std::size_t li = layers.size(); li-- > 0;) {
        const DenseLayer& layer = layers[li];
        const DenseCache& cache = caches[li];
        std::vector<double> da(dout.size());
        for (std::size_t j = 0; j < dout.size(); ++j) {
            da[j] = dout[j] * activation_slope(layer.activation, cache.pre[j]);
        }
        DenseLayer& g = grads[li];
        std::vector<double> dx(cache.input.size(), 0.0);
        for (std::size_t j = 0; j < da.size(); ++j) {
            g.bias[j] += da[j];
            for (std::size_t k = 0; k < cache.input.size(); ++k) {
                g.weights(j, k) += da[j] * cache.input[k];
                dx[k] += da[j] * layer.weights(j, k);
            }
        }
        dout = std::move(dx);
    }
    return dout;
}

struct ForwardCache {
    std::vector<DenseCache> dense;
    std::vector<LstmStepCache> encoder_steps;
    std::vector<LstmStepCache> decoder_steps;
    std::vector<double> prediction;
};

void check_sample_shapes(const ModelSpec& spec, const WindowSample& sample) {
    if (sample.past.rows() != spec.window) {
        throw DimensionError("sample window " + std::to_string(sample.past.rows()) +
                             " does not match model window " + std::to_string(spec.window));
    }
    if (spec.window > 0 && sample.past.cols() != spec.feature_count) {
        throw DimensionError("sample has " + std::to_string(sample.past.cols()) +
                             " features per step, model expects " +
                             std::to_string(spec.feature_count));
    }
    const bool needs_cov = spec.variant != ModelVariant::Lstm;
    if (needs_cov && sample.target_cov.size() != spec.covariate_count) {
        throw DimensionError("sample carries " + std::to_string(sample.target_cov.size()) +
                             " covariates, model expects " +
                             std::to_string(spec.covariate_count));
    }
}

std::vector<double> flatten_input(const ModelSpec& spec, const WindowSample& sample) {
    std::vector<double> x;
    x.reserve(spec.window * spec.feature_count + spec.covariate_count);
    for (std::size_t t = 0; t < sample.past.rows(); ++t) {
        for (std::size_t c = 0; c < sample.past.cols(); ++c) {
            x.push_back(sample.past(t, c));
        }
    }
    x.insert(x.end(), sample.target_cov.begin(), sample.target_cov.end());
    return x;
}

ForwardCache forward_cached(const ModelSpec& spec, const ModelParams& params,
                            const WindowSample& sample) {
    check_sample_shapes(spec, sample);
    ForwardCache cache;
    switch (spec.variant) {
    case ModelVariant::Fnn: {
        cache.prediction = dense_stack_forward(params.dense, flatten_input(spec, sample),
                                               &cache.dense);
        break;
    }
    case ModelVariant::Lstm: {
        if (spec.window == 0) {
            throw ConfigError("Lstm variant requires a window of at least 1");
        }
        LstmState state{std::vector<double>(spec.hidden, 0.0),
                        std::vector<double>(spec.hidden, 0.0)};
        cache.encoder_steps.resize(spec.window);
        for (std::size_t t = 0; t < spec.window; ++t) {
            state = lstm_cell_forward(params.encoder, state, sample.past.row(t),
                                      &cache.encoder_steps[t]);
        }
        cache.prediction = dense_stack_forward(params.dense, state.h, &cache.dense);
        break;
    }
    case ModelVariant::EncoderDecoder: {
        if (spec.window == 0) {
            throw ConfigError("EncoderDecoder variant requires a window of at least 1");
        }
        LstmState state{std::vector<double>(spec.hidden, 0.0),
                        std::vector<double>(spec.hidden, 0.0)};
        cache.encoder_steps.resize(spec.window);
        for (std::size_t t = 0; t < spec.window; ++t) {
            state = lstm_cell_forward(params.encoder, state, sample.past.row(t),
                                      &cache.encoder_steps[t]);
        }
        cache.decoder_steps.resize(1);
        state = lstm_cell_forward(params.decoder, state, sample.target_cov,
                                  &cache.decoder_steps[0]);
        cache.prediction = dense_stack_forward(params.dense, state.h, &cache.dense);
        break;
    }
    }
    return cache;
}

void backward(const ModelSpec& spec, const ModelParams& params, const ForwardCache& cache,
              const std::vector<double>& dpred, ModelParams& grads) {
    std::vector<double> dstack =
        dense_stack_backward(params.dense, cache.dense, dpred, grads.dense);
    const std::vector<double> zeros(spec.hidden, 0.0);
    switch (spec.variant) {
    case ModelVariant::Fnn:
        break;
    case ModelVariant::Lstm:
        lstm_backward(params.encoder, cache.encoder_steps, dstack, zeros, grads.encoder);
        break;
    case ModelVariant::EncoderDecoder: {
        const LstmState into_decoder = lstm_backward(params.decoder, cache.decoder_steps, dstack,
                                                     zeros, grads.decoder);
        lstm_backward(params.encoder, cache.encoder_steps, into_decoder.h, into_decoder.c,
                      grads.encoder);
        break;
    }
    }
}

LstmCellParams init_cell(std::size_t hidden, std::size_t input, Rng& rng) {
    LstmCellParams cell;
    const std::size_t cols = hidden + input;
    const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
    auto fill = [&](Matrix& w) {
        w = Matrix(hidden, cols);
        for (double& v : w.data()) v = rng.uniform(-bound, bound);
    };
    fill(cell.w_f);
    fill(cell.w_i);
    fill(cell.w_c);
    fill(cell.w_o);
    cell.b_f.assign(hidden, 1.0);  // open forget gates at the start
    cell.b_i.assign(hidden, 0.0);
    cell.b_c.assign(hidden, 0.0);
    cell.b_o.assign(hidden, 0.0);
    return cell;
}

DenseLayer init_dense(std::size_t out, std::size_t in, ActivationKind act, Rng& rng) {
    DenseLayer layer;
    layer.weights = Matrix(out, in);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    for (double& v : layer.weights.data()) v = rng.uniform(-bound, bound);
    layer.bias.assign(out, 0.0);
    layer.activation = act;
    return layer;
}

void append_cell_pointers(LstmCellParams& cell, std::vector<double*>& out) {
    for (Matrix* w : {&cell.w_f, &cell.w_i, &cell.w_c, &cell.w_o}) {
        for (double& v : w->data()) out.push_back(&v);
    }
    for (std::vector<double>* b : {&cell.b_f, &cell.b_i, &cell.b_c, &cell.b_o}) {
        for (double& v : *b) out.push_back(&v);
    }
}

double surrogate_mse(const std::vector<double>& pred, const std::vector<double>& target) {
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        acc += d * d;
    }
    return acc / static_cast<double>(pred.size());
}

const char* activation_name(ActivationKind kind) {
    switch (kind) {
    case ActivationKind::Sigmoid: return "sigmoid";
    case ActivationKind::Tanh: return "tanh";
    case ActivationKind::Relu: return "relu";
    case ActivationKind::Identity: return "identity";
    }
    return "identity";
}

ActivationKind activation_from_name(const std::string& name) {
    if (name == "sigmoid") return ActivationKind::Sigmoid;
    if (name == "tanh") return ActivationKind::Tanh;
    if (name == "relu") return ActivationKind::Relu;
    if (name == "identity") return ActivationKind::Identity;
    throw DataError("unknown activation '" + name + "' in checkpoint");
}

} // namespace

std::string to_string(ModelVariant variant) {
    switch (variant) {
    case ModelVariant::Fnn: return "fnn";
    case ModelVariant::Lstm: return "lstm";
    case ModelVariant::EncoderDecoder: return "encoder_decoder";
    }
    throw ConfigError("unknown model variant");
}

ModelVariant variant_from_string(const std::string& name) {
    if (name == "fnn") return ModelVariant::Fnn;
    if (name == "lstm") return ModelVariant::Lstm;
    if (name == "encoder_decoder") return ModelVariant::EncoderDecoder;
    throw ConfigError("unknown model variant '" + name + "'");
}

std::vector<double> dense_forward(const DenseLayer& layer, const std::vector<double>& x) {
    std::vector<double> pre = matvec(layer.weights, x, layer.bias);
    for (double& v : pre) v = apply_activation(layer.activation, v);
    return pre;
}

LstmState lstm_cell_forward(const LstmCellParams& params, const LstmState& state,
                            const std::vector<double>& x, LstmStepCache* cache) {
    const std::size_t hidden = params.hidden_size();
    if (state.h.size() != hidden || state.c.size() != hidden) {
        throw DimensionError("lstm state size does not match cell width");
    }
    if (x.size() != params.input_size()) {
        throw DimensionError("lstm input size " + std::to_string(x.size()) +
                             " does not match cell input " +
                             std::to_string(params.input_size()));
    }

    std::vector<double> z;
    z.reserve(hidden + x.size());
    z.insert(z.end(), state.h.begin(), state.h.end());
    z.insert(z.end(), x.begin(), x.end());

    std::vector<double> f = matvec(params.w_f, z, params.b_f);
    std::vector<double> i = matvec(params.w_i, z, params.b_i);
    std::vector<double> g = matvec(params.w_c, z, params.b_c);
    std::vector<double> o = matvec(params.w_o, z, params.b_o);

    LstmState next{std::vector<double>(hidden), std::vector<double>(hidden)};
    std::vector<double> tanh_c(hidden);
    for (std::size_t j = 0; j < hidden; ++j) {
        f[j] = sigmoid(f[j]);
        i[j] = sigmoid(i[j]);
        g[j] = std::tanh(g[j]);
        o[j] = sigmoid(o[j]);
        next.c[j] = f[j] * state.c[j] + i[j] * g[j];
        tanh_c[j] = std::tanh(next.c[j]);
        next.h[j] = o[j] * tanh_c[j];
    }

    if (cache != nullptr) {
        cache->x = x;
        cache->h_prev = state.h;
        cache->c_prev = state.c;
        cache->f = std::move(f);
        cache->i = std::move(i);
        cache->g = std::move(g);
        cache->o = std::move(o);
        cache->c = next.c;
        cache->tanh_c = std::move(tanh_c);
        cache->h = next.h;
    }
    return next;
}

LstmState lstm_backward(const LstmCellParams& params, const std::vector<LstmStepCache>& steps,
                        const std::vector<double>& dh_last, const std::vector<double>& dc_last,
                        LstmCellParams& grads, std::vector<std::vector<double>>* dx) {
    if (steps.empty()) {
        throw DataError("lstm backward: no cached forward steps");
    }
    const std::size_t hidden = params.hidden_size();
    const std::size_t input = params.input_size();
    if (dh_last.size() != hidden || dc_last.size() != hidden) {
        throw DimensionError("lstm backward: upstream gradient size mismatch");
    }
    if (dx != nullptr) {
        dx->assign(steps.size(), std::vector<double>(input, 0.0));
    }

    std::vector<double> dh = dh_last;
    std::vector<double> dc = dc_last;
    std::vector<double> da_f(hidden), da_i(hidden), da_g(hidden), da_o(hidden);
    std::vector<double> z(hidden + input), dz(hidden + input);

    for (std::size_t t = steps.size(); t-- > 0;) {
        const LstmStepCache& s = steps[t];
        std::copy(s.h_prev.begin(), s.h_prev.end(), z.begin());
        std::copy(s.x.begin(), s.x.end(), z.begin() + static_cast<std::ptrdiff_t>(hidden));

        for (std::size_t j = 0; j < hidden; ++j) {
            const double do_j = dh[j] * s.tanh_c[j];
            const double dc_j = dc[j] + dh[j] * s.o[j] * (1.0 - s.tanh_c[j] * s.tanh_c[j]);
            da_f[j] = dc_j * s.c_prev[j] * s.f[j] * (1.0 - s.f[j]);
            da_i[j] = dc_j * s.g[j] * s.i[j] * (1.0 - s.i[j]);
            da_g[j] = dc_j * s.i[j] * (1.0 - s.g[j] * s.g[j]);
            da_o[j] = do_j * s.o[j] * (1.0 - s.o[j]);
            dc[j] = dc_j * s.f[j];
        }

        std::fill(dz.begin(), dz.end(), 0.0);
        auto accumulate_gate = [&](const Matrix& w, Matrix& gw, std::vector<double>& gb,
                                   const std::vector<double>& da) {
            for (std::size_t j = 0; j < hidden; ++j) {
                gb[j] += da[j];
                for (std::size_t k = 0; k < z.size(); ++k) {
                    gw(j, k) += da[j] * z[k];
                    dz[k] += da[j] * w(j, k);
                }
            }
        };
        accumulate_gate(params.w_f, grads.w_f, grads.b_f, da_f);
        accumulate_gate(params.w_i, grads.w_i, grads.b_i, da_i);
        accumulate_gate(params.w_c, grads.w_c, grads.b_c, da_g);
        accumulate_gate(params.w_o, grads.w_o, grads.b_o, da_o);

        std::copy(dz.begin(), dz.begin() + static_cast<std::ptrdiff_t>(hidden), dh.begin());
        if (dx != nullptr) {
            std::copy(dz.begin() + static_cast<std::ptrdiff_t>(hidden), dz.end(),
                      (*dx)[t].begin());
        }
    }
    return {dh, dc};
}

ModelParams init_params(const ModelSpec& spec, std::uint64_t seed) {
    if (spec.output_count == 0 || spec.feature_count == 0) {
        throw ConfigError("model spec needs nonzero feature and output counts");
    }
    Rng rng(seed);
    ModelParams params;
    switch (spec.variant) {
    case ModelVariant::Fnn: {
        std::size_t in = spec.window * spec.feature_count + spec.covariate_count;
        for (std::size_t width : spec.fnn_hidden) {
            params.dense.push_back(init_dense(width, in, ActivationKind::Relu, rng));
            in = width;
        }
        params.dense.push_back(init_dense(spec.output_count, in, ActivationKind::Relu, rng));
        break;
    }
    case ModelVariant::Lstm: {
        if (spec.hidden == 0) throw ConfigError("lstm hidden size must be positive");
        std::size_t in = spec.hidden;
        for (std::size_t width : spec.head) {
            params.dense.push_back(init_dense(width, in, ActivationKind::Relu, rng));
            in = width;
        }
        params.dense.push_back(init_dense(spec.output_count, in, ActivationKind::Relu, rng));
        params.encoder = init_cell(spec.hidden, spec.feature_count, rng);
        break;
    }
    case ModelVariant::EncoderDecoder: {
        if (spec.hidden == 0) throw ConfigError("lstm hidden size must be positive");
        std::size_t in = spec.hidden;
        for (std::size_t width : spec.head) {
            params.dense.push_back(init_dense(width, in, ActivationKind::Relu, rng));
            in = width;
        }
        params.dense.push_back(init_dense(spec.output_count, in, ActivationKind::Relu, rng));
        params.encoder = init_cell(spec.hidden, spec.feature_count, rng);
        params.decoder = init_cell(spec.hidden, spec.covariate_count, rng);
        break;
    }
    }
    return params;
}

ModelParams zero_clone(const ModelParams& params) {
    ModelParams out = params;
    for (DenseLayer& layer : out.dense) {
        std::fill(layer.weights.data().begin(), layer.weights.data().end(), 0.0);
        std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
    }
    for (LstmCellParams* cell : {&out.encoder, &out.decoder}) {
        for (Matrix* w : {&cell->w_f, &cell->w_i, &cell->w_c, &cell->w_o}) {
            std::fill(w->data().begin(), w->data().end(), 0.0);
        }
        for (std::vector<double>* b : {&cell->b_f, &cell->b_i, &cell->b_c, &cell->b_o}) {
            std::fill(b->begin(), b->end(), 0.0);
        }
    }
    return out;
}

std::vector<double*> param_pointers(ModelParams& params) {
    std::vector<double*> out;
    for (DenseLayer& layer : params.dense) {
        for (double& v : layer.weights.data()) out.push_back(&v);
        for (double& v : layer.bias) out.push_back(&v);
    }
    append_cell_pointers(params.encoder, out);
    append_cell_pointers(params.decoder, out);
    return out;
}

std::vector<double> model_forward(const ModelSpec& spec, const ModelParams& params,
                                  const WindowSample& sample) {
    return forward_cached(spec, params, sample).prediction;
}

std::pair<double, std::vector<double>> mae_loss(const std::vector<double>& pred,
                                                const std::vector<double>& target) {
    if (pred.size() != target.size()) {
        throw DimensionError("mae loss: prediction and target lengths differ");
    }
    if (pred.empty()) {
        throw DataError("mae loss: empty vectors");
    }
    const double n = static_cast<double>(pred.size());
    double loss = 0.0;
    std::vector<double> grad(pred.size(), 0.0);
    for (std::size_t j = 0; j < pred.size(); ++j) {
        const double d = pred[j] - target[j];
        loss += std::abs(d);
        if (d > 0.0) grad[j] = 1.0 / n;
        else if (d < 0.0) grad[j] = -1.0 / n;
    }
    return {loss / n, std::move(grad)};
}

void adam_step(AdamState& state, const std::vector<double*>& params,
               const std::vector<double*>& grads) {
    if (params.size() != grads.size()) {
        throw DimensionError("adam: parameter and gradient counts differ");
    }
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    }
    if (state.m.size() != params.size()) {
        throw DimensionError("adam: state sized for " + std::to_string(state.m.size()) +
                             " parameters, got " + std::to_string(params.size()));
    }
    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t k = 0; k < params.size(); ++k) {
        const double g = *grads[k];
        state.m[k] = state.beta1 * state.m[k] + (1.0 - state.beta1) * g;
        state.v[k] = state.beta2 * state.v[k] + (1.0 - state.beta2) * g * g;
        const double mhat = state.m[k] / bc1;
        const double vhat = state.v[k] / bc2;
        *params[k] -= state.alpha * mhat / (std::sqrt(vhat) + state.eps);
    }
}

std::pair<ModelParams, TrainHistory> train(const ModelSpec& spec, const WindowedDataset& dataset,
                                           const TrainConfig& config) {
    if (dataset.samples.empty()) {
        throw DataError("train: empty dataset");
    }
    if (config.batch_size < 1) {
        throw ConfigError("train: batch size must be at least 1");
    }

    auto [train_set, val_set] = chrono_split(dataset, SplitSpec{config.train_fraction});
    if (train_set.samples.empty() || val_set.samples.empty()) {
        throw DataError("train: split produced an empty side");
    }
    if (config.batch_size > train_set.size()) {
        throw ConfigError("train: batch size exceeds the training sample count");
    }

    ModelParams params = init_params(spec, mix_seed(config.seed, 1));
    TrainHistory history;
    if (config.epochs == 0) {
        return {std::move(params), history};
    }

    ModelParams grads = zero_clone(params);
    const std::vector<double*> theta = param_pointers(params);
    const std::vector<double*> gptr = param_pointers(grads);
    AdamState opt(config.learning_rate, theta.size());
    Rng order_rng(mix_seed(config.seed, 2));

    ModelParams best = params;
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t since_best = 0;

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        order_rng.shuffle(order);
        double train_loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t stop = std::min(order.size(), start + config.batch_size);
            for (double* g : gptr) *g = 0.0;
            for (std::size_t k = start; k < stop; ++k) {
                const WindowSample& sample = train_set.samples[order[k]];
                const ForwardCache cache = forward_cached(spec, params, sample);
                auto [loss, dpred] = mae_loss(cache.prediction, sample.target);
                train_loss_sum += loss;
                backward(spec, params, cache, dpred, grads);
            }
            const double inv_batch = 1.0 / static_cast<double>(stop - start);
            double norm_sq = 0.0;
            for (double* g : gptr) {
                *g *= inv_batch;
                norm_sq += *g * *g;
            }
            const double norm = std::sqrt(norm_sq);
            if (norm > config.clip_norm) {
                const double scale = config.clip_norm / norm;
                for (double* g : gptr) *g *= scale;
                ++history.clip_events;
            }
            adam_step(opt, theta, gptr);
        }
        history.train_loss.push_back(train_loss_sum / static_cast<double>(train_set.size()));

        double val_loss_sum = 0.0;
        for (const WindowSample& sample : val_set.samples) {
            val_loss_sum += mae_loss(model_forward(spec, params, sample), sample.target).first;
        }
        const double val_loss = val_loss_sum / static_cast<double>(val_set.size());
        history.val_loss.push_back(val_loss);

        if (val_loss < best_val) {
            best_val = val_loss;
            history.best_epoch = epoch;
            best = params;
            since_best = 0;
        } else {
            ++since_best;
            if (config.patience > 0 && since_best >= config.patience) {
                break;
            }
        }
    }

    history.restored_best = true;
    return {std::move(best), history};
}

FitVerdict diagnose(const TrainHistory& history) {
    if (history.train_loss.empty()) {
        throw DataError("diagnose: history has no epochs");
    }
    return fit_diagnosis(history.train_loss[history.best_epoch],
                         history.val_loss[history.best_epoch]);
}

double gradient_check(const ModelSpec& spec, ModelParams& params, const WindowSample& sample,
                      double h) {
    if (!(h >= 1e-6 && h <= 1e-4)) {
        throw ConfigError("gradient check: step must lie in [1e-6, 1e-4]");
    }
    const std::vector<double>& target = sample.target;

    ModelParams grads = zero_clone(params);
    {
        const ForwardCache cache = forward_cached(spec, params, sample);
        std::vector<double> dpred(cache.prediction.size());
        for (std::size_t j = 0; j < dpred.size(); ++j) {
            dpred[j] = 2.0 * (cache.prediction[j] - target[j]) /
                       static_cast<double>(dpred.size());
        }
        backward(spec, params, cache, dpred, grads);
    }

    const std::vector<double*> theta = param_pointers(params);
    const std::vector<double*> analytic = param_pointers(grads);
    double worst = 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        const double saved = *theta[k];
        *theta[k] = saved + h;
        const double up = surrogate_mse(model_forward(spec, params, sample), target);
        *theta[k] = saved - h;
        const double down = surrogate_mse(model_forward(spec, params, sample), target);
        *theta[k] = saved;
        const double fd = (up - down) / (2.0 * h);
        const double a = *analytic[k];
        const double rel = std::abs(a - fd) / std::max(1e-8, std::abs(a) + std::abs(fd));
        worst = std::max(worst, rel);
    }
    return worst;
}

std::size_t preset_epochs(ModelVariant variant, std::size_t window) {
    switch (variant) {
    case ModelVariant::Fnn:
        if (window == 0) return 120;
        if (window == 7) return 80;
        if (window == 14) return 90;
        if (window == 28) return 120;
        break;
    case ModelVariant::Lstm:
        if (window == 7) return 125;
        if (window == 14) return 210;
        if (window == 28) return 225;
        break;
    case ModelVariant::EncoderDecoder:
        if (window == 7) return 200;
        if (window == 14) return 250;
        if (window == 28) return 250;
        break;
    }
    return 200;
}

namespace {

using nlohmann::json;

json cell_to_json(const LstmCellParams& cell) {
    return json{{"hidden", cell.hidden_size()},
                {"input", cell.input_size()},
                {"w_f", cell.w_f.data()},
                {"w_i", cell.w_i.data()},
                {"w_c", cell.w_c.data()},
                {"w_o", cell.w_o.data()},
                {"b_f", cell.b_f},
                {"b_i", cell.b_i},
                {"b_c", cell.b_c},
                {"b_o", cell.b_o}};
}

LstmCellParams cell_from_json(const json& j) {
    const auto hidden = j.at("hidden").get<std::size_t>();
    const auto input = j.at("input").get<std::size_t>();
    LstmCellParams cell;
    auto load = [&](const char* key) {
        return Matrix(hidden, hidden + input, j.at(key).get<std::vector<double>>());
    };
    cell.w_f = load("w_f");
    cell.w_i = load("w_i");
    cell.w_c = load("w_c");
    cell.w_o = load("w_o");
    cell.b_f = j.at("b_f").get<std::vector<double>>();
    cell.b_i = j.at("b_i").get<std::vector<double>>();
    cell.b_c = j.at("b_c").get<std::vector<double>>();
    cell.b_o = j.at("b_o").get<std::vector<double>>();
    if (cell.b_f.size() != hidden || cell.b_i.size() != hidden || cell.b_c.size() != hidden ||
        cell.b_o.size() != hidden) {
        throw DataError("checkpoint cell biases do not match the stated width");
    }
    return cell;
}

} // namespace

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
    json j;
    j["format"] = "amdcast-checkpoint";
    j["version"] = 1;
    j["seed"] = checkpoint.seed;

    const ModelSpec& spec = checkpoint.spec;
    j["spec"] = {{"variant", to_string(spec.variant)},
                 {"window", spec.window},
                 {"feature_count", spec.feature_count},
                 {"covariate_count", spec.covariate_count},
                 {"fnn_hidden", spec.fnn_hidden},
                 {"hidden", spec.hidden},
                 {"head", spec.head},
                 {"output_count", spec.output_count}};

    json scaler = json::array();
    for (std::size_t c = 0; c < checkpoint.scaler.columns.size(); ++c) {
        const ColumnScaler& s = checkpoint.scaler.scalers[c];
        scaler.push_back({{"column", checkpoint.scaler.columns[c]},
                          {"kind", s.kind == TransformKind::MinMax ? "minmax" : "log1p_minmax"},
                          {"min", s.min},
                          {"max", s.max}});
    }
    j["scaler"] = std::move(scaler);

    json dense = json::array();
    for (const DenseLayer& layer : checkpoint.params.dense) {
        dense.push_back({{"rows", layer.weights.rows()},
                         {"cols", layer.weights.cols()},
                         {"weights", layer.weights.data()},
                         {"bias", layer.bias},
                         {"activation", activation_name(layer.activation)}});
    }
    j["dense"] = std::move(dense);
    if (checkpoint.params.encoder.w_f.rows() > 0) {
        j["encoder"] = cell_to_json(checkpoint.params.encoder);
    }
    if (checkpoint.params.decoder.w_f.rows() > 0) {
        j["decoder"] = cell_to_json(checkpoint.params.decoder);
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write checkpoint to " + path);
    }
    out << j.dump(2) << '\n';
    if (!out) {
        throw IoError("failed while writing checkpoint to " + path);
    }
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read checkpoint from " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("checkpoint parse failure: " + std::string(e.what()));
    }
    try {
        if (j.at("format").get<std::string>() != "amdcast-checkpoint") {
            throw DataError("not a model checkpoint: " + path);
        }
        Checkpoint ckpt;
        ckpt.seed = j.at("seed").get<std::uint64_t>();
        const json& s = j.at("spec");
        ckpt.spec.variant = variant_from_string(s.at("variant").get<std::string>());
        ckpt.spec.window = s.at("window").get<std::size_t>();
        ckpt.spec.feature_count = s.at("feature_count").get<std::size_t>();
        ckpt.spec.covariate_count = s.at("covariate_count").get<std::size_t>();
        ckpt.spec.fnn_hidden = s.at("fnn_hidden").get<std::vector<std::size_t>>();
        ckpt.spec.hidden = s.at("hidden").get<std::size_t>();
        ckpt.spec.head = s.at("head").get<std::vector<std::size_t>>();
        ckpt.spec.output_count = s.at("output_count").get<std::size_t>();

        for (const json& entry : j.at("scaler")) {
            ckpt.scaler.columns.push_back(entry.at("column").get<std::string>());
            ColumnScaler cs;
            const std::string kind = entry.at("kind").get<std::string>();
            if (kind == "minmax") cs.kind = TransformKind::MinMax;
            else if (kind == "log1p_minmax") cs.kind = TransformKind::Log1pMinMax;
            else throw DataError("unknown scaler kind '" + kind + "' in checkpoint");
            cs.min = entry.at("min").get<double>();
            cs.max = entry.at("max").get<double>();
            ckpt.scaler.scalers.push_back(cs);
        }

        for (const json& entry : j.at("dense")) {
            DenseLayer layer;
            layer.weights = Matrix(entry.at("rows").get<std::size_t>(),
                                   entry.at("cols").get<std::size_t>(),
                                   entry.at("weights").get<std::vector<double>>());
            layer.bias = entry.at("bias").get<std::vector<double>>();
            layer.activation = activation_from_name(entry.at("activation").get<std::string>());
            if (layer.bias.size() != layer.weights.rows()) {
                throw DataError("checkpoint dense bias does not match weight rows");
            }
            ckpt.params.dense.push_back(std::move(layer));
        }
        if (j.contains("encoder")) {
            ckpt.params.encoder = cell_from_json(j.at("encoder"));
        }
        if (j.contains("decoder")) {
            ckpt.params.decoder = cell_from_json(j.at("decoder"));
        }
        return ckpt;
    } catch (const json::exception& e) {
        throw DataError("checkpoint field failure: " + std::string(e.what()));
    }
}

} // namespace amdcast
