#include "ehdc/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ehdc {

namespace {

struct LayerBuffers {
    std::vector<std::int32_t> a; // [B][out] integer pre-activations
    std::vector<float> z;        // [B][out] normalized pre-acts (bn only)
    std::vector<std::uint8_t> h; // [B][out] output bits
    std::vector<float> da;       // [B][out] gradient wrt a
    std::vector<float> grad_w;   // [out][in]
    std::vector<std::int8_t> qt; // transposed quantized weights [in][out]
    std::vector<double> grad_gamma;
    std::vector<double> grad_beta;
};

class EncoderTrainer {
public:
    EncoderTrainer(LearnedEncoder& enc, const LabeledBinaryDataset& train,
                   const TrainConfig& cfg)
        : enc_(enc), train_(train), cfg_(cfg),
          shuffle_rng_(cfg.seed, streams::kShuffle) {
        if (train.samples.empty()) {
            throw std::invalid_argument("train_encoder: empty dataset");
        }
        for (std::uint16_t lab : train.labels) {
            if (lab >= train.num_classes) {
                throw std::out_of_range("train_encoder: label " +
                                        std::to_string(lab) + " out of range");
            }
        }
        active_.resize(train.samples.size());
        for (std::size_t s = 0; s < train.samples.size(); ++s) {
            const auto& hv = train.samples[s];
            for (std::size_t i = 0; i < hv.dim(); ++i) {
                if (hv.bit(i)) {
                    active_[s].push_back(static_cast<std::uint32_t>(i));
                }
            }
        }
        buffers_.resize(enc.layers.size());
        for (std::size_t l = 0; l < enc.layers.size(); ++l) {
            auto& layer = enc.layers[l];
            auto& buf = buffers_[l];
            buf.qt.resize(layer.in_dim * layer.out_dim);
            buf.grad_w.resize(layer.in_dim * layer.out_dim);
            if (layer.bn_state.has_value()) {
                buf.grad_gamma.resize(layer.out_dim);
                buf.grad_beta.resize(layer.out_dim);
            }
            retranspose(l);
        }
    }

    // mse_targets: per-sample target bit rows ([N][d], values 0/1);
    // nullptr selects the cross-entropy head objective.
    void run(const std::vector<std::vector<float>>* mse_targets) {
        const std::size_t d = enc_.output_dim();
        const std::size_t K = train_.num_classes;
        if (mse_targets == nullptr) {
            SplittableRng head_rng(cfg_.seed, streams::kWeights + 101);
            head_u_.resize(K * d);
            for (auto& u : head_u_) {
                u = static_cast<float>(head_rng.next_gaussian() * 0.1);
            }
            head_b_.assign(K, 0.0f);
        }
        std::vector<std::size_t> order(train_.samples.size());
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t epoch = 0; epoch < cfg_.epochs; ++epoch) {
            // Fisher-Yates from the dedicated shuffle stream.
            for (std::size_t i = order.size() - 1; i > 0; --i) {
                const std::size_t j = shuffle_rng_.next_below(i + 1);
                std::swap(order[i], order[j]);
            }
            for (std::size_t start = 0; start < order.size();
                 start += cfg_.batch_size) {
                const std::size_t b =
                    std::min(cfg_.batch_size, order.size() - start);
                batch_.assign(order.begin() + start, order.begin() + start + b);
                forward_batch();
                backward_batch(mse_targets);
                apply_updates();
            }
        }
        finalize_bn_stats();
    }

private:
    void retranspose(std::size_t l) {
        const auto& layer = enc_.layers[l];
        auto& qt = buffers_[l].qt;
        for (std::size_t j = 0; j < layer.out_dim; ++j) {
            for (std::size_t i = 0; i < layer.in_dim; ++i) {
                qt[i * layer.out_dim + j] = layer.quantized_weights[j * layer.in_dim + i];
            }
        }
    }

    void forward_batch() {
        const std::size_t b = batch_.size();
        for (std::size_t l = 0; l < enc_.layers.size(); ++l) {
            auto& layer = enc_.layers[l];
            auto& buf = buffers_[l];
            const std::size_t out = layer.out_dim;
            buf.a.assign(b * out, 0);
            buf.h.assign(b * out, 0);
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(b); ++si) {
                const std::size_t s = static_cast<std::size_t>(si);
                std::int32_t* acc = buf.a.data() + s * out;
                if (l == 0) {
                    for (std::uint32_t i : active_[batch_[s]]) {
                        const std::int8_t* col = buf.qt.data() + static_cast<std::size_t>(i) * out;
                        for (std::size_t j = 0; j < out; ++j) {
                            acc[j] += col[j];
                        }
                    }
                } else {
                    const std::uint8_t* hin = buffers_[l - 1].h.data() + s * layer.in_dim;
                    for (std::size_t i = 0; i < layer.in_dim; ++i) {
                        if (hin[i] == 0) {
                            continue;
                        }
                        const std::int8_t* col = buf.qt.data() + i * out;
                        for (std::size_t j = 0; j < out; ++j) {
                            acc[j] += col[j];
                        }
                    }
                }
            }
            if (layer.bn_state.has_value()) {
                auto& bn = *layer.bn_state;
                buf.z.assign(b * out, 0.0f);
                // Batch statistics, then normalize and binarize.
#pragma omp parallel for schedule(static)
                for (std::ptrdiff_t ji = 0; ji < static_cast<std::ptrdiff_t>(out); ++ji) {
                    const std::size_t j = static_cast<std::size_t>(ji);
                    double mean = 0.0;
                    for (std::size_t s = 0; s < b; ++s) {
                        mean += buf.a[s * out + j];
                    }
                    mean /= static_cast<double>(b);
                    double var = 0.0;
                    for (std::size_t s = 0; s < b; ++s) {
                        const double dvi = buf.a[s * out + j] - mean;
                        var += dvi * dvi;
                    }
                    var /= static_cast<double>(b);
                    const double inv_sd = 1.0 / std::sqrt(var + bn.epsilon);
                    batch_mean_[l][j] = mean;
                    batch_inv_sd_[l][j] = inv_sd;
                    for (std::size_t s = 0; s < b; ++s) {
                        const double z = (buf.a[s * out + j] - mean) * inv_sd;
                        buf.z[s * out + j] = static_cast<float>(z);
                        const double pre = bn.gamma[j] * z + bn.beta[j];
                        buf.h[s * out + j] = pre > 0.0 ? 1 : 0;
                    }
                }
            } else {
#pragma omp parallel for schedule(static)
                for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(b); ++si) {
                    const std::size_t s = static_cast<std::size_t>(si);
                    for (std::size_t j = 0; j < out; ++j) {
                        const std::int32_t theta =
                            layer.thresholds.empty() ? 0 : layer.thresholds[j];
                        const bool flip =
                            !layer.flipped.empty() && layer.flipped[j] != 0;
                        const std::int32_t a = buf.a[s * out + j];
                        buf.h[s * out + j] = (flip ? a < theta : a > theta) ? 1 : 0;
                    }
                }
            }
        }
    }

    void backward_batch(const std::vector<std::vector<float>>* mse_targets) {
        const std::size_t b = batch_.size();
        const std::size_t d = enc_.output_dim();
        const std::size_t K = train_.num_classes;
        const auto& top = buffers_.back();
        std::vector<float> dh(b * d, 0.0f);

        if (mse_targets == nullptr) {
            head_grad_u_.assign(K * d, 0.0f);
            head_grad_b_.assign(K, 0.0f);
            std::vector<float> dlogits(b * K, 0.0f);
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(b); ++si) {
                const std::size_t s = static_cast<std::size_t>(si);
                const std::uint8_t* h = top.h.data() + s * d;
                std::vector<double> logits(K, 0.0);
                for (std::size_t k = 0; k < K; ++k) {
                    double z = head_b_[k];
                    const float* row = head_u_.data() + k * d;
                    for (std::size_t j = 0; j < d; ++j) {
                        if (h[j]) {
                            z += row[j];
                        }
                    }
                    logits[k] = z;
                }
                const double zmax = *std::max_element(logits.begin(), logits.end());
                double denom = 0.0;
                for (std::size_t k = 0; k < K; ++k) {
                    denom += std::exp(logits[k] - zmax);
                }
                const std::uint16_t label = train_.labels[batch_[s]];
                for (std::size_t k = 0; k < K; ++k) {
                    const double p = std::exp(logits[k] - zmax) / denom;
                    dlogits[s * K + k] = static_cast<float>(
                        (p - (k == label ? 1.0 : 0.0)) / static_cast<double>(b));
                }
                float* dhs = dh.data() + s * d;
                for (std::size_t k = 0; k < K; ++k) {
                    const float g = dlogits[s * K + k];
                    const float* row = head_u_.data() + k * d;
                    for (std::size_t j = 0; j < d; ++j) {
                        dhs[j] += g * row[j];
                    }
                }
            }
            // Head gradients, summed in sample order per entry.
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t ki = 0; ki < static_cast<std::ptrdiff_t>(K); ++ki) {
                const std::size_t k = static_cast<std::size_t>(ki);
                float* gu = head_grad_u_.data() + k * d;
                for (std::size_t s = 0; s < b; ++s) {
                    const float g = dlogits[s * K + k];
                    head_grad_b_[k] += g;
                    const std::uint8_t* h = top.h.data() + s * d;
                    for (std::size_t j = 0; j < d; ++j) {
                        if (h[j]) {
                            gu[j] += g;
                        }
                    }
                }
            }
        } else {
            const float scale = 2.0f / static_cast<float>(b * d);
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(b); ++si) {
                const std::size_t s = static_cast<std::size_t>(si);
                const auto& target = (*mse_targets)[batch_[s]];
                for (std::size_t j = 0; j < d; ++j) {
                    dh[s * d + j] =
                        scale * (static_cast<float>(top.h[s * d + j]) - target[j]);
                }
            }
        }

        // Walk layers top-down; dh holds the gradient wrt this layer's
        // output bits, da the gradient wrt its integer pre-activation.
        for (std::size_t l = enc_.layers.size(); l-- > 0;) {
            auto& layer = enc_.layers[l];
            auto& buf = buffers_[l];
            const std::size_t out = layer.out_dim;
            buf.da.assign(b * out, 0.0f);
            if (layer.bn_state.has_value()) {
                auto& bn = *layer.bn_state;
                std::fill(buf.grad_gamma.begin(), buf.grad_gamma.end(), 0.0);
                std::fill(buf.grad_beta.begin(), buf.grad_beta.end(), 0.0);
#pragma omp parallel for schedule(static)
                for (std::ptrdiff_t ji = 0; ji < static_cast<std::ptrdiff_t>(out); ++ji) {
                    const std::size_t j = static_cast<std::size_t>(ji);
                    // STE through the step: d(pre)/dh = 1.
                    double sum_dz = 0.0;
                    double sum_dzz = 0.0;
                    for (std::size_t s = 0; s < b; ++s) {
                        const double dpre = dh[s * out + j];
                        const double z = buf.z[s * out + j];
                        buf.grad_gamma[j] += dpre * z;
                        buf.grad_beta[j] += dpre;
                        const double dz = dpre * bn.gamma[j];
                        sum_dz += dz;
                        sum_dzz += dz * z;
                    }
                    const double inv_b = 1.0 / static_cast<double>(b);
                    const double inv_sd = batch_inv_sd_[l][j];
                    for (std::size_t s = 0; s < b; ++s) {
                        const double dz = dh[s * out + j] * bn.gamma[j];
                        const double z = buf.z[s * out + j];
                        buf.da[s * out + j] = static_cast<float>(
                            inv_sd * (dz - inv_b * sum_dz - z * inv_b * sum_dzz));
                    }
                }
            } else {
                // STE: the step passes the gradient straight through.
                std::copy(dh.begin(), dh.end(), buf.da.begin());
            }

            // Weight gradient: grad_w[j][i] = sum_s da[s][j] * in_bit[s][i].
            std::fill(buf.grad_w.begin(), buf.grad_w.end(), 0.0f);
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t ji = 0; ji < static_cast<std::ptrdiff_t>(out); ++ji) {
                const std::size_t j = static_cast<std::size_t>(ji);
                float* row = buf.grad_w.data() + j * layer.in_dim;
                for (std::size_t s = 0; s < b; ++s) {
                    const float g = buf.da[s * out + j];
                    if (g == 0.0f) {
                        continue;
                    }
                    if (l == 0) {
                        for (std::uint32_t i : active_[batch_[s]]) {
                            row[i] += g;
                        }
                    } else {
                        const std::uint8_t* hin =
                            buffers_[l - 1].h.data() + s * layer.in_dim;
                        for (std::size_t i = 0; i < layer.in_dim; ++i) {
                            if (hin[i]) {
                                row[i] += g;
                            }
                        }
                    }
                }
            }

            if (l > 0) {
                // Propagate to the previous layer's output bits (STE
                // treats the binary input as pass-through too).
                std::vector<float> dh_prev(b * layer.in_dim, 0.0f);
#pragma omp parallel for schedule(static)
                for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(b); ++si) {
                    const std::size_t s = static_cast<std::size_t>(si);
                    float* dst = dh_prev.data() + s * layer.in_dim;
                    for (std::size_t j = 0; j < out; ++j) {
                        const float g = buf.da[s * out + j];
                        if (g == 0.0f) {
                            continue;
                        }
                        const std::int8_t* wrow =
                            layer.quantized_weights.data() + j * layer.in_dim;
                        for (std::size_t i = 0; i < layer.in_dim; ++i) {
                            dst[i] += g * wrow[i];
                        }
                    }
                }
                dh = std::move(dh_prev);
            }
        }
    }

    void apply_updates() {
        const float lr = static_cast<float>(cfg_.learning_rate);
        for (std::size_t l = 0; l < enc_.layers.size(); ++l) {
            auto& layer = enc_.layers[l];
            auto& buf = buffers_[l];
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t k = 0;
                 k < static_cast<std::ptrdiff_t>(layer.shadow_weights.size()); ++k) {
                layer.shadow_weights[k] -= lr * buf.grad_w[k];
            }
            layer.weight_clip = static_cast<std::int32_t>(cfg_.weight_clip);
            layer.requantize();
            retranspose(l);
            if (layer.bn_state.has_value()) {
                auto& bn = *layer.bn_state;
                for (std::size_t j = 0; j < layer.out_dim; ++j) {
                    bn.gamma[j] -= cfg_.learning_rate * buf.grad_gamma[j];
                    bn.beta[j] -= cfg_.learning_rate * buf.grad_beta[j];
                }
            }
        }
        if (!head_u_.empty()) {
            for (std::size_t k = 0; k < head_u_.size(); ++k) {
                head_u_[k] -= lr * head_grad_u_[k];
            }
            for (std::size_t k = 0; k < head_b_.size(); ++k) {
                head_b_[k] -= lr * head_grad_b_[k];
            }
        }
    }

    // Replace the training-time batch statistics with population
    // statistics over the full training set, layer by layer.
    void finalize_bn_stats() {
        bool any = false;
        for (const auto& layer : enc_.layers) {
            if (layer.bn_state.has_value()) {
                any = true;
            }
        }
        if (!any) {
            return;
        }
        const std::size_t n = train_.samples.size();
        std::vector<std::vector<std::uint8_t>> h_prev;
        for (std::size_t l = 0; l < enc_.layers.size(); ++l) {
            auto& layer = enc_.layers[l];
            const std::size_t out = layer.out_dim;
            std::vector<std::vector<std::int32_t>> acts(n);
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(n); ++si) {
                const std::size_t s = static_cast<std::size_t>(si);
                std::vector<std::int32_t> acc(out, 0);
                if (l == 0) {
                    for (std::uint32_t i : active_[s]) {
                        const std::int8_t* col =
                            buffers_[l].qt.data() + static_cast<std::size_t>(i) * out;
                        for (std::size_t j = 0; j < out; ++j) {
                            acc[j] += col[j];
                        }
                    }
                } else {
                    for (std::size_t i = 0; i < layer.in_dim; ++i) {
                        if (h_prev[s][i] == 0) {
                            continue;
                        }
                        const std::int8_t* col = buffers_[l].qt.data() + i * out;
                        for (std::size_t j = 0; j < out; ++j) {
                            acc[j] += col[j];
                        }
                    }
                }
                acts[s] = std::move(acc);
            }
            if (layer.bn_state.has_value()) {
                auto& bn = *layer.bn_state;
                for (std::size_t j = 0; j < out; ++j) {
                    double mean = 0.0;
                    for (std::size_t s = 0; s < n; ++s) {
                        mean += acts[s][j];
                    }
                    mean /= static_cast<double>(n);
                    double var = 0.0;
                    for (std::size_t s = 0; s < n; ++s) {
                        const double dv = acts[s][j] - mean;
                        var += dv * dv;
                    }
                    var /= static_cast<double>(n);
                    bn.mean[j] = mean;
                    bn.var[j] = var;
                }
            }
            // Forward this layer with its inference rule to feed the next.
            std::vector<std::vector<std::uint8_t>> h_now(n);
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(n); ++si) {
                const std::size_t s = static_cast<std::size_t>(si);
                std::vector<std::uint8_t> bits(out, 0);
                for (std::size_t j = 0; j < out; ++j) {
                    if (layer.bn_state.has_value()) {
                        const auto& bn = *layer.bn_state;
                        const double z = (acts[s][j] - bn.mean[j]) /
                                         std::sqrt(bn.var[j] + bn.epsilon);
                        bits[j] = bn.gamma[j] * z + bn.beta[j] > 0.0 ? 1 : 0;
                    } else {
                        const std::int32_t theta =
                            layer.thresholds.empty() ? 0 : layer.thresholds[j];
                        const bool flip =
                            !layer.flipped.empty() && layer.flipped[j] != 0;
                        bits[j] = (flip ? acts[s][j] < theta : acts[s][j] > theta)
                                      ? 1
                                      : 0;
                    }
                }
                h_now[s] = std::move(bits);
            }
            h_prev = std::move(h_now);
        }
    }

public:
    // Sized in the constructor of run(); per-layer batch statistics.
    std::vector<std::vector<double>> batch_mean_;
    std::vector<std::vector<double>> batch_inv_sd_;

private:
    LearnedEncoder& enc_;
    const LabeledBinaryDataset& train_;
    const TrainConfig& cfg_;
    SplittableRng shuffle_rng_;
    std::vector<std::vector<std::uint32_t>> active_;
    std::vector<std::size_t> batch_;
    std::vector<LayerBuffers> buffers_;
    std::vector<float> head_u_;
    std::vector<float> head_b_;
    std::vector<float> head_grad_u_;
    std::vector<float> head_grad_b_;

public:
    void init_stat_buffers() {
        batch_mean_.resize(enc_.layers.size());
        batch_inv_sd_.resize(enc_.layers.size());
        for (std::size_t l = 0; l < enc_.layers.size(); ++l) {
            batch_mean_[l].assign(enc_.layers[l].out_dim, 0.0);
            batch_inv_sd_[l].assign(enc_.layers[l].out_dim, 1.0);
        }
    }
};

void attach_batch_norm(LearnedEncoder& enc) {
    for (auto& layer : enc.layers) {
        BatchNormState bn;
        bn.mean.assign(layer.out_dim, 0.0);
        bn.var.assign(layer.out_dim, 1.0);
        bn.gamma.assign(layer.out_dim, 1.0);
        bn.beta.assign(layer.out_dim, 0.0);
        layer.bn_state = std::move(bn);
    }
}

} // namespace

LearnedEncoder train_encoder(const LabeledBinaryDataset& train,
                             std::size_t hv_dim, const TrainConfig& cfg) {
    if (train.samples.empty()) {
        throw std::invalid_argument("train_encoder: empty dataset");
    }
    std::vector<std::size_t> shape;
    if (cfg.num_layers >= 2) {
        const std::size_t hidden = cfg.hidden_dim == 0 ? hv_dim : cfg.hidden_dim;
        for (std::size_t l = 0; l + 1 < cfg.num_layers; ++l) {
            shape.push_back(hidden);
        }
    }
    shape.push_back(hv_dim);
    SplittableRng weight_rng(cfg.seed, streams::kWeights);
    LearnedEncoder enc = make_encoder(train.input_dim, shape, weight_rng);
    for (auto& layer : enc.layers) {
        layer.weight_clip = static_cast<std::int32_t>(cfg.weight_clip);
    }
    if (cfg.num_layers >= 2 && cfg.batch_norm) {
        attach_batch_norm(enc);
    }
    if (cfg.epochs == 0) {
        return enc;
    }

    EncoderTrainer trainer(enc, train, cfg);
    trainer.init_stat_buffers();
    if (cfg.objective == TrainObjective::MseToPrototype) {
        // No prototypes exist before initial training; bootstrap them
        // from the freshly initialized encoder.
        const LearnedEncoder init_view =
            enc.layers.front().bn_state.has_value() ? fold_batchnorm(enc) : enc;
        const ClassPrototypes proto =
            generate_representations(init_view, train, default_theta(train));
        std::vector<std::vector<float>> targets(train.samples.size());
        for (std::size_t s = 0; s < train.samples.size(); ++s) {
            const auto& rep = proto.reps[train.labels[s]];
            targets[s].resize(proto.dim);
            for (std::size_t j = 0; j < proto.dim; ++j) {
                targets[s][j] = rep.bit(j) ? 1.0f : 0.0f;
            }
        }
        trainer.run(&targets);
    } else {
        trainer.run(nullptr);
    }
    return enc;
}

LearnedEncoder retrain_step1(LearnedEncoder enc, const ClassPrototypes& prototypes,
                             const LabeledBinaryDataset& train,
                             const TrainConfig& cfg) {
    if (cfg.epochs == 0) {
        return enc;
    }
    std::vector<std::vector<float>> targets(train.samples.size());
    for (std::size_t s = 0; s < train.samples.size(); ++s) {
        const auto& rep = prototypes.reps[train.labels[s]];
        targets[s].resize(prototypes.dim);
        for (std::size_t j = 0; j < prototypes.dim; ++j) {
            targets[s][j] = rep.bit(j) ? 1.0f : 0.0f;
        }
    }
    EncoderTrainer trainer(enc, train, cfg);
    trainer.init_stat_buffers();
    trainer.run(&targets);
    return enc;
}

} // namespace ehdc
