#include "ehdc/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ehdc {

void DenseBinaryLayer::requantize() {
    quantized_weights.resize(shadow_weights.size());
    const float lo = static_cast<float>(-weight_clip);
    const float hi = static_cast<float>(weight_clip);
    for (std::size_t k = 0; k < shadow_weights.size(); ++k) {
        const float c = std::clamp(shadow_weights[k], lo, hi);
        quantized_weights[k] = static_cast<std::int8_t>(std::lround(c));
    }
}

std::vector<std::int32_t> layer_preactivations(const DenseBinaryLayer& layer,
                                               const BinaryHypervector& x) {
    if (x.dim() != layer.in_dim) {
        throw std::invalid_argument("layer_preactivations: input dim " +
                                    std::to_string(x.dim()) + " != layer in_dim " +
                                    std::to_string(layer.in_dim));
    }
    std::vector<std::int32_t> acc(layer.out_dim, 0);
    for (std::size_t i = 0; i < layer.in_dim; ++i) {
        if (!x.bit(i)) {
            continue;
        }
        const std::int8_t* col = layer.quantized_weights.data() + i;
        for (std::size_t j = 0; j < layer.out_dim; ++j) {
            acc[j] += col[j * layer.in_dim];
        }
    }
    return acc;
}

BinaryHypervector encode_learned(const BinaryHypervector& x,
                                 const LearnedEncoder& enc,
                                 OpCounter* counter) {
    if (enc.layers.empty()) {
        throw std::invalid_argument("encode_learned: encoder has no layers");
    }
    BinaryHypervector h = x;
    for (const auto& layer : enc.layers) {
        if (counter != nullptr) {
            counter->additions += h.popcount() * layer.out_dim;
            counter->comparisons += layer.out_dim;
        }
        const std::vector<std::int32_t> acc = layer_preactivations(layer, h);
        BinaryHypervector next(layer.out_dim);
        for (std::size_t j = 0; j < layer.out_dim; ++j) {
            const std::int32_t theta =
                layer.thresholds.empty() ? 0 : layer.thresholds[j];
            const bool flip = !layer.flipped.empty() && layer.flipped[j] != 0;
            next.set_bit(j, flip ? acc[j] < theta : acc[j] > theta);
        }
        h = std::move(next);
    }
    return h;
}

LearnedEncoder make_encoder(std::size_t input_dim,
                            const std::vector<std::size_t>& layer_out_dims,
                            SplittableRng& rng) {
    if (input_dim == 0 || layer_out_dims.empty()) {
        throw std::invalid_argument("make_encoder: empty shape");
    }
    LearnedEncoder enc;
    std::size_t in = input_dim;
    for (std::size_t out : layer_out_dims) {
        if (out == 0) {
            throw std::invalid_argument("make_encoder: zero layer width");
        }
        DenseBinaryLayer layer;
        layer.in_dim = in;
        layer.out_dim = out;
        layer.shadow_weights.resize(in * out);
        for (auto& w : layer.shadow_weights) {
            w = rng.next_bit() ? 1.0f : -1.0f;
        }
        layer.thresholds.assign(out, 0);
        layer.flipped.assign(out, 0);
        layer.requantize();
        enc.layers.push_back(std::move(layer));
        in = out;
    }
    return enc;
}

LearnedEncoder fold_batchnorm(const LearnedEncoder& enc) {
    bool any = false;
    LearnedEncoder out = enc;
    for (auto& layer : out.layers) {
        if (!layer.bn_state.has_value()) {
            continue;
        }
        any = true;
        const BatchNormState& bn = *layer.bn_state;
        layer.thresholds.assign(layer.out_dim, 0);
        layer.flipped.assign(layer.out_dim, 0);
        for (std::size_t j = 0; j < layer.out_dim; ++j) {
            const double sd = std::sqrt(bn.var[j] + bn.epsilon);
            const double gamma = bn.gamma[j];
            const double beta = bn.beta[j];
            // Activate iff gamma*(a - mean)/sd + beta > 0. gamma == 0
            // leaves a constant unit: threshold pushed past any reachable
            // pre-activation.
            if (gamma == 0.0) {
                const bool always_on = beta > 0.0;
                layer.thresholds[j] = always_on ? INT32_MIN : INT32_MAX;
                layer.flipped[j] = 0;
                continue;
            }
            const double boundary = bn.mean[j] - beta * sd / gamma;
            if (gamma > 0.0) {
                // a > boundary, a integer: threshold = floor(boundary).
                layer.thresholds[j] = static_cast<std::int32_t>(std::floor(boundary));
                layer.flipped[j] = 0;
            } else {
                // a < boundary: threshold = ceil(boundary).
                layer.thresholds[j] = static_cast<std::int32_t>(std::ceil(boundary));
                layer.flipped[j] = 1;
            }
        }
        layer.bn_state.reset();
    }
    if (!any) {
        throw std::invalid_argument("fold_batchnorm: no layer has bn_state");
    }
    return out;
}

} // namespace ehdc
