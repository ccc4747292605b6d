#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ehdc/hypervector.hpp"

namespace ehdc {

// Per-unit batch-norm parameters kept during 2-layer training; folded into
// integer thresholds before inference.
struct BatchNormState {
    std::vector<double> mean;
    std::vector<double> var;
    std::vector<double> gamma;
    std::vector<double> beta;
    double epsilon = 1e-5;
};

// Fully-connected layer with integer forward weights and a binary step
// activation. shadow_weights is the real-valued training master copy;
// quantized_weights = round(shadow) clamped to [-weight_clip, weight_clip]
// and is the only thing inference touches.
struct DenseBinaryLayer {
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    std::vector<float> shadow_weights;       // row-major [out][in]
    std::vector<std::int8_t> quantized_weights; // row-major [out][in]
    std::vector<std::int32_t> thresholds;    // per output unit, default 0
    // Per-unit comparison direction: false -> activate iff a > threshold,
    // true -> activate iff a < threshold (negative batch-norm gamma).
    std::vector<std::uint8_t> flipped;
    std::optional<BatchNormState> bn_state;
    std::int32_t weight_clip = 127;

    // Refresh quantized_weights from shadow_weights.
    void requantize();

    const std::int8_t& qw(std::size_t out, std::size_t in) const {
        return quantized_weights[out * in_dim + in];
    }
};

struct LearnedEncoder {
    std::vector<DenseBinaryLayer> layers;

    std::size_t input_dim() const { return layers.front().in_dim; }
    std::size_t output_dim() const { return layers.back().out_dim; }
};

// Tallies for the multiplication-free-inference check.
struct OpCounter {
    std::uint64_t additions = 0;
    std::uint64_t comparisons = 0;
    std::uint64_t multiplications = 0;
};

// Integer pre-activations of one layer for a packed binary input: sum of
// the weight columns whose input bit is 1.
std::vector<std::int32_t> layer_preactivations(const DenseBinaryLayer& layer,
                                               const BinaryHypervector& x);

// Integer-only forward pass over all layers. Weights are gathered and
// added; no multiplications anywhere on this path.
BinaryHypervector encode_learned(const BinaryHypervector& x,
                                 const LearnedEncoder& enc,
                                 OpCounter* counter = nullptr);

// Random ±1 initialization of all shadow (and thus quantized) weights;
// a 1-layer encoder initialized this way is the classic HDC encoder with
// its bound item-memory columns as weights.
LearnedEncoder make_encoder(std::size_t input_dim,
                            const std::vector<std::size_t>& layer_out_dims,
                            SplittableRng& rng);

// Fold each layer's batch-norm affine into its integer threshold (and
// per-unit direction flag when gamma < 0). Throws if no layer carries
// bn_state.
LearnedEncoder fold_batchnorm(const LearnedEncoder& enc);

} // namespace ehdc
