#pragma once

#include <cstdint>
#include <vector>

#include "ehdc/datasets.hpp"
#include "ehdc/encoder.hpp"
#include "ehdc/prototypes.hpp"

namespace ehdc {

enum class TrainObjective { AuxHeadCrossEntropy, MseToPrototype };

struct TrainConfig {
    std::size_t epochs = 20;
    std::size_t batch_size = 64;
    double learning_rate = 1e-3;
    double weight_clip = 127.0;
    std::uint64_t seed = 0;
    TrainObjective objective = TrainObjective::AuxHeadCrossEntropy;
    std::size_t num_layers = 1;
    std::size_t hidden_dim = 0; // 0: same width as the hypervector dim
    bool batch_norm = true;     // attached only when num_layers >= 2
};

// Named substreams split off the master seed so toggling one feature
// does not perturb the others.
namespace streams {
constexpr std::uint64_t kWeights = 1;
constexpr std::uint64_t kShuffle = 2;
constexpr std::uint64_t kTies = 3;
constexpr std::uint64_t kMonteCarlo = 4;
} // namespace streams

// Initial encoder training: forward uses quantized weights and hard
// {0,1} activations, backward treats both the step and the rounding as
// identity (straight-through). Under AuxHeadCrossEntropy a temporary
// real-valued linear head is trained jointly and discarded on return.
LearnedEncoder train_encoder(const LabeledBinaryDataset& train,
                             std::size_t hv_dim, const TrainConfig& cfg);

// Retraining step 1: STE-SGD on the mean squared error between the
// encoder's output bits and the true class's binary representation.
// Prototypes are left untouched.
LearnedEncoder retrain_step1(LearnedEncoder enc, const ClassPrototypes& prototypes,
                             const LabeledBinaryDataset& train,
                             const TrainConfig& cfg);

} // namespace ehdc
