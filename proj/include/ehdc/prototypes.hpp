#pragma once

#include <cstdint>
#include <vector>

#include "ehdc/datasets.hpp"
#include "ehdc/encoder.hpp"
#include "ehdc/hypervector.hpp"

namespace ehdc {

// Per-class sums S_c with their thresholded binary representations R_c.
// The invariant reps[c][i] == (sums[c][i] > theta) holds after every
// mutation; regenerate() restores it.
struct ClassPrototypes {
    std::size_t num_classes = 0;
    std::size_t dim = 0;
    double theta = 0.0;
    std::vector<std::vector<double>> sums;
    std::vector<BinaryHypervector> reps;

    void regenerate();
};

struct OpCountReport {
    std::uint64_t encoder_additions = 0;
    std::uint64_t boolean_ops = 0;
    std::uint64_t similarity_ops = 0;
};

// Architecture descriptor for op accounting: layer widths for the learned
// encoder, or positions x dim for the classic one.
struct ArchDescriptor {
    bool classic = false;
    std::size_t input_dim = 0;
    std::vector<std::size_t> layer_dims; // learned: out widths per layer
    std::size_t hv_dim = 0;              // classic: d
    std::size_t num_classes = 0;
};

// Sum each class's encoder outputs in the {0,1} view and threshold at
// theta (strict >). Throws if some class has no samples.
ClassPrototypes generate_representations(const LearnedEncoder& enc,
                                         const LabeledBinaryDataset& train,
                                         double theta);

// One or more sequential passes of the misclassification update: add
// lr*r to the true class's sum, subtract lr*r from the predicted one.
// Within a pass predictions use the representations frozen at pass
// start; all R_c regenerate at pass end.
ClassPrototypes retrain_step2(const LearnedEncoder& enc,
                              ClassPrototypes prototypes,
                              const LabeledBinaryDataset& train, double lr,
                              std::size_t passes);

// argmax_c sim_active(encode(x), R_c); ties go to the lowest class index.
std::size_t predict(const LearnedEncoder& enc, const ClassPrototypes& prototypes,
                    const BinaryHypervector& x);

std::size_t predict_encoded(const ClassPrototypes& prototypes,
                            const BinaryHypervector& r);

struct EvalResult {
    double accuracy = 0.0;
    std::vector<std::vector<std::uint64_t>> confusion; // [true][predicted]
};

EvalResult evaluate(const LearnedEncoder& enc, const ClassPrototypes& prototypes,
                    const LabeledBinaryDataset& test);

OpCountReport count_ops(const ArchDescriptor& arch);

// Default threshold: half the median class size (true majority).
double default_theta(const LabeledBinaryDataset& train);

} // namespace ehdc
