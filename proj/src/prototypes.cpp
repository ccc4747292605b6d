#include "ehdc/prototypes.hpp"

#include <algorithm>
#include <stdexcept>

#include "ehdc/kernels.hpp"

namespace ehdc {

void ClassPrototypes::regenerate() {
    reps.assign(num_classes, BinaryHypervector(dim));
    for (std::size_t c = 0; c < num_classes; ++c) {
        for (std::size_t i = 0; i < dim; ++i) {
            reps[c].set_bit(i, sums[c][i] > theta);
        }
    }
}

ClassPrototypes generate_representations(const LearnedEncoder& enc,
                                         const LabeledBinaryDataset& train,
                                         double theta) {
    ClassPrototypes proto;
    proto.num_classes = train.num_classes;
    proto.dim = enc.output_dim();
    proto.theta = theta;
    proto.sums.assign(proto.num_classes, std::vector<double>(proto.dim, 0.0));
    std::vector<std::size_t> class_counts(proto.num_classes, 0);

    const std::vector<BinaryHypervector> encoded = batch_encode(enc, train.samples);
    for (std::size_t s = 0; s < encoded.size(); ++s) {
        const std::uint16_t c = train.labels[s];
        ++class_counts[c];
        auto& sum = proto.sums[c];
        for (std::size_t i = 0; i < proto.dim; ++i) {
            sum[i] += encoded[s].bit(i) ? 1.0 : 0.0;
        }
    }
    for (std::size_t c = 0; c < proto.num_classes; ++c) {
        if (class_counts[c] == 0) {
            throw std::invalid_argument("generate_representations: class " +
                                     std::to_string(c) + " has no samples");
        }
    }
    proto.regenerate();
    return proto;
}

ClassPrototypes retrain_step2(const LearnedEncoder& enc,
                              ClassPrototypes prototypes,
                              const LabeledBinaryDataset& train, double lr,
                              std::size_t passes) {
    if (lr <= 0.0) {
        throw std::invalid_argument("retrain_step2: lr must be > 0");
    }
    const std::vector<BinaryHypervector> encoded = batch_encode(enc, train.samples);
    for (std::size_t pass = 0; pass < passes; ++pass) {
        // Predictions within a pass use the reps frozen at pass start;
        // sums update immediately, reps regenerate at pass end.
        for (std::size_t s = 0; s < encoded.size(); ++s) {
            const std::size_t predicted = predict_encoded(prototypes, encoded[s]);
            const std::size_t truth = train.labels[s];
            if (predicted == truth) {
                continue;
            }
            auto& sum_true = prototypes.sums[truth];
            auto& sum_wrong = prototypes.sums[predicted];
            for (std::size_t i = 0; i < prototypes.dim; ++i) {
                if (encoded[s].bit(i)) {
                    sum_true[i] += lr;
                    sum_wrong[i] -= lr;
                }
            }
        }
        prototypes.regenerate();
    }
    return prototypes;
}

std::size_t predict_encoded(const ClassPrototypes& prototypes,
                            const BinaryHypervector& r) {
    std::size_t best = 0;
    std::int64_t best_score = sim_active(r, prototypes.reps[0]);
    for (std::size_t c = 1; c < prototypes.num_classes; ++c) {
        const std::int64_t score = sim_active(r, prototypes.reps[c]);
        if (score > best_score) {
            best_score = score;
            best = c;
        }
    }
    return best;
}

std::size_t predict(const LearnedEncoder& enc, const ClassPrototypes& prototypes,
                    const BinaryHypervector& x) {
    return predict_encoded(prototypes, encode_learned(x, enc));
}

EvalResult evaluate(const LearnedEncoder& enc, const ClassPrototypes& prototypes,
                    const LabeledBinaryDataset& test) {
    if (test.samples.empty()) {
        throw std::invalid_argument("evaluate: empty test set");
    }
    EvalResult res;
    res.confusion.assign(prototypes.num_classes,
                         std::vector<std::uint64_t>(prototypes.num_classes, 0));
    const std::vector<std::size_t> predictions =
        batch_predict(enc, prototypes, test.samples);
    std::size_t correct = 0;
    for (std::size_t s = 0; s < predictions.size(); ++s) {
        res.confusion[test.labels[s]][predictions[s]] += 1;
        if (predictions[s] == test.labels[s]) {
            ++correct;
        }
    }
    res.accuracy = static_cast<double>(correct) /
                   static_cast<double>(predictions.size());
    return res;
}

OpCountReport count_ops(const ArchDescriptor& arch) {
    OpCountReport report;
    if (arch.classic) {
        // Bind + accumulate over every position.
        report.encoder_additions = arch.input_dim * arch.hv_dim;
        report.boolean_ops = report.encoder_additions;
        report.similarity_ops = arch.num_classes * arch.hv_dim;
        return report;
    }
    std::size_t in = arch.input_dim;
    for (std::size_t out : arch.layer_dims) {
        report.encoder_additions += in * out;
        in = out;
    }
    report.boolean_ops = 0;
    report.similarity_ops = arch.num_classes * in;
    return report;
}

double default_theta(const LabeledBinaryDataset& train) {
    std::vector<std::size_t> counts(train.num_classes, 0);
    for (std::uint16_t lab : train.labels) {
        ++counts[lab];
    }
    std::sort(counts.begin(), counts.end());
    const std::size_t n = counts.size();
    const double median = (n % 2 == 1)
                              ? static_cast<double>(counts[n / 2])
                              : (static_cast<double>(counts[n / 2 - 1]) +
                                 static_cast<double>(counts[n / 2])) /
                                    2.0;
    return median / 2.0;
}

} // namespace ehdc
