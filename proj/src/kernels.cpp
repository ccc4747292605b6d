#include "ehdc/kernels.hpp"

namespace ehdc {

std::vector<BinaryHypervector> batch_encode(const LearnedEncoder& enc,
                                            const std::vector<BinaryHypervector>& xs) {
    std::vector<BinaryHypervector> out(xs.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(xs.size()); ++s) {
        out[s] = encode_learned(xs[s], enc);
    }
    return out;
}

std::vector<std::size_t> batch_predict(const LearnedEncoder& enc,
                                       const ClassPrototypes& prototypes,
                                       const std::vector<BinaryHypervector>& xs) {
    std::vector<std::size_t> out(xs.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(xs.size()); ++s) {
        out[s] = predict_encoded(prototypes, encode_learned(xs[s], enc));
    }
    return out;
}

std::vector<std::size_t> hamming_many(const BinaryHypervector& query,
                                      const std::vector<BinaryHypervector>& candidates) {
    std::vector<std::size_t> out(candidates.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(candidates.size()); ++s) {
        out[s] = hamming(query, candidates[s]);
    }
    return out;
}

namespace serial {

std::vector<BinaryHypervector> batch_encode(const LearnedEncoder& enc,
                                            const std::vector<BinaryHypervector>& xs) {
    std::vector<BinaryHypervector> out;
    out.reserve(xs.size());
    for (const auto& x : xs) {
        out.push_back(encode_learned(x, enc));
    }
    return out;
}

std::vector<std::size_t> batch_predict(const LearnedEncoder& enc,
                                       const ClassPrototypes& prototypes,
                                       const std::vector<BinaryHypervector>& xs) {
    std::vector<std::size_t> out;
    out.reserve(xs.size());
    for (const auto& x : xs) {
        out.push_back(predict_encoded(prototypes, encode_learned(x, enc)));
    }
    return out;
}

std::vector<std::size_t> hamming_many(const BinaryHypervector& query,
                                      const std::vector<BinaryHypervector>& candidates) {
    std::vector<std::size_t> out;
    out.reserve(candidates.size());
    for (const auto& c : candidates) {
        out.push_back(hamming(query, c));
    }
    return out;
}

} // namespace serial

} // namespace ehdc
