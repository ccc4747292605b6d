#pragma once

#include <cstddef>
#include <vector>

#include "ehdc/datasets.hpp"
#include "ehdc/encoder.hpp"
#include "ehdc/prototypes.hpp"

namespace ehdc {

// Bulk kernels. The default entry points are OpenMP-parallel over samples
// (all integer work, so thread count cannot change results); the serial::
// twins are the reference implementations the tests and the benchmark
// compare against.

std::vector<BinaryHypervector> batch_encode(const LearnedEncoder& enc,
                                            const std::vector<BinaryHypervector>& xs);

std::vector<std::size_t> batch_predict(const LearnedEncoder& enc,
                                       const ClassPrototypes& prototypes,
                                       const std::vector<BinaryHypervector>& xs);

// Pairwise Hamming distances between one query and many candidates.
std::vector<std::size_t> hamming_many(const BinaryHypervector& query,
                                      const std::vector<BinaryHypervector>& candidates);

namespace serial {

std::vector<BinaryHypervector> batch_encode(const LearnedEncoder& enc,
                                            const std::vector<BinaryHypervector>& xs);

std::vector<std::size_t> batch_predict(const LearnedEncoder& enc,
                                       const ClassPrototypes& prototypes,
                                       const std::vector<BinaryHypervector>& xs);

std::vector<std::size_t> hamming_many(const BinaryHypervector& query,
                                      const std::vector<BinaryHypervector>& candidates);

} // namespace serial

} // namespace ehdc
