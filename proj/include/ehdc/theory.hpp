#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ehdc/rng.hpp"

namespace ehdc {

// One accuracy-vs-dimension record; stderr == 0 marks an exact value.
struct TheoryResult {
    std::size_t d = 0;
    double value = 0.0;
    double stderr_ = 0.0;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
};

// Closed-form worst-case two-class accuracy:
// 1 - arccos(1 / sqrt(sum_{j=1..d} (sqrt(j)-sqrt(j-1))^2)) / pi.
TheoryResult worst_case_accuracy(std::size_t d);

// Monte-Carlo average-case accuracy over support pairs drawn uniformly
// from [0,1]^d; reports mean and standard error of the mean.
TheoryResult average_case_accuracy(std::size_t d, std::size_t n_samples,
                                   std::uint64_t seed);

// One-against-one reduction: mean of the off-diagonal pairwise
// accuracies. pairwise is K x K with an ignored diagonal.
double quasi_accuracy(const std::vector<std::vector<double>>& pairwise);

// Two-halfspace agreement probability for x uniform on the unit ball:
// (1/2)(1 - arccos(cos phi)/pi), phi the angle between the difference
// vectors.
double lemma1_closed_form(std::span<const double> theta1,
                          std::span<const double> theta2,
                          std::span<const double> theta_hat1,
                          std::span<const double> theta_hat2);

struct MonteCarloEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

// Direct estimate of the same probability by sampling x uniformly on the
// unit ball (Gaussian direction, radius U^(1/d)).
MonteCarloEstimate lemma1_monte_carlo(std::span<const double> theta1,
                                      std::span<const double> theta2,
                                      std::span<const double> theta_hat1,
                                      std::span<const double> theta_hat2,
                                      std::size_t n, std::uint64_t seed);

struct SupResult {
    double value = 0.0;
    std::size_t best_prefix = 0; // maximizing prefix length j
};

// Order-statistic form of the best cosine against {-1,0,1}^d sign
// vectors: max over prefixes j of sum of the j largest |delta| over
// (sqrt(j) * ||delta||).
SupResult lemma2_sup(std::span<const double> delta);

// Exhaustive oracle over all 3^d - 1 nonzero sign vectors; refuses d > 12.
double lemma2_bruteforce(std::span<const double> delta);

// Builds the boundary-achieving support pair (theta1 = sqrt-difference
// profile, theta2 = 0) and evaluates its accuracy through lemma2_sup;
// equals worst_case_accuracy(d).
double theorem1_construction_check(std::size_t d);

struct ProjectionRow {
    std::size_t d = 0;
    double mean_accuracy = 0.0;
};

// For random support pairs in [0,1]^m, the best achievable two-class
// accuracy using binary approximants restricted to at most d coordinates,
// exhaustively maximized; non-decreasing in d per pair. Refuses m > 6.
std::vector<ProjectionRow> projection_monotonicity_experiment(
    std::size_t m, std::size_t trials, std::uint64_t seed,
    std::size_t* violations = nullptr);

} // namespace ehdc
