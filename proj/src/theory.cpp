#include "ehdc/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ehdc/train.hpp"

namespace ehdc {

namespace {

double clamped_arccos(double x) {
    if (x > 1.0) {
        if (x > 1.0 + 1e-12) {
            throw std::domain_error("arccos argument above 1");
        }
        x = 1.0;
    } else if (x < -1.0) {
        if (x < -1.0 - 1e-12) {
            throw std::domain_error("arccos argument below -1");
        }
        x = -1.0;
    }
    return std::acos(x);
}

std::vector<double> difference(std::span<const double> a,
                               std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("difference: dimension mismatch");
    }
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] - b[i];
    }
    return out;
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) {
        s += x * x;
    }
    return std::sqrt(s);
}

double cosine(std::span<const double> a, std::span<const double> b) {
    const double na = norm2(a);
    const double nb = norm2(b);
    if (na == 0.0 || nb == 0.0) {
        throw std::invalid_argument("cosine: zero difference vector");
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
    }
    return dot / (na * nb);
}

} // namespace

TheoryResult worst_case_accuracy(std::size_t d) {
    if (d == 0) {
        throw std::invalid_argument("worst_case_accuracy: d must be >= 1");
    }
    // (sqrt(j) - sqrt(j-1))^2 written as 1/(sqrt(j)+sqrt(j-1))^2 to avoid
    // cancellation at large j.
    double sum = 0.0;
    for (std::size_t j = 1; j <= d; ++j) {
        const double s = std::sqrt(static_cast<double>(j)) +
                         std::sqrt(static_cast<double>(j - 1));
        sum += 1.0 / (s * s);
    }
    TheoryResult res;
    res.d = d;
    res.value = 1.0 - clamped_arccos(1.0 / std::sqrt(sum)) / M_PI;
    return res;
}

TheoryResult average_case_accuracy(std::size_t d, std::size_t n_samples,
                                   std::uint64_t seed) {
    if (d == 0 || n_samples == 0) {
        throw std::invalid_argument("average_case_accuracy: d and n must be >= 1");
    }
    // Per-trial rng streams so trials parallelize with a deterministic
    // mean over trial index.
    std::vector<double> acc(n_samples, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ti = 0; ti < static_cast<std::ptrdiff_t>(n_samples); ++ti) {
        const std::size_t t = static_cast<std::size_t>(ti);
        SplittableRng rng(seed, streams::kMonteCarlo + t);
        std::vector<double> delta(d);
        while (true) {
            double norm = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                delta[i] = rng.next_double() - rng.next_double();
                norm += delta[i] * delta[i];
            }
            if (norm > 0.0) {
                break;
            }
            // R1 == R2 exactly is measure zero; redraw.
        }
        const SupResult sup = lemma2_sup(delta);
        acc[t] = 1.0 - clamped_arccos(sup.value) / M_PI;
    }
    double mean = 0.0;
    for (double a : acc) {
        mean += a;
    }
    mean /= static_cast<double>(n_samples);
    double var = 0.0;
    for (double a : acc) {
        var += (a - mean) * (a - mean);
    }
    TheoryResult res;
    res.d = d;
    res.value = mean;
    res.n_samples = n_samples;
    res.seed = seed;
    if (n_samples > 1) {
        var /= static_cast<double>(n_samples - 1);
        res.stderr_ = std::sqrt(var / static_cast<double>(n_samples));
    }
    return res;
}

double quasi_accuracy(const std::vector<std::vector<double>>& pairwise) {
    const std::size_t k = pairwise.size();
    if (k < 2) {
        throw std::invalid_argument("quasi_accuracy: need K >= 2");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        if (pairwise[i].size() != k) {
            throw std::invalid_argument("quasi_accuracy: matrix not square");
        }
        for (std::size_t j = 0; j < k; ++j) {
            if (i != j) {
                sum += pairwise[i][j];
            }
        }
    }
    return sum / static_cast<double>(k * (k - 1));
}

double lemma1_closed_form(std::span<const double> theta1,
                          std::span<const double> theta2,
                          std::span<const double> theta_hat1,
                          std::span<const double> theta_hat2) {
    const std::vector<double> dt = difference(theta1, theta2);
    const std::vector<double> dth = difference(theta_hat1, theta_hat2);
    const double c = cosine(dt, dth);
    return 0.5 * (1.0 - clamped_arccos(c) / M_PI);
}

MonteCarloEstimate lemma1_monte_carlo(std::span<const double> theta1,
                                      std::span<const double> theta2,
                                      std::span<const double> theta_hat1,
                                      std::span<const double> theta_hat2,
                                      std::size_t n, std::uint64_t seed) {
    if (n == 0) {
        throw std::invalid_argument("lemma1_monte_carlo: n must be >= 1");
    }
    const std::vector<double> dt = difference(theta1, theta2);
    const std::vector<double> dth = difference(theta_hat1, theta_hat2);
    if (norm2(dt) == 0.0 || norm2(dth) == 0.0) {
        throw std::invalid_argument("lemma1_monte_carlo: zero difference vector");
    }
    const std::size_t d = dt.size();
    const std::size_t num_chunks = 64;
    std::vector<std::uint64_t> chunk_hits(num_chunks, 0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ci = 0; ci < static_cast<std::ptrdiff_t>(num_chunks); ++ci) {
        const std::size_t c = static_cast<std::size_t>(ci);
        const std::size_t lo = n * c / num_chunks;
        const std::size_t hi = n * (c + 1) / num_chunks;
        SplittableRng rng(seed, streams::kMonteCarlo + 1000 + c);
        std::vector<double> x(d);
        std::uint64_t hits = 0;
        for (std::size_t t = lo; t < hi; ++t) {
            // Uniform in the unit ball: Gaussian direction, radius U^(1/d).
            double norm = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                x[i] = rng.next_gaussian();
                norm += x[i] * x[i];
            }
            norm = std::sqrt(norm);
            const double radius =
                std::pow(rng.next_double(), 1.0 / static_cast<double>(d));
            const double scale = norm > 0.0 ? radius / norm : 0.0;
            double dot1 = 0.0;
            double dot2 = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                const double xi = x[i] * scale;
                dot1 += dt[i] * xi;
                dot2 += dth[i] * xi;
            }
            if (dot1 > 0.0 && dot2 > 0.0) {
                ++hits;
            }
        }
        chunk_hits[c] = hits;
    }
    std::uint64_t hits = 0;
    for (std::uint64_t h : chunk_hits) {
        hits += h;
    }
    MonteCarloEstimate est;
    est.n = n;
    est.mean = static_cast<double>(hits) / static_cast<double>(n);
    est.stderr_ = std::sqrt(est.mean * (1.0 - est.mean) / static_cast<double>(n));
    return est;
}

SupResult lemma2_sup(std::span<const double> delta) {
    const double norm = norm2(delta);
    if (norm == 0.0) {
        throw std::invalid_argument("lemma2_sup: zero vector");
    }
    std::vector<double> mags(delta.size());
    for (std::size_t i = 0; i < delta.size(); ++i) {
        mags[i] = std::fabs(delta[i]);
    }
    std::sort(mags.begin(), mags.end(), std::greater<>());
    SupResult best;
    double prefix = 0.0;
    for (std::size_t j = 1; j <= mags.size(); ++j) {
        prefix += mags[j - 1];
        const double value = prefix / (std::sqrt(static_cast<double>(j)) * norm);
        if (value > best.value) {
            best.value = value;
            best.best_prefix = j;
        }
    }
    return best;
}

double lemma2_bruteforce(std::span<const double> delta) {
    const std::size_t d = delta.size();
    if (d > 12) {
        throw std::invalid_argument("lemma2_bruteforce: d > 12 refused");
    }
    const double norm = norm2(delta);
    if (norm == 0.0) {
        throw std::invalid_argument("lemma2_bruteforce: zero vector");
    }
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) {
        total *= 3;
    }
    double best = -1.0;
    std::vector<int> signs(d, 0);
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t rest = code;
        double dot = 0.0;
        double count = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const int s = static_cast<int>(rest % 3) - 1; // {-1, 0, 1}
            rest /= 3;
            if (s != 0) {
                dot += s * delta[i];
                count += 1.0;
            }
        }
        if (count == 0.0) {
            continue;
        }
        best = std::max(best, dot / (norm * std::sqrt(count)));
    }
    return best;
}

double theorem1_construction_check(std::size_t d) {
    if (d == 0) {
        throw std::invalid_argument("theorem1_construction_check: d must be >= 1");
    }
    std::vector<double> theta1(d);
    for (std::size_t j = 1; j <= d; ++j) {
        theta1[j - 1] = std::sqrt(static_cast<double>(j)) -
                        std::sqrt(static_cast<double>(j - 1));
    }
    // theta2 = 0, so delta = theta1.
    const SupResult sup = lemma2_sup(theta1);
    return 1.0 - clamped_arccos(sup.value) / M_PI;
}

std::vector<ProjectionRow> projection_monotonicity_experiment(
    std::size_t m, std::size_t trials, std::uint64_t seed,
    std::size_t* violations) {
    if (m == 0 || m > 6) {
        throw std::invalid_argument(
            "projection_monotonicity_experiment: m must be in 1..6");
    }
    std::size_t total = 1;
    for (std::size_t i = 0; i < m; ++i) {
        total *= 3;
    }
    std::vector<double> mean_acc(m, 0.0);
    std::size_t bad = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        SplittableRng rng(seed, streams::kMonteCarlo + 5000 + t);
        std::vector<double> delta(m);
        double norm = 0.0;
        do {
            norm = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                delta[i] = rng.next_double() - rng.next_double();
                norm += delta[i] * delta[i];
            }
        } while (norm == 0.0);
        norm = std::sqrt(norm);

        // best_cos[d-1]: best cosine over sign vectors with support <= d.
        std::vector<double> best_cos(m, -1.0);
        for (std::size_t code = 0; code < total; ++code) {
            std::size_t rest = code;
            double dot = 0.0;
            std::size_t support = 0;
            for (std::size_t i = 0; i < m; ++i) {
                const int s = static_cast<int>(rest % 3) - 1;
                rest /= 3;
                if (s != 0) {
                    dot += s * delta[i];
                    ++support;
                }
            }
            if (support == 0) {
                continue;
            }
            const double c = dot / (norm * std::sqrt(static_cast<double>(support)));
            for (std::size_t d = support; d <= m; ++d) {
                best_cos[d - 1] = std::max(best_cos[d - 1], c);
            }
        }
        double prev = -1.0;
        for (std::size_t d = 1; d <= m; ++d) {
            const double acc = 1.0 - clamped_arccos(best_cos[d - 1]) / M_PI;
            if (acc < prev - 1e-12) {
                ++bad;
            }
            prev = acc;
            mean_acc[d - 1] += acc;
        }
    }
    std::vector<ProjectionRow> rows;
    for (std::size_t d = 1; d <= m; ++d) {
        rows.push_back({d, mean_acc[d - 1] / static_cast<double>(trials)});
    }
    if (violations != nullptr) {
        *violations = bad;
    }
    return rows;
}

} // namespace ehdc
