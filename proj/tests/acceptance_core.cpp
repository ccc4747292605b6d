// Acceptance gate, part 1: everything that runs without external data.
// Prints one PASS/FAIL line per criterion; exits nonzero on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "ehdc/hypervector.hpp"
#include "ehdc/kernels.hpp"
#include "ehdc/model_io.hpp"
#include "ehdc/prototypes.hpp"
#include "ehdc/rng.hpp"
#include "ehdc/theory.hpp"

using namespace ehdc;

namespace {

int failures = 0;

double now_s() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

void report(const std::string& name, bool ok, double elapsed) {
    std::printf("%s: %s (%.2fs)\n", ok ? "PASS" : "FAIL", name.c_str(), elapsed);
    if (!ok) {
        ++failures;
    }
}

bool theorem1_exactness() {
    if (std::fabs(worst_case_accuracy(1).value - 1.0) > 1e-12) {
        return false;
    }
    if (std::fabs(worst_case_accuracy(2).value - 0.875) > 1e-12) {
        return false;
    }
    double prev = 2.0;
    for (std::size_t d = 1; d <= 10000; ++d) {
        const double v = worst_case_accuracy(d).value;
        if (!(v < prev)) {
            return false;
        }
        prev = v;
    }
    for (std::size_t d = 1; d <= 500; ++d) {
        if (std::fabs(theorem1_construction_check(d) -
                      worst_case_accuracy(d).value) > 1e-10) {
            return false;
        }
    }
    return true;
}

bool lemma2_oracle_equivalence() {
    SplittableRng rng(2024);
    for (std::size_t d = 1; d <= 10; ++d) {
        for (int rep = 0; rep < 1000; ++rep) {
            std::vector<double> delta(d);
            double norm = 0.0;
            for (auto& v : delta) {
                v = rng.next_double() * 2.0 - 1.0;
                norm += v * v;
            }
            if (norm == 0.0) {
                continue;
            }
            if (std::fabs(lemma2_sup(delta).value - lemma2_bruteforce(delta)) >
                1e-12) {
                return false;
            }
        }
    }
    return true;
}

bool lemma1_monte_carlo_agreement() {
    SplittableRng rng(515);
    int config = 0;
    for (std::size_t d : {2, 5, 10}) {
        const int per_d = d == 10 ? 6 : 7; // 20 configurations total
        for (int rep = 0; rep < per_d; ++rep, ++config) {
            std::vector<double> t1(d), t2(d), h1(d), h2(d);
            for (std::size_t i = 0; i < d; ++i) {
                t1[i] = rng.next_double();
                t2[i] = rng.next_double();
                h1[i] = rng.next_double();
                h2[i] = rng.next_double();
            }
            const double exact = lemma1_closed_form(t1, t2, h1, h2);
            const MonteCarloEstimate est =
                lemma1_monte_carlo(t1, t2, h1, h2, 1000000, 3000 + config);
            if (std::fabs(est.mean - exact) > 3.0 * est.stderr_ + 1e-9) {
                return false;
            }
        }
    }
    return true;
}

bool theorem2_trend() {
    const std::vector<std::size_t> dims = {2, 8, 32, 128, 512};
    std::vector<TheoryResult> results;
    for (std::size_t d : dims) {
        const TheoryResult r = average_case_accuracy(d, 1000, 99);
        if (r.value < worst_case_accuracy(d).value - 1e-12) {
            return false;
        }
        results.push_back(r);
    }
    int inversions = 0;
    for (std::size_t i = 1; i < results.size(); ++i) {
        if (results[i].value > results[i - 1].value) {
            ++inversions;
            const double gap = results[i].value - results[i - 1].value;
            const double band =
                2.0 * std::hypot(results[i].stderr_, results[i - 1].stderr_);
            if (gap > band) {
                return false;
            }
        }
    }
    return inversions <= 1;
}

bool projection_monotonicity() {
    std::size_t violations = 1;
    (void)projection_monotonicity_experiment(4, 100, 2718, &violations);
    return violations == 0;
}

bool op_counting_exact() {
    ArchDescriptor one;
    one.input_dim = 784;
    one.layer_dims = {64};
    one.num_classes = 10;
    const OpCountReport r1 = count_ops(one);
    if (r1.encoder_additions != 50176 || r1.boolean_ops != 0) {
        return false;
    }
    ArchDescriptor two = one;
    two.layer_dims = {64, 64};
    if (count_ops(two).encoder_additions != 54272) {
        return false;
    }
    ArchDescriptor classic;
    classic.classic = true;
    classic.input_dim = 784;
    classic.hv_dim = 10000;
    classic.num_classes = 10;
    const OpCountReport rc = count_ops(classic);
    if (rc.encoder_additions != 7840000 || rc.boolean_ops != 7840000) {
        return false;
    }
    const double ratio = static_cast<double>(r1.encoder_additions) /
                         static_cast<double>(rc.encoder_additions);
    return ratio > 0.0063 && ratio < 0.0065;
}

bool core_properties() {
    SplittableRng rng(7);
    // Hamming/inner identity and bind algebra.
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t dim = 1 + rng.next_below(300);
        const auto a = random_hv(dim, rng);
        const auto b = random_hv(dim, rng);
        const auto c = random_hv(dim, rng);
        if (inner_pm1(a, b) != static_cast<std::int64_t>(dim) -
                                   2 * static_cast<std::int64_t>(hamming(a, b))) {
            return false;
        }
        if (!(bind(a, b) == bind(b, a)) ||
            !(bind(bind(a, b), c) == bind(a, bind(b, c))) ||
            bind(a, a).popcount() != dim) {
            return false;
        }
    }
    // Majority rule vs per-coordinate counting.
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t dim = 1 + rng.next_below(100);
        const std::size_t n = 1 + 2 * rng.next_below(5); // odd: no ties
        std::vector<BinaryHypervector> vs;
        for (std::size_t k = 0; k < n; ++k) {
            vs.push_back(random_hv(dim, rng));
        }
        SplittableRng ties(1, 1);
        const auto r = bundle_majority(vs, ties);
        for (std::size_t i = 0; i < dim; ++i) {
            int sum = 0;
            for (const auto& v : vs) {
                sum += v.sign(i);
            }
            if (r.sign(i) != (sum > 0 ? 1 : -1)) {
                return false;
            }
        }
    }
    // Prototype threshold consistency and step-2 conservation.
    LearnedEncoder ident;
    {
        DenseBinaryLayer layer;
        layer.in_dim = 16;
        layer.out_dim = 16;
        layer.shadow_weights.assign(256, 0.0f);
        for (std::size_t j = 0; j < 16; ++j) {
            layer.shadow_weights[j * 16 + j] = 1.0f;
        }
        layer.thresholds.assign(16, 0);
        layer.flipped.assign(16, 0);
        layer.requantize();
        ident.layers.push_back(layer);
    }
    LabeledBinaryDataset ds;
    ds.input_dim = 16;
    ds.num_classes = 4;
    for (int s = 0; s < 80; ++s) {
        ds.samples.push_back(random_hv(16, rng));
        ds.labels.push_back(static_cast<std::uint16_t>(rng.next_below(4)));
    }
    const ClassPrototypes p =
        generate_representations(ident, ds, default_theta(ds));
    double before = 0.0;
    for (const auto& row : p.sums) {
        for (double v : row) {
            before += v;
        }
    }
    const ClassPrototypes q = retrain_step2(ident, p, ds, 1.0, 2);
    double after = 0.0;
    for (const auto& row : q.sums) {
        for (double v : row) {
            after += v;
        }
    }
    if (std::fabs(after - before) > 1e-9) {
        return false;
    }
    for (std::size_t c = 0; c < q.num_classes; ++c) {
        for (std::size_t i = 0; i < q.dim; ++i) {
            if (q.reps[c].bit(i) != (q.sums[c][i] > q.theta)) {
                return false;
            }
        }
    }
    // Serialization round trip.
    LearnedEncoder enc = make_encoder(64, {16}, rng);
    const std::string path = "/tmp/ehdc_acceptance_model.ehdc";
    save_model(enc, &q, path);
    const LoadedModel back = load_model(path);
    std::remove(path.c_str());
    if (!back.prototypes.has_value() || back.prototypes->sums != q.sums) {
        return false;
    }
    for (int s = 0; s < 50; ++s) {
        const auto x = random_hv(64, rng);
        if (!(encode_learned(x, back.encoder) == encode_learned(x, enc))) {
            return false;
        }
    }
    return true;
}

struct Criterion {
    const char* name;
    bool (*fn)();
    double budget_s;
};

} // namespace

int main() {
    const Criterion criteria[] = {
        {"theorem-1 exactness, monotonicity, construction", theorem1_exactness,
         5.0},
        {"lemma-2 analytic sup equals brute force", lemma2_oracle_equivalence,
         60.0},
        {"lemma-1 Monte Carlo matches closed form", lemma1_monte_carlo_agreement,
         120.0},
        {"theorem-2 average-case trend and lower bound", theorem2_trend, 300.0},
        {"projection monotonicity, m = 4", projection_monotonicity, 300.0},
        {"op counting exact values and ratio", op_counting_exact, 30.0},
        {"core property suites", core_properties, 30.0},
    };
    for (const auto& c : criteria) {
        const double t0 = now_s();
        bool ok = false;
        try {
            ok = c.fn();
        } catch (const std::exception& e) {
            std::printf("  exception: %s\n", e.what());
            ok = false;
        }
        const double elapsed = now_s() - t0;
        report(c.name, ok && elapsed < c.budget_s, elapsed);
    }
    return failures == 0 ? 0 : 1;
}
