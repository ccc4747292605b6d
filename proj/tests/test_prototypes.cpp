#include "doctest.h"

#include <stdexcept>

#include <vector>

#include "ehdc/prototypes.hpp"
#include "ehdc/rng.hpp"

using namespace ehdc;

namespace {

// Identity encoder: output bit j is input bit j, so datasets of raw
// binary vectors feed the prototype stage directly.
LearnedEncoder identity_encoder(std::size_t d) {
    DenseBinaryLayer layer;
    layer.in_dim = d;
    layer.out_dim = d;
    layer.shadow_weights.assign(d * d, 0.0f);
    for (std::size_t j = 0; j < d; ++j) {
        layer.shadow_weights[j * d + j] = 1.0f;
    }
    layer.thresholds.assign(d, 0);
    layer.flipped.assign(d, 0);
    layer.requantize();
    LearnedEncoder enc;
    enc.layers.push_back(layer);
    return enc;
}

BinaryHypervector bits(const std::vector<int>& b) {
    BinaryHypervector hv(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        hv.set_bit(i, b[i] != 0);
    }
    return hv;
}

LabeledBinaryDataset make_ds(std::size_t dim, std::size_t k,
                             const std::vector<std::vector<int>>& rows,
                             const std::vector<std::uint16_t>& labels) {
    LabeledBinaryDataset ds;
    ds.input_dim = dim;
    ds.num_classes = k;
    for (const auto& r : rows) {
        ds.samples.push_back(bits(r));
    }
    ds.labels = labels;
    return ds;
}

} // namespace

TEST_CASE("sums and strict thresholding, single class hand case") {
    const auto enc = identity_encoder(3);
    const auto ds = make_ds(3, 1, {{1, 0, 1}, {1, 1, 0}, {1, 0, 0}}, {0, 0, 0});
    const ClassPrototypes p = generate_representations(enc, ds, 1.0);
    REQUIRE(p.sums.size() == 1);
    CHECK(p.sums[0] == std::vector<double>{3.0, 1.0, 1.0});
    CHECK(p.reps[0] == bits({1, 0, 0})); // 1 > 1 is false: strict
}

TEST_CASE("theta = -1 makes every coordinate active") {
    const auto enc = identity_encoder(3);
    const auto ds = make_ds(3, 1, {{1, 0, 1}, {1, 1, 0}, {1, 0, 0}}, {0, 0, 0});
    const ClassPrototypes p = generate_representations(enc, ds, -1.0);
    CHECK(p.reps[0] == bits({1, 1, 1}));
}

TEST_CASE("empty class is rejected by name") {
    const auto enc = identity_encoder(2);
    const auto ds = make_ds(2, 3, {{1, 0}, {0, 1}}, {0, 2});
    CHECK_THROWS_WITH_AS(generate_representations(enc, ds, 0.0),
                         doctest::Contains("1"), std::invalid_argument);
}

TEST_CASE("regenerate restores the invariant after manual edits") {
    ClassPrototypes p;
    p.num_classes = 1;
    p.dim = 3;
    p.theta = 0.5;
    p.sums = {{2.0, 0.5, -1.0}};
    p.reps = {bits({0, 1, 1})}; // deliberately stale
    p.regenerate();
    CHECK(p.reps[0] == bits({1, 0, 0}));
}

TEST_CASE("retraining step-2 hand case moves both classes") {
    const auto enc = identity_encoder(3);
    // One sample r = 101 labeled class 0; prototypes chosen so the frozen
    // representations misclassify it as class 1.
    const auto ds = make_ds(3, 2, {{1, 0, 1}}, {0});
    ClassPrototypes p;
    p.num_classes = 2;
    p.dim = 3;
    p.theta = 1.5;
    p.sums = {{2.0, 2.0, 0.0}, {3.0, 1.0, 1.0}};
    p.regenerate();
    // R_0 = 110, R_1 = 100; sim(101, R_0) = 1-1 = 0, sim(101, R_1) = 0.
    // The tie goes to class 0... so nudge R_1 ahead instead.
    p.sums[1][2] = 2.0;
    p.regenerate();
    // Now R_1 = 101, sim = 2 > 0: predicted 1, true 0.
    const ClassPrototypes q = retrain_step2(enc, p, ds, 1.0, 1);
    CHECK(q.sums[0] == std::vector<double>{3.0, 2.0, 1.0});
    CHECK(q.sums[1] == std::vector<double>{2.0, 1.0, 1.0});
    CHECK(q.reps[0] == bits({1, 1, 0}));
    CHECK(q.reps[1] == bits({1, 0, 0}));
}

TEST_CASE("correctly classified samples leave the sums untouched") {
    const auto enc = identity_encoder(3);
    const auto ds = make_ds(3, 2, {{1, 0, 1}, {0, 1, 0}}, {0, 1});
    ClassPrototypes p;
    p.num_classes = 2;
    p.dim = 3;
    p.theta = 0.5;
    p.sums = {{2.0, 0.0, 2.0}, {0.0, 2.0, 0.0}};
    p.regenerate();
    const ClassPrototypes q = retrain_step2(enc, p, ds, 1.0, 3);
    CHECK(q.sums == p.sums);
}

TEST_CASE("per-update conservation: total sum mass is invariant") {
    const auto enc = identity_encoder(16);
    SplittableRng rng(64);
    LabeledBinaryDataset ds;
    ds.input_dim = 16;
    ds.num_classes = 4;
    for (int s = 0; s < 40; ++s) {
        ds.samples.push_back(random_hv(16, rng));
        ds.labels.push_back(static_cast<std::uint16_t>(rng.next_below(4)));
    }
    const ClassPrototypes p = generate_representations(enc, ds, default_theta(ds));
    double before = 0.0;
    for (const auto& row : p.sums) {
        for (double v : row) {
            before += v;
        }
    }
    const ClassPrototypes q = retrain_step2(enc, p, ds, 0.7, 2);
    double after = 0.0;
    for (const auto& row : q.sums) {
        for (double v : row) {
            after += v;
        }
    }
    // Every update adds lr*r to one class and removes lr*r from another.
    CHECK(after == doctest::Approx(before).epsilon(1e-12));
    for (std::size_t c = 0; c < q.num_classes; ++c) {
        for (std::size_t i = 0; i < q.dim; ++i) {
            CHECK(q.reps[c].bit(i) == (q.sums[c][i] > q.theta));
        }
    }
}

TEST_CASE("retrain_step2 validates the learning rate") {
    const auto enc = identity_encoder(2);
    const auto ds = make_ds(2, 1, {{1, 0}}, {0});
    const ClassPrototypes p = generate_representations(enc, ds, 0.0);
    CHECK_THROWS_AS(retrain_step2(enc, p, ds, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(retrain_step2(enc, p, ds, -1.0, 1), std::invalid_argument);
}

TEST_CASE("prediction ties break toward the lowest class index") {
    ClassPrototypes p;
    p.num_classes = 3;
    p.dim = 2;
    p.theta = 0.5;
    p.sums = {{1.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}};
    p.regenerate();
    // r = 10: sim with R_0 = R_1 = 10 is 1; with R_2 = 11 it is 1 too.
    CHECK(predict_encoded(p, bits({1, 0})) == 0);
    // r = 01 favours class 2 alone.
    CHECK(predict_encoded(p, bits({0, 1})) == 2);
}

TEST_CASE("evaluate produces accuracy and a consistent confusion matrix") {
    const auto enc = identity_encoder(4);
    const auto ds = make_ds(4, 2,
                            {{1, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 1, 1},
                             {0, 1, 1, 1}, {1, 1, 1, 1}},
                            {0, 0, 1, 1, 1});
    const ClassPrototypes p = generate_representations(enc, ds, 1.0);
    const EvalResult res = evaluate(enc, p, ds);
    std::uint64_t total = 0;
    std::uint64_t diag = 0;
    for (std::size_t t = 0; t < 2; ++t) {
        for (std::size_t g = 0; g < 2; ++g) {
            total += res.confusion[t][g];
            if (t == g) {
                diag += res.confusion[t][g];
            }
        }
    }
    CHECK(total == 5);
    CHECK(res.accuracy == doctest::Approx(static_cast<double>(diag) / 5.0));

    LabeledBinaryDataset empty;
    empty.input_dim = 4;
    empty.num_classes = 2;
    CHECK_THROWS_AS(evaluate(enc, p, empty), std::invalid_argument);
}

TEST_CASE("op accounting: learned encoders are addition-only") {
    ArchDescriptor one;
    one.input_dim = 784;
    one.layer_dims = {64};
    one.num_classes = 10;
    const OpCountReport r1 = count_ops(one);
    CHECK(r1.encoder_additions == 50176);
    CHECK(r1.boolean_ops == 0);
    CHECK(r1.similarity_ops == 640);

    ArchDescriptor two;
    two.input_dim = 784;
    two.layer_dims = {64, 64};
    two.num_classes = 10;
    const OpCountReport r2 = count_ops(two);
    CHECK(r2.encoder_additions == 54272);
    CHECK(r2.similarity_ops == 640);
}

TEST_CASE("op accounting: the classic pipeline at d = 10000") {
    ArchDescriptor classic;
    classic.classic = true;
    classic.input_dim = 784;
    classic.hv_dim = 10000;
    classic.num_classes = 10;
    const OpCountReport r = count_ops(classic);
    CHECK(r.encoder_additions == 7840000);
    CHECK(r.boolean_ops == 7840000);
    CHECK(r.similarity_ops == 100000);
    // The learned 1-layer encoder needs well under 1% of these additions.
    CHECK(50176.0 / static_cast<double>(r.encoder_additions) < 0.0065);
}

TEST_CASE("default theta is half the median class size") {
    LabeledBinaryDataset ds;
    ds.input_dim = 1;
    ds.num_classes = 3;
    // class sizes 2, 3, 5 -> median 3 -> theta 1.5
    const std::vector<std::uint16_t> labels = {0, 0, 1, 1, 1, 2, 2, 2, 2, 2};
    for (std::uint16_t l : labels) {
        ds.samples.push_back(BinaryHypervector(1));
        ds.labels.push_back(l);
    }
    CHECK(default_theta(ds) == doctest::Approx(1.5));
}
