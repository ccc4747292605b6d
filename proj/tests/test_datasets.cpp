#include "doctest.h"

#include <stdexcept>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "ehdc/datasets.hpp"

using namespace ehdc;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) {
        path = std::string("/tmp/ehdc_test_") + name;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

void write_be32(std::ofstream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                           static_cast<char>(v >> 8), static_cast<char>(v)};
    out.write(bytes, 4);
}

// Minimal well-formed IDX pair: n images of rows x cols incremental
// pixels and labels n mod 10.
void write_idx_pair(const std::string& img_path, const std::string& lab_path,
                    std::uint32_t n, std::uint32_t rows, std::uint32_t cols,
                    std::uint32_t img_magic = 0x803, std::uint32_t lab_magic = 0x801,
                    bool truncate_payload = false) {
    std::ofstream img(img_path, std::ios::binary);
    write_be32(img, img_magic);
    write_be32(img, n);
    write_be32(img, rows);
    write_be32(img, cols);
    const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
    for (std::uint32_t s = 0; s < n; ++s) {
        for (std::size_t p = 0; p < pixels; ++p) {
            if (truncate_payload && s + 1 == n && p * 2 > pixels) {
                break;
            }
            img.put(static_cast<char>((s * 7 + p) % 256));
        }
    }
    std::ofstream lab(lab_path, std::ios::binary);
    write_be32(lab, lab_magic);
    write_be32(lab, n);
    for (std::uint32_t s = 0; s < n; ++s) {
        lab.put(static_cast<char>(s % 10));
    }
}

} // namespace

TEST_CASE("IDX round trip of a small synthetic pair") {
    TempFile img("idx_img"), lab("idx_lab");
    write_idx_pair(img.path, lab.path, 5, 4, 3);
    const RawIntDataset ds = load_idx(img.path, lab.path);
    CHECK(ds.num_features == 12);
    REQUIRE(ds.samples.size() == 5);
    CHECK(ds.labels[4] == 4);
    CHECK(ds.samples[1][0] == 7);
}

TEST_CASE("IDX bad magic is a structured error naming the offset") {
    TempFile img("idx_badmagic_img"), lab("idx_badmagic_lab");
    write_idx_pair(img.path, lab.path, 2, 2, 2, 0x807);
    CHECK_THROWS_WITH_AS(load_idx(img.path, lab.path),
                         doctest::Contains("magic"), std::runtime_error);
}

TEST_CASE("IDX count mismatch and truncation are reported distinctly") {
    TempFile img("idx_cnt_img"), lab("idx_cnt_lab"), lab2("idx_cnt_lab2");
    write_idx_pair(img.path, lab.path, 3, 2, 2);
    write_idx_pair(img.path, lab2.path, 3, 2, 2);
    {
        std::ofstream lab_small(lab.path, std::ios::binary);
        write_be32(lab_small, 0x801);
        write_be32(lab_small, 4);
        for (int i = 0; i < 4; ++i) {
            lab_small.put(0);
        }
    }
    CHECK_THROWS_WITH_AS(load_idx(img.path, lab.path),
                         doctest::Contains("count"), std::runtime_error);

    TempFile img_trunc("idx_trunc_img");
    write_idx_pair(img_trunc.path, lab2.path, 3, 2, 2, 0x803, 0x801, true);
    CHECK_THROWS_WITH_AS(load_idx(img_trunc.path, lab2.path),
                         doctest::Contains("truncated"), std::runtime_error);
}

TEST_CASE("pixel binarization thresholds strictly") {
    RawIntDataset raw;
    raw.num_features = 4;
    raw.samples = {{0, 127, 128, 255}, {0, 0, 0, 0}};
    raw.labels = {1, 0};
    QuantizerSpec spec;
    spec.threshold = 127;
    const LabeledBinaryDataset ds = binarize_pixels(raw, spec, 2);
    CHECK(!ds.samples[0].bit(0));
    CHECK(!ds.samples[0].bit(1)); // strict >
    CHECK(ds.samples[0].bit(2));
    CHECK(ds.samples[0].bit(3));
    CHECK(ds.samples[1].popcount() == 0);

    spec.threshold = 255;
    CHECK(binarize_pixels(raw, spec, 2).samples[0].popcount() == 0);
}

TEST_CASE("binarization is idempotent on binary data at threshold 0") {
    RawIntDataset raw;
    raw.num_features = 3;
    raw.samples = {{1, 0, 1}};
    raw.labels = {0};
    QuantizerSpec spec;
    spec.threshold = 0;
    const auto ds = binarize_pixels(raw, spec, 1);
    CHECK(ds.samples[0].bit(0));
    CHECK(!ds.samples[0].bit(1));
    CHECK(ds.samples[0].bit(2));
}

TEST_CASE("provenance digest changes with input or spec") {
    RawIntDataset raw;
    raw.num_features = 2;
    raw.samples = {{10, 200}};
    raw.labels = {0};
    QuantizerSpec a, b;
    a.threshold = 127;
    b.threshold = 126;
    const auto da = binarize_pixels(raw, a, 1);
    const auto da2 = binarize_pixels(raw, a, 1);
    const auto db = binarize_pixels(raw, b, 1);
    CHECK(da.provenance == da2.provenance);
    CHECK(da.provenance != db.provenance);
    raw.samples[0][0] = 11;
    CHECK(binarize_pixels(raw, a, 1).provenance != da.provenance);
}

TEST_CASE("thermometer code hits the documented cut points") {
    RawRealDataset raw;
    raw.num_features = 1;
    raw.num_classes = 2;
    raw.samples = {{0.5}, {0.0}, {1.0}};
    raw.labels = {0, 0, 1};
    QuantizerSpec spec;
    spec.mode = QuantizerMode::Thermometer;
    spec.levels = 4;
    spec.feature_min = {0.0};
    spec.feature_max = {1.0};
    const auto ds = thermometer_quantize(raw, spec);
    CHECK(ds.input_dim == 4);
    // v = 0.5 against cuts 0.2, 0.4, 0.6, 0.8 -> 1,1,0,0.
    CHECK(ds.samples[0].bit(0));
    CHECK(ds.samples[0].bit(1));
    CHECK(!ds.samples[0].bit(2));
    CHECK(!ds.samples[0].bit(3));
    CHECK(ds.samples[1].popcount() == 0); // v = min
    CHECK(ds.samples[2].popcount() == 4); // v = max
}

TEST_CASE("thermometer code is monotone per feature") {
    SplittableRng rng(5);
    RawRealDataset raw;
    raw.num_features = 3;
    raw.num_classes = 1;
    for (int s = 0; s < 60; ++s) {
        raw.samples.push_back({rng.next_double(), rng.next_double() * 4 - 2,
                               rng.next_double() * 100});
        raw.labels.push_back(0);
    }
    QuantizerSpec spec;
    spec.mode = QuantizerMode::Thermometer;
    spec.levels = 7;
    fit_thermometer_range(raw, spec);
    const auto ds = thermometer_quantize(raw, spec);
    for (std::size_t a = 0; a < raw.samples.size(); ++a) {
        for (std::size_t b = 0; b < raw.samples.size(); ++b) {
            for (std::size_t f = 0; f < 3; ++f) {
                if (raw.samples[a][f] > raw.samples[b][f]) {
                    continue;
                }
                // active bits of the smaller value are a subset
                for (int q = 0; q < 7; ++q) {
                    const std::size_t idx = f * 7 + q;
                    if (ds.samples[a].bit(idx)) {
                        CHECK(ds.samples[b].bit(idx));
                    }
                }
            }
        }
    }
}

TEST_CASE("ISOLET-shaped rows parse; ragged rows are rejected with line numbers") {
    TempFile f("isolet_rows");
    {
        std::ofstream out(f.path);
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 617; ++c) {
                out << (0.001 * c) << ", ";
            }
            out << (r % 26) + 1 << "\n";
        }
    }
    const RawRealDataset ds = load_delimited(f.path, DelimitedSchema::Isolet);
    CHECK(ds.samples.size() == 3);
    CHECK(ds.num_features == 617);
    CHECK(ds.labels[2] == 2);

    TempFile bad("isolet_ragged");
    {
        std::ofstream out(bad.path);
        for (int c = 0; c < 616; ++c) {
            out << "0.5, ";
        }
        out << "1\n";
    }
    CHECK_THROWS_WITH_AS(load_delimited(bad.path, DelimitedSchema::Isolet),
                         doctest::Contains("line 1"), std::runtime_error);
}

TEST_CASE("UCI-HAR feature/label pair with range check") {
    TempFile x("har_x"), y("har_y"), ybad("har_ybad");
    {
        std::ofstream out(x.path);
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < 561; ++c) {
                out << " " << (c % 10) * 0.1;
            }
            out << "\n";
        }
        std::ofstream lab(y.path);
        lab << "3\n6\n";
        std::ofstream labbad(ybad.path);
        labbad << "3\n7\n";
    }
    const RawRealDataset ds = load_delimited(x.path, DelimitedSchema::UciHar, y.path);
    CHECK(ds.samples.size() == 2);
    CHECK(ds.labels[0] == 2);
    CHECK(ds.labels[1] == 5);
    CHECK_THROWS_WITH_AS(load_delimited(x.path, DelimitedSchema::UciHar, ybad.path),
                         doctest::Contains("range"), std::runtime_error);
}

TEST_CASE("EHDD container round trip") {
    SplittableRng rng(9);
    LabeledBinaryDataset ds;
    ds.input_dim = 130;
    ds.num_classes = 4;
    for (int s = 0; s < 25; ++s) {
        ds.samples.push_back(random_hv(130, rng));
        ds.labels.push_back(static_cast<std::uint16_t>(s % 4));
    }
    ds.provenance = 0xDEADBEEF12345678ULL;
    TempFile f("ehdd_rt");
    save_ehdd(ds, f.path);
    const LabeledBinaryDataset back = load_ehdd(f.path);
    CHECK(back.input_dim == ds.input_dim);
    CHECK(back.num_classes == ds.num_classes);
    CHECK(back.labels == ds.labels);
    CHECK(back.provenance == ds.provenance);
    REQUIRE(back.samples.size() == ds.samples.size());
    for (std::size_t s = 0; s < ds.samples.size(); ++s) {
        CHECK(back.samples[s] == ds.samples[s]);
    }
}
