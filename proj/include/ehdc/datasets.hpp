#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ehdc/hypervector.hpp"

namespace ehdc {

// Flat integer-valued dataset as read from IDX files (pixels 0..255).
struct RawIntDataset {
    std::size_t num_features = 0;
    std::vector<std::vector<std::uint8_t>> samples;
    std::vector<std::uint16_t> labels;
};

// Real-valued dataset as read from delimited text (ISOLET, UCI-HAR).
struct RawRealDataset {
    std::size_t num_features = 0;
    std::size_t num_classes = 0;
    std::vector<std::vector<double>> samples;
    std::vector<std::uint16_t> labels;
};

struct LabeledBinaryDataset {
    std::size_t input_dim = 0;
    std::size_t num_classes = 0;
    std::vector<BinaryHypervector> samples;
    std::vector<std::uint16_t> labels;
    // FNV-1a digest of source bytes and the preprocessing descriptor.
    std::uint64_t provenance = 0;
    std::string provenance_desc;
};

enum class QuantizerMode { PixelThreshold, Thermometer };

struct QuantizerSpec {
    QuantizerMode mode = QuantizerMode::PixelThreshold;
    int threshold = 127; // pixel mode: bit = 1 iff pixel > threshold
    int levels = 8;      // thermometer mode: bits per feature
    // Per-feature ranges for thermometer mode; taken from the training
    // split to avoid test leakage.
    std::vector<double> feature_min;
    std::vector<double> feature_max;
};

std::uint64_t fnv1a64(const void* data, std::size_t size,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);

// IDX (big-endian header) loaders: magic 0x803 for images, 0x801 for
// labels; counts must match.
RawIntDataset load_idx(const std::string& images_path,
                       const std::string& labels_path);

enum class DelimitedSchema { Isolet, UciHar };

// ISOLET: comma-separated, 617 features plus trailing label 1..26.
// UCI-HAR: whitespace-separated feature file plus separate label file,
// labels 1..6. Both label ranges shift to 0-based.
RawRealDataset load_delimited(const std::string& path,
                              DelimitedSchema schema,
                              const std::string& labels_path = "");

LabeledBinaryDataset binarize_pixels(const RawIntDataset& raw,
                                     const QuantizerSpec& spec,
                                     std::size_t num_classes = 10);

// Compute per-feature min/max over a training split for thermometer mode.
void fit_thermometer_range(const RawRealDataset& train, QuantizerSpec& spec);

// Unary code: feature value v yields `levels` bits, bit q set iff
// v > min + (q+1)(max-min)/(levels+1). Monotone in v per feature.
LabeledBinaryDataset thermometer_quantize(const RawRealDataset& raw,
                                          const QuantizerSpec& spec);

// Packed binary container ("EHDD") for preprocessed datasets.
void save_ehdd(const LabeledBinaryDataset& ds, const std::string& path);
LabeledBinaryDataset load_ehdd(const std::string& path);

} // namespace ehdc
