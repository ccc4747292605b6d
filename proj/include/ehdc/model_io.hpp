#pragma once

#include <optional>
#include <string>

#include "ehdc/encoder.hpp"
#include "ehdc/prototypes.hpp"

namespace ehdc {

// EHDC model file: magic "EHDC", format version u32, layer count u8,
// then per layer in_dim u32, out_dim u32, weight width u8 (bytes),
// row-major little-endian signed weights, per-unit i32 thresholds and u8
// direction flags. An optional prototype block follows: K u32, theta f64,
// f64 sums per class, packed representation words. Shadow weights are
// dropped: the snapshot is the integer inference model.

constexpr std::uint32_t kModelFormatVersion = 1;

void save_model(const LearnedEncoder& enc,
                const ClassPrototypes* prototypes,
                const std::string& path);

struct LoadedModel {
    LearnedEncoder encoder;
    std::optional<ClassPrototypes> prototypes;
};

LoadedModel load_model(const std::string& path);

} // namespace ehdc
