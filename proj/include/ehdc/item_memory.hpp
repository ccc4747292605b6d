#pragma once

#include <cstdint>
#include <vector>

#include "ehdc/hypervector.hpp"

namespace ehdc {

// Seeded random tables of value and position hypervectors for the classic
// bind-and-bundle encoder. Regenerating from the same (seed, dims, counts)
// reproduces identical tables.
struct ItemMemory {
    std::size_t dim = 0;
    std::uint64_t seed = 0;
    std::vector<BinaryHypervector> value_hvs;
    std::vector<BinaryHypervector> position_hvs;
};

ItemMemory build_item_memory(std::size_t num_values, std::size_t num_positions,
                             std::size_t dim, std::uint64_t seed);

// Classic HDC encoding: sgn of the summed ±1 bindings of value and
// position hypervectors, one term per input position. sgn(0) ties are
// drawn from rng in coordinate order.
BinaryHypervector encode_classic(std::span<const std::uint16_t> x,
                                 const ItemMemory& mem, SplittableRng& rng);

} // namespace ehdc
