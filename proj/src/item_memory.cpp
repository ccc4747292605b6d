#include "ehdc/item_memory.hpp"

#include <stdexcept>
#include <string>

namespace ehdc {

namespace {
// Stream ids for the two tables; distinct so the tables are independent.
constexpr std::uint64_t kValueStream = 0x76616C75; // "valu"
constexpr std::uint64_t kPositionStream = 0x706F7369; // "posi"
} // namespace

ItemMemory build_item_memory(std::size_t num_values, std::size_t num_positions,
                             std::size_t dim, std::uint64_t seed) {
    if (num_values == 0 || num_positions == 0 || dim == 0) {
        throw std::invalid_argument("build_item_memory: counts and dim must be >= 1");
    }
    ItemMemory mem;
    mem.dim = dim;
    mem.seed = seed;
    SplittableRng value_rng(seed, kValueStream);
    SplittableRng position_rng(seed, kPositionStream);
    mem.value_hvs.reserve(num_values);
    for (std::size_t v = 0; v < num_values; ++v) {
        mem.value_hvs.push_back(random_hv(dim, value_rng));
    }
    mem.position_hvs.reserve(num_positions);
    for (std::size_t p = 0; p < num_positions; ++p) {
        mem.position_hvs.push_back(random_hv(dim, position_rng));
    }
    return mem;
}

BinaryHypervector encode_classic(std::span<const std::uint16_t> x,
                                 const ItemMemory& mem, SplittableRng& rng) {
    if (x.size() != mem.position_hvs.size()) {
        throw std::invalid_argument(
            "encode_classic: input length " + std::to_string(x.size()) +
            " != position count " + std::to_string(mem.position_hvs.size()));
    }
    IntVector sums(mem.dim);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] >= mem.value_hvs.size()) {
            throw std::out_of_range("encode_classic: feature value " +
                                    std::to_string(x[i]) + " at index " +
                                    std::to_string(i) + " out of range");
        }
        const BinaryHypervector bound = bind(mem.value_hvs[x[i]], mem.position_hvs[i]);
        for (std::size_t j = 0; j < mem.dim; ++j) {
            sums.values[j] += bound.sign(j);
        }
    }
    return sign_with_ties(sums, rng);
}

} // namespace ehdc
