#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ehdc/rng.hpp"

namespace ehdc {

// Bit-packed binary vector with dual views: canonical storage is {0,1}
// bits (64-bit words, LSB-first), the {-1,+1} view of bit b is 2b-1.
// Padding bits beyond dim are always zero.
class BinaryHypervector {
public:
    static constexpr std::size_t kWordBits = 64;

    BinaryHypervector() = default;
    explicit BinaryHypervector(std::size_t dim);
    BinaryHypervector(std::size_t dim, std::vector<std::uint64_t> words);

    std::size_t dim() const { return dim_; }
    std::size_t word_count() const { return words_.size(); }
    std::span<const std::uint64_t> words() const { return words_; }
    std::span<std::uint64_t> mutable_words() { return words_; }

    bool bit(std::size_t i) const {
        return (words_[i / kWordBits] >> (i % kWordBits)) & 1u;
    }
    void set_bit(std::size_t i, bool v) {
        const std::uint64_t mask = 1ULL << (i % kWordBits);
        if (v) {
            words_[i / kWordBits] |= mask;
        } else {
            words_[i / kWordBits] &= ~mask;
        }
    }

    // {-1,+1} view of coordinate i.
    int sign(std::size_t i) const { return bit(i) ? 1 : -1; }

    std::size_t popcount() const;
    BinaryHypervector complement() const;

    // Zero any bits at positions >= dim. Word-level writers call this
    // after touching the last word.
    void clear_padding();

    bool operator==(const BinaryHypervector& other) const = default;

private:
    std::size_t dim_ = 0;
    std::vector<std::uint64_t> words_;
};

// Signed per-coordinate accumulator (class sums, pre-sign encoder sums).
struct IntVector {
    std::vector<std::int64_t> values;

    explicit IntVector(std::size_t dim = 0) : values(dim, 0) {}
    std::size_t dim() const { return values.size(); }
};

// Binding: elementwise product in the ±1 view, XNOR in the bit view.
BinaryHypervector bind(const BinaryHypervector& a, const BinaryHypervector& b);

// Majority rule: sgn of the coordinate-wise sum of ±1 views. sgn(0) is
// resolved by one rng draw per zero coordinate, in coordinate order.
BinaryHypervector bundle_majority(std::span<const BinaryHypervector> vs,
                                  SplittableRng& rng);

// Sign thresholding of an integer accumulator: bit i = 1 iff sum[i] > 0,
// ties resolved by rng in coordinate order.
BinaryHypervector sign_with_ties(const IntVector& sums, SplittableRng& rng);

std::size_t hamming(const BinaryHypervector& a, const BinaryHypervector& b);

// Inner product of the ±1 views: dim - 2 * hamming.
std::int64_t inner_pm1(const BinaryHypervector& a, const BinaryHypervector& b);

// Classification score: r in its {0,1} view against proto in the ±1 view,
// sum_i r_i * (2 proto_i - 1).
std::int64_t sim_active(const BinaryHypervector& r, const BinaryHypervector& proto);

BinaryHypervector random_hv(std::size_t dim, SplittableRng& rng);

} // namespace ehdc
