#include "ehdc/hypervector.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace ehdc {

namespace {

void check_same_dim(const BinaryHypervector& a, const BinaryHypervector& b,
                    const char* op) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                    std::to_string(a.dim()) + " vs " +
                                    std::to_string(b.dim()) + ")");
    }
}

} // namespace

BinaryHypervector::BinaryHypervector(std::size_t dim)
    : dim_(dim), words_((dim + kWordBits - 1) / kWordBits, 0) {
    if (dim == 0) {
        throw std::invalid_argument("BinaryHypervector: dim must be >= 1");
    }
}

BinaryHypervector::BinaryHypervector(std::size_t dim,
                                     std::vector<std::uint64_t> words)
    : dim_(dim), words_(std::move(words)) {
    if (dim == 0) {
        throw std::invalid_argument("BinaryHypervector: dim must be >= 1");
    }
    if (words_.size() != (dim + kWordBits - 1) / kWordBits) {
        throw std::invalid_argument("BinaryHypervector: word count mismatch");
    }
    clear_padding();
}

std::size_t BinaryHypervector::popcount() const {
    std::size_t n = 0;
    for (std::uint64_t w : words_) {
        n += std::popcount(w);
    }
    return n;
}

BinaryHypervector BinaryHypervector::complement() const {
    BinaryHypervector out(dim_);
    for (std::size_t k = 0; k < words_.size(); ++k) {
        out.words_[k] = ~words_[k];
    }
    out.clear_padding();
    return out;
}

void BinaryHypervector::clear_padding() {
    const std::size_t rem = dim_ % kWordBits;
    if (rem != 0) {
        words_.back() &= (1ULL << rem) - 1;
    }
}

BinaryHypervector bind(const BinaryHypervector& a, const BinaryHypervector& b) {
    check_same_dim(a, b, "bind");
    BinaryHypervector out(a.dim());
    auto wa = a.words();
    auto wb = b.words();
    auto wo = out.mutable_words();
    for (std::size_t k = 0; k < wo.size(); ++k) {
        wo[k] = ~(wa[k] ^ wb[k]); // XNOR: equal bits -> 1
    }
    out.clear_padding();
    return out;
}

BinaryHypervector bundle_majority(std::span<const BinaryHypervector> vs,
                                  SplittableRng& rng) {
    if (vs.empty()) {
        throw std::invalid_argument("bundle_majority: empty input list");
    }
    const std::size_t dim = vs.front().dim();
    IntVector sums(dim);
    for (const auto& v : vs) {
        check_same_dim(vs.front(), v, "bundle_majority");
        for (std::size_t i = 0; i < dim; ++i) {
            sums.values[i] += v.sign(i);
        }
    }
    return sign_with_ties(sums, rng);
}

BinaryHypervector sign_with_ties(const IntVector& sums, SplittableRng& rng) {
    BinaryHypervector out(sums.dim());
    for (std::size_t i = 0; i < sums.dim(); ++i) {
        if (sums.values[i] > 0) {
            out.set_bit(i, true);
        } else if (sums.values[i] == 0) {
            out.set_bit(i, rng.next_bit());
        }
    }
    return out;
}

std::size_t hamming(const BinaryHypervector& a, const BinaryHypervector& b) {
    check_same_dim(a, b, "hamming");
    auto wa = a.words();
    auto wb = b.words();
    std::size_t n = 0;
    for (std::size_t k = 0; k < wa.size(); ++k) {
        n += std::popcount(wa[k] ^ wb[k]);
    }
    return n;
}

std::int64_t inner_pm1(const BinaryHypervector& a, const BinaryHypervector& b) {
    check_same_dim(a, b, "inner_pm1");
    return static_cast<std::int64_t>(a.dim()) -
           2 * static_cast<std::int64_t>(hamming(a, b));
}

std::int64_t sim_active(const BinaryHypervector& r, const BinaryHypervector& proto) {
    check_same_dim(r, proto, "sim_active");
    auto wr = r.words();
    auto wp = proto.words();
    std::int64_t agree = 0;
    std::int64_t disagree = 0;
    for (std::size_t k = 0; k < wr.size(); ++k) {
        agree += std::popcount(wr[k] & wp[k]);
        disagree += std::popcount(wr[k] & ~wp[k]);
    }
    return agree - disagree;
}

BinaryHypervector random_hv(std::size_t dim, SplittableRng& rng) {
    BinaryHypervector out(dim);
    auto wo = out.mutable_words();
    for (auto& w : wo) {
        w = rng.next_u64();
    }
    out.clear_padding();
    return out;
}

} // namespace ehdc
