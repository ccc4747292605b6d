// Compares the OpenMP kernels against their serial references: verifies
// equality, then reports throughput for batch encoding, batch
// prediction, and bulk Hamming scans.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "ehdc/kernels.hpp"
#include "ehdc/rng.hpp"

using namespace ehdc;

namespace {

template <typename F>
double time_best_of(F&& fn, int reps = 5) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

void report(const std::string& name, double serial_s, double parallel_s,
            double items) {
    std::printf("%-18s serial %8.2f ms (%10.0f/s)   parallel %8.2f ms "
                "(%10.0f/s)   speedup %.2fx\n",
                name.c_str(), serial_s * 1e3, items / serial_s, parallel_s * 1e3,
                items / parallel_s, serial_s / parallel_s);
}

} // namespace

int main(int argc, char** argv) {
    const std::size_t n = argc > 1 ? std::stoul(argv[1]) : 20000;
    const std::size_t in_dim = 784;
    const std::size_t hv_dim = 64;
    const std::size_t classes = 10;

    SplittableRng rng(1);
    LearnedEncoder enc = make_encoder(in_dim, {hv_dim}, rng);
    std::vector<BinaryHypervector> xs;
    xs.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
        xs.push_back(random_hv(in_dim, rng));
    }
    ClassPrototypes proto;
    proto.num_classes = classes;
    proto.dim = hv_dim;
    proto.theta = 0.0;
    proto.sums.assign(classes, std::vector<double>(hv_dim, 0.0));
    for (auto& row : proto.sums) {
        for (auto& v : row) {
            v = rng.next_double() * 2.0 - 1.0;
        }
    }
    proto.reps.assign(classes, BinaryHypervector(hv_dim));
    proto.regenerate();

    // Correctness first: the parallel kernels must agree bit for bit.
    const auto enc_serial = serial::batch_encode(enc, xs);
    const auto enc_parallel = batch_encode(enc, xs);
    for (std::size_t s = 0; s < n; ++s) {
        if (!(enc_serial[s] == enc_parallel[s])) {
            std::printf("MISMATCH: batch_encode sample %zu\n", s);
            return 1;
        }
    }
    if (serial::batch_predict(enc, proto, xs) != batch_predict(enc, proto, xs)) {
        std::printf("MISMATCH: batch_predict\n");
        return 1;
    }
    const auto query = random_hv(in_dim, rng);
    if (serial::hamming_many(query, xs) != hamming_many(query, xs)) {
        std::printf("MISMATCH: hamming_many\n");
        return 1;
    }
    std::printf("kernels agree on %zu samples (784 -> 64, %zu classes)\n\n", n,
                classes);

    report("batch_encode",
           time_best_of([&] { (void)serial::batch_encode(enc, xs); }),
           time_best_of([&] { (void)batch_encode(enc, xs); }),
           static_cast<double>(n));
    report("batch_predict",
           time_best_of([&] { (void)serial::batch_predict(enc, proto, xs); }),
           time_best_of([&] { (void)batch_predict(enc, proto, xs); }),
           static_cast<double>(n));
    report("hamming_many",
           time_best_of([&] { (void)serial::hamming_many(query, xs); }),
           time_best_of([&] { (void)hamming_many(query, xs); }),
           static_cast<double>(n));
    return 0;
}
