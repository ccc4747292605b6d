#include "ehdc/model_io.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace ehdc {

namespace {

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) {
        throw std::runtime_error("EHDC: truncated file");
    }
    return v;
}

} // namespace

void save_model(const LearnedEncoder& enc, const ClassPrototypes* prototypes,
                const std::string& path) {
    for (const auto& layer : enc.layers) {
        if (layer.bn_state.has_value()) {
            throw std::invalid_argument(
                "save_model: fold batch norm before exporting");
        }
    }
    if (prototypes != nullptr && !enc.layers.empty() &&
        prototypes->dim != enc.layers.back().out_dim) {
        throw std::invalid_argument(
            "save_model: prototype dim " + std::to_string(prototypes->dim) +
            " does not match encoder output " +
            std::to_string(enc.layers.back().out_dim));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write file: " + path);
    }
    out.write("EHDC", 4);
    write_pod(out, kModelFormatVersion);
    write_pod(out, static_cast<std::uint8_t>(enc.layers.size()));
    for (const auto& layer : enc.layers) {
        write_pod(out, static_cast<std::uint32_t>(layer.in_dim));
        write_pod(out, static_cast<std::uint32_t>(layer.out_dim));
        write_pod(out, static_cast<std::uint8_t>(1)); // int8 weights
        out.write(reinterpret_cast<const char*>(layer.quantized_weights.data()),
                  static_cast<std::streamsize>(layer.quantized_weights.size()));
        for (std::size_t j = 0; j < layer.out_dim; ++j) {
            write_pod(out, layer.thresholds.empty()
                               ? std::int32_t{0}
                               : layer.thresholds[j]);
        }
        for (std::size_t j = 0; j < layer.out_dim; ++j) {
            write_pod(out, layer.flipped.empty() ? std::uint8_t{0}
                                                 : layer.flipped[j]);
        }
    }
    write_pod(out, static_cast<std::uint8_t>(prototypes != nullptr ? 1 : 0));
    if (prototypes != nullptr) {
        write_pod(out, static_cast<std::uint32_t>(prototypes->num_classes));
        write_pod(out, prototypes->theta);
        for (const auto& sum : prototypes->sums) {
            out.write(reinterpret_cast<const char*>(sum.data()),
                      static_cast<std::streamsize>(sum.size() * sizeof(double)));
        }
        for (const auto& rep : prototypes->reps) {
            out.write(reinterpret_cast<const char*>(rep.words().data()),
                      static_cast<std::streamsize>(rep.word_count() * 8));
        }
    }
}

LoadedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open file: " + path);
    }
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "EHDC", 4) != 0) {
        throw std::runtime_error("EHDC: bad magic in " + path);
    }
    const std::uint32_t version = read_pod<std::uint32_t>(in);
    if (version != kModelFormatVersion) {
        throw std::runtime_error("EHDC: unsupported format version " +
                                 std::to_string(version));
    }
    LoadedModel model;
    const std::uint8_t layer_count = read_pod<std::uint8_t>(in);
    for (std::uint8_t l = 0; l < layer_count; ++l) {
        DenseBinaryLayer layer;
        layer.in_dim = read_pod<std::uint32_t>(in);
        layer.out_dim = read_pod<std::uint32_t>(in);
        const std::uint8_t width = read_pod<std::uint8_t>(in);
        if (width != 1) {
            throw std::runtime_error("EHDC: unsupported weight width " +
                                     std::to_string(width));
        }
        layer.quantized_weights.resize(layer.in_dim * layer.out_dim);
        in.read(reinterpret_cast<char*>(layer.quantized_weights.data()),
                static_cast<std::streamsize>(layer.quantized_weights.size()));
        layer.thresholds.resize(layer.out_dim);
        for (auto& t : layer.thresholds) {
            t = read_pod<std::int32_t>(in);
        }
        layer.flipped.resize(layer.out_dim);
        for (auto& f : layer.flipped) {
            f = read_pod<std::uint8_t>(in);
        }
        // Shadow copy mirrors the integers so further retraining is legal.
        layer.shadow_weights.resize(layer.quantized_weights.size());
        for (std::size_t k = 0; k < layer.quantized_weights.size(); ++k) {
            layer.shadow_weights[k] = static_cast<float>(layer.quantized_weights[k]);
        }
        model.encoder.layers.push_back(std::move(layer));
    }
    const std::uint8_t has_proto = read_pod<std::uint8_t>(in);
    if (has_proto != 0) {
        ClassPrototypes proto;
        proto.num_classes = read_pod<std::uint32_t>(in);
        proto.dim = model.encoder.output_dim();
        proto.theta = read_pod<double>(in);
        proto.sums.assign(proto.num_classes, std::vector<double>(proto.dim));
        for (auto& sum : proto.sums) {
            in.read(reinterpret_cast<char*>(sum.data()),
                    static_cast<std::streamsize>(sum.size() * sizeof(double)));
        }
        const std::size_t words =
            (proto.dim + BinaryHypervector::kWordBits - 1) /
            BinaryHypervector::kWordBits;
        for (std::size_t c = 0; c < proto.num_classes; ++c) {
            std::vector<std::uint64_t> w(words);
            in.read(reinterpret_cast<char*>(w.data()),
                    static_cast<std::streamsize>(words * 8));
            proto.reps.emplace_back(proto.dim, std::move(w));
        }
        if (!in) {
            throw std::runtime_error("EHDC: truncated prototype block in " + path);
        }
        model.prototypes = std::move(proto);
    }
    return model;
}

} // namespace ehdc
