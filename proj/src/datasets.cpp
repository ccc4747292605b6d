#include "ehdc/datasets.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ehdc {

namespace {

std::vector<char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open file: " + path);
    }
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    return bytes;
}

std::uint32_t read_be32(const char* p) {
    return (static_cast<std::uint32_t>(static_cast<unsigned char>(p[0])) << 24) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(p[1])) << 16) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(p[2])) << 8) |
           static_cast<std::uint32_t>(static_cast<unsigned char>(p[3]));
}

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) {
        throw std::runtime_error("EHDD: truncated file");
    }
    return v;
}

} // namespace

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t basis) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = basis;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

RawIntDataset load_idx(const std::string& images_path,
                       const std::string& labels_path) {
    const std::vector<char> img = read_file(images_path);
    const std::vector<char> lab = read_file(labels_path);
    if (img.size() < 16) {
        throw std::runtime_error("IDX: truncated image header in " + images_path);
    }
    if (lab.size() < 8) {
        throw std::runtime_error("IDX: truncated label header in " + labels_path);
    }
    const std::uint32_t img_magic = read_be32(img.data());
    if (img_magic != 0x00000803u) {
        std::ostringstream os;
        os << "IDX: bad image magic 0x" << std::hex << img_magic
           << " at offset 0 in " << images_path << " (want 0x803)";
        throw std::runtime_error(os.str());
    }
    const std::uint32_t lab_magic = read_be32(lab.data());
    if (lab_magic != 0x00000801u) {
        std::ostringstream os;
        os << "IDX: bad label magic 0x" << std::hex << lab_magic
           << " at offset 0 in " << labels_path << " (want 0x801)";
        throw std::runtime_error(os.str());
    }
    const std::uint32_t n_img = read_be32(img.data() + 4);
    const std::uint32_t rows = read_be32(img.data() + 8);
    const std::uint32_t cols = read_be32(img.data() + 12);
    const std::uint32_t n_lab = read_be32(lab.data() + 4);
    if (n_img != n_lab) {
        throw std::runtime_error("IDX: image count " + std::to_string(n_img) +
                                 " != label count " + std::to_string(n_lab));
    }
    const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
    if (img.size() != 16 + static_cast<std::size_t>(n_img) * pixels) {
        throw std::runtime_error("IDX: truncated image payload in " + images_path);
    }
    if (lab.size() != 8 + static_cast<std::size_t>(n_lab)) {
        throw std::runtime_error("IDX: truncated label payload in " + labels_path);
    }
    RawIntDataset ds;
    ds.num_features = pixels;
    ds.samples.reserve(n_img);
    ds.labels.reserve(n_img);
    for (std::uint32_t s = 0; s < n_img; ++s) {
        const auto* base =
            reinterpret_cast<const unsigned char*>(img.data()) + 16 + s * pixels;
        ds.samples.emplace_back(base, base + pixels);
        ds.labels.push_back(static_cast<unsigned char>(lab[8 + s]));
    }
    return ds;
}

RawRealDataset load_delimited(const std::string& path, DelimitedSchema schema,
                              const std::string& labels_path) {
    RawRealDataset ds;
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open file: " + path);
    }
    const std::size_t want_features = schema == DelimitedSchema::Isolet ? 617 : 561;
    ds.num_features = want_features;
    ds.num_classes = schema == DelimitedSchema::Isolet ? 26 : 6;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) {
            continue;
        }
        for (char& c : line) {
            if (c == ',') {
                c = ' ';
            }
        }
        std::istringstream row(line);
        std::vector<double> vals;
        double v;
        while (row >> v) {
            vals.push_back(v);
        }
        const std::size_t expect =
            schema == DelimitedSchema::Isolet ? want_features + 1 : want_features;
        if (vals.size() != expect) {
            throw std::runtime_error("ragged row at line " + std::to_string(line_no) +
                                     " in " + path + ": got " +
                                     std::to_string(vals.size()) + " fields, want " +
                                     std::to_string(expect));
        }
        for (std::size_t i = 0; i < want_features; ++i) {
            if (std::isnan(vals[i])) {
                throw std::runtime_error("NaN feature at line " +
                                         std::to_string(line_no) + ", column " +
                                         std::to_string(i) + " in " + path);
            }
        }
        if (schema == DelimitedSchema::Isolet) {
            const double raw_label = vals.back();
            const long lab = std::lround(raw_label);
            if (lab < 1 || lab > 26) {
                throw std::runtime_error("ISOLET label out of range at line " +
                                         std::to_string(line_no) + ": " +
                                         std::to_string(raw_label));
            }
            ds.labels.push_back(static_cast<std::uint16_t>(lab - 1));
            vals.pop_back();
        }
        ds.samples.push_back(std::move(vals));
    }
    if (schema == DelimitedSchema::UciHar) {
        std::ifstream lin(labels_path);
        if (!lin) {
            throw std::runtime_error("cannot open label file: " + labels_path);
        }
        long lab;
        while (lin >> lab) {
            if (lab < 1 || lab > 6) {
                throw std::runtime_error("UCI-HAR label out of range: " +
                                         std::to_string(lab));
            }
            ds.labels.push_back(static_cast<std::uint16_t>(lab - 1));
        }
        if (ds.labels.size() != ds.samples.size()) {
            throw std::runtime_error("UCI-HAR: sample count " +
                                     std::to_string(ds.samples.size()) +
                                     " != label count " +
                                     std::to_string(ds.labels.size()));
        }
    }
    return ds;
}

LabeledBinaryDataset binarize_pixels(const RawIntDataset& raw,
                                     const QuantizerSpec& spec,
                                     std::size_t num_classes) {
    LabeledBinaryDataset ds;
    ds.input_dim = raw.num_features;
    ds.num_classes = num_classes;
    ds.labels = raw.labels;
    ds.samples.reserve(raw.samples.size());
    for (const auto& px : raw.samples) {
        BinaryHypervector hv(raw.num_features);
        for (std::size_t i = 0; i < px.size(); ++i) {
            if (px[i] > spec.threshold) {
                hv.set_bit(i, true);
            }
        }
        ds.samples.push_back(std::move(hv));
    }
    std::uint64_t h = fnv1a64(&spec.threshold, sizeof(spec.threshold));
    for (const auto& px : raw.samples) {
        h = fnv1a64(px.data(), px.size(), h);
    }
    ds.provenance = h;
    ds.provenance_desc =
        "pixel-threshold:" + std::to_string(spec.threshold);
    return ds;
}

void fit_thermometer_range(const RawRealDataset& train, QuantizerSpec& spec) {
    spec.feature_min.assign(train.num_features, 0.0);
    spec.feature_max.assign(train.num_features, 0.0);
    for (std::size_t f = 0; f < train.num_features; ++f) {
        double lo = train.samples.front()[f];
        double hi = lo;
        for (const auto& s : train.samples) {
            lo = std::min(lo, s[f]);
            hi = std::max(hi, s[f]);
        }
        if (lo == hi) {
            hi = lo + 1.0; // constant feature: all bits stay 0
        }
        spec.feature_min[f] = lo;
        spec.feature_max[f] = hi;
    }
}

LabeledBinaryDataset thermometer_quantize(const RawRealDataset& raw,
                                          const QuantizerSpec& spec) {
    if (spec.levels < 1) {
        throw std::invalid_argument("thermometer_quantize: levels must be >= 1");
    }
    if (spec.feature_min.size() != raw.num_features ||
        spec.feature_max.size() != raw.num_features) {
        throw std::invalid_argument(
            "thermometer_quantize: per-feature range not fitted");
    }
    const std::size_t q = static_cast<std::size_t>(spec.levels);
    LabeledBinaryDataset ds;
    ds.input_dim = raw.num_features * q;
    ds.num_classes = raw.num_classes;
    ds.labels = raw.labels;
    ds.samples.reserve(raw.samples.size());
    for (const auto& row : raw.samples) {
        BinaryHypervector hv(ds.input_dim);
        for (std::size_t f = 0; f < raw.num_features; ++f) {
            const double lo = spec.feature_min[f];
            const double hi = spec.feature_max[f];
            const double v = row[f];
            for (std::size_t level = 0; level < q; ++level) {
                const double cut =
                    lo + static_cast<double>(level + 1) * (hi - lo) /
                             static_cast<double>(q + 1);
                if (v > cut) {
                    hv.set_bit(f * q + level, true);
                }
            }
        }
        ds.samples.push_back(std::move(hv));
    }
    std::uint64_t h = fnv1a64(&spec.levels, sizeof(spec.levels));
    h = fnv1a64(spec.feature_min.data(),
                spec.feature_min.size() * sizeof(double), h);
    h = fnv1a64(spec.feature_max.data(),
                spec.feature_max.size() * sizeof(double), h);
    for (const auto& row : raw.samples) {
        h = fnv1a64(row.data(), row.size() * sizeof(double), h);
    }
    ds.provenance = h;
    ds.provenance_desc = "thermometer:Q=" + std::to_string(spec.levels);
    return ds;
}

void save_ehdd(const LabeledBinaryDataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write file: " + path);
    }
    out.write("EHDD", 4);
    write_pod(out, static_cast<std::uint32_t>(ds.input_dim));
    write_pod(out, static_cast<std::uint32_t>(ds.num_classes));
    write_pod(out, static_cast<std::uint64_t>(ds.samples.size()));
    for (const auto& hv : ds.samples) {
        out.write(reinterpret_cast<const char*>(hv.words().data()),
                  static_cast<std::streamsize>(hv.word_count() * 8));
    }
    out.write(reinterpret_cast<const char*>(ds.labels.data()),
              static_cast<std::streamsize>(ds.labels.size() * sizeof(std::uint16_t)));
    write_pod(out, ds.provenance);
}

LabeledBinaryDataset load_ehdd(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open file: " + path);
    }
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "EHDD", 4) != 0) {
        throw std::runtime_error("EHDD: bad magic in " + path);
    }
    LabeledBinaryDataset ds;
    ds.input_dim = read_pod<std::uint32_t>(in);
    ds.num_classes = read_pod<std::uint32_t>(in);
    const std::uint64_t count = read_pod<std::uint64_t>(in);
    const std::size_t words =
        (ds.input_dim + BinaryHypervector::kWordBits - 1) /
        BinaryHypervector::kWordBits;
    ds.samples.reserve(count);
    for (std::uint64_t s = 0; s < count; ++s) {
        std::vector<std::uint64_t> w(words);
        in.read(reinterpret_cast<char*>(w.data()),
                static_cast<std::streamsize>(words * 8));
        if (!in) {
            throw std::runtime_error("EHDD: truncated samples in " + path);
        }
        ds.samples.emplace_back(ds.input_dim, std::move(w));
    }
    ds.labels.resize(count);
    in.read(reinterpret_cast<char*>(ds.labels.data()),
            static_cast<std::streamsize>(count * sizeof(std::uint16_t)));
    if (!in) {
        throw std::runtime_error("EHDD: truncated labels in " + path);
    }
    ds.provenance = read_pod<std::uint64_t>(in);
    return ds;
}

} // namespace ehdc
