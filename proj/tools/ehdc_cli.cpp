// Experiment driver: dataset preparation, training/evaluation pipelines,
// dimension and threshold sweeps, theory curves, and op counting.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 internal.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ehdc/datasets.hpp"
#include "ehdc/kernels.hpp"
#include "ehdc/model_io.hpp"
#include "ehdc/prototypes.hpp"
#include "ehdc/theory.hpp"
#include "ehdc/train.hpp"

using namespace ehdc;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Options shared by every pipeline-running subcommand.
struct PipelineOptions {
    std::string dataset;
    std::string data_dir;
    std::size_t dim = 64;
    std::size_t layers = 1;
    std::size_t hidden_dim = 0;
    std::size_t epochs = 20;
    std::size_t batch_size = 64;
    double lr = 1e-3;
    std::uint64_t seed = 0;
    double theta = -1.0; // < 0: default (median class size / 2)
    int pixel_threshold = 127;
    std::size_t thermometer_levels = 8;
    bool retrain_step1 = false;
    bool retrain_step2 = false;
    double retrain_lr = 1.0;
    std::size_t retrain_passes = 1;
    std::size_t retrain_epochs = 5;
};

std::string data_root(const PipelineOptions& opt) {
    if (!opt.data_dir.empty()) {
        return opt.data_dir;
    }
    if (const char* env = std::getenv("EHDC_DATA")) {
        return env;
    }
    return "data";
}

void attach_pipeline_flags(CLI::App* cmd, PipelineOptions& opt,
                           bool need_dataset = true) {
    auto* ds = cmd->add_option("--dataset", opt.dataset,
                               "dataset id: mnist, fashion-mnist, isolet, uci-har");
    if (need_dataset) {
        ds->required();
    }
    cmd->add_option("--data-dir", opt.data_dir,
                    "raw data directory (default: $EHDC_DATA or ./data)");
    cmd->add_option("--dim", opt.dim, "hypervector dimension d");
    cmd->add_option("--layers", opt.layers, "encoder layers (1 or 2)");
    cmd->add_option("--hidden-dim", opt.hidden_dim,
                    "2-layer hidden width (default: d)");
    cmd->add_option("--epochs", opt.epochs, "training epochs");
    cmd->add_option("--batch", opt.batch_size, "mini-batch size");
    cmd->add_option("--lr", opt.lr, "learning rate");
    cmd->add_option("--seed", opt.seed, "master seed");
    cmd->add_option("--theta", opt.theta,
                    "prototype threshold (default: median class size / 2)");
    cmd->add_option("--pixel-threshold", opt.pixel_threshold,
                    "binarization threshold for image datasets");
    cmd->add_option("--levels", opt.thermometer_levels,
                    "thermometer levels for real-valued datasets");
    cmd->add_flag("--retrain-step1", opt.retrain_step1,
                  "retrain the encoder against the class representations");
    cmd->add_flag("--retrain-step2", opt.retrain_step2,
                  "perceptron-style prototype updates on misclassified samples");
    cmd->add_option("--retrain-lr", opt.retrain_lr, "step-2 learning rate");
    cmd->add_option("--retrain-passes", opt.retrain_passes, "step-2 passes");
    cmd->add_option("--retrain-epochs", opt.retrain_epochs, "step-1 epochs");
}

struct DatasetPair {
    LabeledBinaryDataset train;
    LabeledBinaryDataset test;
};

void require_file(const std::string& path) {
    if (!std::filesystem::exists(path)) {
        throw DataError("missing data file: " + path);
    }
}

DatasetPair load_dataset(const PipelineOptions& opt) {
    const std::string root = data_root(opt) + "/" + opt.dataset + "/";
    // Prepared caches win when present.
    if (std::filesystem::exists(root + "train.ehdd") &&
        std::filesystem::exists(root + "test.ehdd")) {
        return {load_ehdd(root + "train.ehdd"), load_ehdd(root + "test.ehdd")};
    }
    if (opt.dataset == "mnist" || opt.dataset == "fashion-mnist") {
        for (const char* f :
             {"train-images-idx3-ubyte", "train-labels-idx1-ubyte",
              "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"}) {
            require_file(root + f);
        }
        QuantizerSpec spec;
        spec.threshold = opt.pixel_threshold;
        const RawIntDataset train = load_idx(root + "train-images-idx3-ubyte",
                                             root + "train-labels-idx1-ubyte");
        const RawIntDataset test = load_idx(root + "t10k-images-idx3-ubyte",
                                            root + "t10k-labels-idx1-ubyte");
        return {binarize_pixels(train, spec, 10), binarize_pixels(test, spec, 10)};
    }
    if (opt.dataset == "isolet") {
        require_file(root + "isolet1+2+3+4.data");
        require_file(root + "isolet5.data");
        const RawRealDataset train =
            load_delimited(root + "isolet1+2+3+4.data", DelimitedSchema::Isolet);
        const RawRealDataset test =
            load_delimited(root + "isolet5.data", DelimitedSchema::Isolet);
        QuantizerSpec spec;
        spec.mode = QuantizerMode::Thermometer;
        spec.levels = opt.thermometer_levels;
        fit_thermometer_range(train, spec);
        return {thermometer_quantize(train, spec), thermometer_quantize(test, spec)};
    }
    if (opt.dataset == "uci-har") {
        for (const char* f :
             {"X_train.txt", "y_train.txt", "X_test.txt", "y_test.txt"}) {
            require_file(root + f);
        }
        const RawRealDataset train = load_delimited(
            root + "X_train.txt", DelimitedSchema::UciHar, root + "y_train.txt");
        const RawRealDataset test = load_delimited(
            root + "X_test.txt", DelimitedSchema::UciHar, root + "y_test.txt");
        QuantizerSpec spec;
        spec.mode = QuantizerMode::Thermometer;
        spec.levels = opt.thermometer_levels;
        fit_thermometer_range(train, spec);
        return {thermometer_quantize(train, spec), thermometer_quantize(test, spec)};
    }
    throw ConfigError("unknown dataset id: " + opt.dataset);
}

struct PipelineResult {
    LearnedEncoder encoder;
    ClassPrototypes prototypes;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
};

PipelineResult run_pipeline(const DatasetPair& data, const PipelineOptions& opt) {
    if (opt.layers == 0 || opt.layers > 2) {
        throw ConfigError("--layers must be 1 or 2");
    }
    TrainConfig cfg;
    cfg.epochs = opt.epochs;
    cfg.batch_size = opt.batch_size;
    cfg.learning_rate = opt.lr;
    cfg.seed = opt.seed;
    cfg.num_layers = opt.layers;
    cfg.hidden_dim = opt.hidden_dim;

    PipelineResult out;
    out.encoder = train_encoder(data.train, opt.dim, cfg);
    if (opt.layers >= 2) {
        out.encoder = fold_batchnorm(out.encoder);
    }
    const double theta = opt.theta >= 0.0 ? opt.theta : default_theta(data.train);
    out.prototypes = generate_representations(out.encoder, data.train, theta);

    if (opt.retrain_step1) {
        TrainConfig step1 = cfg;
        step1.epochs = opt.retrain_epochs;
        out.encoder =
            retrain_step1(out.encoder, out.prototypes, data.train, step1);
        out.prototypes = generate_representations(out.encoder, data.train, theta);
    }
    if (opt.retrain_step2) {
        out.prototypes = retrain_step2(out.encoder, out.prototypes, data.train,
                                       opt.retrain_lr, opt.retrain_passes);
    }
    out.train_accuracy = evaluate(out.encoder, out.prototypes, data.train).accuracy;
    out.test_accuracy = evaluate(out.encoder, out.prototypes, data.test).accuracy;
    return out;
}

std::string config_comment(const PipelineOptions& opt) {
    std::ostringstream s;
    s << "# dataset=" << opt.dataset << " dim=" << opt.dim
      << " layers=" << opt.layers << " hidden_dim=" << opt.hidden_dim
      << " epochs=" << opt.epochs << " batch=" << opt.batch_size
      << " lr=" << opt.lr << " seed=" << opt.seed << " theta=" << opt.theta
      << " pixel_threshold=" << opt.pixel_threshold
      << " levels=" << opt.thermometer_levels
      << " retrain_step1=" << opt.retrain_step1
      << " retrain_step2=" << opt.retrain_step2
      << " retrain_lr=" << opt.retrain_lr
      << " retrain_passes=" << opt.retrain_passes
      << " retrain_epochs=" << opt.retrain_epochs;
    return s.str();
}

std::ofstream open_csv(const std::string& path, const std::string& header_comment,
                       const std::string& columns) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write output file: " + path);
    }
    out << header_comment << "\n" << columns << "\n";
    return out;
}

int cmd_data_prepare(const PipelineOptions& opt) {
    const DatasetPair data = load_dataset(opt);
    const std::string root = data_root(opt) + "/" + opt.dataset + "/";
    save_ehdd(data.train, root + "train.ehdd");
    save_ehdd(data.test, root + "test.ehdd");
    std::printf("wrote %strain.ehdd (%zu samples) and %stest.ehdd (%zu samples)\n",
                root.c_str(), data.train.samples.size(), root.c_str(),
                data.test.samples.size());
    return 0;
}

int cmd_train(const PipelineOptions& opt, const std::string& out_prefix) {
    const DatasetPair data = load_dataset(opt);
    const PipelineResult r = run_pipeline(data, opt);
    std::printf("train accuracy: %.4f\ntest accuracy: %.4f\n", r.train_accuracy,
                r.test_accuracy);
    if (!out_prefix.empty()) {
        save_model(r.encoder, &r.prototypes, out_prefix + ".ehdc");
        auto csv = open_csv(out_prefix + ".csv", config_comment(opt),
                            "dataset,dim,layers,train_accuracy,test_accuracy");
        csv << opt.dataset << "," << opt.dim << "," << opt.layers << ","
            << r.train_accuracy << "," << r.test_accuracy << "\n";
        std::printf("wrote %s.ehdc and %s.csv\n", out_prefix.c_str(),
                    out_prefix.c_str());
    }
    return 0;
}

int cmd_eval(const PipelineOptions& opt, const std::string& model_path) {
    const DatasetPair data = load_dataset(opt);
    const LoadedModel model = load_model(model_path);
    if (!model.prototypes.has_value()) {
        throw DataError("model file has no prototype block: " + model_path);
    }
    const double acc =
        evaluate(model.encoder, *model.prototypes, data.test).accuracy;
    std::printf("test accuracy: %.4f\n", acc);
    return 0;
}

int cmd_sweep(PipelineOptions opt, const std::vector<std::size_t>& dims,
              const std::string& out_path) {
    if (dims.empty()) {
        throw ConfigError("--dims must not be empty");
    }
    const DatasetPair data = load_dataset(opt);
    std::vector<std::pair<std::size_t, double>> rows;
    for (std::size_t d : dims) {
        opt.dim = d;
        rows.emplace_back(d, run_pipeline(data, opt).test_accuracy);
        std::printf("d=%zu accuracy=%.4f\n", d, rows.back().second);
    }
    if (!out_path.empty()) {
        auto csv = open_csv(out_path, config_comment(opt), "d,accuracy");
        for (const auto& [d, acc] : rows) {
            csv << d << "," << acc << "\n";
        }
    }
    return 0;
}

int cmd_theta_sweep(const PipelineOptions& opt, double theta_min, double theta_max,
                    double theta_step, const std::string& out_path) {
    if (theta_step <= 0.0 || theta_max < theta_min) {
        throw ConfigError("invalid theta range");
    }
    const DatasetPair data = load_dataset(opt);
    PipelineOptions base = opt;
    base.retrain_step1 = false;
    base.retrain_step2 = false;
    const PipelineResult trained = run_pipeline(data, base);
    std::vector<std::pair<double, double>> rows;
    for (double theta = theta_min; theta <= theta_max + 1e-9; theta += theta_step) {
        const ClassPrototypes proto =
            generate_representations(trained.encoder, data.train, theta);
        const double acc = evaluate(trained.encoder, proto, data.test).accuracy;
        rows.emplace_back(theta, acc);
        std::printf("theta=%.1f accuracy=%.4f\n", theta, acc);
    }
    if (!out_path.empty()) {
        auto csv = open_csv(out_path, config_comment(opt), "theta,accuracy");
        for (const auto& [theta, acc] : rows) {
            csv << theta << "," << acc << "\n";
        }
    }
    return 0;
}

int cmd_theory(const std::string& kind, std::size_t d_min, std::size_t d_max,
               std::size_t n, std::uint64_t seed, const std::string& out_path) {
    std::vector<TheoryResult> rows;
    if (kind == "worst") {
        for (std::size_t d = d_min; d <= d_max; ++d) {
            rows.push_back(worst_case_accuracy(d));
        }
    } else if (kind == "average") {
        for (std::size_t d = d_min; d <= d_max; ++d) {
            rows.push_back(average_case_accuracy(d, n, seed));
        }
    } else if (kind == "lemma2-check") {
        SplittableRng rng(seed);
        std::size_t checked = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t d = 1 + rng.next_below(10);
            std::vector<double> delta(d);
            double norm = 0.0;
            for (auto& v : delta) {
                v = rng.next_double() * 2.0 - 1.0;
                norm += v * v;
            }
            if (norm == 0.0) {
                continue;
            }
            if (std::fabs(lemma2_sup(delta).value - lemma2_bruteforce(delta)) >
                1e-12) {
                std::printf("MISMATCH at instance %zu\n", i);
                return kExitInternal;
            }
            ++checked;
        }
        std::printf("all matched (%zu instances)\n", checked);
        return 0;
    } else if (kind == "projection") {
        std::size_t violations = 0;
        const auto proj = projection_monotonicity_experiment(
            std::min<std::size_t>(d_max, 6), n, seed, &violations);
        std::printf("violations: %zu\n", violations);
        for (const auto& row : proj) {
            TheoryResult r;
            r.d = row.d;
            r.value = row.mean_accuracy;
            r.n_samples = n;
            r.seed = seed;
            rows.push_back(r);
        }
    } else {
        throw ConfigError("unknown theory kind: " + kind);
    }
    std::ostringstream comment;
    comment << "# kind=" << kind << " d=" << d_min << ".." << d_max << " n=" << n
            << " seed=" << seed;
    if (!out_path.empty()) {
        auto csv = open_csv(out_path, comment.str(), "kind,d,value,stderr,n,seed");
        for (const auto& r : rows) {
            csv << kind << "," << r.d << "," << r.value << "," << r.stderr_ << ","
                << r.n_samples << "," << r.seed << "\n";
        }
    } else {
        for (const auto& r : rows) {
            std::printf("%s,%zu,%.12f,%.3e,%zu,%llu\n", kind.c_str(), r.d,
                        r.value, r.stderr_, r.n_samples,
                        static_cast<unsigned long long>(r.seed));
        }
    }
    return 0;
}

int cmd_opcount(std::size_t input_dim, const std::vector<std::size_t>& layer_dims,
                bool classic, std::size_t hv_dim, std::size_t num_classes,
                const std::string& out_path) {
    ArchDescriptor arch;
    arch.input_dim = input_dim;
    arch.num_classes = num_classes;
    if (classic) {
        arch.classic = true;
        arch.hv_dim = hv_dim;
    } else {
        if (layer_dims.empty()) {
            throw ConfigError("--layer-dims required unless --classic");
        }
        arch.layer_dims = layer_dims;
    }
    const OpCountReport r = count_ops(arch);
    ArchDescriptor baseline;
    baseline.classic = true;
    baseline.input_dim = input_dim;
    baseline.hv_dim = 10000;
    baseline.num_classes = num_classes;
    const OpCountReport base = count_ops(baseline);
    const double ratio = static_cast<double>(r.encoder_additions) /
                         static_cast<double>(base.encoder_additions);
    std::printf("encoder additions: %llu\nboolean ops: %llu\n"
                "similarity ops: %llu\nratio to 10000-d classic: %.4f%%\n",
                static_cast<unsigned long long>(r.encoder_additions),
                static_cast<unsigned long long>(r.boolean_ops),
                static_cast<unsigned long long>(r.similarity_ops), 100.0 * ratio);
    if (!out_path.empty()) {
        auto csv = open_csv(out_path, "# opcount report",
                            "encoder_additions,boolean_ops,similarity_ops,ratio");
        csv << r.encoder_additions << "," << r.boolean_ops << ","
            << r.similarity_ops << "," << ratio << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Low-dimensional binary hypervector classification toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value config file; flags win");

    PipelineOptions opt;
    std::string out;

    auto* data = app.add_subcommand("data", "dataset utilities");
    data->require_subcommand(1);
    PipelineOptions prep_opt;
    auto* prepare =
        data->add_subcommand("prepare", "quantize raw data into EHDD caches");
    attach_pipeline_flags(prepare, prep_opt);

    auto* train = app.add_subcommand("train", "train and evaluate one pipeline");
    attach_pipeline_flags(train, opt);
    train->add_option("--out", out, "output prefix for .ehdc/.csv artifacts");

    PipelineOptions eval_opt;
    std::string model_path;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a saved model");
    attach_pipeline_flags(eval_cmd, eval_opt);
    eval_cmd->add_option("--model", model_path, "EHDC model file")->required();

    PipelineOptions sweep_opt;
    std::vector<std::size_t> dims;
    std::string sweep_out;
    auto* sweep = app.add_subcommand("sweep", "accuracy across dimensions");
    attach_pipeline_flags(sweep, sweep_opt);
    sweep->add_option("--dims", dims, "dimensions to sweep")->required();
    sweep->add_option("--out", sweep_out, "CSV output path");

    PipelineOptions theta_opt;
    double theta_min = 1000.0;
    double theta_max = 4500.0;
    double theta_step = 500.0;
    std::string theta_out;
    auto* theta_sweep =
        app.add_subcommand("theta-sweep", "accuracy across prototype thresholds");
    attach_pipeline_flags(theta_sweep, theta_opt);
    theta_sweep->add_option("--theta-min", theta_min, "sweep start");
    theta_sweep->add_option("--theta-max", theta_max, "sweep end");
    theta_sweep->add_option("--theta-step", theta_step, "sweep step");
    theta_sweep->add_option("--out", theta_out, "CSV output path");

    std::string theory_kind = "worst";
    std::size_t theory_d_min = 1;
    std::size_t theory_d_max = 1000;
    std::size_t theory_n = 1000;
    std::uint64_t theory_seed = 0;
    std::string theory_out;
    auto* theory = app.add_subcommand("theory", "accuracy bounds and checks");
    theory->add_option("--kind", theory_kind,
                       "worst | average | lemma2-check | projection");
    theory->add_option("--d-min", theory_d_min, "smallest dimension");
    theory->add_option("--d-max", theory_d_max, "largest dimension");
    theory->add_option("--n", theory_n, "trials / instances");
    theory->add_option("--seed", theory_seed, "master seed");
    theory->add_option("--out", theory_out, "CSV output path");

    std::size_t oc_input = 784;
    std::vector<std::size_t> oc_layers;
    bool oc_classic = false;
    std::size_t oc_hv = 10000;
    std::size_t oc_classes = 10;
    std::string oc_out;
    auto* opcount = app.add_subcommand("opcount", "inference cost accounting");
    opcount->add_option("--input-dim", oc_input, "input feature count");
    opcount->add_option("--layer-dims", oc_layers, "learned layer widths");
    opcount->add_flag("--classic", oc_classic, "classic item-memory encoder");
    opcount->add_option("--hv-dim", oc_hv, "classic hypervector dimension");
    opcount->add_option("--classes", oc_classes, "number of classes");
    opcount->add_option("--out", oc_out, "CSV output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (prepare->parsed()) {
            return cmd_data_prepare(prep_opt);
        }
        if (train->parsed()) {
            return cmd_train(opt, out);
        }
        if (eval_cmd->parsed()) {
            return cmd_eval(eval_opt, model_path);
        }
        if (sweep->parsed()) {
            return cmd_sweep(sweep_opt, dims, sweep_out);
        }
        if (theta_sweep->parsed()) {
            return cmd_theta_sweep(theta_opt, theta_min, theta_max, theta_step,
                                   theta_out);
        }
        if (theory->parsed()) {
            return cmd_theory(theory_kind, theory_d_min, theory_d_max, theory_n,
                              theory_seed, theory_out);
        }
        if (opcount->parsed()) {
            return cmd_opcount(oc_input, oc_layers, oc_classic, oc_hv, oc_classes,
                               oc_out);
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kExitData;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return kExitInternal;
    }
    return 0;
}
