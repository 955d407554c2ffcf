// spikewhite: fit whitening, train a spiking feature layer with STDP, extract
// pooled features, and classify them with a linear SVM.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "spikewhite/classify.hpp"
#include "spikewhite/config.hpp"
#include "spikewhite/containers.hpp"
#include "spikewhite/datasets.hpp"
#include "spikewhite/errors.hpp"
#include "spikewhite/pipeline.hpp"
#include "spikewhite/synthetic.hpp"

namespace sw = spikewhite;

namespace {

// Exit codes: 0 ok, 1 unexpected, 2 config/usage, 3 file format or I/O,
// 4 shape/contract, 5 convergence.
int error_code(const std::exception& e) {
    if (dynamic_cast<const sw::ConfigError*>(&e)) return 2;
    if (dynamic_cast<const sw::FormatError*>(&e)) return 3;
    if (dynamic_cast<const sw::ShapeError*>(&e)) return 4;
    if (dynamic_cast<const std::invalid_argument*>(&e)) return 4;
    if (dynamic_cast<const sw::ConvergenceError*>(&e)) return 5;
    if (dynamic_cast<const sw::DataError*>(&e)) return 3;
    return 1;
}

std::optional<sw::WhiteningArtifact> load_artifact_if_needed(const sw::ExperimentConfig& cfg,
                                                             const std::string& path) {
    if (cfg.preproc == sw::PreprocMode::dog_gray || cfg.preproc == sw::PreprocMode::dog_color) {
        return std::nullopt;
    }
    if (path.empty()) {
        throw sw::ConfigError("this preprocessing mode needs --whitening <file>");
    }
    return sw::load_whitening(path);
}

void write_train_log(const std::string& path, const sw::TrainLog& log) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) {
        throw sw::FormatError("cannot write log: " + path);
    }
    f << "epoch\tlr_w\tlr_th\tmean_winner_time\tmean_threshold\tsilent\twin_counts\n";
    for (const sw::EpochStats& e : log.epochs) {
        f << e.epoch << '\t' << e.lr_w << '\t' << e.lr_th << '\t' << e.mean_winner_time
          << '\t' << e.mean_threshold << '\t' << e.silent << '\t';
        for (std::size_t i = 0; i < e.win_counts.size(); ++i) {
            f << (i ? "," : "") << e.win_counts[i];
        }
        f << '\n';
    }
}

int cmd_whiten_fit(const std::string& config_path, const std::string& out_path) {
    const sw::ExperimentConfig cfg = sw::load_config(config_path);
    const sw::DatasetPair data = sw::load_dataset(cfg);
    sw::FitSummary summary;
    const sw::WhiteningArtifact artifact = sw::fit_whitening(cfg, data.train, &summary);
    sw::save_whitening(out_path, artifact);
    std::cout << "fit dimension: " << summary.dimension << "\n";
    std::cout << "retained eigenpairs: " << summary.retained << "\n";
    std::cout << "leading eigenvalues:";
    for (double v : summary.spectrum_head) {
        std::cout << ' ' << v;
    }
    std::cout << "\nwrote " << out_path << "\n";
    return 0;
}

int cmd_train(const std::string& config_path, const std::string& whitening_path,
              const std::string& out_path, const std::string& log_path) {
    const sw::ExperimentConfig cfg = sw::load_config(config_path);
    const auto artifact = load_artifact_if_needed(cfg, whitening_path);
    const auto pre = sw::make_preprocessor(cfg, artifact ? &*artifact : nullptr);

    const sw::DatasetPair data = sw::load_dataset(cfg);
    const auto inputs = sw::preprocess_all(*pre, data.train.images);

    sw::SnnLayer layer = sw::init_layer(cfg, inputs.front().channels, cfg.seed);
    sw::TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.annealing = cfg.annealing;
    tc.patches_per_epoch =
        (cfg.patches_per_epoch == 0) ? inputs.size() : cfg.patches_per_epoch;
    tc.seed = cfg.seed + 1;
    const sw::TrainLog log =
        sw::train(layer, inputs, tc, cfg.stdp, cfg.homeostasis, cfg.exposition);

    sw::save_layer(out_path, layer, cfg.stdp);
    if (!log_path.empty()) {
        write_train_log(log_path, log);
    }
    for (const sw::EpochStats& e : log.epochs) {
        std::cout << "epoch " << e.epoch << ": mean_winner_time=" << e.mean_winner_time
                  << " mean_threshold=" << e.mean_threshold << " silent=" << e.silent
                  << "\n";
    }
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int cmd_extract(const std::string& config_path, const std::string& whitening_path,
                const std::string& layer_path, const std::string& split,
                const std::string& out_path) {
    const sw::ExperimentConfig cfg = sw::load_config(config_path);
    if (split != "train" && split != "test") {
        throw sw::ConfigError("--split must be train or test");
    }
    const auto artifact = load_artifact_if_needed(cfg, whitening_path);
    const auto pre = sw::make_preprocessor(cfg, artifact ? &*artifact : nullptr);
    const sw::LayerFile lf = sw::load_layer(layer_path);

    const sw::DatasetPair data = sw::load_dataset(cfg);
    const sw::LabeledImageSet& set = (split == "train") ? data.train : data.test;
    const auto inputs = sw::preprocess_all(*pre, set.images);
    const auto features = sw::extract_features(lf.layer, inputs, set.labels, cfg);
    sw::save_features(out_path, features, set.class_count);
    std::cout << "wrote " << features.size() << " feature vectors of length "
              << features.front().values.size() << " to " << out_path << "\n";
    return 0;
}

int cmd_classify(const std::string& config_path, const std::string& train_path,
                 const std::string& test_path, const std::string& report_path,
                 const std::string& summary_path) {
    const sw::ExperimentConfig cfg = sw::load_config(config_path);
    const sw::FeatureFile train = sw::load_features(train_path);
    const sw::FeatureFile test = sw::load_features(test_path);

    std::vector<double> accuracies;
    std::string report = "run\tseed\taccuracy\n";
    for (std::size_t run = 0; run < cfg.run_count; ++run) {
        const std::uint64_t seed = cfg.seed + run;
        const sw::LinearSvm svm =
            sw::train_svm_from_config(cfg, train.features, train.class_count, seed);
        const double acc = sw::evaluate(svm, test.features);
        accuracies.push_back(acc);
        report += std::to_string(run) + "\t" + std::to_string(seed) + "\t" +
                  std::to_string(acc) + "\n";
        std::cout << "run " << run << " (seed " << seed << "): accuracy " << acc << "\n";
    }
    const double mean = sw::mean_of(accuracies);
    const double std_dev = sw::sample_std(accuracies);
    std::printf("accuracy: %.4f +/- %.4f over %zu runs\n", mean, std_dev, accuracies.size());

    if (!report_path.empty()) {
        std::ofstream f(report_path, std::ios::trunc);
        f << report;
    }
    if (!summary_path.empty()) {
        nlohmann::json j;
        j["runs"] = accuracies.size();
        j["accuracies"] = accuracies;
        j["mean"] = mean;
        j["std"] = std_dev;
        std::ofstream f(summary_path, std::ios::trunc);
        f << j.dump(2) << "\n";
    }
    return 0;
}

struct CrossCell {
    double mean = 0.0;
    double std_dev = 0.0;
};

CrossCell cross_run(const sw::ExperimentConfig& cfg, const sw::WhiteningArtifact& artifact,
                    const sw::DatasetPair& data) {
    const auto pre = sw::make_preprocessor(cfg, &artifact);
    const auto pre_train = sw::preprocess_all(*pre, data.train.images);
    const auto pre_test = sw::preprocess_all(*pre, data.test.images);
    std::vector<double> accs;
    for (std::size_t run = 0; run < cfg.run_count; ++run) {
        const auto res =
            sw::run_pipeline(cfg, pre_train, data.train.labels, pre_test, data.test.labels,
                             data.train.class_count, cfg.seed + run);
        accs.push_back(res.accuracy);
    }
    return {sw::mean_of(accs), sw::sample_std(accs)};
}

int cmd_cross_dataset(const std::string& config_a_path, const std::string& config_b_path,
                      const std::string& out_path) {
    const sw::ExperimentConfig cfg_a = sw::load_config(config_a_path);
    const sw::ExperimentConfig cfg_b = sw::load_config(config_b_path);
    if (cfg_a.preproc != sw::PreprocMode::kernels || cfg_b.preproc != sw::PreprocMode::kernels) {
        throw sw::ConfigError("cross-dataset runs require preproc.mode = kernels");
    }

    const sw::DatasetPair data_a = sw::load_dataset(cfg_a);
    const sw::DatasetPair data_b = sw::load_dataset(cfg_b);
    const sw::WhiteningArtifact fit_a = sw::fit_whitening(cfg_a, data_a.train);
    const sw::WhiteningArtifact fit_b = sw::fit_whitening(cfg_b, data_b.train);

    // Rows: classification dataset; columns: where the kernels were fit.
    const CrossCell a_same = cross_run(cfg_a, fit_a, data_a);
    const CrossCell a_other = cross_run(cfg_a, fit_b, data_a);
    const CrossCell b_same = cross_run(cfg_b, fit_b, data_b);
    const CrossCell b_other = cross_run(cfg_b, fit_a, data_b);

    std::string out = "classify\tkernels\taccuracy_mean\taccuracy_std\tdelta\n";
    auto row = [&out](const std::string& cls, const std::string& src, const CrossCell& c,
                      double delta) {
        out += cls + "\t" + src + "\t" + std::to_string(c.mean) + "\t" +
               std::to_string(c.std_dev) + "\t" + std::to_string(delta) + "\n";
    };
    row("A", "A", a_same, 0.0);
    row("A", "B", a_other, a_other.mean - a_same.mean);
    row("B", "B", b_same, 0.0);
    row("B", "A", b_other, b_other.mean - b_same.mean);
    std::cout << out;
    if (!out_path.empty()) {
        std::ofstream f(out_path, std::ios::trunc);
        f << out;
    }
    return 0;
}

int cmd_export_filters(const std::string& layer_path, const std::string& out_path) {
    const sw::LayerFile lf = sw::load_layer(layer_path);
    const sw::SnnLayer& layer = lf.layer;
    if (layer.rf_channels() % 2 != 0) {
        throw sw::ShapeError("export-filters: layer input channels are not on/off pairs");
    }
    const std::size_t c_out = layer.rf_channels() / 2;
    if (c_out != 1 && c_out != 3) {
        throw sw::ShapeError("export-filters: recombined channel count must be 1 or 3");
    }
    std::vector<sw::Tensor3> tiles;
    tiles.reserve(layer.filter_count());
    for (std::size_t f = 0; f < layer.filter_count(); ++f) {
        sw::Tensor3 tile(layer.rf_h(), layer.rf_w(), c_out);
        for (std::size_t y = 0; y < layer.rf_h(); ++y) {
            for (std::size_t x = 0; x < layer.rf_w(); ++x) {
                for (std::size_t c = 0; c < c_out; ++c) {
                    const double on = layer.weights()(
                        f, sw::flat_index(y, x, c, layer.rf_w(), layer.rf_channels()));
                    const double off = layer.weights()(
                        f, sw::flat_index(y, x, c_out + c, layer.rf_w(), layer.rf_channels()));
                    tile.at(y, x, c) = on - off;
                }
            }
        }
        tiles.push_back(std::move(tile));
    }
    sw::export_image_grid(tiles, out_path);
    std::cout << "wrote " << tiles.size() << " filters to " << out_path << "\n";
    return 0;
}

int cmd_gen_data(const std::string& kind, const std::string& out_dir, std::size_t train_count,
                 std::size_t test_count, std::uint64_t seed) {
    if (kind == "cifar10") {
        sw::write_synthetic_cifar10(out_dir, train_count ? train_count : 50000,
                                    test_count ? test_count : 10000, seed);
    } else if (kind == "stl10") {
        sw::write_synthetic_stl10(out_dir, train_count ? train_count : 5000,
                                  test_count ? test_count : 8000, seed);
    } else {
        throw sw::ConfigError("--kind must be cifar10 or stl10");
    }
    std::cout << "wrote synthetic " << kind << " to " << out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"STDP visual feature learning with whitening pre-processing"};
    app.require_subcommand(1);

    std::string config_path, whitening_path, layer_path, out_path, log_path;
    std::string train_features, test_features, report_path, summary_path;
    std::string config_b_path, split, kind;
    std::size_t gen_train = 0, gen_test = 0;
    std::uint64_t gen_seed = 9001;

    auto* fit = app.add_subcommand("whiten-fit", "fit a whitening transform or kernels");
    fit->add_option("--config", config_path)->required();
    fit->add_option("--out", out_path)->required();

    auto* train = app.add_subcommand("train", "train the spiking feature layer");
    train->add_option("--config", config_path)->required();
    train->add_option("--whitening", whitening_path);
    train->add_option("--out", out_path)->required();
    train->add_option("--log", log_path);

    auto* extract = app.add_subcommand("extract", "extract pooled features for a split");
    extract->add_option("--config", config_path)->required();
    extract->add_option("--whitening", whitening_path);
    extract->add_option("--layer", layer_path)->required();
    extract->add_option("--split", split)->required();
    extract->add_option("--out", out_path)->required();

    auto* classify = app.add_subcommand("classify", "train/evaluate the linear SVM");
    classify->add_option("--config", config_path)->required();
    classify->add_option("--train-features", train_features)->required();
    classify->add_option("--test-features", test_features)->required();
    classify->add_option("--report", report_path);
    classify->add_option("--summary", summary_path);

    auto* cross = app.add_subcommand("cross-dataset", "2x2 kernel-transfer experiment");
    cross->add_option("--config-a", config_path)->required();
    cross->add_option("--config-b", config_b_path)->required();
    cross->add_option("--out", out_path);

    auto* filters = app.add_subcommand("export-filters", "render learned filters to a PNG grid");
    filters->add_option("--layer", layer_path)->required();
    filters->add_option("--out", out_path)->required();

    auto* gen = app.add_subcommand("gen-data", "write a synthetic dataset in an official layout");
    gen->add_option("--kind", kind)->required();
    gen->add_option("--out", out_path)->required();
    gen->add_option("--train", gen_train);
    gen->add_option("--test", gen_test);
    gen->add_option("--seed", gen_seed);

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit->parsed()) {
            return cmd_whiten_fit(config_path, out_path);
        }
        if (train->parsed()) {
            return cmd_train(config_path, whitening_path, out_path, log_path);
        }
        if (extract->parsed()) {
            return cmd_extract(config_path, whitening_path, layer_path, split, out_path);
        }
        if (classify->parsed()) {
            return cmd_classify(config_path, train_features, test_features, report_path,
                                summary_path);
        }
        if (cross->parsed()) {
            return cmd_cross_dataset(config_path, config_b_path, out_path);
        }
        if (filters->parsed()) {
            return cmd_export_filters(layer_path, out_path);
        }
        if (gen->parsed()) {
            return cmd_gen_data(kind, out_path, gen_train, gen_test, gen_seed);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return error_code(e);
    }
    return 1;
}
