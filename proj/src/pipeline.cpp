#include "spikewhite/pipeline.hpp"

#include <cmath>

#include "spikewhite/errors.hpp"

namespace spikewhite {

namespace {

class StandardZcaPreprocessor final : public Preprocessor {
public:
    StandardZcaPreprocessor(StandardTransformFile file) : file_(std::move(file)) {}

    Tensor3 apply(const Tensor3& image) const override {
        if (image.height != file_.height || image.width != file_.width ||
            image.channels != file_.channels) {
            throw ShapeError("standard whitening: image dims differ from the fit dims");
        }
        const std::vector<double> whitened =
            apply_zca(file_.transform, std::span<const double>(image.data));
        Tensor3 out(image.height, image.width, image.channels);
        out.data = whitened;
        return split_channels(out);
    }

    std::size_t output_channels(std::size_t input_channels) const override {
        return 2 * input_channels;
    }

private:
    StandardTransformFile file_;
};

class KernelPreprocessor final : public Preprocessor {
public:
    explicit KernelPreprocessor(WhiteningKernels kernels) : kernels_(std::move(kernels)) {}

    Tensor3 apply(const Tensor3& image) const override {
        return split_channels(apply_kernels(kernels_, image));
    }

    std::size_t output_channels(std::size_t input_channels) const override {
        return 2 * input_channels;
    }

private:
    WhiteningKernels kernels_;
};

class DogPreprocessor final : public Preprocessor {
public:
    explicit DogPreprocessor(DogConfig cfg) : cfg_(cfg) {}

    Tensor3 apply(const Tensor3& image) const override { return dog_encode(image, cfg_); }

    std::size_t output_channels(std::size_t input_channels) const override {
        return cfg_.mode == DogMode::grayscale ? 2 : 2 * input_channels;
    }

private:
    DogConfig cfg_;
};

Matrix flatten_images(const std::vector<Tensor3>& images) {
    const std::size_t d = images.front().size();
    Matrix out(images.size(), d);
    for (std::size_t i = 0; i < images.size(); ++i) {
        std::copy(images[i].data.begin(), images[i].data.end(), out.row(i).data());
    }
    return out;
}

} // namespace

namespace {

void fill_summary(const WhiteningTransform& t, FitSummary* summary) {
    if (summary == nullptr) {
        return;
    }
    summary->dimension = t.w.rows();
    summary->retained = t.retained;
    summary->spectrum_head.assign(
        t.eigvals.begin(),
        t.eigvals.begin() + std::min<std::size_t>(8, t.eigvals.size()));
}

} // namespace

WhiteningArtifact fit_whitening(const ExperimentConfig& cfg, const LabeledImageSet& train,
                                FitSummary* summary) {
    if (train.images.empty()) {
        throw DataError("fit_whitening: empty training set");
    }
    switch (cfg.preproc) {
        case PreprocMode::standard_zca: {
            const Tensor3& first = train.images.front();
            const std::size_t d = first.size();
            if (d > 4096) {
                throw DataError(
                    "standard whitening needs a dense d x d transform; d = " +
                    std::to_string(d) + " is too large (use kernels instead)");
            }
            StandardTransformFile file;
            file.height = first.height;
            file.width = first.width;
            file.channels = first.channels;
            file.transform = fit_zca(flatten_images(train.images), cfg.epsilon, cfg.ratio);
            fill_summary(file.transform, summary);
            return file;
        }
        case PreprocMode::kernels: {
            const PatchSet patches = sample_patches(train, cfg.patch_w, cfg.patch_h,
                                                    cfg.patch_stride, cfg.patch_count,
                                                    cfg.seed);
            const WhiteningTransform t = fit_zca(patches.patches, cfg.epsilon, cfg.ratio);
            fill_summary(t, summary);
            return kernels_from_transform(t, cfg.patch_w, cfg.patch_h, patches.channels);
        }
        case PreprocMode::dog_gray:
        case PreprocMode::dog_color:
            throw DataError("fit_whitening: DoG preprocessing has nothing to fit");
    }
    throw DataError("fit_whitening: unreachable");
}

std::unique_ptr<Preprocessor> make_preprocessor(const ExperimentConfig& cfg,
                                                const WhiteningArtifact* artifact) {
    switch (cfg.preproc) {
        case PreprocMode::standard_zca: {
            if (artifact == nullptr || !std::holds_alternative<StandardTransformFile>(*artifact)) {
                throw DataError("standard whitening requires a whole-sample transform artifact");
            }
            return std::make_unique<StandardZcaPreprocessor>(
                std::get<StandardTransformFile>(*artifact));
        }
        case PreprocMode::kernels: {
            if (artifact == nullptr || !std::holds_alternative<WhiteningKernels>(*artifact)) {
                throw DataError("kernel whitening requires a kernels artifact");
            }
            return std::make_unique<KernelPreprocessor>(std::get<WhiteningKernels>(*artifact));
        }
        case PreprocMode::dog_gray: {
            DogConfig d = cfg.dog;
            d.mode = DogMode::grayscale;
            return std::make_unique<DogPreprocessor>(d);
        }
        case PreprocMode::dog_color: {
            DogConfig d = cfg.dog;
            d.mode = DogMode::color;
            return std::make_unique<DogPreprocessor>(d);
        }
    }
    throw DataError("make_preprocessor: unreachable");
}

std::vector<Tensor3> preprocess_all(const Preprocessor& pre, const std::vector<Tensor3>& images) {
    std::vector<Tensor3> out;
    out.reserve(images.size());
    for (const Tensor3& img : images) {
        out.push_back(pre.apply(img));
    }
    return out;
}

SnnLayer init_layer(const ExperimentConfig& cfg, std::size_t input_channels, std::uint64_t seed) {
    Rng rng(seed);
    return SnnLayer(cfg.filter_count, cfg.filter_w, cfg.filter_h, input_channels, cfg.neuron,
                    cfg.stdp, rng);
}

std::vector<FeatureVector> extract_features(const SnnLayer& layer,
                                            const std::vector<Tensor3>& preprocessed,
                                            const std::vector<int>& labels,
                                            const ExperimentConfig& cfg) {
    if (preprocessed.size() != labels.size()) {
        throw ShapeError("extract_features: image/label count mismatch");
    }
    std::vector<FeatureVector> out;
    out.reserve(preprocessed.size());
    for (std::size_t i = 0; i < preprocessed.size(); ++i) {
        const Tensor3 map =
            infer_conv(layer, preprocessed[i], cfg.homeostasis, cfg.exposition);
        FeatureVector f = pool_quadrants(map, cfg.pool);
        f.label = labels[i];
        out.push_back(std::move(f));
    }
    return out;
}

LinearSvm train_svm_from_config(const ExperimentConfig& cfg,
                                const std::vector<FeatureVector>& features, int class_count,
                                std::uint64_t seed) {
    if (cfg.svm_reg > 0.0) {
        return svm_train(features, class_count, cfg.svm_reg, cfg.svm_epochs, seed);
    }
    return svm_train_auto(features, class_count, cfg.svm_epochs, seed);
}

RunResult run_pipeline(const ExperimentConfig& cfg, const std::vector<Tensor3>& pre_train,
                       const std::vector<int>& train_labels,
                       const std::vector<Tensor3>& pre_test,
                       const std::vector<int>& test_labels, int class_count,
                       std::uint64_t seed) {
    if (pre_train.empty()) {
        throw DataError("run_pipeline: empty training set");
    }
    RunResult res;
    res.layer = init_layer(cfg, pre_train.front().channels, seed);

    TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.annealing = cfg.annealing;
    tc.patches_per_epoch =
        (cfg.patches_per_epoch == 0) ? pre_train.size() : cfg.patches_per_epoch;
    tc.seed = seed + 1;
    res.log = train(res.layer, pre_train, tc, cfg.stdp, cfg.homeostasis, cfg.exposition);

    const auto train_feats = extract_features(res.layer, pre_train, train_labels, cfg);
    const auto test_feats = extract_features(res.layer, pre_test, test_labels, cfg);
    const LinearSvm svm = train_svm_from_config(cfg, train_feats, class_count, seed + 2);
    res.accuracy = evaluate(svm, test_feats);
    return res;
}

DatasetPair load_dataset(const ExperimentConfig& cfg) {
    if (cfg.dataset_dir.empty()) {
        throw ConfigError("dataset.dir is not set");
    }
    if (cfg.dataset == DatasetKind::cifar10) {
        return load_cifar10(cfg.dataset_dir, cfg.train_limit, cfg.test_limit);
    }
    return load_stl10(cfg.dataset_dir, cfg.train_limit, cfg.test_limit);
}

double mean_of(const std::vector<double>& values) {
    double acc = 0.0;
    for (double v : values) {
        acc += v;
    }
    return values.empty() ? 0.0 : acc / static_cast<double>(values.size());
}

double sample_std(const std::vector<double>& values) {
    if (values.size() < 2) {
        return 0.0;
    }
    const double m = mean_of(values);
    double acc = 0.0;
    for (double v : values) {
        acc += (v - m) * (v - m);
    }
    return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

} // namespace spikewhite
