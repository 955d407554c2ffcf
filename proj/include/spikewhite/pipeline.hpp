#pragma once

#include <memory>
#include <vector>

#include "spikewhite/classify.hpp"
#include "spikewhite/config.hpp"
#include "spikewhite/containers.hpp"
#include "spikewhite/datasets.hpp"
#include "spikewhite/snn_layer.hpp"
#include "spikewhite/whitening.hpp"

namespace spikewhite {

// Turns a raw [0,1] image into the non-negative [0,1] multi-channel tensor the
// spike encoder consumes. Whitening modes whiten then split into on/off channels;
// the DoG modes already produce on/off channels.
class Preprocessor {
public:
    virtual ~Preprocessor() = default;
    virtual Tensor3 apply(const Tensor3& image) const = 0;
    /// Channel count of apply()'s output for a C-channel input.
    virtual std::size_t output_channels(std::size_t input_channels) const = 0;
};

struct FitSummary {
    std::size_t dimension = 0;
    std::size_t retained = 0;
    std::vector<double> spectrum_head; // leading eigenvalues (up to 8)
};

/// Fit whatever the configured preprocessing needs on the training set.
WhiteningArtifact fit_whitening(const ExperimentConfig& cfg, const LabeledImageSet& train,
                                FitSummary* summary = nullptr);

// Build the configured preprocessor. Whitening modes require the matching
// artifact; DoG modes ignore it.
std::unique_ptr<Preprocessor> make_preprocessor(const ExperimentConfig& cfg,
                                                const WhiteningArtifact* artifact);

std::vector<Tensor3> preprocess_all(const Preprocessor& pre, const std::vector<Tensor3>& images);

SnnLayer init_layer(const ExperimentConfig& cfg, std::size_t input_channels, std::uint64_t seed);

/// One feature vector per pre-processed image.
std::vector<FeatureVector> extract_features(const SnnLayer& layer,
                                            const std::vector<Tensor3>& preprocessed,
                                            const std::vector<int>& labels,
                                            const ExperimentConfig& cfg);

struct RunResult {
    double accuracy = 0.0;
    SnnLayer layer;
    TrainLog log;
};

// Full train-extract-classify pass on already pre-processed tensors; `seed`
// drives layer init, patch sampling, and the SVM.
RunResult run_pipeline(const ExperimentConfig& cfg, const std::vector<Tensor3>& pre_train,
                       const std::vector<int>& train_labels,
                       const std::vector<Tensor3>& pre_test,
                       const std::vector<int>& test_labels, int class_count,
                       std::uint64_t seed);

LinearSvm train_svm_from_config(const ExperimentConfig& cfg,
                                const std::vector<FeatureVector>& features, int class_count,
                                std::uint64_t seed);

DatasetPair load_dataset(const ExperimentConfig& cfg);

/// Sample std with the n-1 divisor; 0 for fewer than two values.
double sample_std(const std::vector<double>& values);
double mean_of(const std::vector<double>& values);

} // namespace spikewhite
