#pragma once

#include <cstdint>
#include <string>

#include "spikewhite/classify.hpp"
#include "spikewhite/snn_layer.hpp"
#include "spikewhite/whitening.hpp"

namespace spikewhite {

enum class PreprocMode { standard_zca, kernels, dog_gray, dog_color };
enum class DatasetKind { cifar10, stl10 };

// Flat key=value experiment description; every key is listed in README.md.
// Unknown keys are errors so sweep typos fail loudly.
struct ExperimentConfig {
    DatasetKind dataset = DatasetKind::cifar10;
    std::string dataset_dir;
    std::size_t train_limit = 0; // 0 = all images
    std::size_t test_limit = 0;

    PreprocMode preproc = PreprocMode::kernels;

    double epsilon = 1e-2;
    double ratio = 1.0;
    std::size_t patch_w = 9;
    std::size_t patch_h = 9;
    std::size_t patch_count = 1000000;
    std::size_t patch_stride = 2;

    DogConfig dog; // sigma_center/sigma_surround/kernel_size; mode comes from preproc

    double exposition = 1.0;

    NeuronConfig neuron;
    HomeostasisConfig homeostasis;
    StdpConfig stdp;

    std::size_t epochs = 100;
    double annealing = 0.95;
    std::size_t patches_per_epoch = 0; // 0 = one patch per training image

    std::size_t filter_count = 64;
    std::size_t filter_w = 5;
    std::size_t filter_h = 5;
    std::size_t conv_stride = 1; // only 1 is supported
    std::size_t conv_padding = 0; // only 0 is supported

    PoolMode pool = PoolMode::sum;
    double svm_reg = 0.0; // 0 = auto-select from {0.01, 0.1, 1}
    std::size_t svm_epochs = 10;

    std::size_t run_count = 3;
    std::uint64_t seed = 1;

    bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config_string(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

/// Cross-checks every field against the module invariants it feeds.
void validate_config(const ExperimentConfig& cfg);

} // namespace spikewhite
