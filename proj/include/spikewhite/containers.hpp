#pragma once

#include <string>
#include <variant>

#include "spikewhite/classify.hpp"
#include "spikewhite/snn_layer.hpp"
#include "spikewhite/whitening.hpp"

namespace spikewhite {

// Little-endian binary containers so fits, layers, and features can be reused
// across CLI stages and datasets. No timestamps: identical inputs give
// byte-identical files.
//
// Whitening file ("SWWT", version 1):
//   kind u8: 0 = whole-sample transform, 1 = per-channel kernels
//   kind 0: u32 height,width,channels it was fit on; f64 epsilon, ratio;
//           f64 mean[d]; f64 w[d*d]           (d = height*width*channels)
//   kind 1: u32 patch_w,patch_h,channels; f64 epsilon, ratio;
//           f64 mean[d]; f64 kernels[channels][d]
//
// Layer file ("SWLY", version 1): u32 filter_count, rf_w, rf_h, rf_channels;
//   f64 neuron config (capacitance, v_rest, threshold_init_mean, threshold_init_std);
//   f64 stdp config (lr_init, beta, w_min, w_max, ltp_window);
//   f64 thresholds[N]; f64 weights[N*D]
//
// Feature file ("SWFV", version 1): u32 count, dim, class_count;
//   per record: i32 label, f64 values[dim]

struct StandardTransformFile {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 0;
    WhiteningTransform transform; // eigvecs/eigvals empty after load
};

using WhiteningArtifact = std::variant<StandardTransformFile, WhiteningKernels>;

void save_whitening(const std::string& path, const WhiteningArtifact& artifact);
WhiteningArtifact load_whitening(const std::string& path);

void save_layer(const std::string& path, const SnnLayer& layer, const StdpConfig& stdp);
struct LayerFile {
    SnnLayer layer;
    StdpConfig stdp;
};
LayerFile load_layer(const std::string& path);

void save_features(const std::string& path, const std::vector<FeatureVector>& features,
                   int class_count);
struct FeatureFile {
    std::vector<FeatureVector> features;
    int class_count = 0;
};
FeatureFile load_features(const std::string& path);

} // namespace spikewhite
