#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spikewhite/datasets.hpp"
#include "spikewhite/matrix.hpp"
#include "spikewhite/tensor.hpp"

namespace spikewhite {

struct WhiteningTransform {
    std::vector<double> mean;     // per-dimension fit mean
    Matrix eigvecs;               // V, columns descending by eigenvalue (empty when loaded from file)
    std::vector<double> eigvals;  // descending
    double epsilon = 0.0;
    double ratio = 1.0;
    std::size_t retained = 0;     // ceil(ratio * d), at least 1
    Matrix w;                     // V_k diag(1/sqrt(lambda+eps)) V_k^T, symmetric
};

// Zero-phase whitening fit. epsilon > 0 stabilizes small eigenvalues and acts as a
// low-pass; ratio in (0, 1] keeps the leading ceil(ratio*d) eigenpairs. Warns on
// stderr when there are fewer samples than dimensions.
WhiteningTransform fit_zca(const Matrix& samples, double epsilon, double ratio);

/// w * (sample - mean)
std::vector<double> apply_zca(const WhiteningTransform& t, std::span<const double> sample);

struct WhiteningKernels {
    std::vector<Tensor3> kernels;      // K_c: the patch-transform row of the center
                                       // pixel of channel c, reshaped to ph x pw x C
    std::size_t patch_w = 0;
    std::size_t patch_h = 0;
    std::size_t channels = 0;
    double epsilon = 0.0;
    double ratio = 1.0;
    std::vector<double> mean;          // full fit mean (exact centering, used where
                                       // whole patches are available)
    std::vector<double> channel_mean;  // positional average of `mean` per channel,
                                       // used to center images before convolution
};

/// Patch-based whitening fit converted to one cross-channel kernel per channel.
WhiteningKernels fit_kernels(const PatchSet& patches, double epsilon, double ratio);

/// Kernel construction from an already-fitted patch transform.
WhiteningKernels kernels_from_transform(const WhiteningTransform& t, std::size_t patch_w,
                                        std::size_t patch_h, std::size_t channels);

// Whiten an image by correlating each channel's kernel over the image centered by
// the scalar per-channel means. Zero padding of floor(patch_w/2) keeps dims for the
// usual odd square kernels.
Tensor3 apply_kernels(const WhiteningKernels& k, const Tensor3& image);

// Exact-centered kernel response at one position: dot(K_c, patch - mean). Matches
// whitening the whole patch and reading the center value of channel c.
double kernel_center_response(const WhiteningKernels& k, std::span<const double> patch,
                              std::size_t channel);

enum class DogMode { grayscale, color };

struct DogConfig {
    double sigma_center = 1.0;
    double sigma_surround = 2.0;
    std::size_t kernel_size = 7; // odd
    DogMode mode = DogMode::color;

    bool operator==(const DogConfig&) const = default;
};

// On-center / off-center coding: difference-of-Gaussians response per channel (or
// of the grayscale reduction), split into a positive and a negated-negative
// channel, each min-max scaled to [0, 1] per image. Output channel order: all
// on-channels, then all off-channels. Borders use edge replication so a constant
// image maps to zero.
Tensor3 dog_encode(const Tensor3& image, const DogConfig& cfg);

} // namespace spikewhite
