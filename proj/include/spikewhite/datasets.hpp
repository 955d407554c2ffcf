#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spikewhite/matrix.hpp"
#include "spikewhite/tensor.hpp"

namespace spikewhite {

struct LabeledImageSet {
    std::vector<Tensor3> images; // values in [0, 1], all same dims within a set
    std::vector<int> labels;     // each < class_count
    int class_count = 0;
};

struct DatasetPair {
    LabeledImageSet train;
    LabeledImageSet test;
};

// CIFAR-10 binary distribution: data_batch_1..5.bin + test_batch.bin, one record =
// 1 label byte + 3072 pixel bytes (planar R, G, B, row-major 32x32). Pixels are
// scaled to [0, 1] by /255. Files must hold a whole number of records; the official
// files yield the 50,000 / 10,000 split. max_* = 0 loads everything.
DatasetPair load_cifar10(const std::string& dir, std::size_t max_train = 0,
                         std::size_t max_test = 0);

// STL-10 labeled split: {train,test}_X.bin with 96*96*3 bytes per image (planar
// R, G, B, each plane column-major) and {train,test}_y.bin with one 1-based label
// byte per image. Labels are remapped to 0-based. Official files yield 5,000 train
// and 8,000 test images. max_images = 0 loads everything.
LabeledImageSet load_stl10_split(const std::string& dir, const std::string& split,
                                 std::size_t max_images = 0);
DatasetPair load_stl10(const std::string& dir, std::size_t max_train = 0,
                       std::size_t max_test = 0);

struct PatchSet {
    // One flattened patch per row; layout fixed by flat_index (row-major over
    // y, x with channels interleaved).
    Matrix patches;
    std::size_t patch_w = 0;
    std::size_t patch_h = 0;
    std::size_t channels = 0;
};

// Dense grid of patches with the given stride over every image in order; when the
// grid exceeds max_count, a uniform random subsample without replacement (seeded,
// emitted in grid order) is taken. max_count = 0 means no limit.
PatchSet sample_patches(const LabeledImageSet& set, std::size_t patch_w, std::size_t patch_h,
                        std::size_t stride, std::size_t max_count, std::uint64_t seed);

// Render tensors as a grid image: ceil(sqrt(n)) columns, 1-pixel separators, each
// tile min-max scaled to [0, 255] independently (constant tiles map to mid-gray).
// Tensors must share dims and have 1 or 3 channels.
void export_image_grid(const std::vector<Tensor3>& tensors, const std::string& path);

} // namespace spikewhite
