#pragma once

#include <cstdint>
#include <string>

namespace spikewhite {

// Deterministic synthetic color-image datasets written in the CIFAR-10 / STL-10
// binary layouts, for demos and tests when the real datasets are not on disk.
// Images combine a smooth class-colored field, an oriented class texture, and
// noise, so they carry both color and edge cues with natural-image-like local
// correlations. Ten classes, labels assigned round-robin.
void write_synthetic_cifar10(const std::string& dir, std::size_t train_count = 50000,
                             std::size_t test_count = 10000, std::uint64_t seed = 9001);

// test_count = 0 skips the test split files.
void write_synthetic_stl10(const std::string& dir, std::size_t train_count = 5000,
                           std::size_t test_count = 8000, std::uint64_t seed = 9002);

} // namespace spikewhite
