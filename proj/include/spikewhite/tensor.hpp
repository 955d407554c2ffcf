#pragma once

#include <cstddef>
#include <vector>

namespace spikewhite {

// Flattening layout shared by patch sampling, whitening kernels, and the SNN
// receptive fields: row-major over (y, x) with channels interleaved innermost.
// Every module that flattens a patch or window must go through flat_index.
inline std::size_t flat_index(std::size_t y, std::size_t x, std::size_t c,
                              std::size_t width, std::size_t channels) {
    return (y * width + x) * channels + c;
}

/// H x W x C image-like tensor, doubles, layout given by flat_index.
struct Tensor3 {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 0;
    std::vector<double> data;

    Tensor3() = default;
    Tensor3(std::size_t h, std::size_t w, std::size_t c)
        : height(h), width(w), channels(c), data(h * w * c, 0.0) {}

    double& at(std::size_t y, std::size_t x, std::size_t c) {
        return data[flat_index(y, x, c, width, channels)];
    }
    double at(std::size_t y, std::size_t x, std::size_t c) const {
        return data[flat_index(y, x, c, width, channels)];
    }

    std::size_t size() const { return data.size(); }

    bool same_dims(const Tensor3& other) const {
        return height == other.height && width == other.width && channels == other.channels;
    }

    bool operator==(const Tensor3& other) const = default;
};

} // namespace spikewhite
