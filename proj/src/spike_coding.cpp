#include "spikewhite/spike_coding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spikewhite/errors.hpp"

namespace spikewhite {

Tensor3 split_channels(const Tensor3& sample) {
    double bound = 0.0;
    for (double v : sample.data) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("split_channels: non-finite value");
        }
        bound = std::max(bound, std::fabs(v));
    }
    const std::size_t c_in = sample.channels;
    Tensor3 out(sample.height, sample.width, 2 * c_in);
    if (bound == 0.0) {
        return out;
    }
    for (std::size_t y = 0; y < sample.height; ++y) {
        for (std::size_t x = 0; x < sample.width; ++x) {
            for (std::size_t c = 0; c < c_in; ++c) {
                const double v = sample.at(y, x, c) / bound;
                out.at(y, x, c) = std::max(0.0, v);
                out.at(y, x, c_in + c) = std::max(0.0, -v);
            }
        }
    }
    return out;
}

void encode_latency(std::span<const double> values, const EncoderConfig& cfg, SpikeList& out) {
    if (cfg.exposition <= 0.0) {
        throw std::invalid_argument("encode_latency: exposition must be positive");
    }
    out.unit_count = values.size();
    out.spikes.clear();
    for (std::size_t u = 0; u < values.size(); ++u) {
        const double x = values[u];
        if (x < 0.0 || x > 1.0) {
            throw std::invalid_argument("encode_latency: value outside [0, 1]");
        }
        if (x > 0.0) {
            out.spikes.push_back({static_cast<std::uint32_t>(u), cfg.exposition * (1.0 - x)});
        }
    }
}

SpikeList encode_latency(const Tensor3& values, const EncoderConfig& cfg) {
    SpikeList out;
    encode_latency(std::span<const double>(values.data), cfg, out);
    return out;
}

double decode_latency(std::optional<double> fire_time, double t_expected,
                      const EncoderConfig& cfg) {
    if (t_expected >= cfg.exposition) {
        throw std::invalid_argument("decode_latency: t_expected must be below exposition");
    }
    if (!fire_time.has_value()) {
        return 0.0;
    }
    const double v = 1.0 - (*fire_time - t_expected) / (cfg.exposition - t_expected);
    return std::min(1.0, std::max(0.0, v));
}

} // namespace spikewhite
