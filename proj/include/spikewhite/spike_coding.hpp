#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spikewhite/tensor.hpp"

namespace spikewhite {

struct Spike {
    std::uint32_t unit;
    double time;
};

// At most one spike per unit per presentation; spikes are emitted in unit order
// with timestamps in [0, exposition].
struct SpikeList {
    std::size_t unit_count = 0;
    std::vector<Spike> spikes;
};

struct EncoderConfig {
    double exposition = 1.0; // T
};

// Scale a sample to [-1, 1] by its symmetric bound max(|min|, |max|) and split
// into positive and negative parts: output channels [0, C) hold max(0, x),
// channels [C, 2C) hold max(0, -x). An all-zero sample stays all-zero.
Tensor3 split_channels(const Tensor3& sample);

// Latency coding: value x in (0, 1] spikes at T(1 - x); larger values spike
// earlier. Zero values emit no spike (a spike at exactly T would decode to 0
// anyway). Unit index = flat tensor index.
SpikeList encode_latency(const Tensor3& values, const EncoderConfig& cfg);
void encode_latency(std::span<const double> values, const EncoderConfig& cfg, SpikeList& out);

// Inverse latency map anchored at t_expected: 1 at t <= t_expected, 0 at t >= T,
// linear in between; no spike decodes to 0. Requires t_expected < T.
double decode_latency(std::optional<double> fire_time, double t_expected,
                      const EncoderConfig& cfg);

} // namespace spikewhite
