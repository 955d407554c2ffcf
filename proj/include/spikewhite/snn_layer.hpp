#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "spikewhite/matrix.hpp"
#include "spikewhite/rng.hpp"
#include "spikewhite/spike_coding.hpp"
#include "spikewhite/tensor.hpp"

namespace spikewhite {

struct NeuronConfig {
    double capacitance = 1.0;
    double v_rest = 0.0;
    double threshold_init_mean = 10.0;
    double threshold_init_std = 0.1;

    bool operator==(const NeuronConfig&) const = default;
};

struct StdpConfig {
    double lr_init = 0.1;  // weight learning rate before annealing
    double beta = 1.0;     // saturation control
    double w_min = 0.0;
    double w_max = 1.0;
    double ltp_window = 1.0; // potentiation window on t_post - t_pre

    bool operator==(const StdpConfig&) const = default;
};

struct HomeostasisConfig {
    double lr_init = 1.0;     // threshold learning rate before annealing
    double t_expected = 0.97; // firing-time objective

    bool operator==(const HomeostasisConfig&) const = default;
};

struct TrainConfig {
    std::size_t epochs = 100;
    double annealing = 0.95;          // per-epoch decay of both learning rates
    std::size_t patches_per_epoch = 0; // literal count; 0 trains on nothing
    std::uint64_t seed = 1;

    bool operator==(const TrainConfig&) const = default;
};

// One competitive layer of integrate-and-fire neurons over a flattened receptive
// field of rf_w x rf_h x rf_channels inputs (flat_index layout).
class SnnLayer {
public:
    SnnLayer() = default;
    // Weights ~ U(w_min, w_max), thresholds ~ N(init_mean, init_std); the draw
    // order is fixed (all weights row by row, then all thresholds).
    SnnLayer(std::size_t filter_count, std::size_t rf_w, std::size_t rf_h,
             std::size_t rf_channels, const NeuronConfig& neuron, const StdpConfig& stdp,
             Rng& rng);

    std::size_t filter_count() const { return weights_.rows(); }
    std::size_t rf_w() const { return rf_w_; }
    std::size_t rf_h() const { return rf_h_; }
    std::size_t rf_channels() const { return rf_channels_; }
    std::size_t input_dim() const { return rf_w_ * rf_h_ * rf_channels_; }

    Matrix& weights() { return weights_; }
    const Matrix& weights() const { return weights_; }
    std::vector<double>& thresholds() { return thresholds_; }
    const std::vector<double>& thresholds() const { return thresholds_; }
    const NeuronConfig& neuron() const { return neuron_; }

    /// Thresholds never adapt below this.
    double threshold_floor() const { return 0.001 * neuron_.threshold_init_mean; }

    // Used by persistence.
    void assign(std::size_t rf_w, std::size_t rf_h, std::size_t rf_channels,
                const NeuronConfig& neuron, Matrix weights, std::vector<double> thresholds);

    bool operator==(const SnnLayer& other) const = default;

private:
    std::size_t rf_w_ = 0;
    std::size_t rf_h_ = 0;
    std::size_t rf_channels_ = 0;
    NeuronConfig neuron_;
    Matrix weights_;                 // [filter_count x input_dim]
    std::vector<double> thresholds_; // [filter_count]
};

// Event-driven presentation: spikes are integrated in ascending time (ties by unit
// index); each spike adds w(neuron, unit)/C_m; a neuron fires when its potential
// first reaches threshold and at most once per presentation.
std::vector<std::optional<double>> simulate(const SnnLayer& layer, const SpikeList& input);

// Multiplicative STDP step for one synapse. Potentiates when the pre-spike exists,
// precedes the post-spike, and falls within the LTP window; depresses otherwise.
// Result is clamped to [w_min, w_max].
double stdp_update(const StdpConfig& cfg, double lr, double w, std::optional<double> t_pre,
                   double t_post);

struct WtaOutcome {
    std::size_t winner;
    double fire_time;
};

// One winner-take-all training step: the earliest-firing neuron (ties by lowest
// index) applies STDP on all its synapses and raises its threshold by lr_th;
// every other neuron lowers its threshold by lr_th/N; all neurons additionally
// shift by -lr_th*(t_win - t_expected). With no spike at all, every threshold
// drops by lr_th/N and no STDP is applied. Thresholds are clamped to the floor.
std::optional<WtaOutcome> wta_train_step(SnnLayer& layer, const SpikeList& input,
                                         const StdpConfig& stdp,
                                         const HomeostasisConfig& homeo, double lr_w,
                                         double lr_th, double exposition);

struct EpochStats {
    std::size_t epoch = 0;
    double lr_w = 0.0;
    double lr_th = 0.0;
    double mean_winner_time = 0.0; // over presentations with a winner
    double mean_threshold = 0.0;
    std::size_t silent = 0;             // presentations with no winner
    std::vector<std::size_t> win_counts; // per neuron
};

struct TrainLog {
    std::vector<EpochStats> epochs;
};

// Patch-wise training: each epoch draws patches_per_epoch random windows (uniform
// image, uniform position) from the pre-processed inputs, encodes them, and runs
// one WTA step per patch. Learning rates are annealed after each epoch. Strictly
// sequential and deterministic for a fixed seed.
TrainLog train(SnnLayer& layer, const std::vector<Tensor3>& inputs, const TrainConfig& cfg,
               const StdpConfig& stdp, const HomeostasisConfig& homeo, double exposition);

// Dense convolutional inference (stride 1, no padding): every window is encoded,
// simulated, and decoded against t_expected. Output is (H-rf_h+1) x (W-rf_w+1) x N.
Tensor3 infer_conv(const SnnLayer& layer, const Tensor3& input, const HomeostasisConfig& homeo,
                   double exposition);

} // namespace spikewhite
