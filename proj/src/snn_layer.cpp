#include "spikewhite/snn_layer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spikewhite/errors.hpp"

namespace spikewhite {

SnnLayer::SnnLayer(std::size_t filter_count, std::size_t rf_w, std::size_t rf_h,
                   std::size_t rf_channels, const NeuronConfig& neuron, const StdpConfig& stdp,
                   Rng& rng)
    : rf_w_(rf_w), rf_h_(rf_h), rf_channels_(rf_channels), neuron_(neuron) {
    if (filter_count == 0 || rf_w == 0 || rf_h == 0 || rf_channels == 0) {
        throw ShapeError("SnnLayer: all dimensions must be positive");
    }
    if (neuron.capacitance <= 0.0) {
        throw std::invalid_argument("SnnLayer: capacitance must be positive");
    }
    if (neuron.threshold_init_mean <= neuron.v_rest) {
        throw std::invalid_argument("SnnLayer: initial threshold must exceed v_rest");
    }
    weights_ = Matrix(filter_count, input_dim());
    for (double& w : weights_.data()) {
        w = rng.uniform(stdp.w_min, stdp.w_max);
    }
    thresholds_.resize(filter_count);
    for (double& th : thresholds_) {
        th = rng.normal(neuron.threshold_init_mean, neuron.threshold_init_std);
    }
}

void SnnLayer::assign(std::size_t rf_w, std::size_t rf_h, std::size_t rf_channels,
                      const NeuronConfig& neuron, Matrix weights,
                      std::vector<double> thresholds) {
    if (weights.rows() != thresholds.size() ||
        weights.cols() != rf_w * rf_h * rf_channels) {
        throw ShapeError("SnnLayer::assign: inconsistent dimensions");
    }
    rf_w_ = rf_w;
    rf_h_ = rf_h;
    rf_channels_ = rf_channels;
    neuron_ = neuron;
    weights_ = std::move(weights);
    thresholds_ = std::move(thresholds);
}

namespace {

// Spikes ordered by (time, unit); encode emits unit order already, so a stable
// sort by time preserves the unit tie order.
void sorted_events(const SpikeList& input, std::vector<Spike>& events) {
    events.assign(input.spikes.begin(), input.spikes.end());
    std::stable_sort(events.begin(), events.end(),
                     [](const Spike& a, const Spike& b) { return a.time < b.time; });
}

} // namespace

std::vector<std::optional<double>> simulate(const SnnLayer& layer, const SpikeList& input) {
    if (input.unit_count != layer.input_dim()) {
        throw ShapeError("simulate: input has " + std::to_string(input.unit_count) +
                         " units, layer expects " + std::to_string(layer.input_dim()));
    }
    const std::size_t n = layer.filter_count();
    std::vector<Spike> events;
    sorted_events(input, events);

    std::vector<double> v(n, layer.neuron().v_rest);
    std::vector<std::optional<double>> fire(n);
    const double inv_cm = 1.0 / layer.neuron().capacitance;
    std::size_t fired = 0;
    for (const Spike& ev : events) {
        for (std::size_t i = 0; i < n; ++i) {
            if (fire[i].has_value()) {
                continue;
            }
            v[i] += layer.weights()(i, ev.unit) * inv_cm;
            if (v[i] >= layer.thresholds()[i]) {
                fire[i] = ev.time;
                ++fired;
            }
        }
        if (fired == n) {
            break;
        }
    }
    return fire;
}

double stdp_update(const StdpConfig& cfg, double lr, double w, std::optional<double> t_pre,
                   double t_post) {
    const double range = cfg.w_max - cfg.w_min;
    const bool ltp = t_pre.has_value() && *t_pre <= t_post &&
                     (t_post - *t_pre) <= cfg.ltp_window;
    const double dw = ltp ? lr * std::exp(-cfg.beta * (w - cfg.w_min) / range)
                          : -lr * std::exp(-cfg.beta * (cfg.w_max - w) / range);
    return std::clamp(w + dw, cfg.w_min, cfg.w_max);
}

std::optional<WtaOutcome> wta_train_step(SnnLayer& layer, const SpikeList& input,
                                         const StdpConfig& stdp,
                                         const HomeostasisConfig& homeo, double lr_w,
                                         double lr_th, double /*exposition*/) {
    const auto fires = simulate(layer, input);
    const std::size_t n = layer.filter_count();

    std::optional<WtaOutcome> outcome;
    for (std::size_t i = 0; i < n; ++i) {
        if (fires[i].has_value() && (!outcome || *fires[i] < outcome->fire_time)) {
            outcome = WtaOutcome{i, *fires[i]};
        }
    }

    auto& th = layer.thresholds();
    if (outcome) {
        // Pre-spike lookup per unit for the winner's STDP pass.
        std::vector<std::optional<double>> pre(layer.input_dim());
        for (const Spike& s : input.spikes) {
            pre[s.unit] = s.time;
        }
        double* w = layer.weights().row(outcome->winner).data();
        for (std::size_t u = 0; u < layer.input_dim(); ++u) {
            w[u] = stdp_update(stdp, lr_w, w[u], pre[u], outcome->fire_time);
        }
        th[outcome->winner] += lr_th;
        for (std::size_t i = 0; i < n; ++i) {
            if (i != outcome->winner) {
                th[i] -= lr_th / static_cast<double>(n);
            }
        }
        const double objective_shift = lr_th * (outcome->fire_time - homeo.t_expected);
        for (double& t : th) {
            t -= objective_shift;
        }
    } else {
        for (double& t : th) {
            t -= lr_th / static_cast<double>(n);
        }
    }
    const double floor = layer.threshold_floor();
    for (double& t : th) {
        t = std::max(t, floor);
    }
    return outcome;
}

TrainLog train(SnnLayer& layer, const std::vector<Tensor3>& inputs, const TrainConfig& cfg,
               const StdpConfig& stdp, const HomeostasisConfig& homeo, double exposition) {
    if (cfg.epochs == 0) {
        throw std::invalid_argument("train: epochs must be at least 1");
    }
    if (cfg.annealing <= 0.0 || cfg.annealing > 1.0) {
        throw std::invalid_argument("train: annealing must be in (0, 1]");
    }
    for (const Tensor3& t : inputs) {
        if (t.channels != layer.rf_channels() || t.height < layer.rf_h() ||
            t.width < layer.rf_w()) {
            throw ShapeError("train: input tensor does not fit the receptive field");
        }
    }

    Rng rng(cfg.seed);
    const EncoderConfig enc{exposition};
    double lr_w = stdp.lr_init;
    double lr_th = homeo.lr_init;

    TrainLog log;
    std::vector<double> window(layer.input_dim());
    SpikeList spikes;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        EpochStats stats;
        stats.epoch = epoch;
        stats.lr_w = lr_w;
        stats.lr_th = lr_th;
        stats.win_counts.assign(layer.filter_count(), 0);
        double time_sum = 0.0;
        std::size_t wins = 0;

        for (std::size_t p = 0; p < cfg.patches_per_epoch; ++p) {
            const Tensor3& img = inputs[rng.below(inputs.size())];
            const std::size_t y0 = rng.below(img.height - layer.rf_h() + 1);
            const std::size_t x0 = rng.below(img.width - layer.rf_w() + 1);
            for (std::size_t y = 0; y < layer.rf_h(); ++y) {
                const double* src =
                    img.data.data() + flat_index(y0 + y, x0, 0, img.width, img.channels);
                std::copy(src, src + layer.rf_w() * img.channels,
                          window.data() + flat_index(y, 0, 0, layer.rf_w(), img.channels));
            }
            encode_latency(window, enc, spikes);
            const auto outcome =
                wta_train_step(layer, spikes, stdp, homeo, lr_w, lr_th, exposition);
            if (outcome) {
                ++stats.win_counts[outcome->winner];
                time_sum += outcome->fire_time;
                ++wins;
            } else {
                ++stats.silent;
            }
        }

        stats.mean_winner_time = (wins > 0) ? time_sum / static_cast<double>(wins) : 0.0;
        double th_sum = 0.0;
        for (double t : layer.thresholds()) {
            th_sum += t;
        }
        stats.mean_threshold = th_sum / static_cast<double>(layer.filter_count());
        log.epochs.push_back(std::move(stats));

        lr_w *= cfg.annealing;
        lr_th *= cfg.annealing;
    }
    return log;
}

Tensor3 infer_conv(const SnnLayer& layer, const Tensor3& input, const HomeostasisConfig& homeo,
                   double exposition) {
    if (input.channels != layer.rf_channels()) {
        throw ShapeError("infer_conv: channel mismatch");
    }
    if (input.height < layer.rf_h() || input.width < layer.rf_w()) {
        throw ShapeError("infer_conv: image smaller than receptive field");
    }
    const std::size_t n = layer.filter_count();
    const std::size_t out_h = input.height - layer.rf_h() + 1;
    const std::size_t out_w = input.width - layer.rf_w() + 1;
    const std::size_t dim = layer.input_dim();

    // Transposed weights: contiguous across neurons for one input unit.
    std::vector<double> wt(dim * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t u = 0; u < dim; ++u) {
            wt[u * n + i] = layer.weights()(i, u);
        }
    }
    const double inv_cm = 1.0 / layer.neuron().capacitance;
    const double* th = layer.thresholds().data();
    const double t_exp = homeo.t_expected;
    if (exposition - t_exp <= 0.0) {
        throw std::invalid_argument("infer_conv: t_expected must be below exposition");
    }
    const double tail = exposition - t_exp;

    Tensor3 out(out_h, out_w, n);
    std::vector<Spike> events;
    events.reserve(dim);
    std::vector<double> v(n);
    std::vector<double> fire(n);
    constexpr double kNoFire = std::numeric_limits<double>::infinity();

    for (std::size_t oy = 0; oy < out_h; ++oy) {
        for (std::size_t ox = 0; ox < out_w; ++ox) {
            events.clear();
            for (std::size_t y = 0; y < layer.rf_h(); ++y) {
                const double* src = input.data.data() +
                                    flat_index(oy + y, ox, 0, input.width, input.channels);
                const std::size_t base = flat_index(y, 0, 0, layer.rf_w(), input.channels);
                for (std::size_t k = 0; k < layer.rf_w() * input.channels; ++k) {
                    const double x = src[k];
                    if (x < 0.0 || x > 1.0) {
                        throw std::invalid_argument("infer_conv: value outside [0, 1]");
                    }
                    if (x > 0.0) {
                        events.push_back({static_cast<std::uint32_t>(base + k),
                                          exposition * (1.0 - x)});
                    }
                }
            }
            std::stable_sort(events.begin(), events.end(),
                             [](const Spike& a, const Spike& b) { return a.time < b.time; });

            std::fill(v.begin(), v.end(), layer.neuron().v_rest);
            std::fill(fire.begin(), fire.end(), kNoFire);
            std::size_t fired = 0;
            for (const Spike& ev : events) {
                const double* wrow = wt.data() + static_cast<std::size_t>(ev.unit) * n;
                for (std::size_t i = 0; i < n; ++i) {
                    if (fire[i] != kNoFire) {
                        continue;
                    }
                    v[i] += wrow[i] * inv_cm;
                    if (v[i] >= th[i]) {
                        fire[i] = ev.time;
                        ++fired;
                    }
                }
                if (fired == n) {
                    break;
                }
            }

            double* dst = out.data.data() + flat_index(oy, ox, 0, out_w, n);
            for (std::size_t i = 0; i < n; ++i) {
                if (fire[i] == kNoFire) {
                    dst[i] = 0.0;
                } else {
                    // Same expression as decode_latency, so both paths agree bit-for-bit.
                    const double d = 1.0 - (fire[i] - t_exp) / tail;
                    dst[i] = std::min(1.0, std::max(0.0, d));
                }
            }
        }
    }
    return out;
}

} // namespace spikewhite
