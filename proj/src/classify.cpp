#include "spikewhite/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "spikewhite/errors.hpp"
#include "spikewhite/rng.hpp"

namespace spikewhite {

FeatureVector pool_quadrants(const Tensor3& map, PoolMode mode) {
    if (map.height < 2 || map.width < 2) {
        throw ShapeError("pool_quadrants: map must be at least 2x2");
    }
    const std::size_t n = map.channels;
    const std::size_t mid_y = map.height / 2;
    const std::size_t mid_x = map.width / 2;

    FeatureVector out;
    out.values.assign(4 * n, 0.0);
    const std::size_t y_lo[4] = {0, 0, mid_y, mid_y};
    const std::size_t y_hi[4] = {mid_y, mid_y, map.height, map.height};
    const std::size_t x_lo[4] = {0, mid_x, 0, mid_x};
    const std::size_t x_hi[4] = {mid_x, map.width, mid_x, map.width};
    for (std::size_t r = 0; r < 4; ++r) {
        double* dst = out.values.data() + r * n;
        for (std::size_t y = y_lo[r]; y < y_hi[r]; ++y) {
            for (std::size_t x = x_lo[r]; x < x_hi[r]; ++x) {
                const double* src = map.data.data() + flat_index(y, x, 0, map.width, n);
                if (mode == PoolMode::sum) {
                    for (std::size_t c = 0; c < n; ++c) {
                        dst[c] += src[c];
                    }
                } else {
                    for (std::size_t c = 0; c < n; ++c) {
                        dst[c] = std::max(dst[c], src[c]);
                    }
                }
            }
        }
    }
    return out;
}

namespace {

void standardize(const LinearSvm& model, std::span<const double> in, std::vector<double>& out) {
    out.resize(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        out[i] = (in[i] - model.scaler_mean[i]) / model.scaler_std[i];
    }
}

// Pegasos-style binary hinge SGD on pre-standardized data.
void train_binary(const std::vector<std::vector<double>>& xs, const std::vector<int>& labels,
                  int positive_class, double reg, std::size_t epochs, Rng& rng,
                  std::span<double> w, double& bias) {
    const std::size_t n = xs.size();
    const std::size_t d = w.size();
    std::fill(w.begin(), w.end(), 0.0);
    bias = 0.0;
    std::size_t t = 0;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        for (std::size_t step = 0; step < n; ++step) {
            const std::size_t idx = rng.below(n);
            const double y = (labels[idx] == positive_class) ? 1.0 : -1.0;
            ++t;
            const double eta = 1.0 / (reg * static_cast<double>(t));
            const double* x = xs[idx].data();
            double margin = bias;
            for (std::size_t i = 0; i < d; ++i) {
                margin += w[i] * x[i];
            }
            margin *= y;
            const double shrink = 1.0 - eta * reg;
            if (margin < 1.0) {
                for (std::size_t i = 0; i < d; ++i) {
                    w[i] = shrink * w[i] + eta * y * x[i];
                }
                bias += eta * y;
            } else {
                for (std::size_t i = 0; i < d; ++i) {
                    w[i] *= shrink;
                }
            }
        }
    }
}

} // namespace

LinearSvm svm_train(const std::vector<FeatureVector>& features, int class_count, double reg,
                    std::size_t epochs, std::uint64_t seed) {
    if (class_count < 2) {
        throw DataError("svm_train: need at least 2 classes");
    }
    if (features.empty()) {
        throw DataError("svm_train: no training features");
    }
    if (reg <= 0.0) {
        throw std::invalid_argument("svm_train: reg must be positive");
    }
    const std::size_t d = features.front().values.size();
    std::vector<std::size_t> per_class(class_count, 0);
    for (const FeatureVector& f : features) {
        if (f.values.size() != d) {
            throw ShapeError("svm_train: inconsistent feature dimensions");
        }
        if (f.label < 0 || f.label >= class_count) {
            throw DataError("svm_train: label outside [0, class_count)");
        }
        ++per_class[f.label];
    }
    for (int c = 0; c < class_count; ++c) {
        if (per_class[c] == 0) {
            throw DataError("svm_train: class " + std::to_string(c) + " has no samples");
        }
    }

    LinearSvm model;
    model.class_count = class_count;
    model.scaler_mean.assign(d, 0.0);
    model.scaler_std.assign(d, 0.0);
    for (const FeatureVector& f : features) {
        for (std::size_t i = 0; i < d; ++i) {
            model.scaler_mean[i] += f.values[i];
        }
    }
    for (double& m : model.scaler_mean) {
        m /= static_cast<double>(features.size());
    }
    for (const FeatureVector& f : features) {
        for (std::size_t i = 0; i < d; ++i) {
            const double c = f.values[i] - model.scaler_mean[i];
            model.scaler_std[i] += c * c;
        }
    }
    for (double& s : model.scaler_std) {
        s = std::sqrt(s / static_cast<double>(features.size()));
        if (s <= 0.0) {
            s = 1.0;
        }
    }

    std::vector<std::vector<double>> xs(features.size());
    std::vector<int> labels(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        standardize(model, features[i].values, xs[i]);
        labels[i] = features[i].label;
    }

    model.weights = Matrix(class_count, d);
    model.biases.assign(class_count, 0.0);
    for (int c = 0; c < class_count; ++c) {
        // Per-class stream so classifiers are independent of class order changes.
        Rng rng(seed * 1000003ULL + static_cast<std::uint64_t>(c));
        train_binary(xs, labels, c, reg, epochs, rng, model.weights.row(c),
                     model.biases[static_cast<std::size_t>(c)]);
    }
    return model;
}

LinearSvm svm_train_auto(const std::vector<FeatureVector>& features, int class_count,
                         std::size_t epochs, std::uint64_t seed) {
    // Stratified 10% validation split (at least one sample stays in training).
    std::vector<std::vector<std::size_t>> by_class(class_count);
    for (std::size_t i = 0; i < features.size(); ++i) {
        const int label = features[i].label;
        if (label < 0 || label >= class_count) {
            throw DataError("svm_train_auto: label outside [0, class_count)");
        }
        by_class[label].push_back(i);
    }
    Rng rng(seed ^ 0x5eed5eedULL);
    std::vector<FeatureVector> fit, val;
    for (auto& idxs : by_class) {
        if (idxs.empty()) {
            throw DataError("svm_train_auto: a class has no samples");
        }
        std::size_t n_val = idxs.size() / 10;
        if (idxs.size() >= 2 && n_val == 0) {
            n_val = 1;
        }
        const auto chosen = rng.sample_without_replacement(idxs.size(), n_val);
        std::vector<bool> is_val(idxs.size(), false);
        for (std::uint64_t k : chosen) {
            is_val[k] = true;
        }
        for (std::size_t k = 0; k < idxs.size(); ++k) {
            (is_val[k] ? val : fit).push_back(features[idxs[k]]);
        }
    }

    const double regs[] = {0.01, 0.1, 1.0};
    double best_reg = regs[0];
    double best_acc = -1.0;
    if (!val.empty()) {
        for (double reg : regs) {
            const LinearSvm candidate = svm_train(fit, class_count, reg, epochs, seed);
            const double acc = evaluate(candidate, val);
            if (acc > best_acc) {
                best_acc = acc;
                best_reg = reg;
            }
        }
    }
    return svm_train(features, class_count, best_reg, epochs, seed);
}

int svm_predict(const LinearSvm& model, std::span<const double> values) {
    if (values.size() != model.weights.cols()) {
        throw ShapeError("svm_predict: feature dimension mismatch");
    }
    std::vector<double> x;
    standardize(model, values, x);
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < model.class_count; ++c) {
        const double* w = model.weights.row(c).data();
        double score = model.biases[static_cast<std::size_t>(c)];
        for (std::size_t i = 0; i < x.size(); ++i) {
            score += w[i] * x[i];
        }
        if (score > best_score) {
            best_score = score;
            best = c;
        }
    }
    return best;
}

double evaluate(const LinearSvm& model, const std::vector<FeatureVector>& features) {
    if (features.empty()) {
        throw DataError("evaluate: empty feature set");
    }
    std::size_t correct = 0;
    for (const FeatureVector& f : features) {
        if (svm_predict(model, f.values) == f.label) {
            ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(features.size());
}

} // namespace spikewhite
