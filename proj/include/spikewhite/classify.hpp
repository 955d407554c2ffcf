#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spikewhite/matrix.hpp"
#include "spikewhite/tensor.hpp"

namespace spikewhite {

struct FeatureVector {
    std::vector<double> values;
    int label = -1;
};

enum class PoolMode { sum, max };

// Aggregate a feature map over a 2x2 grid of quadrants (odd dims give the extra
// row/column to the bottom/right). Output is region-major then filter, length 4*N.
FeatureVector pool_quadrants(const Tensor3& map, PoolMode mode);

inline FeatureVector sum_pool(const Tensor3& map) { return pool_quadrants(map, PoolMode::sum); }

struct LinearSvm {
    int class_count = 0;
    Matrix weights; // [class_count x d]
    std::vector<double> biases;
    std::vector<double> scaler_mean; // per-dimension standardization
    std::vector<double> scaler_std;  // zero-variance dims get 1
};

// One-vs-rest linear SVM trained by seeded stochastic subgradient descent on the
// hinge loss with step size 1/(reg*t). Features are standardized first. Requires
// at least one sample of every class.
LinearSvm svm_train(const std::vector<FeatureVector>& features, int class_count, double reg,
                    std::size_t epochs, std::uint64_t seed);

// Same, but picks reg from {0.01, 0.1, 1} on a stratified 10% validation split,
// then refits on everything.
LinearSvm svm_train_auto(const std::vector<FeatureVector>& features, int class_count,
                         std::size_t epochs, std::uint64_t seed);

/// argmax of class scores w^T x + b; ties go to the lowest class index.
int svm_predict(const LinearSvm& model, std::span<const double> values);

/// Fraction of correctly predicted labels. Errors on an empty set.
double evaluate(const LinearSvm& model, const std::vector<FeatureVector>& features);

} // namespace spikewhite
