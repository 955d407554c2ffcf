#pragma once

#include <cstddef>
#include <vector>

#include "spikewhite/matrix.hpp"
#include "spikewhite/tensor.hpp"

namespace spikewhite {

struct CovarianceResult {
    std::vector<double> mean; // per-dimension sample mean
    Matrix cov;               // unbiased (n-1 divisor), exactly symmetric
};

/// Mean and covariance of the rows of `samples` (n rows, d cols). Requires n >= 2.
CovarianceResult covariance(const Matrix& samples);

struct EigenResult {
    std::vector<double> eigenvalues; // descending
    Matrix eigenvectors;             // column i pairs with eigenvalues[i], orthonormal
};

// Symmetric eigendecomposition. Deterministic: fixed operation order, equal
// eigenvalues keep their pre-sort order, and each eigenvector's largest-magnitude
// entry is made positive. Input must be symmetric within 1e-10 (absolute).
//
// Small matrices (n <= 512) use cyclic Jacobi rotations (row-major sweep order,
// 100-sweep cap); larger ones use Householder tridiagonalization with
// implicit-shift QL, whose cost stays practical at the whole-image dimensions
// the Jacobi sweeps cannot handle. Both paths honor the same contract and are
// cross-checked in the tests.
EigenResult sym_eigen(const Matrix& m);
EigenResult sym_eigen_jacobi(const Matrix& m);
EigenResult sym_eigen_tridiagonal(const Matrix& m);

// Sliding-window cross-correlation (no kernel flip) of a zero-padded image with a
// kernel of matching channel count, summed over channels. Output has one channel,
// dims per the valid-window formula.
Tensor3 correlate2d(const Tensor3& image, const Tensor3& kernel, std::size_t stride,
                    std::size_t padding);

} // namespace spikewhite
