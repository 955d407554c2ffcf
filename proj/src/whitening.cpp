#include "spikewhite/whitening.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "spikewhite/errors.hpp"
#include "spikewhite/numerics.hpp"

namespace spikewhite {

WhiteningTransform fit_zca(const Matrix& samples, double epsilon, double ratio) {
    if (epsilon <= 0.0) {
        throw std::invalid_argument("fit_zca: epsilon must be positive");
    }
    if (ratio <= 0.0 || ratio > 1.0) {
        throw std::invalid_argument("fit_zca: ratio must be in (0, 1]");
    }
    const std::size_t d = samples.cols();
    if (samples.rows() < d) {
        std::cerr << "fit_zca: warning: " << samples.rows() << " samples for " << d
                  << " dimensions; covariance will be rank-deficient\n";
    }

    auto [mean, cov] = covariance(samples);
    EigenResult eig = sym_eigen(cov);

    WhiteningTransform t;
    t.mean = std::move(mean);
    t.epsilon = epsilon;
    t.ratio = ratio;
    t.retained = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(d))));
    t.retained = std::min(t.retained, d);

    // W = V_k diag(1/sqrt(lambda+eps)) V_k^T, computed as (V_k * diag) * V_k^T.
    Matrix scaled(d, t.retained);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t k = 0; k < t.retained; ++k) {
            scaled(i, k) =
                eig.eigenvectors(i, k) / std::sqrt(eig.eigenvalues[k] + epsilon);
        }
    }
    Matrix vk_t(t.retained, d);
    for (std::size_t k = 0; k < t.retained; ++k) {
        for (std::size_t i = 0; i < d; ++i) {
            vk_t(k, i) = eig.eigenvectors(i, k);
        }
    }
    t.w = matmul(scaled, vk_t);
    t.eigvecs = std::move(eig.eigenvectors);
    t.eigvals = std::move(eig.eigenvalues);
    return t;
}

std::vector<double> apply_zca(const WhiteningTransform& t, std::span<const double> sample) {
    const std::size_t d = t.w.rows();
    if (sample.size() != d) {
        throw ShapeError("apply_zca: sample length " + std::to_string(sample.size()) +
                         " != transform dimension " + std::to_string(d));
    }
    std::vector<double> centered(d);
    for (std::size_t i = 0; i < d; ++i) {
        centered[i] = sample[i] - t.mean[i];
    }
    return matvec(t.w, centered);
}

WhiteningKernels fit_kernels(const PatchSet& patches, double epsilon, double ratio) {
    const std::size_t d = patches.patch_w * patches.patch_h * patches.channels;
    if (patches.patches.cols() != d) {
        throw ShapeError("fit_kernels: patch matrix width does not match patch dims");
    }
    const WhiteningTransform t = fit_zca(patches.patches, epsilon, ratio);
    return kernels_from_transform(t, patches.patch_w, patches.patch_h, patches.channels);
}

WhiteningKernels kernels_from_transform(const WhiteningTransform& t, std::size_t pw,
                                        std::size_t ph, std::size_t ch) {
    const std::size_t d = pw * ph * ch;
    if (t.w.rows() != d) {
        throw ShapeError("kernels_from_transform: transform dimension does not match patch dims");
    }

    WhiteningKernels k;
    k.patch_w = pw;
    k.patch_h = ph;
    k.channels = ch;
    k.epsilon = t.epsilon;
    k.ratio = t.ratio;
    k.mean = t.mean;
    k.channel_mean.assign(ch, 0.0);
    for (std::size_t y = 0; y < ph; ++y) {
        for (std::size_t x = 0; x < pw; ++x) {
            for (std::size_t c = 0; c < ch; ++c) {
                k.channel_mean[c] += t.mean[flat_index(y, x, c, pw, ch)];
            }
        }
    }
    for (double& v : k.channel_mean) {
        v /= static_cast<double>(pw * ph);
    }

    // Impulse in channel c at the central pixel picks one row of the transform.
    const std::size_t cx = pw / 2;
    const std::size_t cy = ph / 2;
    k.kernels.reserve(ch);
    for (std::size_t c = 0; c < ch; ++c) {
        const std::size_t row = flat_index(cy, cx, c, pw, ch);
        Tensor3 kc(ph, pw, ch);
        for (std::size_t i = 0; i < d; ++i) {
            kc.data[i] = t.w(row, i);
        }
        k.kernels.push_back(std::move(kc));
    }
    return k;
}

Tensor3 apply_kernels(const WhiteningKernels& k, const Tensor3& image) {
    if (image.channels != k.channels) {
        throw ShapeError("apply_kernels: image has " + std::to_string(image.channels) +
                         " channels, kernels expect " + std::to_string(k.channels));
    }
    Tensor3 centered = image;
    for (std::size_t y = 0; y < image.height; ++y) {
        for (std::size_t x = 0; x < image.width; ++x) {
            for (std::size_t c = 0; c < image.channels; ++c) {
                centered.at(y, x, c) -= k.channel_mean[c];
            }
        }
    }
    const std::size_t pad = k.patch_w / 2;
    Tensor3 first = correlate2d(centered, k.kernels[0], 1, pad);
    Tensor3 out(first.height, first.width, k.channels);
    for (std::size_t c = 0; c < k.channels; ++c) {
        const Tensor3 plane = (c == 0) ? std::move(first)
                                       : correlate2d(centered, k.kernels[c], 1, pad);
        for (std::size_t y = 0; y < out.height; ++y) {
            for (std::size_t x = 0; x < out.width; ++x) {
                out.at(y, x, c) = plane.at(y, x, 0);
            }
        }
    }
    return out;
}

double kernel_center_response(const WhiteningKernels& k, std::span<const double> patch,
                              std::size_t channel) {
    const Tensor3& kc = k.kernels.at(channel);
    if (patch.size() != kc.data.size()) {
        throw ShapeError("kernel_center_response: patch length mismatch");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < patch.size(); ++i) {
        acc += kc.data[i] * (patch[i] - k.mean[i]);
    }
    return acc;
}

namespace {

Tensor3 replicate_pad(const Tensor3& img, std::size_t pad) {
    Tensor3 out(img.height + 2 * pad, img.width + 2 * pad, img.channels);
    for (std::size_t y = 0; y < out.height; ++y) {
        const std::size_t sy = std::min(
            img.height - 1,
            static_cast<std::size_t>(std::max<std::ptrdiff_t>(
                0, static_cast<std::ptrdiff_t>(y) - static_cast<std::ptrdiff_t>(pad))));
        for (std::size_t x = 0; x < out.width; ++x) {
            const std::size_t sx = std::min(
                img.width - 1,
                static_cast<std::size_t>(std::max<std::ptrdiff_t>(
                    0, static_cast<std::ptrdiff_t>(x) - static_cast<std::ptrdiff_t>(pad))));
            for (std::size_t c = 0; c < img.channels; ++c) {
                out.at(y, x, c) = img.at(sy, sx, c);
            }
        }
    }
    return out;
}

Tensor3 dog_kernel(const DogConfig& cfg) {
    const std::size_t n = cfg.kernel_size;
    const double half = (static_cast<double>(n) - 1.0) / 2.0;
    Tensor3 ker(n, n, 1);
    double sum_c = 0.0, sum_s = 0.0;
    std::vector<double> gc(n * n), gs(n * n);
    for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t x = 0; x < n; ++x) {
            const double dy = static_cast<double>(y) - half;
            const double dx = static_cast<double>(x) - half;
            const double r2 = dx * dx + dy * dy;
            gc[y * n + x] = std::exp(-r2 / (2.0 * cfg.sigma_center * cfg.sigma_center));
            gs[y * n + x] = std::exp(-r2 / (2.0 * cfg.sigma_surround * cfg.sigma_surround));
            sum_c += gc[y * n + x];
            sum_s += gs[y * n + x];
        }
    }
    for (std::size_t i = 0; i < n * n; ++i) {
        ker.data[i] = gc[i] / sum_c - gs[i] / sum_s;
    }
    return ker;
}

void minmax_scale_channel(Tensor3& t, std::size_t c) {
    double lo = t.at(0, 0, c), hi = lo;
    for (std::size_t y = 0; y < t.height; ++y) {
        for (std::size_t x = 0; x < t.width; ++x) {
            lo = std::min(lo, t.at(y, x, c));
            hi = std::max(hi, t.at(y, x, c));
        }
    }
    const double range = hi - lo;
    for (std::size_t y = 0; y < t.height; ++y) {
        for (std::size_t x = 0; x < t.width; ++x) {
            t.at(y, x, c) = (range > 1e-12) ? (t.at(y, x, c) - lo) / range : 0.0;
        }
    }
}

} // namespace

Tensor3 dog_encode(const Tensor3& image, const DogConfig& cfg) {
    if (cfg.kernel_size % 2 == 0 || cfg.kernel_size == 0) {
        throw std::invalid_argument("dog_encode: kernel_size must be odd");
    }
    if (cfg.sigma_surround <= cfg.sigma_center) {
        throw std::invalid_argument("dog_encode: sigma_surround must exceed sigma_center");
    }

    std::vector<Tensor3> inputs;
    if (cfg.mode == DogMode::grayscale) {
        Tensor3 gray(image.height, image.width, 1);
        for (std::size_t y = 0; y < image.height; ++y) {
            for (std::size_t x = 0; x < image.width; ++x) {
                double acc = 0.0;
                for (std::size_t c = 0; c < image.channels; ++c) {
                    acc += image.at(y, x, c);
                }
                gray.at(y, x, 0) = acc / static_cast<double>(image.channels);
            }
        }
        inputs.push_back(std::move(gray));
    } else {
        for (std::size_t c = 0; c < image.channels; ++c) {
            Tensor3 plane(image.height, image.width, 1);
            for (std::size_t y = 0; y < image.height; ++y) {
                for (std::size_t x = 0; x < image.width; ++x) {
                    plane.at(y, x, 0) = image.at(y, x, c);
                }
            }
            inputs.push_back(std::move(plane));
        }
    }

    const Tensor3 ker = dog_kernel(cfg);
    const std::size_t pad = cfg.kernel_size / 2;
    const std::size_t n = inputs.size();
    Tensor3 out(image.height, image.width, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const Tensor3 padded = replicate_pad(inputs[i], pad);
        const Tensor3 resp = correlate2d(padded, ker, 1, 0);
        for (std::size_t y = 0; y < image.height; ++y) {
            for (std::size_t x = 0; x < image.width; ++x) {
                const double v = resp.at(y, x, 0);
                out.at(y, x, i) = std::max(0.0, v);
                out.at(y, x, n + i) = std::max(0.0, -v);
            }
        }
        minmax_scale_channel(out, i);
        minmax_scale_channel(out, n + i);
    }
    return out;
}

} // namespace spikewhite
