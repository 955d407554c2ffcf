#include "spikewhite/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "spikewhite/errors.hpp"
#include "spikewhite/rng.hpp"

namespace spikewhite {

namespace {

struct ClassParams {
    double hue_angle;    // position on the color circle orthogonal to gray
    double orientation;  // stripe direction
};

ClassParams class_params(int label) {
    return {2.0 * M_PI * label / 10.0, M_PI * label / 10.0};
}

// Color circle basis orthogonal to the gray axis (1,1,1).
constexpr double kE1[3] = {0.70710678118654752, -0.70710678118654752, 0.0};
constexpr double kE2[3] = {0.40824829046386302, 0.40824829046386302, -0.81649658092772603};

// One image as three planar row-major channel planes of side*side bytes each.
std::vector<unsigned char> render_image(std::size_t side, int label, Rng& rng) {
    const ClassParams cls = class_params(label);

    // Smooth colored field: a few low-frequency waves along a class hue.
    static constexpr std::array<std::array<int, 2>, 6> kLowFreq = {
        {{1, 0}, {0, 1}, {1, 1}, {1, -1}, {2, 1}, {1, 2}}};
    struct Wave {
        double px, qy, phase, amp;
    };
    std::array<Wave, 3> waves{};
    for (Wave& w : waves) {
        const auto& pq = kLowFreq[rng.below(kLowFreq.size())];
        w.px = 2.0 * M_PI * pq[0] / static_cast<double>(side);
        w.qy = 2.0 * M_PI * pq[1] / static_cast<double>(side);
        w.phase = rng.uniform(0.0, 2.0 * M_PI);
        w.amp = rng.uniform(0.5, 1.0);
    }
    const double hue = cls.hue_angle + rng.uniform(-0.2, 0.2);
    const double color_amp = rng.uniform(0.18, 0.28);
    double hue_dir[3];
    for (int c = 0; c < 3; ++c) {
        hue_dir[c] = std::cos(hue) * kE1[c] + std::sin(hue) * kE2[c];
    }

    // Oriented luminance stripes.
    const double theta = cls.orientation + rng.uniform(-0.08, 0.08) * M_PI;
    const double freq = rng.uniform(2.5, 4.5);
    const double stripe_phase = rng.uniform(0.0, 2.0 * M_PI);
    const double stripe_amp = rng.uniform(0.10, 0.18);
    const double sx = 2.0 * M_PI * freq * std::cos(theta) / static_cast<double>(side);
    const double sy = 2.0 * M_PI * freq * std::sin(theta) / static_cast<double>(side);

    double base[3];
    for (double& b : base) {
        b = 0.5 + rng.uniform(-0.06, 0.06);
    }

    std::vector<unsigned char> planes(3 * side * side);
    for (std::size_t y = 0; y < side; ++y) {
        for (std::size_t x = 0; x < side; ++x) {
            double field = 0.0;
            for (const Wave& w : waves) {
                field += w.amp * std::sin(w.px * x + w.qy * y + w.phase);
            }
            field /= 3.0;
            const double stripe =
                stripe_amp * std::sin(sx * x + sy * y + stripe_phase);
            const double noise_scale = 0.02;
            for (std::size_t c = 0; c < 3; ++c) {
                double v = base[c] + color_amp * field * hue_dir[c] + stripe +
                           rng.uniform(-noise_scale, noise_scale);
                v = std::clamp(v, 0.0, 1.0);
                planes[c * side * side + y * side + x] =
                    static_cast<unsigned char>(std::lround(v * 255.0));
            }
        }
    }
    return planes;
}

void write_cifar_file(const std::string& path, std::size_t count, std::size_t first_index,
                      Rng& rng) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw FormatError("cannot write " + path);
    }
    for (std::size_t i = 0; i < count; ++i) {
        const int label = static_cast<int>((first_index + i) % 10);
        const auto planes = render_image(32, label, rng);
        const unsigned char lb = static_cast<unsigned char>(label);
        f.write(reinterpret_cast<const char*>(&lb), 1);
        f.write(reinterpret_cast<const char*>(planes.data()),
                static_cast<std::streamsize>(planes.size()));
    }
    if (!f) {
        throw FormatError("write failed: " + path);
    }
}

void write_stl_split(const std::string& dir, const std::string& split, std::size_t count,
                     Rng& rng) {
    const std::size_t side = 96;
    std::ofstream fx(dir + "/" + split + "_X.bin", std::ios::binary | std::ios::trunc);
    std::ofstream fy(dir + "/" + split + "_y.bin", std::ios::binary | std::ios::trunc);
    if (!fx || !fy) {
        throw FormatError("cannot write STL files in " + dir);
    }
    std::vector<unsigned char> colmajor(3 * side * side);
    for (std::size_t i = 0; i < count; ++i) {
        const int label = static_cast<int>(i % 10);
        const auto planes = render_image(side, label, rng);
        for (std::size_t c = 0; c < 3; ++c) {
            for (std::size_t y = 0; y < side; ++y) {
                for (std::size_t x = 0; x < side; ++x) {
                    colmajor[c * side * side + x * side + y] =
                        planes[c * side * side + y * side + x];
                }
            }
        }
        fx.write(reinterpret_cast<const char*>(colmajor.data()),
                 static_cast<std::streamsize>(colmajor.size()));
        const unsigned char lb = static_cast<unsigned char>(label + 1);
        fy.write(reinterpret_cast<const char*>(&lb), 1);
    }
    if (!fx || !fy) {
        throw FormatError("write failed in " + dir);
    }
}

} // namespace

void write_synthetic_cifar10(const std::string& dir, std::size_t train_count,
                             std::size_t test_count, std::uint64_t seed) {
    std::filesystem::create_directories(dir);
    Rng rng(seed);
    const std::size_t per_batch = (train_count + 4) / 5;
    std::size_t written = 0;
    for (int b = 1; b <= 5; ++b) {
        const std::size_t n = std::min(per_batch, train_count - written);
        write_cifar_file(dir + "/data_batch_" + std::to_string(b) + ".bin", n, written, rng);
        written += n;
    }
    write_cifar_file(dir + "/test_batch.bin", test_count, 0, rng);
}

void write_synthetic_stl10(const std::string& dir, std::size_t train_count,
                           std::size_t test_count, std::uint64_t seed) {
    std::filesystem::create_directories(dir);
    Rng rng(seed);
    write_stl_split(dir, "train", train_count, rng);
    if (test_count > 0) {
        write_stl_split(dir, "test", test_count, rng);
    }
}

} // namespace spikewhite
