#include "spikewhite/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>

#include "spikewhite/errors.hpp"
#include "spikewhite/png_io.hpp"
#include "spikewhite/rng.hpp"

namespace spikewhite {

namespace {

constexpr std::size_t kCifarSide = 32;
constexpr std::size_t kCifarPixels = kCifarSide * kCifarSide;
constexpr std::size_t kCifarRecord = 1 + 3 * kCifarPixels;
constexpr std::size_t kStlSide = 96;
constexpr std::size_t kStlPixels = kStlSide * kStlSide;
constexpr std::size_t kStlRecord = 3 * kStlPixels;

std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw FormatError("cannot open file: " + path);
    }
    f.seekg(0, std::ios::end);
    const std::streamoff size = f.tellg();
    f.seekg(0, std::ios::beg);
    std::vector<unsigned char> bytes(static_cast<std::size_t>(size));
    f.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!f) {
        throw FormatError("read failed: " + path);
    }
    return bytes;
}

// Appends records from one CIFAR batch file. Returns false once `limit` is hit.
bool append_cifar_batch(const std::string& path, LabeledImageSet& out, std::size_t limit) {
    const auto bytes = read_file(path);
    if (bytes.empty() || bytes.size() % kCifarRecord != 0) {
        throw FormatError("not a whole number of CIFAR-10 records: " + path);
    }
    const std::size_t count = bytes.size() / kCifarRecord;
    for (std::size_t r = 0; r < count; ++r) {
        if (limit != 0 && out.images.size() >= limit) {
            return false;
        }
        const unsigned char* rec = bytes.data() + r * kCifarRecord;
        const int label = rec[0];
        if (label >= 10) {
            throw FormatError("CIFAR-10 label out of range in " + path);
        }
        Tensor3 img(kCifarSide, kCifarSide, 3);
        for (std::size_t c = 0; c < 3; ++c) {
            const unsigned char* plane = rec + 1 + c * kCifarPixels;
            for (std::size_t y = 0; y < kCifarSide; ++y) {
                for (std::size_t x = 0; x < kCifarSide; ++x) {
                    img.at(y, x, c) = plane[y * kCifarSide + x] / 255.0;
                }
            }
        }
        out.images.push_back(std::move(img));
        out.labels.push_back(label);
    }
    return true;
}

} // namespace

DatasetPair load_cifar10(const std::string& dir, std::size_t max_train, std::size_t max_test) {
    DatasetPair out;
    out.train.class_count = 10;
    out.test.class_count = 10;
    for (int b = 1; b <= 5; ++b) {
        const std::string path = dir + "/data_batch_" + std::to_string(b) + ".bin";
        if (!append_cifar_batch(path, out.train, max_train)) {
            break;
        }
    }
    append_cifar_batch(dir + "/test_batch.bin", out.test, max_test);
    return out;
}

LabeledImageSet load_stl10_split(const std::string& dir, const std::string& split,
                                 std::size_t max_images) {
    if (split != "train" && split != "test") {
        throw DataError("unknown STL-10 split: " + split);
    }
    const std::string x_path = dir + "/" + split + "_X.bin";
    const std::string y_path = dir + "/" + split + "_y.bin";
    const auto pixels = read_file(x_path);
    const auto labels = read_file(y_path);
    if (pixels.empty() || pixels.size() % kStlRecord != 0) {
        throw FormatError("not a whole number of STL-10 images: " + x_path);
    }
    const std::size_t count = pixels.size() / kStlRecord;
    if (labels.size() != count) {
        throw FormatError("label count does not match image count: " + y_path);
    }

    LabeledImageSet out;
    out.class_count = 10;
    const std::size_t take = (max_images == 0) ? count : std::min(count, max_images);
    out.images.reserve(take);
    out.labels.reserve(take);
    for (std::size_t r = 0; r < take; ++r) {
        const unsigned char raw_label = labels[r];
        if (raw_label < 1 || raw_label > 10) {
            throw FormatError("STL-10 label out of range in " + y_path);
        }
        const unsigned char* rec = pixels.data() + r * kStlRecord;
        Tensor3 img(kStlSide, kStlSide, 3);
        for (std::size_t c = 0; c < 3; ++c) {
            // Planes are stored column-major.
            const unsigned char* plane = rec + c * kStlPixels;
            for (std::size_t y = 0; y < kStlSide; ++y) {
                for (std::size_t x = 0; x < kStlSide; ++x) {
                    img.at(y, x, c) = plane[x * kStlSide + y] / 255.0;
                }
            }
        }
        out.images.push_back(std::move(img));
        out.labels.push_back(raw_label - 1);
    }
    return out;
}

DatasetPair load_stl10(const std::string& dir, std::size_t max_train, std::size_t max_test) {
    DatasetPair out;
    out.train = load_stl10_split(dir, "train", max_train);
    out.test = load_stl10_split(dir, "test", max_test);
    return out;
}

PatchSet sample_patches(const LabeledImageSet& set, std::size_t patch_w, std::size_t patch_h,
                        std::size_t stride, std::size_t max_count, std::uint64_t seed) {
    if (set.images.empty()) {
        throw DataError("sample_patches: empty image set");
    }
    const Tensor3& first = set.images.front();
    if (patch_w > first.width || patch_h > first.height) {
        throw ShapeError("sample_patches: patch larger than image");
    }
    if (stride == 0 || patch_w == 0 || patch_h == 0) {
        throw ShapeError("sample_patches: stride and patch dims must be positive");
    }

    const std::size_t ny = (first.height - patch_h) / stride + 1;
    const std::size_t nx = (first.width - patch_w) / stride + 1;
    const std::size_t per_image = ny * nx;
    const std::size_t total = per_image * set.images.size();
    const bool subsample = max_count != 0 && total > max_count;
    const std::size_t count = subsample ? max_count : total;

    std::vector<std::uint64_t> keep;
    if (subsample) {
        Rng rng(seed);
        keep = rng.sample_without_replacement(total, count);
    }

    PatchSet out;
    out.patch_w = patch_w;
    out.patch_h = patch_h;
    out.channels = first.channels;
    const std::size_t dim = patch_w * patch_h * first.channels;
    out.patches = Matrix(count, dim);

    std::size_t next_keep = 0;
    std::size_t row = 0;
    for (std::size_t img_idx = 0; img_idx < set.images.size(); ++img_idx) {
        const Tensor3& img = set.images[img_idx];
        for (std::size_t gy = 0; gy < ny; ++gy) {
            for (std::size_t gx = 0; gx < nx; ++gx) {
                const std::uint64_t grid_idx =
                    static_cast<std::uint64_t>(img_idx) * per_image + gy * nx + gx;
                if (subsample) {
                    if (next_keep >= keep.size() || keep[next_keep] != grid_idx) {
                        continue;
                    }
                    ++next_keep;
                }
                double* dst = out.patches.row(row).data();
                const std::size_t y0 = gy * stride;
                const std::size_t x0 = gx * stride;
                for (std::size_t y = 0; y < patch_h; ++y) {
                    const double* src = img.data.data() +
                                        flat_index(y0 + y, x0, 0, img.width, img.channels);
                    std::copy(src, src + patch_w * img.channels,
                              dst + flat_index(y, 0, 0, patch_w, img.channels));
                }
                ++row;
            }
        }
    }
    return out;
}

void export_image_grid(const std::vector<Tensor3>& tensors, const std::string& path) {
    if (tensors.empty()) {
        throw DataError("export_image_grid: no tensors");
    }
    const Tensor3& first = tensors.front();
    if (first.channels != 1 && first.channels != 3) {
        throw ShapeError("export_image_grid: tensors must have 1 or 3 channels");
    }
    for (const Tensor3& t : tensors) {
        if (!t.same_dims(first)) {
            throw ShapeError("export_image_grid: tensors must share dimensions");
        }
    }

    const std::size_t n = tensors.size();
    const std::size_t cols =
        static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    const std::size_t rows = (n + cols - 1) / cols;
    const std::size_t tile_w = first.width;
    const std::size_t tile_h = first.height;
    const std::size_t out_w = cols * tile_w + (cols - 1);
    const std::size_t out_h = rows * tile_h + (rows - 1);

    std::vector<unsigned char> rgb(out_w * out_h * 3, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const Tensor3& t = tensors[i];
        const double lo = *std::min_element(t.data.begin(), t.data.end());
        const double hi = *std::max_element(t.data.begin(), t.data.end());
        const double range = hi - lo;
        const std::size_t oy = (i / cols) * (tile_h + 1);
        const std::size_t ox = (i % cols) * (tile_w + 1);
        for (std::size_t y = 0; y < tile_h; ++y) {
            for (std::size_t x = 0; x < tile_w; ++x) {
                unsigned char px[3];
                for (std::size_t c = 0; c < 3; ++c) {
                    const double v = t.at(y, x, first.channels == 1 ? 0 : c);
                    const double scaled = (range > 0.0) ? (v - lo) / range * 255.0 : 128.0;
                    px[c] = static_cast<unsigned char>(std::lround(std::clamp(scaled, 0.0, 255.0)));
                }
                unsigned char* dst = rgb.data() + ((oy + y) * out_w + ox + x) * 3;
                dst[0] = px[0];
                dst[1] = px[1];
                dst[2] = px[2];
            }
        }
    }
    write_png_rgb8(path, out_w, out_h, rgb);
}

} // namespace spikewhite
