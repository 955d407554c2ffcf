#include <cmath>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "doctest.h"
#include "spikewhite/datasets.hpp"
#include "spikewhite/errors.hpp"
#include "spikewhite/synthetic.hpp"
#include "testutil.hpp"

using namespace spikewhite;

namespace {

// Hand-built CIFAR record: label byte + 3072 pixel bytes (planar R, G, B).
std::vector<unsigned char> cifar_record(unsigned char label, unsigned char fill) {
    std::vector<unsigned char> rec(3073, fill);
    rec[0] = label;
    return rec;
}

void write_tiny_cifar(const std::string& dir) {
    for (int b = 1; b <= 5; ++b) {
        std::vector<unsigned char> bytes;
        for (int r = 0; r < 4; ++r) {
            const auto rec =
                cifar_record(static_cast<unsigned char>((b + r) % 10),
                             static_cast<unsigned char>(10 * b + r));
            bytes.insert(bytes.end(), rec.begin(), rec.end());
        }
        testutil::write_bytes(dir + "/data_batch_" + std::to_string(b) + ".bin", bytes);
    }
    std::vector<unsigned char> bytes;
    for (int r = 0; r < 6; ++r) {
        const auto rec = cifar_record(static_cast<unsigned char>(r), 200);
        bytes.insert(bytes.end(), rec.begin(), rec.end());
    }
    testutil::write_bytes(dir + "/test_batch.bin", bytes);
}

} // namespace

TEST_SUITE_BEGIN("datasets");

TEST_CASE("cifar10: record layout, scaling, and counts") {
    const std::string dir = testutil::scratch_dir("cifar_tiny");

    // First record: label 7, R plane all 3, G plane all 128, B plane all 255,
    // except pixel (y=1, x=2) of the R plane which is 99.
    std::vector<unsigned char> bytes(3073);
    bytes[0] = 7;
    for (std::size_t i = 0; i < 1024; ++i) {
        bytes[1 + i] = 3;
        bytes[1 + 1024 + i] = 128;
        bytes[1 + 2048 + i] = 255;
    }
    bytes[1 + 1 * 32 + 2] = 99;
    for (int b = 1; b <= 5; ++b) {
        testutil::write_bytes(dir + "/data_batch_" + std::to_string(b) + ".bin", bytes);
    }
    testutil::write_bytes(dir + "/test_batch.bin", bytes);

    const DatasetPair data = load_cifar10(dir);
    REQUIRE(data.train.images.size() == 5);
    REQUIRE(data.test.images.size() == 1);
    CHECK(data.train.labels[0] == 7);
    CHECK(data.train.class_count == 10);

    const Tensor3& img = data.train.images[0];
    REQUIRE(img.height == 32);
    REQUIRE(img.width == 32);
    REQUIRE(img.channels == 3);
    CHECK(img.at(0, 0, 0) == doctest::Approx(3.0 / 255.0));
    CHECK(img.at(0, 0, 1) == doctest::Approx(128.0 / 255.0));
    CHECK(img.at(0, 0, 2) == doctest::Approx(1.0));
    CHECK(img.at(1, 2, 0) == doctest::Approx(99.0 / 255.0)); // row-major within plane
}

TEST_CASE("cifar10: truncated file is a format error") {
    const std::string dir = testutil::scratch_dir("cifar_trunc");
    write_tiny_cifar(dir);
    auto bytes = testutil::read_all(dir + "/data_batch_3.bin");
    bytes.resize(bytes.size() - 100);
    testutil::write_bytes(dir + "/data_batch_3.bin", bytes);
    CHECK_THROWS_AS(load_cifar10(dir), FormatError);
}

TEST_CASE("cifar10: missing file is a format error") {
    const std::string dir = testutil::scratch_dir("cifar_missing");
    CHECK_THROWS_AS(load_cifar10(dir), FormatError);
}

TEST_CASE("cifar10: train_limit caps loading") {
    const std::string dir = testutil::scratch_dir("cifar_cap");
    write_tiny_cifar(dir);
    const DatasetPair data = load_cifar10(dir, 7, 2);
    CHECK(data.train.images.size() == 7);
    CHECK(data.test.images.size() == 2);
}

TEST_CASE("stl10: column-major planes and 1-based labels") {
    const std::string dir = testutil::scratch_dir("stl_tiny");
    // One image; pixel value encodes its column-major index so positions are
    // checkable: plane c, offset k -> byte (c*7 + k) % 251.
    std::vector<unsigned char> pixels(3 * 96 * 96);
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t k = 0; k < 96 * 96; ++k) {
            pixels[c * 96 * 96 + k] = static_cast<unsigned char>((c * 7 + k) % 251);
        }
    }
    testutil::write_bytes(dir + "/train_X.bin", pixels);
    testutil::write_bytes(dir + "/train_y.bin", {10});

    const LabeledImageSet set = load_stl10_split(dir, "train");
    REQUIRE(set.images.size() == 1);
    CHECK(set.labels[0] == 9); // remapped to 0-based
    const Tensor3& img = set.images[0];
    // (y, x) reads column-major offset x*96 + y.
    CHECK(img.at(5, 3, 0) == doctest::Approx(((3 * 96 + 5) % 251) / 255.0));
    CHECK(img.at(0, 0, 2) == doctest::Approx(((2 * 7) % 251) / 255.0));
    CHECK(img.at(95, 95, 1) == doctest::Approx(((7 + 95 * 96 + 95) % 251) / 255.0));
}

TEST_CASE("stl10: empty dir and label mismatch are format errors") {
    const std::string dir = testutil::scratch_dir("stl_bad");
    CHECK_THROWS_AS(load_stl10_split(dir, "train"), FormatError);
    std::vector<unsigned char> pixels(3 * 96 * 96);
    testutil::write_bytes(dir + "/train_X.bin", pixels);
    testutil::write_bytes(dir + "/train_y.bin", {1, 2}); // two labels, one image
    CHECK_THROWS_AS(load_stl10_split(dir, "train"), FormatError);
}

TEST_CASE("synthetic generator round-trips through the loaders") {
    const std::string cdir = testutil::scratch_dir("syn_cifar");
    write_synthetic_cifar10(cdir, 20, 10, 42);
    const DatasetPair c = load_cifar10(cdir);
    CHECK(c.train.images.size() == 20);
    CHECK(c.test.images.size() == 10);
    for (int label : c.train.labels) {
        CHECK(label < 10);
    }

    const std::string sdir = testutil::scratch_dir("syn_stl");
    write_synthetic_stl10(sdir, 10, 0, 43);
    const LabeledImageSet s = load_stl10_split(sdir, "train");
    CHECK(s.images.size() == 10);
    CHECK(s.images[0].height == 96);
}

TEST_CASE("sample_patches: dense grid count") {
    LabeledImageSet set;
    set.class_count = 1;
    set.labels = {0, 0};
    set.images.assign(2, Tensor3(32, 32, 3));
    for (std::size_t i = 0; i < set.images.size(); ++i) {
        for (std::size_t j = 0; j < set.images[i].data.size(); ++j) {
            set.images[i].data[j] = static_cast<double>((i * 31 + j * 7) % 97) / 96.0;
        }
    }
    const PatchSet p = sample_patches(set, 9, 9, 2, 0, 1);
    // floor((32-9)/2)+1 = 12 positions per axis.
    CHECK(p.patches.rows() == 2 * 12 * 12);
    CHECK(p.patches.cols() == 9 * 9 * 3);

    // Every patch equals the matching window of its source image.
    const Tensor3& img = set.images[0];
    const auto row = p.patches.row(13); // image 0, gy=1, gx=1 -> origin (2, 2)
    for (std::size_t y = 0; y < 9; ++y) {
        for (std::size_t x = 0; x < 9; ++x) {
            for (std::size_t c = 0; c < 3; ++c) {
                CHECK(row[flat_index(y, x, c, 9, 3)] == img.at(2 + y, 2 + x, c));
            }
        }
    }
}

TEST_CASE("sample_patches: stride = image size gives one patch at the origin") {
    LabeledImageSet set;
    set.class_count = 1;
    set.labels = {0};
    set.images.assign(1, Tensor3(16, 16, 1));
    set.images[0].at(0, 0, 0) = 0.5;
    const PatchSet p = sample_patches(set, 1, 1, 16, 0, 1);
    REQUIRE(p.patches.rows() == 1);
    CHECK(p.patches(0, 0) == 0.5);
}

TEST_CASE("sample_patches: subsampling is exact-count, deterministic, and faithful") {
    LabeledImageSet set;
    set.class_count = 1;
    set.labels.assign(3, 0);
    set.images.assign(3, Tensor3(12, 12, 2));
    for (std::size_t i = 0; i < set.images.size(); ++i) {
        for (std::size_t j = 0; j < set.images[i].data.size(); ++j) {
            set.images[i].data[j] = static_cast<double>((i * 131 + j * 17) % 251) / 250.0;
        }
    }
    const PatchSet a = sample_patches(set, 5, 5, 1, 40, 7);
    const PatchSet b = sample_patches(set, 5, 5, 1, 40, 7);
    const PatchSet c = sample_patches(set, 5, 5, 1, 40, 8);
    CHECK(a.patches.rows() == 40);
    CHECK(a.patches == b.patches);
    CHECK(a.patches.data() != c.patches.data());

    // Each subsampled row must still be an exact window of some image.
    bool all_found = true;
    for (std::size_t r = 0; r < a.patches.rows(); ++r) {
        bool found = false;
        for (const Tensor3& img : set.images) {
            for (std::size_t y0 = 0; y0 + 5 <= img.height && !found; ++y0) {
                for (std::size_t x0 = 0; x0 + 5 <= img.width && !found; ++x0) {
                    bool match = true;
                    for (std::size_t y = 0; y < 5 && match; ++y) {
                        for (std::size_t x = 0; x < 5 && match; ++x) {
                            for (std::size_t ch = 0; ch < 2 && match; ++ch) {
                                match = a.patches(r, flat_index(y, x, ch, 5, 2)) ==
                                        img.at(y0 + y, x0 + x, ch);
                            }
                        }
                    }
                    found = match;
                }
            }
            if (found) {
                break;
            }
        }
        all_found = all_found && found;
    }
    CHECK(all_found);
}

TEST_CASE("sample_patches: patch larger than image is a shape error") {
    LabeledImageSet set;
    set.class_count = 1;
    set.labels = {0};
    set.images.assign(1, Tensor3(8, 8, 1));
    CHECK_THROWS_AS(sample_patches(set, 9, 9, 1, 0, 1), ShapeError);
}

TEST_CASE("export_image_grid: constant tensor renders mid-gray") {
    const std::string dir = testutil::scratch_dir("grid_const");
    Tensor3 t(4, 4, 1);
    for (double& v : t.data) {
        v = 0.37;
    }
    const std::string path = dir + "/grid.png";
    export_image_grid({t}, path);
    const auto png = testutil::decode_png_rgb8(path);
    REQUIRE(png.width == 4);
    REQUIRE(png.height == 4);
    for (unsigned char v : png.rgb) {
        CHECK(v == 128);
    }
}

TEST_CASE("export_image_grid: 64 tiles form an 8x8 grid with separators") {
    const std::string dir = testutil::scratch_dir("grid_64");
    std::vector<Tensor3> tiles(64, Tensor3(5, 5, 3));
    for (std::size_t i = 0; i < tiles.size(); ++i) {
        for (std::size_t j = 0; j < tiles[i].data.size(); ++j) {
            tiles[i].data[j] = static_cast<double>((i + j) % 11);
        }
    }
    const std::string path = dir + "/grid.png";
    export_image_grid(tiles, path);
    const auto png = testutil::decode_png_rgb8(path);
    CHECK(png.width == 8 * 5 + 7);
    CHECK(png.height == 8 * 5 + 7);
}

TEST_CASE("export_image_grid: decoded pixels equal scaled inputs within quantization") {
    const std::string dir = testutil::scratch_dir("grid_roundtrip");
    Tensor3 t(3, 5, 3);
    for (std::size_t j = 0; j < t.data.size(); ++j) {
        t.data[j] = std::sin(static_cast<double>(j)) * 2.0 + 0.5;
    }
    const std::string path = dir + "/grid.png";
    export_image_grid({t}, path);
    const auto png = testutil::decode_png_rgb8(path);
    REQUIRE(png.width == 5);
    REQUIRE(png.height == 3);

    const double lo = *std::min_element(t.data.begin(), t.data.end());
    const double hi = *std::max_element(t.data.begin(), t.data.end());
    for (std::size_t y = 0; y < 3; ++y) {
        for (std::size_t x = 0; x < 5; ++x) {
            for (std::size_t c = 0; c < 3; ++c) {
                const double expect = (t.at(y, x, c) - lo) / (hi - lo) * 255.0;
                const double got = png.rgb[(y * 5 + x) * 3 + c];
                CHECK(std::fabs(got - expect) <= 0.5 + 1e-9);
            }
        }
    }
}

TEST_CASE("export_image_grid: loaders reject bad shapes") {
    Tensor3 a(4, 4, 1), b(4, 4, 3);
    CHECK_THROWS_AS(export_image_grid({a, b}, "unused.png"), ShapeError);
    Tensor3 two(4, 4, 2);
    CHECK_THROWS_AS(export_image_grid({two}, "unused.png"), ShapeError);
}

TEST_SUITE_END();
