#include "doctest.h"
#include "spikewhite/containers.hpp"
#include "spikewhite/errors.hpp"
#include "spikewhite/rng.hpp"
#include "testutil.hpp"

using namespace spikewhite;

TEST_SUITE_BEGIN("containers");

TEST_CASE("whitening container: standard transform round-trip, byte-stable") {
    const std::string dir = testutil::scratch_dir("cont_wt");
    Rng rng(3);
    StandardTransformFile file;
    file.height = 2;
    file.width = 3;
    file.channels = 1;
    const std::size_t d = 6;
    file.transform.epsilon = 0.01;
    file.transform.ratio = 0.75;
    file.transform.retained = 5;
    file.transform.mean.resize(d);
    file.transform.w = Matrix(d, d);
    for (double& v : file.transform.mean) {
        v = rng.uniform(0.0, 1.0);
    }
    for (double& v : file.transform.w.data()) {
        v = rng.uniform(-2.0, 2.0);
    }

    const std::string path = dir + "/t.swt";
    save_whitening(path, file);
    const auto loaded = load_whitening(path);
    const auto& got = std::get<StandardTransformFile>(loaded);
    CHECK(got.height == 2);
    CHECK(got.width == 3);
    CHECK(got.transform.epsilon == 0.01);
    CHECK(got.transform.ratio == 0.75);
    CHECK(got.transform.mean == file.transform.mean);
    CHECK(got.transform.w == file.transform.w);
    CHECK(got.transform.retained == 5); // ceil(0.75 * 6)

    save_whitening(dir + "/t2.swt", file);
    CHECK(testutil::read_all(path) == testutil::read_all(dir + "/t2.swt"));
}

TEST_CASE("whitening container: kernels round-trip rebuilds channel means") {
    const std::string dir = testutil::scratch_dir("cont_k");
    Rng rng(5);
    WhiteningKernels k;
    k.patch_w = 3;
    k.patch_h = 3;
    k.channels = 2;
    k.epsilon = 0.1;
    k.ratio = 1.0;
    k.mean.resize(18);
    for (double& v : k.mean) {
        v = rng.uniform(0.0, 1.0);
    }
    k.channel_mean.assign(2, 0.0);
    for (std::size_t y = 0; y < 3; ++y) {
        for (std::size_t x = 0; x < 3; ++x) {
            for (std::size_t c = 0; c < 2; ++c) {
                k.channel_mean[c] += k.mean[flat_index(y, x, c, 3, 2)] / 9.0;
            }
        }
    }
    for (int c = 0; c < 2; ++c) {
        Tensor3 t(3, 3, 2);
        for (double& v : t.data) {
            v = rng.uniform(-1.0, 1.0);
        }
        k.kernels.push_back(std::move(t));
    }

    const std::string path = dir + "/k.swt";
    save_whitening(path, k);
    const auto loaded = std::get<WhiteningKernels>(load_whitening(path));
    CHECK(loaded.kernels == k.kernels);
    CHECK(loaded.mean == k.mean);
    CHECK(loaded.channel_mean[0] == doctest::Approx(k.channel_mean[0]).epsilon(1e-12));
    CHECK(loaded.epsilon == 0.1);
}

TEST_CASE("layer container: round-trip preserves everything") {
    const std::string dir = testutil::scratch_dir("cont_layer");
    Rng rng(7);
    NeuronConfig neuron;
    neuron.capacitance = 1.5;
    neuron.threshold_init_mean = 8.0;
    StdpConfig stdp;
    stdp.beta = 2.0;
    SnnLayer layer(4, 3, 2, 5, neuron, stdp, rng);

    const std::string path = dir + "/l.swl";
    save_layer(path, layer, stdp);
    const LayerFile lf = load_layer(path);
    CHECK(lf.layer == layer);
    CHECK(lf.stdp == stdp);
    CHECK(lf.layer.threshold_floor() == doctest::Approx(0.008));
}

TEST_CASE("feature container: round-trip and labels") {
    const std::string dir = testutil::scratch_dir("cont_feat");
    Rng rng(9);
    std::vector<FeatureVector> features(5);
    for (std::size_t i = 0; i < 5; ++i) {
        features[i].label = static_cast<int>(i % 3);
        features[i].values.assign(7, 0.0);
        for (double& v : features[i].values) {
            v = rng.uniform(-1.0, 1.0);
        }
    }
    const std::string path = dir + "/f.swf";
    save_features(path, features, 3);
    const FeatureFile ff = load_features(path);
    CHECK(ff.class_count == 3);
    REQUIRE(ff.features.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(ff.features[i].label == features[i].label);
        CHECK(ff.features[i].values == features[i].values);
    }
}

TEST_CASE("containers: bad magic and truncation raise format errors") {
    const std::string dir = testutil::scratch_dir("cont_bad");
    testutil::write_bytes(dir + "/bad.swt", {'N', 'O', 'P', 'E', 0, 0, 0, 0});
    CHECK_THROWS_AS(load_whitening(dir + "/bad.swt"), FormatError);
    CHECK_THROWS_AS(load_layer(dir + "/missing.swl"), FormatError);

    Rng rng(11);
    NeuronConfig neuron;
    StdpConfig stdp;
    SnnLayer layer(2, 2, 2, 1, neuron, stdp, rng);
    save_layer(dir + "/l.swl", layer, stdp);
    auto bytes = testutil::read_all(dir + "/l.swl");
    bytes.resize(bytes.size() / 2);
    testutil::write_bytes(dir + "/trunc.swl", bytes);
    CHECK_THROWS_AS(load_layer(dir + "/trunc.swl"), FormatError);
}

TEST_SUITE_END();
