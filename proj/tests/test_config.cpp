#include "doctest.h"
#include "spikewhite/config.hpp"
#include "spikewhite/errors.hpp"

using namespace spikewhite;

TEST_SUITE_BEGIN("config");

TEST_CASE("defaults parse and serialize round-trips to equality") {
    const ExperimentConfig def;
    const std::string text = serialize_config(def);
    const ExperimentConfig again = parse_config_string(text);
    CHECK(again == def);
    CHECK(parse_config_string(serialize_config(again)) == again);
}

TEST_CASE("values, comments, and whitespace are parsed") {
    const ExperimentConfig cfg = parse_config_string(
        "# a comment\n"
        "dataset.name = stl10\n"
        "dataset.dir = /data/stl10   # trailing comment\n"
        "preproc.mode = dog-gray\n"
        "whitening.epsilon = 0.001\n"
        "network.filter_count = 128\n"
        "homeostasis.t_expected=0.9\n"
        "\n"
        "run.seed = 42\n");
    CHECK(cfg.dataset == DatasetKind::stl10);
    CHECK(cfg.dataset_dir == "/data/stl10");
    CHECK(cfg.preproc == PreprocMode::dog_gray);
    CHECK(cfg.epsilon == doctest::Approx(0.001));
    CHECK(cfg.filter_count == 128);
    CHECK(cfg.homeostasis.t_expected == doctest::Approx(0.9));
    CHECK(cfg.seed == 42);
}

TEST_CASE("unknown keys are rejected") {
    CHECK_THROWS_AS(parse_config_string("whitening.epsilonn = 0.1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_string("bogus = 1\n"), ConfigError);
}

TEST_CASE("malformed values and lines are rejected") {
    CHECK_THROWS_AS(parse_config_string("whitening.epsilon = lots\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_string("train.epochs = -3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_string("just a line\n"), ConfigError);
}

TEST_CASE("validation mirrors module invariants") {
    CHECK_THROWS_AS(parse_config_string("whitening.ratio = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_string("whitening.epsilon = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_string("dog.kernel_size = 6\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_string("dog.sigma_surround = 0.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_string("homeostasis.t_expected = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_string("stdp.w_min = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_string("train.annealing = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_string("network.stride = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_string("network.padding = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_string("run.count = 0\n"), ConfigError);
    CHECK_THROWS_AS(
        parse_config_string("neuron.v_rest = 11\n"), // above threshold mean
        ConfigError);
}

TEST_CASE("missing config file is a config error") {
    CHECK_THROWS_AS(load_config("does/not/exist.cfg"), ConfigError);
}

TEST_SUITE_END();
