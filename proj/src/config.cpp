#include "spikewhite/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "spikewhite/errors.hpp"

namespace spikewhite {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) {
            throw std::invalid_argument("");
        }
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for " + key + ": '" + v + "'");
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError("config: bad integer value for " + key + ": '" + v + "'");
    }
    return out;
}

} // namespace

ExperimentConfig parse_config_string(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: line " + std::to_string(line_no) +
                              " is not 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "dataset.name") {
            if (value == "cifar10") {
                cfg.dataset = DatasetKind::cifar10;
            } else if (value == "stl10") {
                cfg.dataset = DatasetKind::stl10;
            } else {
                throw ConfigError("config: unknown dataset.name '" + value + "'");
            }
        } else if (key == "dataset.dir") {
            cfg.dataset_dir = value;
        } else if (key == "dataset.train_limit") {
            cfg.train_limit = to_u64(key, value);
        } else if (key == "dataset.test_limit") {
            cfg.test_limit = to_u64(key, value);
        } else if (key == "preproc.mode") {
            if (value == "standard-zca") {
                cfg.preproc = PreprocMode::standard_zca;
            } else if (value == "kernels") {
                cfg.preproc = PreprocMode::kernels;
            } else if (value == "dog-gray") {
                cfg.preproc = PreprocMode::dog_gray;
            } else if (value == "dog-color") {
                cfg.preproc = PreprocMode::dog_color;
            } else {
                throw ConfigError("config: unknown preproc.mode '" + value + "'");
            }
        } else if (key == "whitening.epsilon") {
            cfg.epsilon = to_double(key, value);
        } else if (key == "whitening.ratio") {
            cfg.ratio = to_double(key, value);
        } else if (key == "whitening.patch_width") {
            cfg.patch_w = to_u64(key, value);
        } else if (key == "whitening.patch_height") {
            cfg.patch_h = to_u64(key, value);
        } else if (key == "whitening.patch_count") {
            cfg.patch_count = to_u64(key, value);
        } else if (key == "whitening.patch_stride") {
            cfg.patch_stride = to_u64(key, value);
        } else if (key == "dog.sigma_center") {
            cfg.dog.sigma_center = to_double(key, value);
        } else if (key == "dog.sigma_surround") {
            cfg.dog.sigma_surround = to_double(key, value);
        } else if (key == "dog.kernel_size") {
            cfg.dog.kernel_size = to_u64(key, value);
        } else if (key == "coding.exposition") {
            cfg.exposition = to_double(key, value);
        } else if (key == "neuron.capacitance") {
            cfg.neuron.capacitance = to_double(key, value);
        } else if (key == "neuron.v_rest") {
            cfg.neuron.v_rest = to_double(key, value);
        } else if (key == "neuron.threshold_init_mean") {
            cfg.neuron.threshold_init_mean = to_double(key, value);
        } else if (key == "neuron.threshold_init_std") {
            cfg.neuron.threshold_init_std = to_double(key, value);
        } else if (key == "homeostasis.t_expected") {
            cfg.homeostasis.t_expected = to_double(key, value);
        } else if (key == "homeostasis.lr_init") {
            cfg.homeostasis.lr_init = to_double(key, value);
        } else if (key == "stdp.lr_init") {
            cfg.stdp.lr_init = to_double(key, value);
        } else if (key == "stdp.beta") {
            cfg.stdp.beta = to_double(key, value);
        } else if (key == "stdp.w_min") {
            cfg.stdp.w_min = to_double(key, value);
        } else if (key == "stdp.w_max") {
            cfg.stdp.w_max = to_double(key, value);
        } else if (key == "stdp.ltp_window") {
            cfg.stdp.ltp_window = to_double(key, value);
        } else if (key == "train.epochs") {
            cfg.epochs = to_u64(key, value);
        } else if (key == "train.annealing") {
            cfg.annealing = to_double(key, value);
        } else if (key == "train.patches_per_epoch") {
            cfg.patches_per_epoch = to_u64(key, value);
        } else if (key == "network.filter_count") {
            cfg.filter_count = to_u64(key, value);
        } else if (key == "network.filter_width") {
            cfg.filter_w = to_u64(key, value);
        } else if (key == "network.filter_height") {
            cfg.filter_h = to_u64(key, value);
        } else if (key == "network.stride") {
            cfg.conv_stride = to_u64(key, value);
        } else if (key == "network.padding") {
            cfg.conv_padding = to_u64(key, value);
        } else if (key == "pool.mode") {
            if (value == "sum") {
                cfg.pool = PoolMode::sum;
            } else if (value == "max") {
                cfg.pool = PoolMode::max;
            } else {
                throw ConfigError("config: unknown pool.mode '" + value + "'");
            }
        } else if (key == "svm.reg") {
            cfg.svm_reg = to_double(key, value);
        } else if (key == "svm.epochs") {
            cfg.svm_epochs = to_u64(key, value);
        } else if (key == "run.count") {
            cfg.run_count = to_u64(key, value);
        } else if (key == "run.seed") {
            cfg.seed = to_u64(key, value);
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }
    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw ConfigError("cannot open config: " + path);
    }
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_config_string(buf.str());
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "dataset.name = " << (cfg.dataset == DatasetKind::cifar10 ? "cifar10" : "stl10")
       << "\n";
    os << "dataset.dir = " << cfg.dataset_dir << "\n";
    os << "dataset.train_limit = " << cfg.train_limit << "\n";
    os << "dataset.test_limit = " << cfg.test_limit << "\n";
    const char* mode = nullptr;
    switch (cfg.preproc) {
        case PreprocMode::standard_zca: mode = "standard-zca"; break;
        case PreprocMode::kernels: mode = "kernels"; break;
        case PreprocMode::dog_gray: mode = "dog-gray"; break;
        case PreprocMode::dog_color: mode = "dog-color"; break;
    }
    os << "preproc.mode = " << mode << "\n";
    os << "whitening.epsilon = " << fmt(cfg.epsilon) << "\n";
    os << "whitening.ratio = " << fmt(cfg.ratio) << "\n";
    os << "whitening.patch_width = " << cfg.patch_w << "\n";
    os << "whitening.patch_height = " << cfg.patch_h << "\n";
    os << "whitening.patch_count = " << cfg.patch_count << "\n";
    os << "whitening.patch_stride = " << cfg.patch_stride << "\n";
    os << "dog.sigma_center = " << fmt(cfg.dog.sigma_center) << "\n";
    os << "dog.sigma_surround = " << fmt(cfg.dog.sigma_surround) << "\n";
    os << "dog.kernel_size = " << cfg.dog.kernel_size << "\n";
    os << "coding.exposition = " << fmt(cfg.exposition) << "\n";
    os << "neuron.capacitance = " << fmt(cfg.neuron.capacitance) << "\n";
    os << "neuron.v_rest = " << fmt(cfg.neuron.v_rest) << "\n";
    os << "neuron.threshold_init_mean = " << fmt(cfg.neuron.threshold_init_mean) << "\n";
    os << "neuron.threshold_init_std = " << fmt(cfg.neuron.threshold_init_std) << "\n";
    os << "homeostasis.t_expected = " << fmt(cfg.homeostasis.t_expected) << "\n";
    os << "homeostasis.lr_init = " << fmt(cfg.homeostasis.lr_init) << "\n";
    os << "stdp.lr_init = " << fmt(cfg.stdp.lr_init) << "\n";
    os << "stdp.beta = " << fmt(cfg.stdp.beta) << "\n";
    os << "stdp.w_min = " << fmt(cfg.stdp.w_min) << "\n";
    os << "stdp.w_max = " << fmt(cfg.stdp.w_max) << "\n";
    os << "stdp.ltp_window = " << fmt(cfg.stdp.ltp_window) << "\n";
    os << "train.epochs = " << cfg.epochs << "\n";
    os << "train.annealing = " << fmt(cfg.annealing) << "\n";
    os << "train.patches_per_epoch = " << cfg.patches_per_epoch << "\n";
    os << "network.filter_count = " << cfg.filter_count << "\n";
    os << "network.filter_width = " << cfg.filter_w << "\n";
    os << "network.filter_height = " << cfg.filter_h << "\n";
    os << "network.stride = " << cfg.conv_stride << "\n";
    os << "network.padding = " << cfg.conv_padding << "\n";
    os << "pool.mode = " << (cfg.pool == PoolMode::sum ? "sum" : "max") << "\n";
    os << "svm.reg = " << fmt(cfg.svm_reg) << "\n";
    os << "svm.epochs = " << cfg.svm_epochs << "\n";
    os << "run.count = " << cfg.run_count << "\n";
    os << "run.seed = " << cfg.seed << "\n";
    return os.str();
}

void validate_config(const ExperimentConfig& cfg) {
    auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
    if (cfg.epsilon <= 0.0) fail("whitening.epsilon must be positive");
    if (cfg.ratio <= 0.0 || cfg.ratio > 1.0) fail("whitening.ratio must be in (0, 1]");
    if (cfg.patch_w == 0 || cfg.patch_h == 0) fail("whitening patch dims must be positive");
    if (cfg.patch_stride == 0) fail("whitening.patch_stride must be positive");
    if (cfg.dog.sigma_center <= 0.0) fail("dog.sigma_center must be positive");
    if (cfg.dog.sigma_surround <= cfg.dog.sigma_center) {
        fail("dog.sigma_surround must exceed dog.sigma_center");
    }
    if (cfg.dog.kernel_size % 2 == 0 || cfg.dog.kernel_size == 0) {
        fail("dog.kernel_size must be odd");
    }
    if (cfg.exposition <= 0.0) fail("coding.exposition must be positive");
    if (cfg.neuron.capacitance <= 0.0) fail("neuron.capacitance must be positive");
    if (cfg.neuron.threshold_init_mean <= cfg.neuron.v_rest) {
        fail("neuron.threshold_init_mean must exceed neuron.v_rest");
    }
    if (cfg.neuron.threshold_init_std < 0.0) fail("neuron.threshold_init_std must be >= 0");
    if (cfg.homeostasis.t_expected <= 0.0 || cfg.homeostasis.t_expected >= cfg.exposition) {
        fail("homeostasis.t_expected must be in (0, exposition)");
    }
    if (cfg.stdp.lr_init <= 0.0) fail("stdp.lr_init must be positive");
    if (cfg.stdp.w_min >= cfg.stdp.w_max) fail("stdp.w_min must be below stdp.w_max");
    if (cfg.stdp.ltp_window <= 0.0) fail("stdp.ltp_window must be positive");
    if (cfg.epochs == 0) fail("train.epochs must be at least 1");
    if (cfg.annealing <= 0.0 || cfg.annealing > 1.0) fail("train.annealing must be in (0, 1]");
    if (cfg.filter_count == 0) fail("network.filter_count must be positive");
    if (cfg.filter_w == 0 || cfg.filter_h == 0) fail("network filter dims must be positive");
    if (cfg.conv_stride != 1) fail("network.stride: only stride 1 is supported");
    if (cfg.conv_padding != 0) fail("network.padding: only padding 0 is supported");
    if (cfg.svm_reg < 0.0) fail("svm.reg must be >= 0 (0 = auto)");
    if (cfg.svm_epochs == 0) fail("svm.epochs must be at least 1");
    if (cfg.run_count == 0) fail("run.count must be at least 1");
}

} // namespace spikewhite
