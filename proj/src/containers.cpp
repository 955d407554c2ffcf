#include "spikewhite/containers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "spikewhite/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "containers are little-endian; big-endian hosts need byte swapping");

namespace spikewhite {

namespace {

class Writer {
public:
    explicit Writer(const std::string& path) : path_(path), f_(path, std::ios::binary | std::ios::trunc) {
        if (!f_) {
            throw FormatError("cannot open for writing: " + path);
        }
    }
    void magic(const char m[4]) { f_.write(m, 4); }
    void u32(std::uint32_t v) { f_.write(reinterpret_cast<const char*>(&v), 4); }
    void i32(std::int32_t v) { f_.write(reinterpret_cast<const char*>(&v), 4); }
    void u8(std::uint8_t v) { f_.write(reinterpret_cast<const char*>(&v), 1); }
    void f64(double v) { f_.write(reinterpret_cast<const char*>(&v), 8); }
    void f64s(const std::vector<double>& v) {
        f_.write(reinterpret_cast<const char*>(v.data()),
                 static_cast<std::streamsize>(v.size() * 8));
    }
    void close() {
        f_.flush();
        if (!f_) {
            throw FormatError("write failed: " + path_);
        }
    }

private:
    std::string path_;
    std::ofstream f_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : path_(path), f_(path, std::ios::binary) {
        if (!f_) {
            throw FormatError("cannot open file: " + path);
        }
    }
    void magic(const char expect[4]) {
        char m[4];
        read(m, 4);
        if (std::memcmp(m, expect, 4) != 0) {
            throw FormatError("bad magic in " + path_);
        }
    }
    std::uint32_t u32() {
        std::uint32_t v;
        read(&v, 4);
        return v;
    }
    std::int32_t i32() {
        std::int32_t v;
        read(&v, 4);
        return v;
    }
    std::uint8_t u8() {
        std::uint8_t v;
        read(&v, 1);
        return v;
    }
    double f64() {
        double v;
        read(&v, 8);
        return v;
    }
    void f64s(std::vector<double>& v, std::size_t count) {
        v.resize(count);
        read(v.data(), count * 8);
    }

private:
    void read(void* dst, std::size_t bytes) {
        f_.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(bytes));
        if (!f_) {
            throw FormatError("truncated file: " + path_);
        }
    }
    std::string path_;
    std::ifstream f_;
};

constexpr std::uint32_t kVersion = 1;

} // namespace

void save_whitening(const std::string& path, const WhiteningArtifact& artifact) {
    Writer w(path);
    w.magic("SWWT");
    w.u32(kVersion);
    if (const auto* std_t = std::get_if<StandardTransformFile>(&artifact)) {
        w.u8(0);
        w.u32(static_cast<std::uint32_t>(std_t->height));
        w.u32(static_cast<std::uint32_t>(std_t->width));
        w.u32(static_cast<std::uint32_t>(std_t->channels));
        w.f64(std_t->transform.epsilon);
        w.f64(std_t->transform.ratio);
        w.f64s(std_t->transform.mean);
        w.f64s(std_t->transform.w.data());
    } else {
        const auto& k = std::get<WhiteningKernels>(artifact);
        w.u8(1);
        w.u32(static_cast<std::uint32_t>(k.patch_w));
        w.u32(static_cast<std::uint32_t>(k.patch_h));
        w.u32(static_cast<std::uint32_t>(k.channels));
        w.f64(k.epsilon);
        w.f64(k.ratio);
        w.f64s(k.mean);
        for (const Tensor3& t : k.kernels) {
            w.f64s(t.data);
        }
    }
    w.close();
}

WhiteningArtifact load_whitening(const std::string& path) {
    Reader r(path);
    r.magic("SWWT");
    if (r.u32() != kVersion) {
        throw FormatError("unsupported whitening file version: " + path);
    }
    const std::uint8_t kind = r.u8();
    if (kind == 0) {
        StandardTransformFile out;
        out.height = r.u32();
        out.width = r.u32();
        out.channels = r.u32();
        const std::size_t d = out.height * out.width * out.channels;
        out.transform.epsilon = r.f64();
        out.transform.ratio = r.f64();
        r.f64s(out.transform.mean, d);
        out.transform.w = Matrix(d, d);
        r.f64s(out.transform.w.data(), d * d);
        out.transform.retained = std::max<std::size_t>(
            1, static_cast<std::size_t>(
                   std::ceil(out.transform.ratio * static_cast<double>(d))));
        return out;
    }
    if (kind == 1) {
        WhiteningKernels k;
        k.patch_w = r.u32();
        k.patch_h = r.u32();
        k.channels = r.u32();
        const std::size_t d = k.patch_w * k.patch_h * k.channels;
        k.epsilon = r.f64();
        k.ratio = r.f64();
        r.f64s(k.mean, d);
        for (std::size_t c = 0; c < k.channels; ++c) {
            Tensor3 t(k.patch_h, k.patch_w, k.channels);
            r.f64s(t.data, d);
            k.kernels.push_back(std::move(t));
        }
        k.channel_mean.assign(k.channels, 0.0);
        for (std::size_t y = 0; y < k.patch_h; ++y) {
            for (std::size_t x = 0; x < k.patch_w; ++x) {
                for (std::size_t c = 0; c < k.channels; ++c) {
                    k.channel_mean[c] += k.mean[flat_index(y, x, c, k.patch_w, k.channels)];
                }
            }
        }
        for (double& v : k.channel_mean) {
            v /= static_cast<double>(k.patch_w * k.patch_h);
        }
        return k;
    }
    throw FormatError("unknown whitening artifact kind in " + path);
}

void save_layer(const std::string& path, const SnnLayer& layer, const StdpConfig& stdp) {
    Writer w(path);
    w.magic("SWLY");
    w.u32(kVersion);
    w.u32(static_cast<std::uint32_t>(layer.filter_count()));
    w.u32(static_cast<std::uint32_t>(layer.rf_w()));
    w.u32(static_cast<std::uint32_t>(layer.rf_h()));
    w.u32(static_cast<std::uint32_t>(layer.rf_channels()));
    const NeuronConfig& n = layer.neuron();
    w.f64(n.capacitance);
    w.f64(n.v_rest);
    w.f64(n.threshold_init_mean);
    w.f64(n.threshold_init_std);
    w.f64(stdp.lr_init);
    w.f64(stdp.beta);
    w.f64(stdp.w_min);
    w.f64(stdp.w_max);
    w.f64(stdp.ltp_window);
    w.f64s(layer.thresholds());
    w.f64s(layer.weights().data());
    w.close();
}

LayerFile load_layer(const std::string& path) {
    Reader r(path);
    r.magic("SWLY");
    if (r.u32() != kVersion) {
        throw FormatError("unsupported layer file version: " + path);
    }
    const std::size_t filter_count = r.u32();
    const std::size_t rf_w = r.u32();
    const std::size_t rf_h = r.u32();
    const std::size_t rf_c = r.u32();
    NeuronConfig n;
    n.capacitance = r.f64();
    n.v_rest = r.f64();
    n.threshold_init_mean = r.f64();
    n.threshold_init_std = r.f64();
    LayerFile out;
    out.stdp.lr_init = r.f64();
    out.stdp.beta = r.f64();
    out.stdp.w_min = r.f64();
    out.stdp.w_max = r.f64();
    out.stdp.ltp_window = r.f64();
    std::vector<double> thresholds;
    r.f64s(thresholds, filter_count);
    Matrix weights(filter_count, rf_w * rf_h * rf_c);
    r.f64s(weights.data(), filter_count * rf_w * rf_h * rf_c);
    out.layer.assign(rf_w, rf_h, rf_c, n, std::move(weights), std::move(thresholds));
    return out;
}

void save_features(const std::string& path, const std::vector<FeatureVector>& features,
                   int class_count) {
    if (features.empty()) {
        throw DataError("save_features: nothing to save");
    }
    const std::size_t dim = features.front().values.size();
    Writer w(path);
    w.magic("SWFV");
    w.u32(kVersion);
    w.u32(static_cast<std::uint32_t>(features.size()));
    w.u32(static_cast<std::uint32_t>(dim));
    w.u32(static_cast<std::uint32_t>(class_count));
    for (const FeatureVector& f : features) {
        if (f.values.size() != dim) {
            throw ShapeError("save_features: inconsistent feature dimensions");
        }
        w.i32(f.label);
        w.f64s(f.values);
    }
    w.close();
}

FeatureFile load_features(const std::string& path) {
    Reader r(path);
    r.magic("SWFV");
    if (r.u32() != kVersion) {
        throw FormatError("unsupported feature file version: " + path);
    }
    const std::size_t count = r.u32();
    const std::size_t dim = r.u32();
    FeatureFile out;
    out.class_count = static_cast<int>(r.u32());
    out.features.resize(count);
    for (FeatureVector& f : out.features) {
        f.label = r.i32();
        r.f64s(f.values, dim);
    }
    return out;
}

} // namespace spikewhite
