#pragma once

// Shared helpers for the test binaries: a minimal PNG decoder used as the
// round-trip oracle for exported images, and writers for tiny dataset files.

#include <zlib.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace testutil {

struct DecodedPng {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<unsigned char> rgb; // height*width*3
};

inline std::vector<unsigned char> read_all(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open " + path);
    }
    f.seekg(0, std::ios::end);
    const auto n = f.tellg();
    f.seekg(0, std::ios::beg);
    std::vector<unsigned char> bytes(static_cast<std::size_t>(n));
    f.read(reinterpret_cast<char*>(bytes.data()), n);
    return bytes;
}

inline std::uint32_t be32(const unsigned char* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

// Decodes 8-bit RGB PNGs with filter type 0 rows (what the project writer emits).
inline DecodedPng decode_png_rgb8(const std::string& path) {
    const auto bytes = read_all(path);
    if (bytes.size() < 8 || bytes[1] != 'P' || bytes[2] != 'N' || bytes[3] != 'G') {
        throw std::runtime_error("not a PNG: " + path);
    }
    DecodedPng out;
    std::vector<unsigned char> idat;
    std::size_t pos = 8;
    while (pos + 8 <= bytes.size()) {
        const std::uint32_t len = be32(&bytes[pos]);
        const std::string type(reinterpret_cast<const char*>(&bytes[pos + 4]), 4);
        const unsigned char* data = &bytes[pos + 8];
        if (type == "IHDR") {
            out.width = be32(data);
            out.height = be32(&data[4]);
            if (data[8] != 8 || data[9] != 2) {
                throw std::runtime_error("unsupported PNG format");
            }
        } else if (type == "IDAT") {
            idat.insert(idat.end(), data, data + len);
        } else if (type == "IEND") {
            break;
        }
        pos += 12 + len;
    }
    const std::size_t row_bytes = out.width * 3 + 1;
    std::vector<unsigned char> raw(out.height * row_bytes);
    uLongf raw_size = static_cast<uLongf>(raw.size());
    if (uncompress(raw.data(), &raw_size, idat.data(), static_cast<uLong>(idat.size())) !=
            Z_OK ||
        raw_size != raw.size()) {
        throw std::runtime_error("PNG inflate failed");
    }
    out.rgb.resize(out.height * out.width * 3);
    for (std::size_t y = 0; y < out.height; ++y) {
        if (raw[y * row_bytes] != 0) {
            throw std::runtime_error("unexpected PNG row filter");
        }
        std::copy(raw.begin() + static_cast<std::ptrdiff_t>(y * row_bytes + 1),
                  raw.begin() + static_cast<std::ptrdiff_t>((y + 1) * row_bytes),
                  out.rgb.begin() + static_cast<std::ptrdiff_t>(y * out.width * 3));
    }
    return out;
}

/// Fresh scratch directory under the current working directory.
inline std::string scratch_dir(const std::string& name) {
    const std::filesystem::path dir = std::filesystem::path("scratch") / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

inline void write_bytes(const std::string& path, const std::vector<unsigned char>& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

} // namespace testutil
