#include "spikewhite/png_io.hpp"

#include <zlib.h>

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "spikewhite/errors.hpp"

namespace spikewhite {

namespace {

void put_u32_be(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v >> 24));
    out.push_back(static_cast<unsigned char>(v >> 16));
    out.push_back(static_cast<unsigned char>(v >> 8));
    out.push_back(static_cast<unsigned char>(v));
}

void put_chunk(std::vector<unsigned char>& out, const char type[4],
               const std::vector<unsigned char>& payload) {
    put_u32_be(out, static_cast<std::uint32_t>(payload.size()));
    const std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    const uLong crc =
        crc32(0L, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start));
    put_u32_be(out, static_cast<std::uint32_t>(crc));
}

} // namespace

void write_png_rgb8(const std::string& path, std::size_t width, std::size_t height,
                    const std::vector<unsigned char>& rgb) {
    if (rgb.size() != width * height * 3) {
        throw ShapeError("write_png_rgb8: buffer size does not match dimensions");
    }

    // Raw scanlines, filter type 0 per row.
    std::vector<unsigned char> raw;
    raw.reserve(height * (width * 3 + 1));
    for (std::size_t y = 0; y < height; ++y) {
        raw.push_back(0);
        const unsigned char* row = rgb.data() + y * width * 3;
        raw.insert(raw.end(), row, row + width * 3);
    }

    uLongf comp_size = compressBound(static_cast<uLong>(raw.size()));
    std::vector<unsigned char> compressed(comp_size);
    if (compress2(compressed.data(), &comp_size, raw.data(), static_cast<uLong>(raw.size()),
                  9) != Z_OK) {
        throw FormatError("write_png_rgb8: zlib compression failed");
    }
    compressed.resize(comp_size);

    std::vector<unsigned char> file;
    static const unsigned char signature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    file.insert(file.end(), signature, signature + 8);

    std::vector<unsigned char> ihdr;
    put_u32_be(ihdr, static_cast<std::uint32_t>(width));
    put_u32_be(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8); // bit depth
    ihdr.push_back(2); // color type: truecolor RGB
    ihdr.push_back(0); // compression
    ihdr.push_back(0); // filter method
    ihdr.push_back(0); // no interlace
    put_chunk(file, "IHDR", ihdr);
    put_chunk(file, "IDAT", compressed);
    put_chunk(file, "IEND", {});

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw FormatError("write_png_rgb8: cannot open for writing: " + path);
    }
    f.write(reinterpret_cast<const char*>(file.data()),
            static_cast<std::streamsize>(file.size()));
    if (!f) {
        throw FormatError("write_png_rgb8: write failed: " + path);
    }
}

} // namespace spikewhite
