#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace spikewhite {

/// Write an 8-bit RGB PNG. `rgb` holds height*width*3 bytes, row-major.
void write_png_rgb8(const std::string& path, std::size_t width, std::size_t height,
                    const std::vector<unsigned char>& rgb);

} // namespace spikewhite
