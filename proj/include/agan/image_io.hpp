#ifndef AGAN_IMAGE_IO_HPP
#define AGAN_IMAGE_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "agan/tensor.hpp"

namespace agan {

/// Minimal lossless PNG writer (8-bit gray or RGB, filter 0, fixed zlib
/// level) — output bytes are a pure function of the pixel data.
void write_png(const std::string& path, int width, int height, int channels,
               const std::vector<std::uint8_t>& pixels);

/// Parses width/height/channels from a PNG header (for tests and sanity
/// checks; not a general decoder).
struct PngInfo {
  int width = 0;
  int height = 0;
  int channels = 0;
};
PngInfo read_png_info(const std::string& path);

/// Tiles cells (each [H,W,C] in [0,1], given in row-major cell order) into
/// one byte image with `pad` background pixels between cells.
std::vector<std::uint8_t> compose_grid(const std::vector<Tensor<float>>& cells,
                                       int rows, int cols, int cell_h,
                                       int cell_w, int channels, int pad,
                                       int* out_w, int* out_h);

/// round(v*255) clamped to [0,255].
std::uint8_t quantize_pixel(float v);

}  // namespace agan

#endif  // AGAN_IMAGE_IO_HPP
