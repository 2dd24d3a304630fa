#include "agan/image_io.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>

#include "agan/errors.hpp"

namespace agan {

namespace {

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[4],
               const std::vector<std::uint8_t>& data) {
  put_be32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, out.data() + crc_start,
              static_cast<uInt>(out.size() - crc_start));
  put_be32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

std::uint8_t quantize_pixel(float v) {
  const long q = std::lround(v * 255.0f);
  return static_cast<std::uint8_t>(q < 0 ? 0 : (q > 255 ? 255 : q));
}

void write_png(const std::string& path, int width, int height, int channels,
               const std::vector<std::uint8_t>& pixels) {
  if (channels != 1 && channels != 3)
    throw ArgumentError("png writer supports 1 or 3 channels");
  if (pixels.size() != static_cast<std::size_t>(width) * height * channels)
    throw ArgumentError("pixel buffer size mismatch");

  // Filter byte 0 in front of every scanline.
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(height) * (1 + width * channels));
  for (int y = 0; y < height; ++y) {
    raw.push_back(0);
    const std::uint8_t* row =
        pixels.data() + static_cast<std::size_t>(y) * width * channels;
    raw.insert(raw.end(), row, row + static_cast<std::size_t>(width) * channels);
  }
  uLongf comp_len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> comp(comp_len);
  if (compress2(comp.data(), &comp_len, raw.data(),
                static_cast<uLong>(raw.size()), 6) != Z_OK)
    throw IoError("zlib compression failed");
  comp.resize(comp_len);

  std::vector<std::uint8_t> png = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
  std::vector<std::uint8_t> ihdr;
  put_be32(ihdr, static_cast<std::uint32_t>(width));
  put_be32(ihdr, static_cast<std::uint32_t>(height));
  ihdr.push_back(8);                              // bit depth
  ihdr.push_back(channels == 1 ? 0 : 2);          // gray / truecolor
  ihdr.push_back(0);                              // compression
  ihdr.push_back(0);                              // filter
  ihdr.push_back(0);                              // no interlace
  put_chunk(png, "IHDR", ihdr);
  put_chunk(png, "IDAT", comp);
  put_chunk(png, "IEND", {});

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(png.data()),
            static_cast<std::streamsize>(png.size()));
  if (!out) throw IoError("failed writing " + path);
}

PngInfo read_png_info(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::uint8_t head[33];
  in.read(reinterpret_cast<char*>(head), sizeof(head));
  if (!in) throw FormatError("png header truncated: " + path);
  static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
  if (std::memcmp(head, sig, 8) != 0 || std::memcmp(head + 12, "IHDR", 4) != 0)
    throw FormatError("not a png file: " + path);
  PngInfo info;
  info.width = (head[16] << 24) | (head[17] << 16) | (head[18] << 8) | head[19];
  info.height = (head[20] << 24) | (head[21] << 16) | (head[22] << 8) | head[23];
  info.channels = head[25] == 0 ? 1 : (head[25] == 2 ? 3 : -1);
  return info;
}

std::vector<std::uint8_t> compose_grid(const std::vector<Tensor<float>>& cells,
                                       int rows, int cols, int cell_h,
                                       int cell_w, int channels, int pad,
                                       int* out_w, int* out_h) {
  if (static_cast<int>(cells.size()) != rows * cols)
    throw ArgumentError("cell count does not match grid layout");
  const int w = cols * cell_w + (cols + 1) * pad;
  const int h = rows * cell_h + (rows + 1) * pad;
  std::vector<std::uint8_t> out(static_cast<std::size_t>(w) * h * channels, 0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const Tensor<float>& cell = cells[static_cast<std::size_t>(r) * cols + c];
      if (cell.ndim() != 3 || cell.dim(0) != cell_h || cell.dim(1) != cell_w ||
          cell.dim(2) != channels)
        throw ArgumentError("grid cell has wrong shape");
      const int y0 = pad + r * (cell_h + pad);
      const int x0 = pad + c * (cell_w + pad);
      for (int y = 0; y < cell_h; ++y)
        for (int x = 0; x < cell_w; ++x)
          for (int ch = 0; ch < channels; ++ch)
            out[(static_cast<std::size_t>(y0 + y) * w + (x0 + x)) * channels + ch] =
                quantize_pixel(
                    cell[(static_cast<std::size_t>(y) * cell_w + x) * channels + ch]);
    }
  }
  if (out_w) *out_w = w;
  if (out_h) *out_h = h;
  return out;
}

}  // namespace agan
