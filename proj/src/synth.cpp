#include "agan/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <random>

#include "agan/rng.hpp"

namespace agan {

namespace {

// 5x7 digit glyphs, '#' = ink.
const std::array<std::array<const char*, 7>, 10> kGlyphs = {{
    {" ### ", "#   #", "#  ##", "# # #", "##  #", "#   #", " ### "},  // 0
    {"  #  ", " ##  ", "  #  ", "  #  ", "  #  ", "  #  ", " ### "},  // 1
    {" ### ", "#   #", "    #", "   # ", "  #  ", " #   ", "#####"},  // 2
    {" ### ", "#   #", "    #", "  ## ", "    #", "#   #", " ### "},  // 3
    {"   # ", "  ## ", " # # ", "#  # ", "#####", "   # ", "   # "},  // 4
    {"#####", "#    ", "#### ", "    #", "    #", "#   #", " ### "},  // 5
    {" ### ", "#    ", "#    ", "#### ", "#   #", "#   #", " ### "},  // 6
    {"#####", "    #", "   # ", "  #  ", "  #  ", " #   ", " #   "},  // 7
    {" ### ", "#   #", "#   #", " ### ", "#   #", "#   #", " ### "},  // 8
    {" ### ", "#   #", "#   #", " ####", "    #", "    #", " ### "},  // 9
}};

constexpr int kDigitSize = 28;
constexpr int kGlyphUp = 4;  // upscale factor for the base bitmap

// Base bitmap: glyph upscaled to 20x28-ish, centered in 28x28, softened by
// one box-blur pass so strokes have soft edges like scanned handwriting.
std::array<float, kDigitSize * kDigitSize> make_base(int digit) {
  std::array<float, kDigitSize * kDigitSize> img{};
  const int gw = 5 * kGlyphUp, gh = 7 * kGlyphUp;
  const int x0 = (kDigitSize - gw) / 2, y0 = (kDigitSize - gh) / 2;
  for (int gy = 0; gy < 7; ++gy)
    for (int gx = 0; gx < 5; ++gx) {
      if (kGlyphs[static_cast<std::size_t>(digit)][gy][gx] != '#') continue;
      for (int dy = 0; dy < kGlyphUp; ++dy)
        for (int dx = 0; dx < kGlyphUp; ++dx) {
          const int y = y0 + gy * kGlyphUp + dy;
          const int x = x0 + gx * kGlyphUp + dx;
          img[static_cast<std::size_t>(y) * kDigitSize + x] = 1.0f;
        }
    }
  std::array<float, kDigitSize * kDigitSize> soft{};
  for (int y = 0; y < kDigitSize; ++y)
    for (int x = 0; x < kDigitSize; ++x) {
      float acc = 0.0f;
      int cnt = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int yy = y + dy, xx = x + dx;
          if (yy < 0 || yy >= kDigitSize || xx < 0 || xx >= kDigitSize) continue;
          acc += img[static_cast<std::size_t>(yy) * kDigitSize + xx];
          ++cnt;
        }
      soft[static_cast<std::size_t>(y) * kDigitSize + x] = acc / cnt;
    }
  return soft;
}

float bilinear(const std::array<float, kDigitSize * kDigitSize>& img, float y,
               float x) {
  if (y < 0 || x < 0 || y > kDigitSize - 1 || x > kDigitSize - 1) return 0.0f;
  const int y0 = static_cast<int>(y), x0 = static_cast<int>(x);
  const int y1 = std::min(y0 + 1, kDigitSize - 1);
  const int x1 = std::min(x0 + 1, kDigitSize - 1);
  const float fy = y - y0, fx = x - x0;
  const float a = img[static_cast<std::size_t>(y0) * kDigitSize + x0];
  const float b = img[static_cast<std::size_t>(y0) * kDigitSize + x1];
  const float c = img[static_cast<std::size_t>(y1) * kDigitSize + x0];
  const float d = img[static_cast<std::size_t>(y1) * kDigitSize + x1];
  return a * (1 - fy) * (1 - fx) + b * (1 - fy) * fx + c * fy * (1 - fx) +
         d * fy * fx;
}

}  // namespace

ImageBatch synth_digits(int count, std::uint64_t seed) {
  static const auto bases = [] {
    std::array<std::array<float, kDigitSize * kDigitSize>, 10> b;
    for (int d = 0; d < 10; ++d) b[static_cast<std::size_t>(d)] = make_base(d);
    return b;
  }();

  auto rng = make_rng(seed, RngStream::kInit);
  std::uniform_int_distribution<int> pick_digit(0, 9);
  std::uniform_real_distribution<float> rot(-0.26f, 0.26f);   // ~15 degrees
  std::uniform_real_distribution<float> scale(0.85f, 1.15f);
  std::uniform_real_distribution<float> shear(-0.15f, 0.15f);
  std::uniform_real_distribution<float> shift(-2.5f, 2.5f);
  std::uniform_real_distribution<float> gain(0.75f, 1.0f);
  std::normal_distribution<float> noise(0.0f, 0.03f);

  ImageBatch out;
  out.images = Tensor<float>({count, kDigitSize, kDigitSize, 1});
  out.labels.resize(static_cast<std::size_t>(count));
  const float cx = (kDigitSize - 1) / 2.0f;
  for (int i = 0; i < count; ++i) {
    const int d = pick_digit(rng);
    out.labels[static_cast<std::size_t>(i)] = d;
    const float th = rot(rng), sc = scale(rng), sh = shear(rng);
    const float tx = shift(rng), ty = shift(rng), g = gain(rng);
    // inverse map: output pixel -> source coordinate
    const float ca = std::cos(th) / sc, sa = std::sin(th) / sc;
    float* dst = out.images.data() +
                 static_cast<std::size_t>(i) * kDigitSize * kDigitSize;
    for (int y = 0; y < kDigitSize; ++y)
      for (int x = 0; x < kDigitSize; ++x) {
        const float yr = static_cast<float>(y) - cx - ty;
        const float xr = static_cast<float>(x) - cx - tx;
        const float xs = ca * xr + sa * yr + sh * yr;
        const float ys = -sa * xr + ca * yr;
        float v = g * bilinear(bases[static_cast<std::size_t>(d)], ys + cx,
                               xs + cx);
        v += noise(rng);
        dst[static_cast<std::size_t>(y) * kDigitSize + x] =
            std::clamp(v, 0.0f, 1.0f);
      }
  }
  return out;
}

ImageBatch synth_objects(int count, std::uint64_t seed) {
  auto rng = make_rng(mix_seed(seed, 77), RngStream::kInit);
  std::uniform_int_distribution<int> pick_class(0, 9);
  std::uniform_real_distribution<float> unit(0.0f, 1.0f);
  std::normal_distribution<float> noise(0.0f, 0.04f);

  // One (hue, pattern) family per class.
  const std::array<std::array<float, 3>, 10> hues = {{{0.9f, 0.2f, 0.2f},
                                                      {0.2f, 0.8f, 0.3f},
                                                      {0.2f, 0.4f, 0.9f},
                                                      {0.9f, 0.8f, 0.2f},
                                                      {0.8f, 0.3f, 0.8f},
                                                      {0.2f, 0.8f, 0.8f},
                                                      {0.95f, 0.55f, 0.15f},
                                                      {0.55f, 0.35f, 0.2f},
                                                      {0.6f, 0.6f, 0.65f},
                                                      {0.35f, 0.2f, 0.55f}}};

  ImageBatch out;
  out.images = Tensor<float>({count, 32, 32, 3});
  out.labels.resize(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const int k = pick_class(rng);
    out.labels[static_cast<std::size_t>(i)] = k;
    const int pattern = k % 5;
    const float cx = 12.0f + 8.0f * unit(rng);
    const float cy = 12.0f + 8.0f * unit(rng);
    const float r = 6.0f + 6.0f * unit(rng);
    const float bg = 0.15f + 0.3f * unit(rng);
    const float wobble = unit(rng) * 6.28318f;
    float* dst = out.images.data() + static_cast<std::size_t>(i) * 32 * 32 * 3;
    for (int y = 0; y < 32; ++y)
      for (int x = 0; x < 32; ++x) {
        bool inside = false;
        switch (pattern) {
          case 0:  // disk
            inside = (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r;
            break;
          case 1:  // square
            inside = std::fabs(x - cx) <= r * 0.8f && std::fabs(y - cy) <= r * 0.8f;
            break;
          case 2:  // cross
            inside = std::fabs(x - cx) <= r * 0.3f || std::fabs(y - cy) <= r * 0.3f;
            break;
          case 3:  // horizontal stripes
            inside = std::fmod(y + wobble, 8.0f) < 4.0f;
            break;
          default:  // diagonal stripes
            inside = std::fmod(x + y + wobble, 10.0f) < 5.0f;
            break;
        }
        for (int c = 0; c < 3; ++c) {
          const float base =
              inside ? hues[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)]
                     : bg;
          const float grad = 0.1f * (static_cast<float>(y) / 31.0f);
          dst[(static_cast<std::size_t>(y) * 32 + x) * 3 + c] =
              std::clamp(base + grad + noise(rng), 0.0f, 1.0f);
        }
      }
  }
  return out;
}

void write_synth_mnist_files(const std::string& dir, int train_count,
                             int test_count, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  const ImageBatch train = synth_digits(train_count, seed);
  const ImageBatch test = synth_digits(test_count, mix_seed(seed, 1));
  write_mnist_idx(train, dir + "/train-images-idx3-ubyte",
                  dir + "/train-labels-idx1-ubyte");
  write_mnist_idx(test, dir + "/t10k-images-idx3-ubyte",
                  dir + "/t10k-labels-idx1-ubyte");
}

void write_synth_cifar_files(const std::string& dir, int train_count,
                             int test_count, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  const ImageBatch train = synth_objects(train_count, seed);
  const ImageBatch test = synth_objects(test_count, mix_seed(seed, 1));
  write_cifar10_binary(train, dir + "/data_batch_1.bin");
  write_cifar10_binary(test, dir + "/test_batch.bin");
}

}  // namespace agan
