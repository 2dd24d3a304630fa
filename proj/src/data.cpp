#include "agan/data.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "agan/errors.hpp"
#include "agan/rng.hpp"

namespace agan {

namespace {

constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;
constexpr std::size_t kCifarRecordBytes = 3073;  // 1 label + 32*32*3 pixels

std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open file: " + path);
  in.seekg(0, std::ios::end);
  const std::streamoff len = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<unsigned char> buf(static_cast<std::size_t>(len));
  if (len > 0) in.read(reinterpret_cast<char*>(buf.data()), len);
  if (!in) throw FormatError("failed reading file: " + path);
  return buf;
}

std::uint32_t be32(const unsigned char* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
         (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

void put_be32(std::uint32_t v, std::ofstream& out) {
  unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace

DatasetSpec dataset_spec_by_name(const std::string& name) {
  if (name == "mnist") return DatasetSpec::mnist();
  if (name == "cifar10") return DatasetSpec::cifar10();
  throw ArgumentError("unknown dataset: " + name);
}

std::string dataset_name_string(DatasetName name) {
  return name == DatasetName::kMnist ? "mnist" : "cifar10";
}

void ImageBatch::validate(int num_classes) const {
  if (images.ndim() != 4) throw ArgumentError("image tensor must be [B,H,W,C]");
  if (count() < 1) throw ArgumentError("batch must hold at least one sample");
  if (static_cast<int>(labels.size()) != count())
    throw ArgumentError("labels and images disagree on batch size");
  for (float v : images.vec())
    if (!(v >= 0.0f && v <= 1.0f))
      throw ArgumentError("pixel value outside [0,1]");
  for (int l : labels)
    if (l < 0 || l >= num_classes) throw ArgumentError("label out of range");
}

ImageBatch load_mnist_idx(const std::string& images_path,
                          const std::string& labels_path) {
  const auto img = read_file(images_path);
  if (img.size() < 16) throw FormatError("IDX image header truncated");
  if (be32(img.data()) != kIdxImagesMagic)
    throw FormatError("bad IDX image magic in " + images_path);
  const std::size_t n = be32(img.data() + 4);
  const std::size_t h = be32(img.data() + 8);
  const std::size_t w = be32(img.data() + 12);
  if (img.size() != 16 + n * h * w)
    throw FormatError("IDX image payload truncated in " + images_path);

  const auto lab = read_file(labels_path);
  if (lab.size() < 8) throw FormatError("IDX label header truncated");
  if (be32(lab.data()) != kIdxLabelsMagic)
    throw FormatError("bad IDX label magic in " + labels_path);
  const std::size_t ln = be32(lab.data() + 4);
  if (lab.size() != 8 + ln) throw FormatError("IDX label payload truncated");
  if (ln != n)
    throw ConsistencyError("image/label counts differ: " + std::to_string(n) +
                           " vs " + std::to_string(ln));

  ImageBatch out;
  out.images = Tensor<float>({static_cast<int>(n), static_cast<int>(h),
                              static_cast<int>(w), 1});
  for (std::size_t i = 0; i < n * h * w; ++i)
    out.images[i] = static_cast<float>(img[16 + i]) / 255.0f;
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.labels[i] = lab[8 + i];
  return out;
}

ImageBatch load_cifar10_binary(const std::vector<std::string>& batch_paths) {
  if (batch_paths.empty()) throw ArgumentError("no CIFAR-10 batch files given");
  std::vector<unsigned char> all;
  for (const auto& p : batch_paths) {
    const auto buf = read_file(p);
    if (buf.size() % kCifarRecordBytes != 0)
      throw FormatError("file length " + std::to_string(buf.size()) +
                        " is not a multiple of 3073: " + p);
    all.insert(all.end(), buf.begin(), buf.end());
  }
  const std::size_t n = all.size() / kCifarRecordBytes;
  if (n == 0) throw FormatError("no CIFAR-10 records found");
  ImageBatch out;
  out.images = Tensor<float>({static_cast<int>(n), 32, 32, 3});
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char* rec = all.data() + i * kCifarRecordBytes;
    if (rec[0] >= 10)
      throw FormatError("CIFAR-10 label byte out of range: " +
                        std::to_string(int(rec[0])));
    out.labels[i] = rec[0];
    // channel-planar (R plane, G plane, B plane) -> interleaved HWC
    float* dst = out.images.data() + i * (32 * 32 * 3);
    for (int c = 0; c < 3; ++c)
      for (int px = 0; px < 32 * 32; ++px)
        dst[px * 3 + c] = static_cast<float>(rec[1 + c * 1024 + px]) / 255.0f;
  }
  return out;
}

void write_mnist_idx(const ImageBatch& data, const std::string& images_path,
                     const std::string& labels_path) {
  const int n = data.count(), h = data.height(), w = data.width();
  if (data.channels() != 1)
    throw ArgumentError("IDX writer expects single-channel images");
  std::ofstream img(images_path, std::ios::binary);
  if (!img) throw IoError("cannot write " + images_path);
  put_be32(kIdxImagesMagic, img);
  put_be32(static_cast<std::uint32_t>(n), img);
  put_be32(static_cast<std::uint32_t>(h), img);
  put_be32(static_cast<std::uint32_t>(w), img);
  for (std::size_t i = 0; i < data.images.size(); ++i) {
    const float v = data.images[i];
    const int q = static_cast<int>(std::lround(v * 255.0f));
    img.put(static_cast<char>(std::clamp(q, 0, 255)));
  }
  if (!img) throw IoError("failed writing " + images_path);

  std::ofstream lab(labels_path, std::ios::binary);
  if (!lab) throw IoError("cannot write " + labels_path);
  put_be32(kIdxLabelsMagic, lab);
  put_be32(static_cast<std::uint32_t>(n), lab);
  for (int l : data.labels) lab.put(static_cast<char>(l));
  if (!lab) throw IoError("failed writing " + labels_path);
}

void write_cifar10_binary(const ImageBatch& data, const std::string& path) {
  if (data.height() != 32 || data.width() != 32 || data.channels() != 3)
    throw ArgumentError("CIFAR-10 writer expects [B,32,32,3] images");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  for (int i = 0; i < data.count(); ++i) {
    out.put(static_cast<char>(data.labels[static_cast<std::size_t>(i)]));
    const float* src = data.images.data() + static_cast<std::size_t>(i) * 3072;
    for (int c = 0; c < 3; ++c)
      for (int px = 0; px < 32 * 32; ++px) {
        const int q = static_cast<int>(std::lround(src[px * 3 + c] * 255.0f));
        out.put(static_cast<char>(std::clamp(q, 0, 255)));
      }
  }
  if (!out) throw IoError("failed writing " + path);
}

ImageBatch take_rows(const ImageBatch& data, const std::vector<int>& rows) {
  const std::size_t px = static_cast<std::size_t>(data.height()) *
                         data.width() * data.channels();
  ImageBatch out;
  out.images = Tensor<float>({static_cast<int>(rows.size()), data.height(),
                              data.width(), data.channels()});
  out.labels.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int r = rows[i];
    if (r < 0 || r >= data.count()) throw ArgumentError("row index out of range");
    std::copy_n(data.images.data() + static_cast<std::size_t>(r) * px, px,
                out.images.data() + i * px);
    out.labels[i] = data.labels[static_cast<std::size_t>(r)];
  }
  return out;
}

ImageBatch take_prefix(const ImageBatch& data, int n) {
  n = std::min(n, data.count());
  std::vector<int> rows(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = i;
  return take_rows(data, rows);
}

std::vector<ImageBatch> make_batches(const ImageBatch& data, int batch_size,
                                     std::uint64_t seed, bool shuffle) {
  if (batch_size == 0) throw ArgumentError("batch_size must be positive");
  if (batch_size < 0) throw ArgumentError("batch_size must be positive");
  const int n = data.count();
  if (batch_size > n)
    throw ArgumentError("batch_size exceeds sample count");
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  if (shuffle) {
    // Hand-rolled Fisher-Yates so the permutation depends only on the seed.
    auto rng = make_rng(seed, RngStream::kShuffle);
    for (int i = n - 1; i > 0; --i) {
      std::uniform_int_distribution<int> pick(0, i);
      std::swap(order[static_cast<std::size_t>(i)],
                order[static_cast<std::size_t>(pick(rng))]);
    }
  }
  std::vector<ImageBatch> out;
  for (int start = 0; start < n; start += batch_size) {
    const int end = std::min(start + batch_size, n);
    std::vector<int> rows(order.begin() + start, order.begin() + end);
    out.push_back(take_rows(data, rows));
  }
  return out;
}

}  // namespace agan
