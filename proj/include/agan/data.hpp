#ifndef AGAN_DATA_HPP
#define AGAN_DATA_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "agan/tensor.hpp"

namespace agan {

enum class DatasetName { kMnist, kCifar10 };

struct DatasetSpec {
  DatasetName name = DatasetName::kMnist;
  int image_height = 28;
  int image_width = 28;
  int channels = 1;
  int num_classes = 10;

  int flat_dim() const { return image_height * image_width * channels; }

  static DatasetSpec mnist() { return {DatasetName::kMnist, 28, 28, 1, 10}; }
  static DatasetSpec cifar10() {
    return {DatasetName::kCifar10, 32, 32, 3, 10};
  }
};

DatasetSpec dataset_spec_by_name(const std::string& name);
std::string dataset_name_string(DatasetName name);

/// A labelled batch of images: pixels in [0,1], shape [B,H,W,C]; labels
/// in [0, num_classes).
struct ImageBatch {
  Tensor<float> images;        // [B, H, W, C]
  std::vector<int> labels;     // [B]

  int count() const { return images.empty() ? 0 : images.dim(0); }
  int height() const { return images.dim(1); }
  int width() const { return images.dim(2); }
  int channels() const { return images.dim(3); }

  /// Throws unless pixel range, label range, and batch agreement hold.
  void validate(int num_classes) const;
};

/// Reads an IDX image/label file pair (big-endian magic 0x00000803 for
/// images, 0x00000801 for labels). Pixels are rescaled from [0,255] bytes
/// to [0,1] floats.
ImageBatch load_mnist_idx(const std::string& images_path,
                          const std::string& labels_path);

/// Reads CIFAR-10 binary batches: files of 3073-byte records, one label
/// byte followed by 3072 channel-planar pixel bytes, reassembled as
/// [B,32,32,3] HWC in [0,1].
ImageBatch load_cifar10_binary(const std::vector<std::string>& batch_paths);

/// Writers for the same two formats (used by the dataset synthesizer and
/// by tests). Images must already satisfy ImageBatch invariants.
void write_mnist_idx(const ImageBatch& data, const std::string& images_path,
                     const std::string& labels_path);
void write_cifar10_binary(const ImageBatch& data, const std::string& path);

/// Partitions data into batches of batch_size (last batch may be short).
/// With shuffle on, the permutation is a pure function of seed
/// (Fisher-Yates over mt19937, independent of the standard library's
/// std::shuffle).
std::vector<ImageBatch> make_batches(const ImageBatch& data, int batch_size,
                                     std::uint64_t seed, bool shuffle);

/// Copies the selected rows into a new batch.
ImageBatch take_rows(const ImageBatch& data, const std::vector<int>& rows);

/// First n rows (n clamped to the available count).
ImageBatch take_prefix(const ImageBatch& data, int n);

}  // namespace agan

#endif  // AGAN_DATA_HPP
