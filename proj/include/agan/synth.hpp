#ifndef AGAN_SYNTH_HPP
#define AGAN_SYNTH_HPP

#include <cstdint>
#include <string>

#include "agan/data.hpp"

namespace agan {

/// Procedurally generated 28x28x1 digit images: a fixed glyph per class
/// rendered through random affine jitter (rotation, scale, shear, shift),
/// stroke softening, intensity jitter and pixel noise. Drop-in desk-scale
/// stand-in for handwritten-digit data when the real IDX files are not on
/// disk; the formats and pipeline are identical either way.
ImageBatch synth_digits(int count, std::uint64_t seed);

/// Procedurally generated 32x32x3 images, one colored shape/texture family
/// per class with pose and color jitter.
ImageBatch synth_objects(int count, std::uint64_t seed);

/// Writes synth_digits output as canonical IDX pairs
/// (train-images-idx3-ubyte / train-labels-idx1-ubyte, and t10k-*).
void write_synth_mnist_files(const std::string& dir, int train_count,
                             int test_count, std::uint64_t seed);

/// Writes synth_objects output in the CIFAR-10 binary batch layout
/// (data_batch_1.bin, test_batch.bin).
void write_synth_cifar_files(const std::string& dir, int train_count,
                             int test_count, std::uint64_t seed);

}  // namespace agan

#endif  // AGAN_SYNTH_HPP
