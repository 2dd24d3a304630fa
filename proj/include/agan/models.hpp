#ifndef AGAN_MODELS_HPP
#define AGAN_MODELS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "agan/nn.hpp"
#include "agan/tensor.hpp"

namespace agan {

struct ImageShape {
  int height = 28;
  int width = 28;
  int channels = 1;
  int flat() const { return height * width * channels; }
  bool operator==(const ImageShape&) const = default;
};

enum class Conditioning { kOneHotConcat, kEmbed };
enum class ModelArch { kMlp, kDcganConv };

std::string conditioning_string(Conditioning c);
Conditioning conditioning_from_string(const std::string& s);
std::string arch_string(ModelArch a);
ModelArch arch_from_string(const std::string& s);

// ---------------------------------------------------------------------------
// Generator

struct GeneratorSpec {
  int z_dim = 64;
  int num_classes = 10;
  Conditioning conditioning = Conditioning::kOneHotConcat;
  bool target_conditioned = false;
  ImageShape output_shape;
  ModelArch architecture = ModelArch::kMlp;
  std::vector<int> hidden_sizes = {256, 512, 1024};  // mlp widths
  int base_channels = 32;                            // conv width
  int embed_dim = 16;                                // embed conditioning

  void validate() const;
  int label_dim() const {
    return conditioning == Conditioning::kOneHotConcat ? num_classes
                                                       : embed_dim;
  }
  int input_dim() const {
    return z_dim + label_dim() + (target_conditioned ? label_dim() : 0);
  }
};

/// Conditional generator G(c, z[, t]) -> image in [0,1]. Parameter shapes
/// are a pure function of the spec; param_version bumps once per optimizer
/// step applied to this handle.
class Generator {
 public:
  Generator(GeneratorSpec spec, std::uint64_t seed);

  const GeneratorSpec& spec() const { return spec_; }
  std::int64_t param_version() const { return param_version_; }
  void bump_version() { ++param_version_; }

  /// Forward pass. t must be supplied iff the spec is target-conditioned.
  Tensor<float> generate(const std::vector<int>& c, const Tensor<float>& z,
                         const std::vector<int>* t = nullptr,
                         bool training = false);

  /// Backpropagates an image-space gradient from the latest generate()
  /// call into parameter grads; returns the gradient w.r.t. z.
  Tensor<float> backward(const Tensor<float>& d_images);

  std::vector<Parameter<float>*> parameters();
  std::vector<Parameter<float>*> buffers() { return net_.buffers(); }
  Sequential<float>& net() { return net_; }

 private:
  Tensor<float> assemble_input(const std::vector<int>& c,
                               const Tensor<float>& z,
                               const std::vector<int>* t);

  GeneratorSpec spec_;
  Sequential<float> net_;
  Parameter<float> class_embed_;   // used when conditioning == kEmbed
  Parameter<float> target_embed_;  // used when also target_conditioned
  std::vector<int> last_c_, last_t_;
  std::int64_t param_version_ = 0;
};

// ---------------------------------------------------------------------------
// Discriminator

enum class DiscriminatorMode { kCgan, kAcgan };

std::string discriminator_mode_string(DiscriminatorMode m);
DiscriminatorMode discriminator_mode_from_string(const std::string& s);

struct DiscriminatorSpec {
  DiscriminatorMode mode = DiscriminatorMode::kCgan;
  int num_classes = 10;
  ImageShape input_shape;
  ModelArch architecture = ModelArch::kMlp;
  std::vector<int> hidden_sizes = {512, 256};
  int base_channels = 32;

  void validate() const;
};

struct DiscriminatorOutput {
  Tensor<float> realness;      // [B] logits
  Tensor<float> class_logits;  // [B,n] in acgan mode, empty otherwise
};

/// cGAN/ACGAN discriminator. cgan mode consumes (image, class), emitting a
/// single realness logit; acgan consumes the image only and adds class
/// logits from an auxiliary head. Class conditioning in cgan mode is one-hot
/// (concatenated features for mlp, constant label planes for conv).
class Discriminator {
 public:
  Discriminator(DiscriminatorSpec spec, std::uint64_t seed);

  const DiscriminatorSpec& spec() const { return spec_; }
  std::int64_t param_version() const { return param_version_; }
  void bump_version() { ++param_version_; }

  DiscriminatorOutput discriminate(const Tensor<float>& images,
                                   const std::vector<int>* c = nullptr,
                                   bool training = false);

  /// Backward from head gradients to parameter grads; returns the gradient
  /// w.r.t. the input images (label-conditioning channels stripped).
  Tensor<float> backward(const Tensor<float>& d_realness,
                         const Tensor<float>* d_class_logits,
                         bool param_grads = true);

  std::vector<Parameter<float>*> parameters();
  std::vector<Parameter<float>*> buffers();

 private:
  Tensor<float> assemble_input(const Tensor<float>& images,
                               const std::vector<int>* c);
  void net_add_dense(int in, int out);

  DiscriminatorSpec spec_;
  Sequential<float> trunk_;
  std::unique_ptr<Dense<float>> src_head_;
  std::unique_ptr<Dense<float>> cls_head_;
  std::vector<int> image_shape_;
  std::int64_t param_version_ = 0;
};

// ---------------------------------------------------------------------------
// Classifier

struct ClassifierSpec {
  ImageShape input_shape;
  int num_classes = 10;
  ModelArch architecture = ModelArch::kDcganConv;
  std::vector<int> hidden_sizes = {256, 128};  // mlp widths
  int base_channels = 16;                      // conv width
  int dense_width = 128;                       // conv head width

  void validate() const;
};

/// Image classifier producing raw logits. When frozen, no training
/// operation may modify its parameters; inference stays available.
class Classifier {
 public:
  Classifier(ClassifierSpec spec, std::uint64_t seed);

  const ClassifierSpec& spec() const { return spec_; }
  int num_classes() const { return spec_.num_classes; }
  bool frozen() const { return frozen_; }
  void freeze() { frozen_ = true; }
  std::int64_t param_version() const { return param_version_; }
  void bump_version() { ++param_version_; }

  Tensor<float> classify(const Tensor<float>& images, bool training = false);

  /// Gradient of a scalar loss w.r.t. the input images, given dlogits.
  /// param_grads=false (frozen use) skips weight-gradient work entirely.
  Tensor<float> backward(const Tensor<float>& dlogits, bool param_grads);

  std::vector<Parameter<float>*> parameters();
  std::vector<Parameter<float>*> buffers() { return net_.buffers(); }

 private:
  ClassifierSpec spec_;
  Sequential<float> net_;
  bool frozen_ = false;
  std::int64_t param_version_ = 0;
};

// ---------------------------------------------------------------------------
// Shared helpers

/// One-hot rows for labels in [0, n).
Tensor<float> one_hot(const std::vector<int>& labels, int n);

/// Standard-normal z noise [count, z_dim] from a dedicated stream.
Tensor<float> sample_noise(int count, int z_dim, std::mt19937& rng);

/// CRC-32 over all parameter and buffer bytes; order is the handle's
/// canonical parameter order. Used for frozen-model invariants.
std::uint32_t parameter_checksum(const std::vector<Parameter<float>*>& params);

}  // namespace agan

#endif  // AGAN_MODELS_HPP
