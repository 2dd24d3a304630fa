#include "agan/models.hpp"

#include <zlib.h>

#include "agan/errors.hpp"
#include "agan/rng.hpp"

namespace agan {

std::string conditioning_string(Conditioning c) {
  return c == Conditioning::kOneHotConcat ? "onehot_concat" : "embed";
}

Conditioning conditioning_from_string(const std::string& s) {
  if (s == "onehot_concat") return Conditioning::kOneHotConcat;
  if (s == "embed") return Conditioning::kEmbed;
  throw ArgumentError("unknown conditioning: " + s);
}

std::string arch_string(ModelArch a) {
  return a == ModelArch::kMlp ? "mlp" : "dcgan_conv";
}

ModelArch arch_from_string(const std::string& s) {
  if (s == "mlp") return ModelArch::kMlp;
  if (s == "dcgan_conv") return ModelArch::kDcganConv;
  throw ArgumentError("unknown architecture: " + s);
}

std::string discriminator_mode_string(DiscriminatorMode m) {
  return m == DiscriminatorMode::kCgan ? "cgan" : "acgan";
}

DiscriminatorMode discriminator_mode_from_string(const std::string& s) {
  if (s == "cgan") return DiscriminatorMode::kCgan;
  if (s == "acgan") return DiscriminatorMode::kAcgan;
  throw ArgumentError("unknown discriminator mode: " + s);
}

namespace {

void check_labels(const std::vector<int>& labels, int n, const char* what) {
  for (int l : labels)
    if (l < 0 || l >= n)
      throw ArgumentError(std::string(what) + " label out of range [0," +
                          std::to_string(n) + ")");
}

void check_conv_shape(const ImageShape& s) {
  if (s.height % 4 != 0 || s.width % 4 != 0)
    throw ArgumentError("conv architectures need H and W divisible by 4");
}

}  // namespace

// ---------------------------------------------------------------------------
// Generator

void GeneratorSpec::validate() const {
  if (z_dim < 1) throw ArgumentError("z_dim must be >= 1");
  if (num_classes < 1) throw ArgumentError("num_classes must be >= 1");
  if (output_shape.height < 1 || output_shape.width < 1 ||
      output_shape.channels < 1)
    throw ArgumentError("output_shape dims must be positive");
  if (architecture == ModelArch::kMlp && hidden_sizes.empty())
    throw ArgumentError("mlp generator needs at least one hidden layer");
  if (architecture == ModelArch::kDcganConv) check_conv_shape(output_shape);
  if (conditioning == Conditioning::kEmbed && embed_dim < 1)
    throw ArgumentError("embed_dim must be >= 1");
  if (base_channels < 1) throw ArgumentError("base_channels must be >= 1");
}

Generator::Generator(GeneratorSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)) {
  spec_.validate();
  const ImageShape& out = spec_.output_shape;
  if (spec_.architecture == ModelArch::kMlp) {
    int prev = spec_.input_dim();
    for (int h : spec_.hidden_sizes) {
      net_.add<Dense<float>>(prev, h);
      net_.add<LeakyRelu<float>>(0.2f);
      prev = h;
    }
    net_.add<Dense<float>>(prev, out.flat());
    net_.add<TanhLayer<float>>();
    net_.add<FixedAffine<float>>(0.5f, 0.5f);
    net_.add<Reshape<float>>(
        std::vector<int>{out.height, out.width, out.channels});
  } else {
    const int f = spec_.base_channels;
    const int h4 = out.height / 4, w4 = out.width / 4;
    net_.add<Dense<float>>(spec_.input_dim(), h4 * w4 * 2 * f);
    net_.add<Reshape<float>>(std::vector<int>{h4, w4, 2 * f});
    net_.add<BatchNorm<float>>(2 * f);
    net_.add<LeakyRelu<float>>(0.2f);
    net_.add<TransposedConv2d<float>>(2 * f, f, 4, 2, 1);
    net_.add<BatchNorm<float>>(f);
    net_.add<LeakyRelu<float>>(0.2f);
    net_.add<TransposedConv2d<float>>(f, out.channels, 4, 2, 1);
    net_.add<TanhLayer<float>>();
    net_.add<FixedAffine<float>>(0.5f, 0.5f);
  }
  auto rng = make_rng(seed, RngStream::kInit);
  net_.init(rng);
  if (spec_.conditioning == Conditioning::kEmbed) {
    class_embed_ = Parameter<float>("class_embed",
                                    {spec_.num_classes, spec_.embed_dim});
    fill_normal<float>(class_embed_.value, rng, 0.0f, 0.02f);
    if (spec_.target_conditioned) {
      target_embed_ = Parameter<float>("target_embed",
                                       {spec_.num_classes, spec_.embed_dim});
      fill_normal<float>(target_embed_.value, rng, 0.0f, 0.02f);
    }
  }
}

Tensor<float> Generator::assemble_input(const std::vector<int>& c,
                                        const Tensor<float>& z,
                                        const std::vector<int>* t) {
  const int b = static_cast<int>(c.size());
  if (b < 1) throw ArgumentError("generate needs a non-empty batch");
  if (z.ndim() != 2 || z.dim(0) != b || z.dim(1) != spec_.z_dim)
    throw ArgumentError("noise must be [B," + std::to_string(spec_.z_dim) +
                        "]");
  if (spec_.target_conditioned && t == nullptr)
    throw ArgumentError("target-conditioned generator requires t");
  if (!spec_.target_conditioned && t != nullptr)
    throw ArgumentError("t given to a generator that is not target-conditioned");
  check_labels(c, spec_.num_classes, "class");
  if (t) {
    if (static_cast<int>(t->size()) != b)
      throw ArgumentError("t batch size mismatch");
    check_labels(*t, spec_.num_classes, "target");
  }

  const int ld = spec_.label_dim();
  Tensor<float> in({b, spec_.input_dim()});
  const bool embed = spec_.conditioning == Conditioning::kEmbed;
  for (int i = 0; i < b; ++i) {
    float* row = in.data() + static_cast<std::size_t>(i) * spec_.input_dim();
    std::copy_n(z.data() + static_cast<std::size_t>(i) * spec_.z_dim,
                spec_.z_dim, row);
    float* cond = row + spec_.z_dim;
    std::fill(cond, cond + ld + (t ? ld : 0), 0.0f);
    const int ci = c[static_cast<std::size_t>(i)];
    if (embed) {
      std::copy_n(class_embed_.value.data() +
                      static_cast<std::size_t>(ci) * spec_.embed_dim,
                  spec_.embed_dim, cond);
    } else {
      cond[ci] = 1.0f;
    }
    if (t) {
      float* tc = cond + ld;
      const int ti = (*t)[static_cast<std::size_t>(i)];
      if (embed) {
        std::copy_n(target_embed_.value.data() +
                        static_cast<std::size_t>(ti) * spec_.embed_dim,
                    spec_.embed_dim, tc);
      } else {
        tc[ti] = 1.0f;
      }
    }
  }
  last_c_ = c;
  last_t_ = t ? *t : std::vector<int>{};
  return in;
}

Tensor<float> Generator::generate(const std::vector<int>& c,
                                  const Tensor<float>& z,
                                  const std::vector<int>* t, bool training) {
  return net_.forward(assemble_input(c, z, t), training);
}

Tensor<float> Generator::backward(const Tensor<float>& d_images) {
  Tensor<float> d_in = net_.backward(d_images, true);
  const int b = d_in.dim(0);
  const int ld = spec_.label_dim();
  if (spec_.conditioning == Conditioning::kEmbed) {
    for (int i = 0; i < b; ++i) {
      const float* row =
          d_in.data() + static_cast<std::size_t>(i) * spec_.input_dim();
      float* cg = class_embed_.grad.data() +
                  static_cast<std::size_t>(last_c_[static_cast<std::size_t>(i)]) *
                      spec_.embed_dim;
      for (int k = 0; k < spec_.embed_dim; ++k) cg[k] += row[spec_.z_dim + k];
      if (spec_.target_conditioned) {
        float* tg = target_embed_.grad.data() +
                    static_cast<std::size_t>(
                        last_t_[static_cast<std::size_t>(i)]) *
                        spec_.embed_dim;
        for (int k = 0; k < spec_.embed_dim; ++k)
          tg[k] += row[spec_.z_dim + ld + k];
      }
    }
  }
  Tensor<float> dz({b, spec_.z_dim});
  for (int i = 0; i < b; ++i)
    std::copy_n(d_in.data() + static_cast<std::size_t>(i) * spec_.input_dim(),
                spec_.z_dim, dz.data() + static_cast<std::size_t>(i) * spec_.z_dim);
  return dz;
}

std::vector<Parameter<float>*> Generator::parameters() {
  auto out = net_.parameters();
  if (spec_.conditioning == Conditioning::kEmbed) {
    out.push_back(&class_embed_);
    if (spec_.target_conditioned) out.push_back(&target_embed_);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Discriminator

void DiscriminatorSpec::validate() const {
  if (num_classes < 1) throw ArgumentError("num_classes must be >= 1");
  if (architecture == ModelArch::kMlp && hidden_sizes.empty())
    throw ArgumentError("mlp discriminator needs at least one hidden layer");
  if (architecture == ModelArch::kDcganConv) check_conv_shape(input_shape);
  if (base_channels < 1) throw ArgumentError("base_channels must be >= 1");
}

Discriminator::Discriminator(DiscriminatorSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)) {
  spec_.validate();
  const ImageShape& in = spec_.input_shape;
  const bool cond = spec_.mode == DiscriminatorMode::kCgan;
  int feat = 0;
  if (spec_.architecture == ModelArch::kMlp) {
    int prev = in.flat() + (cond ? spec_.num_classes : 0);
    for (int h : spec_.hidden_sizes) {
      net_add_dense(prev, h);
      prev = h;
    }
    feat = prev;
  } else {
    const int f = spec_.base_channels;
    const int cin = in.channels + (cond ? spec_.num_classes : 0);
    trunk_.add<Conv2d<float>>(cin, f, 4, 2, 1);
    trunk_.add<LeakyRelu<float>>(0.2f);
    trunk_.add<Conv2d<float>>(f, 2 * f, 4, 2, 1);
    trunk_.add<BatchNorm<float>>(2 * f);
    trunk_.add<LeakyRelu<float>>(0.2f);
    feat = (in.height / 4) * (in.width / 4) * 2 * f;
    trunk_.add<Reshape<float>>(std::vector<int>{feat});
  }
  src_head_ = std::make_unique<Dense<float>>(feat, 1);
  if (spec_.mode == DiscriminatorMode::kAcgan)
    cls_head_ = std::make_unique<Dense<float>>(feat, spec_.num_classes);
  auto rng = make_rng(seed, RngStream::kInit);
  trunk_.init(rng);
  src_head_->init(rng);
  if (cls_head_) cls_head_->init(rng);
  for (auto* p : src_head_->parameters()) p->name = "src_head." + p->name;
  if (cls_head_)
    for (auto* p : cls_head_->parameters()) p->name = "cls_head." + p->name;
}

void Discriminator::net_add_dense(int in, int out) {
  trunk_.add<Dense<float>>(in, out);
  trunk_.add<LeakyRelu<float>>(0.2f);
}

Tensor<float> Discriminator::assemble_input(const Tensor<float>& images,
                                            const std::vector<int>* c) {
  const bool cond = spec_.mode == DiscriminatorMode::kCgan;
  if (cond && c == nullptr)
    throw ArgumentError("cgan discriminator requires class labels");
  if (!cond && c != nullptr)
    throw ArgumentError("acgan discriminator takes no class labels");
  if (images.ndim() != 4) throw ArgumentError("images must be [B,H,W,C]");
  const ImageShape& s = spec_.input_shape;
  if (images.dim(1) != s.height || images.dim(2) != s.width ||
      images.dim(3) != s.channels)
    throw ArgumentError("image shape does not match discriminator spec");
  const int b = images.dim(0);
  if (c) {
    if (static_cast<int>(c->size()) != b)
      throw ArgumentError("label batch size mismatch");
    check_labels(*c, spec_.num_classes, "class");
  }
  image_shape_ = images.shape();

  if (spec_.architecture == ModelArch::kMlp) {
    const int flat = s.flat();
    const int width = flat + (cond ? spec_.num_classes : 0);
    Tensor<float> in({b, width});
    for (int i = 0; i < b; ++i) {
      float* row = in.data() + static_cast<std::size_t>(i) * width;
      std::copy_n(images.data() + static_cast<std::size_t>(i) * flat, flat, row);
      if (cond) {
        std::fill(row + flat, row + width, 0.0f);
        row[flat + (*c)[static_cast<std::size_t>(i)]] = 1.0f;
      }
    }
    return in;
  }
  if (!cond) return images;
  // conv + cgan: append one constant one-hot plane per class
  const int cin = s.channels + spec_.num_classes;
  Tensor<float> in({b, s.height, s.width, cin});
  for (int i = 0; i < b; ++i) {
    const int label = (*c)[static_cast<std::size_t>(i)];
    const float* src =
        images.data() + static_cast<std::size_t>(i) * s.flat();
    float* dst =
        in.data() + static_cast<std::size_t>(i) * s.height * s.width * cin;
    for (int p = 0; p < s.height * s.width; ++p) {
      for (int ch = 0; ch < s.channels; ++ch)
        dst[p * cin + ch] = src[p * s.channels + ch];
      for (int k = 0; k < spec_.num_classes; ++k)
        dst[p * cin + s.channels + k] = (k == label) ? 1.0f : 0.0f;
    }
  }
  return in;
}

DiscriminatorOutput Discriminator::discriminate(const Tensor<float>& images,
                                                const std::vector<int>* c,
                                                bool training) {
  Tensor<float> feat = trunk_.forward(assemble_input(images, c), training);
  DiscriminatorOutput out;
  Tensor<float> r = src_head_->forward(feat, training);
  out.realness = r.reshaped({r.dim(0)});
  if (cls_head_) out.class_logits = cls_head_->forward(feat, training);
  return out;
}

Tensor<float> Discriminator::backward(const Tensor<float>& d_realness,
                                      const Tensor<float>* d_class_logits,
                                      bool param_grads) {
  const int b = d_realness.dim(0);
  Tensor<float> d_feat =
      src_head_->backward(d_realness.reshaped({b, 1}), param_grads);
  if (cls_head_) {
    if (d_class_logits == nullptr)
      throw ArgumentError("acgan backward needs class-logit gradients");
    d_feat.add_scaled(cls_head_->backward(*d_class_logits, param_grads), 1.0f);
  } else if (d_class_logits != nullptr) {
    throw ArgumentError("cgan discriminator has no class head");
  }
  Tensor<float> d_in = trunk_.backward(d_feat, param_grads);

  // Strip conditioning columns/planes so the caller sees an image gradient.
  const ImageShape& s = spec_.input_shape;
  if (spec_.mode == DiscriminatorMode::kAcgan) return d_in.reshaped(image_shape_);
  Tensor<float> dx(image_shape_);
  if (spec_.architecture == ModelArch::kMlp) {
    const int flat = s.flat();
    const int width = flat + spec_.num_classes;
    for (int i = 0; i < b; ++i)
      std::copy_n(d_in.data() + static_cast<std::size_t>(i) * width, flat,
                  dx.data() + static_cast<std::size_t>(i) * flat);
  } else {
    const int cin = s.channels + spec_.num_classes;
    for (int i = 0; i < b; ++i) {
      const float* src =
          d_in.data() + static_cast<std::size_t>(i) * s.height * s.width * cin;
      float* dst = dx.data() + static_cast<std::size_t>(i) * s.flat();
      for (int p = 0; p < s.height * s.width; ++p)
        for (int ch = 0; ch < s.channels; ++ch)
          dst[p * s.channels + ch] = src[p * cin + ch];
    }
  }
  return dx;
}

std::vector<Parameter<float>*> Discriminator::parameters() {
  auto out = trunk_.parameters();
  for (auto* p : src_head_->parameters()) out.push_back(p);
  if (cls_head_)
    for (auto* p : cls_head_->parameters()) out.push_back(p);
  return out;
}

std::vector<Parameter<float>*> Discriminator::buffers() {
  return trunk_.buffers();
}

// ---------------------------------------------------------------------------
// Classifier

void ClassifierSpec::validate() const {
  if (num_classes < 1) throw ArgumentError("num_classes must be >= 1");
  if (architecture == ModelArch::kMlp && hidden_sizes.empty())
    throw ArgumentError("mlp classifier needs at least one hidden layer");
  if (architecture == ModelArch::kDcganConv) check_conv_shape(input_shape);
  if (base_channels < 1 || dense_width < 1)
    throw ArgumentError("classifier widths must be positive");
}

Classifier::Classifier(ClassifierSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)) {
  spec_.validate();
  const ImageShape& in = spec_.input_shape;
  if (spec_.architecture == ModelArch::kMlp) {
    net_.add<Reshape<float>>(std::vector<int>{in.flat()});
    int prev = in.flat();
    for (int h : spec_.hidden_sizes) {
      net_.add<Dense<float>>(prev, h);
      net_.add<LeakyRelu<float>>(0.2f);
      prev = h;
    }
    net_.add<Dense<float>>(prev, spec_.num_classes);
  } else {
    const int f = spec_.base_channels;
    net_.add<Conv2d<float>>(in.channels, f, 4, 2, 1);
    net_.add<LeakyRelu<float>>(0.2f);
    net_.add<Conv2d<float>>(f, 2 * f, 4, 2, 1);
    net_.add<LeakyRelu<float>>(0.2f);
    const int feat = (in.height / 4) * (in.width / 4) * 2 * f;
    net_.add<Reshape<float>>(std::vector<int>{feat});
    net_.add<Dense<float>>(feat, spec_.dense_width);
    net_.add<LeakyRelu<float>>(0.2f);
    net_.add<Dense<float>>(spec_.dense_width, spec_.num_classes);
  }
  auto rng = make_rng(seed, RngStream::kInit);
  net_.init(rng);
}

Tensor<float> Classifier::classify(const Tensor<float>& images, bool training) {
  if (images.ndim() != 4) throw ArgumentError("images must be [B,H,W,C]");
  const ImageShape& s = spec_.input_shape;
  if (images.dim(1) != s.height || images.dim(2) != s.width ||
      images.dim(3) != s.channels)
    throw ArgumentError("image shape does not match classifier spec: got " +
                        Tensor<float>::shape_string(images.shape()));
  return net_.forward(images, training);
}

Tensor<float> Classifier::backward(const Tensor<float>& dlogits,
                                   bool param_grads) {
  if (param_grads && frozen_)
    throw ArgumentError("cannot accumulate parameter grads on a frozen model");
  return net_.backward(dlogits, param_grads);
}

std::vector<Parameter<float>*> Classifier::parameters() {
  return net_.parameters();
}

// ---------------------------------------------------------------------------
// Helpers

Tensor<float> one_hot(const std::vector<int>& labels, int n) {
  check_labels(labels, n, "one_hot");
  Tensor<float> out({static_cast<int>(labels.size()), n});
  for (std::size_t i = 0; i < labels.size(); ++i)
    out[i * static_cast<std::size_t>(n) + labels[i]] = 1.0f;
  return out;
}

Tensor<float> sample_noise(int count, int z_dim, std::mt19937& rng) {
  Tensor<float> z({count, z_dim});
  fill_normal<float>(z, rng, 0.0f, 1.0f);
  return z;
}

std::uint32_t parameter_checksum(
    const std::vector<Parameter<float>*>& params) {
  uLong crc = crc32(0L, Z_NULL, 0);
  for (const auto* p : params)
    crc = crc32(crc, reinterpret_cast<const Bytef*>(p->value.data()),
                static_cast<uInt>(p->value.size() * sizeof(float)));
  return static_cast<std::uint32_t>(crc);
}

}  // namespace agan
