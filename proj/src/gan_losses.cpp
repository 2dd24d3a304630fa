#include "agan/gan_losses.hpp"

#include "agan/errors.hpp"
#include "agan/losses.hpp"

namespace agan {

namespace {

double mean_of(const std::vector<float>& v) {
  double s = 0;
  for (float x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

GanLossPair gan_losses_impl(Discriminator& d, const ImageBatch& real,
                            const std::vector<int>& fake_c,
                            const Tensor<float>& fake_images,
                            double label_smoothing, bool acgan) {
  if (real.count() < 1 || fake_images.dim(0) < 1)
    throw ArgumentError("real and fake batches must be non-empty");
  if (static_cast<int>(fake_c.size()) != fake_images.dim(0))
    throw ArgumentError("fake labels / fake images size mismatch");
  const bool is_acgan = d.spec().mode == DiscriminatorMode::kAcgan;
  if (acgan != is_acgan)
    throw ArgumentError(acgan ? "acgan_losses needs an acgan discriminator"
                              : "cgan_losses needs a cgan discriminator");
  const std::vector<int>* real_c = is_acgan ? nullptr : &real.labels;
  const std::vector<int>* gen_c = is_acgan ? nullptr : &fake_c;

  auto real_out = d.discriminate(real.images, real_c);
  auto fake_out = d.discriminate(fake_images, gen_c);

  const float s = static_cast<float>(label_smoothing);
  GanLossPair out;
  out.d_loss = 0.5 * (bce_with_logits<float>(real_out.realness, 1.0f - s).value +
                      bce_with_logits<float>(fake_out.realness, 0.0f).value);
  out.g_loss = bce_with_logits<float>(fake_out.realness, 1.0f).value;
  if (is_acgan) {
    const double cls_real = mean_of(cross_entropy_to_labels<float>(
        real_out.class_logits, real.labels, nullptr));
    const double cls_fake = mean_of(cross_entropy_to_labels<float>(
        fake_out.class_logits, fake_c, nullptr));
    out.d_loss += cls_real + cls_fake;
    out.g_loss += cls_fake;
  }
  return out;
}

}  // namespace

GanLossPair cgan_losses(Discriminator& d, const ImageBatch& real,
                        const std::vector<int>& fake_c,
                        const Tensor<float>& fake_images,
                        double label_smoothing) {
  return gan_losses_impl(d, real, fake_c, fake_images, label_smoothing, false);
}

GanLossPair acgan_losses(Discriminator& d, const ImageBatch& real,
                         const std::vector<int>& fake_c,
                         const Tensor<float>& fake_images,
                         double label_smoothing) {
  return gan_losses_impl(d, real, fake_c, fake_images, label_smoothing, true);
}

}  // namespace agan
