#ifndef AGAN_GAN_LOSSES_HPP
#define AGAN_GAN_LOSSES_HPP

#include "agan/data.hpp"
#include "agan/models.hpp"

namespace agan {

struct GanLossPair {
  double d_loss = 0.0;
  double g_loss = 0.0;
};

/// Conditional-GAN losses for a given discriminator state: d_loss is the
/// mean of the real side (target 1 - label_smoothing) and the fake side
/// (target 0); g_loss is the non-saturating generator loss (fake toward 1).
/// Forward-only; no state is modified.
GanLossPair cgan_losses(Discriminator& d, const ImageBatch& real,
                        const std::vector<int>& fake_c,
                        const Tensor<float>& fake_images,
                        double label_smoothing = 0.0);

/// ACGAN variant: source terms as cgan_losses plus auxiliary class
/// cross-entropy on real images (added to d_loss) and on fake images
/// (added to both d_loss and g_loss).
GanLossPair acgan_losses(Discriminator& d, const ImageBatch& real,
                         const std::vector<int>& fake_c,
                         const Tensor<float>& fake_images,
                         double label_smoothing = 0.0);

}  // namespace agan

#endif  // AGAN_GAN_LOSSES_HPP
