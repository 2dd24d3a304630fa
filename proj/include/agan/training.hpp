#ifndef AGAN_TRAINING_HPP
#define AGAN_TRAINING_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "agan/data.hpp"
#include "agan/losses.hpp"
#include "agan/models.hpp"

namespace agan {

struct TrainConfig {
  int epochs = 10;
  int batch_size = 64;
  std::uint64_t seed = 1;
  double learning_rate = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  int d_steps_per_g_step = 1;
  std::optional<AttackObjectiveConfig> attack;
  double label_smoothing = 0.1;
  int probe_size = 1000;
  // Stop after this many optimizer steps; < 0 means no cap. Steps count
  // every D and G (or classifier) update in the order applied.
  long max_steps = -1;

  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  double d_loss = 0.0;
  double g_loss = 0.0;
  double g_gan_loss = 0.0;
  double attack_loss = 0.0;
  double probe_success = -1.0;  // -1 when no probe is configured
};

struct GanTrainResult {
  Generator generator;
  Discriminator discriminator;
  std::vector<EpochStats> epochs;
  // One loss per optimizer step, in update order (D and G interleaved).
  std::vector<float> step_losses;
  long d_steps = 0;
  long g_steps = 0;
};

struct ClassifierTrainResult {
  Classifier classifier;
  double test_accuracy = 0.0;
  std::vector<float> step_losses;
  std::vector<double> epoch_train_loss;
};

/// Supervised training of a classifier; returns the handle plus held-out
/// accuracy on the test batch.
ClassifierTrainResult train_classifier(const ImageBatch& train,
                                       const ImageBatch& test,
                                       const ClassifierSpec& spec,
                                       const TrainConfig& cfg);

/// Plain conditional-GAN training (no attack term). cfg.attack must be
/// absent or carry alpha == 0.
GanTrainResult train_gan(const ImageBatch& data, const GeneratorSpec& g_spec,
                         const DiscriminatorSpec& d_spec,
                         const TrainConfig& cfg);

/// Adaptive training: the generator minimizes GAN loss plus alpha times the
/// masked attack loss against the frozen target classifier; the
/// discriminator sees only the GAN loss. The target classifier is never
/// modified. With alpha == 0 this is identical to train_gan step for step.
GanTrainResult train_adaptive(const ImageBatch& data,
                              const GeneratorSpec& g_spec,
                              const DiscriminatorSpec& d_spec, Classifier& tc,
                              const TrainConfig& cfg);

/// Same loop as train_adaptive but starting from pre-trained handles
/// (typically loaded from a checkpoint, which stays intact on disk).
/// epochs == 0 is allowed and returns the handles unchanged.
GanTrainResult adapt_retrain(const ImageBatch& data, Generator g,
                             Discriminator d, Classifier& tc,
                             const TrainConfig& cfg);

/// Classification accuracy of model on data (argmax vs label), eval mode.
double classification_accuracy(Classifier& model, const ImageBatch& data,
                               int eval_batch = 256);

/// Fixed (c, z) probe set drawn once from the run seed.
struct ProbeSet {
  std::vector<int> classes;
  Tensor<float> z;
};
ProbeSet make_probe_set(int count, int z_dim, int num_classes,
                        std::uint64_t seed);

/// Fraction of off-target probe samples (c != target) whose generated image
/// the classifier assigns to the attack target.
double probe_attack_success(Generator& g, Classifier& tc,
                            const ProbeSet& probe, int target,
                            int eval_batch = 256);

}  // namespace agan

#endif  // AGAN_TRAINING_HPP
