#include "agan/training.hpp"

#include <algorithm>
#include <cmath>

#include "agan/errors.hpp"
#include "agan/rng.hpp"

namespace agan {

namespace {

// Offsets so that generator/discriminator/classifier initialization draw
// from unrelated streams of the run seed.
constexpr std::uint64_t kGenInitStream = 11;
constexpr std::uint64_t kDiscInitStream = 12;
constexpr std::uint64_t kClsInitStream = 13;

void check_finite(double v, const char* what, long step) {
  if (!std::isfinite(v))
    throw TrainingError(std::string("non-finite ") + what, step);
}

std::vector<int> uniform_labels(int count, int n, std::mt19937& rng) {
  std::uniform_int_distribution<int> dist(0, n - 1);
  std::vector<int> out(static_cast<std::size_t>(count));
  for (auto& l : out) l = dist(rng);
  return out;
}

GanTrainResult run_gan_loop(const ImageBatch& data, Generator g,
                            Discriminator d, Classifier* tc,
                            const TrainConfig& cfg) {
  cfg.validate();
  const GeneratorSpec& gs = g.spec();
  const int n = gs.num_classes;
  data.validate(n);
  if (gs.output_shape.height != data.height() ||
      gs.output_shape.width != data.width() ||
      gs.output_shape.channels != data.channels())
    throw ArgumentError("generator output shape does not match the data");
  if (cfg.attack) cfg.attack->validate(n);
  if (tc && !tc->frozen())
    throw ArgumentError("target classifier must be frozen during GAN training");
  if (tc && tc->num_classes() != n)
    throw ArgumentError("target classifier class count mismatch");
  if (gs.target_conditioned && !cfg.attack)
    throw ArgumentError(
        "target-conditioned generator needs an attack target to train");

  const bool attack_active = tc != nullptr && cfg.attack.has_value();
  const double alpha = cfg.attack ? cfg.attack->alpha : 0.0;
  const float smooth = static_cast<float>(cfg.label_smoothing);
  const bool acgan = d.spec().mode == DiscriminatorMode::kAcgan;
  const bool cgan = !acgan;

  Adam<float> g_opt(static_cast<float>(cfg.learning_rate),
                    static_cast<float>(cfg.beta1),
                    static_cast<float>(cfg.beta2));
  Adam<float> d_opt(static_cast<float>(cfg.learning_rate),
                    static_cast<float>(cfg.beta1),
                    static_cast<float>(cfg.beta2));
  auto g_params = g.parameters();
  auto d_params = d.parameters();

  const std::uint32_t tc_crc_before =
      tc ? parameter_checksum(tc->parameters()) : 0;

  auto noise_rng = make_rng(cfg.seed, RngStream::kNoise);
  ProbeSet probe;
  if (attack_active && cfg.probe_size > 0)
    probe = make_probe_set(cfg.probe_size, gs.z_dim, n, cfg.seed);

  GanTrainResult res{std::move(g), std::move(d), {}, {}, 0, 0};
  Generator& G = res.generator;
  Discriminator& D = res.discriminator;

  long opt_steps = 0;
  int d_since_g = 0;
  bool capped = false;

  auto make_fake = [&](int count, std::vector<int>& fake_c) -> Tensor<float> {
    fake_c = uniform_labels(count, n, noise_rng);
    Tensor<float> z = sample_noise(count, gs.z_dim, noise_rng);
    if (gs.target_conditioned) {
      std::vector<int> t(static_cast<std::size_t>(count), cfg.attack->target);
      return G.generate(fake_c, z, &t, /*training=*/true);
    }
    return G.generate(fake_c, z, nullptr, /*training=*/true);
  };

  for (int epoch = 0; epoch < cfg.epochs && !capped; ++epoch) {
    auto batches = make_batches(data, cfg.batch_size,
                                mix_seed(cfg.seed, 1000 + epoch), true);
    double ep_d = 0, ep_g = 0, ep_ggan = 0, ep_attack = 0;
    long ep_d_n = 0, ep_g_n = 0;

    for (const auto& batch : batches) {
      const int b = batch.count();

      // ---- discriminator update
      Adam<float>::zero_grads(d_params);
      std::vector<int> fake_c;
      Tensor<float> fake = make_fake(b, fake_c);

      auto real_out =
          D.discriminate(batch.images, cgan ? &batch.labels : nullptr, true);
      auto real_bce = bce_with_logits<float>(real_out.realness, 1.0f - smooth);
      // Source halves are averaged so a maximally uncertain discriminator
      // scores ln 2, not 2 ln 2.
      for (auto& v : real_bce.dlogits.vec()) v *= 0.5f;
      double d_loss = 0.5 * real_bce.value;
      if (acgan) {
        Tensor<float> dcls;
        auto ce = cross_entropy_to_labels<float>(real_out.class_logits,
                                                 batch.labels, &dcls);
        double sum = 0;
        for (float v : ce) sum += v;
        d_loss += sum / b;
        for (auto& v : dcls.vec()) v /= static_cast<float>(b);
        D.backward(real_bce.dlogits, &dcls, true);
      } else {
        D.backward(real_bce.dlogits, nullptr, true);
      }

      auto fake_out = D.discriminate(fake, cgan ? &fake_c : nullptr, true);
      auto fake_bce = bce_with_logits<float>(fake_out.realness, 0.0f);
      for (auto& v : fake_bce.dlogits.vec()) v *= 0.5f;
      d_loss += 0.5 * fake_bce.value;
      if (acgan) {
        Tensor<float> dcls;
        auto ce = cross_entropy_to_labels<float>(fake_out.class_logits, fake_c,
                                                 &dcls);
        double sum = 0;
        for (float v : ce) sum += v;
        d_loss += sum / b;
        for (auto& v : dcls.vec()) v /= static_cast<float>(b);
        D.backward(fake_bce.dlogits, &dcls, true);
      } else {
        D.backward(fake_bce.dlogits, nullptr, true);
      }

      d_opt.step(d_params);
      D.bump_version();
      check_finite(d_loss, "discriminator loss", opt_steps);
      res.step_losses.push_back(static_cast<float>(d_loss));
      ep_d += d_loss;
      ++ep_d_n;
      ++res.d_steps;
      if (cfg.max_steps >= 0 && ++opt_steps >= cfg.max_steps) {
        capped = true;
        break;
      }

      // ---- generator update (every d_steps_per_g_step D updates)
      if (++d_since_g < cfg.d_steps_per_g_step) continue;
      d_since_g = 0;

      Adam<float>::zero_grads(g_params);
      std::vector<int> gen_c;
      Tensor<float> gen_images = make_fake(b, gen_c);
      auto gen_out = D.discriminate(gen_images, cgan ? &gen_c : nullptr, true);
      auto gan_bce = bce_with_logits<float>(gen_out.realness, 1.0f);
      double g_gan = gan_bce.value;
      Tensor<float> d_images;
      if (acgan) {
        Tensor<float> dcls;
        auto ce = cross_entropy_to_labels<float>(gen_out.class_logits, gen_c,
                                                 &dcls);
        double sum = 0;
        for (float v : ce) sum += v;
        g_gan += sum / b;
        for (auto& v : dcls.vec()) v /= static_cast<float>(b);
        d_images = D.backward(gan_bce.dlogits, &dcls, false);
      } else {
        d_images = D.backward(gan_bce.dlogits, nullptr, false);
      }

      double attack_value = 0.0;
      if (attack_active && alpha > 0.0) {
        Tensor<float> logits = tc->classify(gen_images);
        auto al = attack_loss<float>(logits, *cfg.attack);
        attack_value = al.value;
        Tensor<float> d_attack = tc->backward(al.dlogits, false);
        d_images.add_scaled(d_attack, static_cast<float>(alpha));
      }
      const double g_loss = combined_generator_loss(
          g_gan, attack_value, attack_active ? alpha : 0.0);

      G.backward(d_images);
      g_opt.step(g_params);
      G.bump_version();
      check_finite(g_loss, "generator loss", opt_steps);
      res.step_losses.push_back(static_cast<float>(g_loss));
      ep_g += g_loss;
      ep_ggan += g_gan;
      ep_attack += attack_value;
      ++ep_g_n;
      ++res.g_steps;
      if (cfg.max_steps >= 0 && ++opt_steps >= cfg.max_steps) {
        capped = true;
        break;
      }
    }

    EpochStats st;
    st.epoch = epoch;
    st.d_loss = ep_d_n ? ep_d / ep_d_n : 0.0;
    st.g_loss = ep_g_n ? ep_g / ep_g_n : 0.0;
    st.g_gan_loss = ep_g_n ? ep_ggan / ep_g_n : 0.0;
    st.attack_loss = ep_g_n ? ep_attack / ep_g_n : 0.0;
    if (attack_active && cfg.probe_size > 0)
      st.probe_success =
          probe_attack_success(G, *tc, probe, cfg.attack->target);
    res.epochs.push_back(st);
  }

  if (tc && parameter_checksum(tc->parameters()) != tc_crc_before)
    throw TrainingError("frozen classifier was modified", opt_steps);
  return res;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw ArgumentError("epochs must be >= 1");
  if (batch_size < 1) throw ArgumentError("batch_size must be >= 1");
  if (learning_rate <= 0) throw ArgumentError("learning_rate must be > 0");
  if (d_steps_per_g_step < 1)
    throw ArgumentError("d_steps_per_g_step must be >= 1");
  if (label_smoothing < 0 || label_smoothing >= 0.5)
    throw ArgumentError("label_smoothing must lie in [0, 0.5)");
  if (probe_size < 0) throw ArgumentError("probe_size must be >= 0");
}

ClassifierTrainResult train_classifier(const ImageBatch& train,
                                       const ImageBatch& test,
                                       const ClassifierSpec& spec,
                                       const TrainConfig& cfg) {
  cfg.validate();
  spec.validate();
  train.validate(spec.num_classes);
  test.validate(spec.num_classes);
  Classifier model(spec, mix_seed(cfg.seed, kClsInitStream));
  Adam<float> opt(static_cast<float>(cfg.learning_rate),
                  static_cast<float>(cfg.beta1),
                  static_cast<float>(cfg.beta2));
  auto params = model.parameters();
  ClassifierTrainResult res{std::move(model), 0.0, {}, {}};
  long opt_steps = 0;
  bool capped = false;
  for (int epoch = 0; epoch < cfg.epochs && !capped; ++epoch) {
    auto batches = make_batches(train, cfg.batch_size,
                                mix_seed(cfg.seed, 1000 + epoch), true);
    double ep_loss = 0;
    long ep_n = 0;
    for (const auto& batch : batches) {
      const int b = batch.count();
      Adam<float>::zero_grads(params);
      Tensor<float> logits = res.classifier.classify(batch.images, true);
      Tensor<float> dlogits;
      auto ce = cross_entropy_to_labels<float>(logits, batch.labels, &dlogits);
      double loss = 0;
      for (float v : ce) loss += v;
      loss /= b;
      for (auto& v : dlogits.vec()) v /= static_cast<float>(b);
      res.classifier.backward(dlogits, true);
      opt.step(params);
      res.classifier.bump_version();
      check_finite(loss, "classifier loss", opt_steps);
      res.step_losses.push_back(static_cast<float>(loss));
      ep_loss += loss;
      ++ep_n;
      if (cfg.max_steps >= 0 && ++opt_steps >= cfg.max_steps) {
        capped = true;
        break;
      }
    }
    res.epoch_train_loss.push_back(ep_n ? ep_loss / ep_n : 0.0);
  }
  res.test_accuracy = classification_accuracy(res.classifier, test);
  return res;
}

GanTrainResult train_gan(const ImageBatch& data, const GeneratorSpec& g_spec,
                         const DiscriminatorSpec& d_spec,
                         const TrainConfig& cfg) {
  if (cfg.attack && cfg.attack->alpha != 0.0)
    throw ArgumentError("train_gan requires no attack config or alpha == 0");
  Generator g(g_spec, mix_seed(cfg.seed, kGenInitStream));
  Discriminator d(d_spec, mix_seed(cfg.seed, kDiscInitStream));
  return run_gan_loop(data, std::move(g), std::move(d), nullptr, cfg);
}

GanTrainResult train_adaptive(const ImageBatch& data,
                              const GeneratorSpec& g_spec,
                              const DiscriminatorSpec& d_spec, Classifier& tc,
                              const TrainConfig& cfg) {
  if (!cfg.attack)
    throw ArgumentError("train_adaptive requires an attack config");
  if (!tc.frozen())
    throw ArgumentError("train_adaptive requires a frozen target classifier");
  Generator g(g_spec, mix_seed(cfg.seed, kGenInitStream));
  Discriminator d(d_spec, mix_seed(cfg.seed, kDiscInitStream));
  return run_gan_loop(data, std::move(g), std::move(d), &tc, cfg);
}

GanTrainResult adapt_retrain(const ImageBatch& data, Generator g,
                             Discriminator d, Classifier& tc,
                             const TrainConfig& cfg) {
  if (!cfg.attack)
    throw ArgumentError("adapt_retrain requires an attack config");
  if (!tc.frozen())
    throw ArgumentError("adapt_retrain requires a frozen target classifier");
  if (g.spec().output_shape.height != tc.spec().input_shape.height ||
      g.spec().output_shape.width != tc.spec().input_shape.width ||
      g.spec().output_shape.channels != tc.spec().input_shape.channels)
    throw ArgumentError("checkpoint output shape does not match classifier");
  if (cfg.epochs == 0)
    return GanTrainResult{std::move(g), std::move(d), {}, {}, 0, 0};
  return run_gan_loop(data, std::move(g), std::move(d), &tc, cfg);
}

double classification_accuracy(Classifier& model, const ImageBatch& data,
                               int eval_batch) {
  const int n = data.count();
  long hits = 0;
  for (int start = 0; start < n; start += eval_batch) {
    const int end = std::min(start + eval_batch, n);
    std::vector<int> rows;
    for (int i = start; i < end; ++i) rows.push_back(i);
    ImageBatch chunk = take_rows(data, rows);
    Tensor<float> logits = model.classify(chunk.images);
    auto pred = argmax_rows(logits);
    for (int i = 0; i < end - start; ++i)
      if (pred[static_cast<std::size_t>(i)] ==
          chunk.labels[static_cast<std::size_t>(i)])
        ++hits;
  }
  return static_cast<double>(hits) / n;
}

ProbeSet make_probe_set(int count, int z_dim, int num_classes,
                        std::uint64_t seed) {
  auto rng = make_rng(seed, RngStream::kProbe);
  ProbeSet probe;
  probe.classes = uniform_labels(count, num_classes, rng);
  probe.z = sample_noise(count, z_dim, rng);
  return probe;
}

double probe_attack_success(Generator& g, Classifier& tc,
                            const ProbeSet& probe, int target,
                            int eval_batch) {
  const int total = static_cast<int>(probe.classes.size());
  long hits = 0, considered = 0;
  for (int start = 0; start < total; start += eval_batch) {
    const int end = std::min(start + eval_batch, total);
    const int b = end - start;
    std::vector<int> c(probe.classes.begin() + start,
                       probe.classes.begin() + end);
    Tensor<float> z({b, g.spec().z_dim});
    std::copy_n(probe.z.data() + static_cast<std::size_t>(start) *
                                     g.spec().z_dim,
                static_cast<std::size_t>(b) * g.spec().z_dim, z.data());
    Tensor<float> images;
    if (g.spec().target_conditioned) {
      std::vector<int> t(static_cast<std::size_t>(b), target);
      images = g.generate(c, z, &t);
    } else {
      images = g.generate(c, z);
    }
    auto pred = argmax_rows(tc.classify(images));
    for (int i = 0; i < b; ++i) {
      if (c[static_cast<std::size_t>(i)] == target) continue;
      ++considered;
      if (pred[static_cast<std::size_t>(i)] == target) ++hits;
    }
  }
  return considered ? static_cast<double>(hits) / considered : 0.0;
}

}  // namespace agan
