#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "agan/baselines.hpp"
#include "agan/errors.hpp"
#include "agan/rng.hpp"
#include "agan/synth.hpp"
#include "agan/training.hpp"

using namespace agan;

namespace {

// 1-pixel 2-class linear classifier with logits (2, 4x): at x = 0.5 the
// softmax is uniform and dJ/dx toward class 1 is exactly -2.
Classifier hand_linear_classifier() {
  ClassifierSpec spec;
  spec.input_shape = {1, 1, 1};
  spec.num_classes = 2;
  spec.architecture = ModelArch::kMlp;
  spec.hidden_sizes = {2};
  Classifier m(spec, 1);
  auto params = m.parameters();
  // l1.dense: 1 -> 2 identity-ish passthrough (positive), l3.dense: 2 -> 2
  // weights chosen so logits = (2, 4x). Hidden leaky-relu stays linear for
  // x >= 0 with positive weights.
  params[0]->value.vec() = {1.0f, 0.0f};       // w: [1,2]
  params[1]->value.vec() = {0.0f, 0.0f};       // b
  params[2]->value.vec() = {0.0f, 4.0f,        // w: [2,2] col j = class j
                            0.0f, 0.0f};
  params[3]->value.vec() = {2.0f, 0.0f};       // b: class0 logit fixed at 2
  return m;
}

Classifier small_trained_tc(const ImageBatch& train, const ImageBatch& test) {
  ClassifierSpec spec;
  spec.input_shape = {28, 28, 1};
  spec.architecture = ModelArch::kMlp;
  spec.hidden_sizes = {64};
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 64;
  cfg.learning_rate = 1e-3;
  cfg.beta1 = 0.9;
  cfg.seed = 3;
  auto res = train_classifier(train, test, spec, cfg);
  res.classifier.freeze();
  return std::move(res.classifier);
}

}  // namespace

TEST_CASE("fgsm with zero budget returns the input unchanged") {
  Classifier tc = hand_linear_classifier();
  Tensor<float> x({2, 1, 1, 1}, {0.5f, 0.25f});
  PerturbationBudget budget;
  budget.epsilon = 0.0;
  budget.targeted = true;
  Tensor<float> out = fgsm(tc, x, {1, 1}, budget);
  CHECK(out.vec() == x.vec());
}

TEST_CASE("fgsm on the hand-built linear model moves x by +epsilon") {
  Classifier tc = hand_linear_classifier();
  Tensor<float> x({1, 1, 1, 1}, {0.5f});
  // sanity: logits at 0.5 are (2, 2)
  Tensor<float> logits = tc.classify(x);
  CHECK(logits[0] == doctest::Approx(2.0f));
  CHECK(logits[1] == doctest::Approx(2.0f));

  PerturbationBudget budget;
  budget.epsilon = 0.2;
  budget.targeted = true;  // descend loss toward class 1 -> x grows
  Tensor<float> out = fgsm(tc, x, {1}, budget);
  CHECK(out[0] == doctest::Approx(0.7f).epsilon(1e-6));

  budget.targeted = false;  // ascend true-label (class 1) loss -> x shrinks
  Tensor<float> out2 = fgsm(tc, x, {1}, budget);
  CHECK(out2[0] == doctest::Approx(0.3f).epsilon(1e-6));
}

TEST_CASE("fgsm validates its budget") {
  Classifier tc = hand_linear_classifier();
  Tensor<float> x({1, 1, 1, 1}, {0.5f});
  PerturbationBudget bad;
  bad.epsilon = -0.1;
  CHECK_THROWS_AS(fgsm(tc, x, {1}, bad), ArgumentError);
  PerturbationBudget multi;
  multi.steps = 3;
  CHECK_THROWS_AS(fgsm(tc, x, {1}, multi), ArgumentError);
  PerturbationBudget warny;
  warny.epsilon = 0.1;
  warny.steps = 4;
  warny.step_size = 0.5;
  CHECK_FALSE(warny.validate().empty());  // step_size > epsilon warns
}

TEST_CASE("pgd with steps=1, restarts=0 and step=epsilon reduces to fgsm") {
  ImageBatch data = synth_digits(64, 21);
  ImageBatch test = synth_digits(32, 22);
  Classifier tc = small_trained_tc(data, test);
  ImageBatch probe = synth_digits(16, 23);

  PerturbationBudget budget;
  budget.epsilon = 0.1;
  budget.step_size = 0.1;
  budget.steps = 1;
  budget.restarts = 0;
  budget.targeted = false;
  Tensor<float> f = fgsm(tc, probe.images, probe.labels, budget);
  PgdResult p = pgd(tc, probe.images, probe.labels, budget, 5);
  CHECK(p.images.vec() == f.vec());
}

TEST_CASE("pgd respects the epsilon ball and [0,1] box (property)") {
  ImageBatch data = synth_digits(64, 24);
  ImageBatch test = synth_digits(32, 25);
  Classifier tc = small_trained_tc(data, test);
  ImageBatch probe = synth_digits(12, 26);

  for (double eps : {0.05, 0.3}) {
    PerturbationBudget budget;
    budget.epsilon = eps;
    budget.steps = 8;
    budget.restarts = 3;
    budget.targeted = false;
    PgdResult res = pgd(tc, probe.images, probe.labels, budget, 11);
    for (std::size_t i = 0; i < res.images.size(); ++i) {
      CHECK(std::fabs(res.images[i] - probe.images[i]) <= eps + 1e-6);
      CHECK(res.images[i] >= 0.0f);
      CHECK(res.images[i] <= 1.0f);
    }
  }
}

TEST_CASE("pgd is deterministic and monotone in restarts") {
  ImageBatch data = synth_digits(64, 27);
  ImageBatch test = synth_digits(32, 28);
  Classifier tc = small_trained_tc(data, test);
  ImageBatch probe = synth_digits(24, 29);

  PerturbationBudget budget;
  budget.epsilon = 0.15;
  budget.steps = 6;
  budget.restarts = 2;
  budget.targeted = true;
  std::vector<int> targets(24, 3);

  PgdResult a = pgd(tc, probe.images, targets, budget, 7);
  PgdResult b = pgd(tc, probe.images, targets, budget, 7);
  CHECK(a.images.vec() == b.images.vec());
  CHECK(a.success == b.success);

  long succ2 = 0;
  for (auto s : a.success) succ2 += s;
  PerturbationBudget more = budget;
  more.restarts = 5;
  PgdResult c = pgd(tc, probe.images, targets, more, 7);
  long succ5 = 0;
  for (auto s : c.success) succ5 += s;
  CHECK(succ5 >= succ2);
  // shared restarts keep their outcome: every sample that succeeded with 2
  // restarts still succeeds with 5
  for (std::size_t i = 0; i < a.success.size(); ++i)
    if (a.success[i]) CHECK(c.success[i]);
}

TEST_CASE("projected sign iterate finds the constrained optimum of a "
          "concave quadratic (grid oracle)") {
  // maximize J(x) = -((x0-p0)^2 + (x1-p1)^2)/2 over ball(center, eps) ∩ [0,1]^2
  const double p0 = 0.9, p1 = 0.75;
  Tensor<float> center({1, 1, 1, 2}, {0.5f, 0.5f});
  const double eps = 0.1;

  ObjectiveFn objective = [&](const Tensor<float>& x,
                              Tensor<float>& grad) -> std::vector<double> {
    grad = Tensor<float>(x.shape());
    grad[0] = static_cast<float>(p0 - x[0]);
    grad[1] = static_cast<float>(p1 - x[1]);
    const double j = -0.5 * ((x[0] - p0) * (x[0] - p0) +
                             (x[1] - p1) * (x[1] - p1));
    return {j};
  };

  Tensor<float> best = projected_sign_iterate(center, center, objective, eps,
                                              0.004, 400, true);

  // brute-force grid over the feasible square
  double best_j = -1e9, bx = 0, by = 0;
  for (int i = 0; i <= 400; ++i)
    for (int j = 0; j <= 400; ++j) {
      const double x0 = 0.4 + 0.2 * i / 400.0, x1 = 0.4 + 0.2 * j / 400.0;
      const double v =
          -0.5 * ((x0 - p0) * (x0 - p0) + (x1 - p1) * (x1 - p1));
      if (v > best_j) {
        best_j = v;
        bx = x0;
        by = x1;
      }
    }
  CHECK(std::fabs(best[0] - bx) < 1e-3);
  CHECK(std::fabs(best[1] - by) < 1e-3);
}

TEST_CASE("targeted pgd beats fgsm on a trained classifier") {
  ImageBatch data = synth_digits(2000, 31);
  ImageBatch test = synth_digits(256, 32);
  Classifier tc = small_trained_tc(data, test);
  ImageBatch probe = synth_digits(64, 33);

  PerturbationBudget fb;
  fb.epsilon = 0.3;
  fb.targeted = true;
  std::vector<int> targets(64, 2);
  Tensor<float> fx = fgsm(tc, probe.images, targets, fb);
  auto fgsm_pred = argmax_rows(tc.classify(fx));

  PerturbationBudget pb = fb;
  pb.steps = 20;
  pb.step_size = 0.0;  // default 2.5 eps / steps
  pb.restarts = 1;
  PgdResult pr = pgd(tc, probe.images, targets, pb, 9);
  long fgsm_succ = 0, pgd_succ = 0;
  for (std::size_t i = 0; i < 64; ++i) {
    fgsm_succ += fgsm_pred[i] == 2;
    pgd_succ += pr.success[i];
  }
  CHECK(pgd_succ >= fgsm_succ);
  CHECK(pgd_succ > 32);  // strong attack on a non-robust model
}
