#include "agan/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "agan/errors.hpp"
#include "agan/rng.hpp"

namespace agan {

namespace {

// Per-sample attack objective. The iterate always ASCENDS this value:
// untargeted it is the true-label loss, targeted it is the negated
// target loss, so "stronger attack" is always "larger objective".
std::vector<double> attack_objective(Classifier& tc, const Tensor<float>& x,
                                     const std::vector<int>& labels,
                                     const PerturbationBudget& budget,
                                     Tensor<float>* grad) {
  Tensor<float> logits = tc.classify(x);
  const int b = logits.dim(0), n = logits.dim(1);
  Tensor<float> dlogits({b, n});
  std::vector<double> values(static_cast<std::size_t>(b));
  if (budget.loss == BaseLoss::kCrossEntropy) {
    Tensor<float> dj;
    auto j = cross_entropy_to_labels<float>(logits, labels, &dj);
    for (int i = 0; i < b; ++i)
      values[static_cast<std::size_t>(i)] = j[static_cast<std::size_t>(i)];
    dlogits = dj;
  } else {
    // Margin objectives. Targeted: hinged max_{j!=t} l_j - l_t (zero once
    // the target dominates). Untargeted: unhinged max_{j!=y} l_j - l_y so
    // the gradient keeps pushing while the true class still dominates.
    for (int i = 0; i < b; ++i) {
      const float* row = logits.data() + static_cast<std::size_t>(i) * n;
      const int t = labels[static_cast<std::size_t>(i)];
      int best = -1;
      for (int j = 0; j < n; ++j) {
        if (j == t) continue;
        if (best < 0 || row[j] > row[best]) best = j;
      }
      const float margin = row[best] - row[t];
      float* drow = dlogits.data() + static_cast<std::size_t>(i) * n;
      std::fill(drow, drow + n, 0.0f);
      if (budget.targeted) {
        values[static_cast<std::size_t>(i)] = std::max(margin, 0.0f);
        if (margin > 0.0f) {
          drow[best] = 1.0f;
          drow[t] = -1.0f;
        }
      } else {
        values[static_cast<std::size_t>(i)] = margin;
        drow[best] = 1.0f;
        drow[t] = -1.0f;
      }
    }
  }
  if (budget.targeted) {
    // flip so that ascending the objective descends the target loss
    for (auto& v : values) v = -v;
    for (auto& v : dlogits.vec()) v = -v;
  }
  if (grad) *grad = tc.backward(dlogits, false);
  return values;
}

std::vector<std::uint8_t> attack_success(Classifier& tc,
                                         const Tensor<float>& x,
                                         const std::vector<int>& labels,
                                         bool targeted) {
  auto pred = argmax_rows(tc.classify(x));
  std::vector<std::uint8_t> ok(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i)
    ok[i] = targeted ? (pred[i] == labels[i]) : (pred[i] != labels[i]);
  return ok;
}

void check_inputs(const Tensor<float>& x, const std::vector<int>& labels) {
  if (x.ndim() != 4) throw ArgumentError("attack input must be [B,H,W,C]");
  if (static_cast<int>(labels.size()) != x.dim(0))
    throw ArgumentError("labels size does not match batch");
}

}  // namespace

std::vector<std::string> PerturbationBudget::validate() const {
  if (epsilon < 0) throw ArgumentError("epsilon must be >= 0");
  if (steps < 1) throw ArgumentError("steps must be >= 1");
  if (restarts < 0) throw ArgumentError("restarts must be >= 0");
  if (step_size < 0) throw ArgumentError("step_size must be >= 0");
  std::vector<std::string> warnings;
  if (steps > 1 && effective_step() > epsilon && epsilon > 0)
    warnings.push_back("step_size " + std::to_string(effective_step()) +
                       " exceeds epsilon " + std::to_string(epsilon) +
                       "; iterates will bounce off the ball boundary");
  return warnings;
}

Tensor<float> fgsm(Classifier& tc, const Tensor<float>& x,
                   const std::vector<int>& labels,
                   const PerturbationBudget& budget) {
  budget.validate();
  if (budget.steps != 1)
    throw ArgumentError("fgsm takes a single-step budget (steps == 1)");
  check_inputs(x, labels);
  Tensor<float> grad;
  attack_objective(tc, x, labels, budget, &grad);
  const float eps = static_cast<float>(budget.epsilon);
  Tensor<float> out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const float s = grad[i] > 0.0f ? 1.0f : (grad[i] < 0.0f ? -1.0f : 0.0f);
    out[i] = std::clamp(x[i] + eps * s, 0.0f, 1.0f);
  }
  return out;
}

Tensor<float> projected_sign_iterate(const Tensor<float>& center,
                                     const Tensor<float>& start,
                                     const ObjectiveFn& objective,
                                     double epsilon, double step, int steps,
                                     bool ascend) {
  const float eps = static_cast<float>(epsilon);
  const float st = static_cast<float>(step) * (ascend ? 1.0f : -1.0f);
  Tensor<float> x = start;
  Tensor<float> grad;
  for (int k = 0; k < steps; ++k) {
    objective(x, grad);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const float s = grad[i] > 0.0f ? 1.0f : (grad[i] < 0.0f ? -1.0f : 0.0f);
      float v = x[i] + st * s;
      v = std::clamp(v, center[i] - eps, center[i] + eps);
      x[i] = std::clamp(v, 0.0f, 1.0f);
    }
  }
  return x;
}

PgdResult pgd(Classifier& tc, const Tensor<float>& x,
              const std::vector<int>& labels, const PerturbationBudget& budget,
              std::uint64_t seed) {
  budget.validate();
  check_inputs(x, labels);
  const int b = x.dim(0);
  const std::size_t per = x.size() / static_cast<std::size_t>(b);
  const double step = budget.effective_step();

  ObjectiveFn objective = [&](const Tensor<float>& xt,
                              Tensor<float>& grad) -> std::vector<double> {
    return attack_objective(tc, xt, labels, budget, &grad);
  };

  PgdResult res;
  res.images = x;
  res.success.assign(static_cast<std::size_t>(b), 0);
  res.winning_restart.assign(static_cast<std::size_t>(b), -1);
  std::vector<double> best(static_cast<std::size_t>(b),
                           -std::numeric_limits<double>::infinity());
  bool first_attempt = true;

  const int attempts = std::max(1, budget.restarts);
  for (int r = 0; r < attempts; ++r) {
    Tensor<float> start = x;
    if (budget.restarts > 0) {
      auto rng = make_rng(mix_seed(seed, static_cast<std::uint64_t>(r)),
                          RngStream::kAttack);
      std::uniform_real_distribution<float> u(-static_cast<float>(budget.epsilon),
                                              static_cast<float>(budget.epsilon));
      for (std::size_t i = 0; i < start.size(); ++i)
        start[i] = std::clamp(x[i] + u(rng), 0.0f, 1.0f);
    }
    Tensor<float> iterate = projected_sign_iterate(
        x, start, objective, budget.epsilon, step, budget.steps, true);
    Tensor<float> dummy;
    std::vector<double> values = objective(iterate, dummy);
    auto ok = attack_success(tc, iterate, labels, budget.targeted);
    for (int i = 0; i < b; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      if (res.success[idx]) continue;  // first successful restart wins
      const bool take = ok[idx] || first_attempt || values[idx] > best[idx];
      if (take) {
        std::copy_n(iterate.data() + idx * per, per,
                    res.images.data() + idx * per);
        best[idx] = values[idx];
        if (ok[idx]) {
          res.success[idx] = 1;
          res.winning_restart[idx] = r;
        }
      }
    }
    first_attempt = false;
  }
  return res;
}

}  // namespace agan
