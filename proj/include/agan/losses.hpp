#ifndef AGAN_LOSSES_HPP
#define AGAN_LOSSES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "agan/errors.hpp"
#include "agan/tensor.hpp"

namespace agan {

enum class BaseLoss { kCrossEntropy, kCwLogit };

/// Knobs of the combined attack objective: target class t, GAN/attack
/// balance alpha, mask weight beta (0 = indicator mask, 1 = unmasked), and
/// the per-sample classifier loss J.
struct AttackObjectiveConfig {
  int target = 0;
  double alpha = 1.0;
  double mask_weight = 0.0;
  BaseLoss base_loss = BaseLoss::kCrossEntropy;

  void validate(int num_classes) const {
    if (target < 0 || target >= num_classes)
      throw ArgumentError("attack target out of range [0," +
                          std::to_string(num_classes) + ")");
    if (alpha < 0.0) throw ArgumentError("alpha must be non-negative");
    if (mask_weight < 0.0 || mask_weight > 1.0)
      throw ArgumentError("mask_weight must lie in [0,1]");
  }
};

template <typename T>
struct ScalarLossGrad {
  T value = T(0);
  Tensor<T> dlogits;
};

/// Row-wise argmax with ties broken toward the lowest class index.
template <typename T>
inline std::vector<int> argmax_rows(const Tensor<T>& logits) {
  const int b = logits.dim(0), n = logits.dim(1);
  std::vector<int> out(static_cast<std::size_t>(b));
  for (int i = 0; i < b; ++i) {
    const T* row = logits.data() + static_cast<std::size_t>(i) * n;
    out[i] = static_cast<int>(std::max_element(row, row + n) - row);
  }
  return out;
}

/// Numerically stable softmax cross-entropy of each row toward class t.
/// Returns per-sample values; dlogits (if non-null) gets softmax - onehot_t
/// per row (the unreduced Jacobian-vector product).
template <typename T>
inline std::vector<T> cross_entropy_to_target(const Tensor<T>& logits, int t,
                                              Tensor<T>* dlogits) {
  const int b = logits.dim(0), n = logits.dim(1);
  if (t < 0 || t >= n) throw ArgumentError("target class out of range");
  std::vector<T> values(static_cast<std::size_t>(b));
  if (dlogits) *dlogits = Tensor<T>({b, n});
  std::vector<T> p(static_cast<std::size_t>(n));
  for (int i = 0; i < b; ++i) {
    const T* row = logits.data() + static_cast<std::size_t>(i) * n;
    const T mx = *std::max_element(row, row + n);
    T sum = T(0);
    for (int j = 0; j < n; ++j) {
      p[j] = std::exp(row[j] - mx);
      sum += p[j];
    }
    values[i] = std::log(sum) - (row[t] - mx);
    if (dlogits) {
      T* drow = dlogits->data() + static_cast<std::size_t>(i) * n;
      for (int j = 0; j < n; ++j) drow[j] = p[j] / sum - (j == t ? T(1) : T(0));
    }
  }
  return values;
}

/// Per-sample cross-entropy toward per-row labels (classifier training).
template <typename T>
inline std::vector<T> cross_entropy_to_labels(const Tensor<T>& logits,
                                              const std::vector<int>& labels,
                                              Tensor<T>* dlogits) {
  const int b = logits.dim(0), n = logits.dim(1);
  if (static_cast<int>(labels.size()) != b)
    throw ArgumentError("labels/logits batch mismatch");
  std::vector<T> values(static_cast<std::size_t>(b));
  if (dlogits) *dlogits = Tensor<T>({b, n});
  std::vector<T> p(static_cast<std::size_t>(n));
  for (int i = 0; i < b; ++i) {
    const int t = labels[static_cast<std::size_t>(i)];
    if (t < 0 || t >= n) throw ArgumentError("label out of range");
    const T* row = logits.data() + static_cast<std::size_t>(i) * n;
    const T mx = *std::max_element(row, row + n);
    T sum = T(0);
    for (int j = 0; j < n; ++j) {
      p[j] = std::exp(row[j] - mx);
      sum += p[j];
    }
    values[i] = std::log(sum) - (row[t] - mx);
    if (dlogits) {
      T* drow = dlogits->data() + static_cast<std::size_t>(i) * n;
      for (int j = 0; j < n; ++j) drow[j] = p[j] / sum - (j == t ? T(1) : T(0));
    }
  }
  return values;
}

/// Targeted margin loss per sample: max(0, max_{j != t} logit_j - logit_t).
/// Zero exactly when t is the argmax with non-negative margin; invariant
/// under adding a constant to every logit.
template <typename T>
inline std::vector<T> cw_logit_loss(const Tensor<T>& logits, int t,
                                    Tensor<T>* dlogits = nullptr) {
  const int b = logits.dim(0), n = logits.dim(1);
  if (n < 2) throw ArgumentError("cw logit loss needs at least 2 classes");
  if (t < 0 || t >= n) throw ArgumentError("target class out of range");
  std::vector<T> values(static_cast<std::size_t>(b));
  if (dlogits) *dlogits = Tensor<T>({b, n});
  for (int i = 0; i < b; ++i) {
    const T* row = logits.data() + static_cast<std::size_t>(i) * n;
    int best = -1;
    for (int j = 0; j < n; ++j) {
      if (j == t) continue;
      if (best < 0 || row[j] > row[best]) best = j;
    }
    const T margin = row[best] - row[t];
    values[i] = margin > T(0) ? margin : T(0);
    if (dlogits) {
      T* drow = dlogits->data() + static_cast<std::size_t>(i) * n;
      std::fill(drow, drow + n, T(0));
      if (margin > T(0)) {
        drow[best] = T(1);
        drow[t] = T(-1);
      }
    }
  }
  return values;
}

/// Masked attack loss: mean over the batch of w_i * J(logits_i, t) where
/// w_i = 1 for unsuccessful samples (argmax != t) and mask_weight otherwise.
/// The weights are stopped-gradient constants; the divisor stays B no matter
/// how many samples are masked.
template <typename T>
inline ScalarLossGrad<T> attack_loss(const Tensor<T>& logits,
                                     const AttackObjectiveConfig& cfg) {
  if (logits.ndim() != 2 || logits.dim(0) < 1)
    throw ArgumentError("attack_loss expects a non-empty [B,n] logit matrix");
  const int b = logits.dim(0);
  cfg.validate(logits.dim(1));
  Tensor<T> dj;
  std::vector<T> j = cfg.base_loss == BaseLoss::kCrossEntropy
                         ? cross_entropy_to_target(logits, cfg.target, &dj)
                         : cw_logit_loss(logits, cfg.target, &dj);
  const std::vector<int> pred = argmax_rows(logits);
  ScalarLossGrad<T> out;
  out.dlogits = Tensor<T>(logits.shape());
  const int n = logits.dim(1);
  T total = T(0);
  for (int i = 0; i < b; ++i) {
    const T w = pred[static_cast<std::size_t>(i)] != cfg.target
                    ? T(1)
                    : static_cast<T>(cfg.mask_weight);
    total += w * j[static_cast<std::size_t>(i)];
    const T scale = w / static_cast<T>(b);
    const T* src = dj.data() + static_cast<std::size_t>(i) * n;
    T* dst = out.dlogits.data() + static_cast<std::size_t>(i) * n;
    for (int k = 0; k < n; ++k) dst[k] = scale * src[k];
  }
  out.value = total / static_cast<T>(b);
  return out;
}

/// Binary cross-entropy on realness logits toward probability target_p,
/// averaged over the batch. Stable log-sum-exp form.
template <typename T>
inline ScalarLossGrad<T> bce_with_logits(const Tensor<T>& logits, T target_p) {
  if (logits.empty()) throw ArgumentError("bce on empty batch");
  const std::size_t b = logits.size();
  ScalarLossGrad<T> out;
  out.dlogits = Tensor<T>(logits.shape());
  T total = T(0);
  for (std::size_t i = 0; i < b; ++i) {
    const T x = logits[i];
    total += std::max(x, T(0)) - x * target_p + std::log1p(std::exp(-std::abs(x)));
    const T sig = T(1) / (T(1) + std::exp(-x));
    out.dlogits[i] = (sig - target_p) / static_cast<T>(b);
  }
  out.value = total / static_cast<T>(b);
  return out;
}

/// Combined generator objective: GAN term plus alpha times the attack term.
template <typename T>
inline T combined_generator_loss(T g_gan_loss, T attack, T alpha) {
  if (alpha < T(0)) throw ArgumentError("alpha must be non-negative");
  return g_gan_loss + alpha * attack;
}

}  // namespace agan

#endif  // AGAN_LOSSES_HPP
