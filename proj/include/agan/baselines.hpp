#ifndef AGAN_BASELINES_HPP
#define AGAN_BASELINES_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "agan/losses.hpp"
#include "agan/models.hpp"

namespace agan {

/// L-infinity attack budget on [0,1] pixels. step_size <= 0 selects the
/// default 2.5 * epsilon / steps.
struct PerturbationBudget {
  double epsilon = 0.3;
  double step_size = 0.0;
  int steps = 1;
  int restarts = 0;
  bool targeted = false;
  BaseLoss loss = BaseLoss::kCrossEntropy;

  double effective_step() const {
    return step_size > 0.0 ? step_size : 2.5 * epsilon / steps;
  }

  /// Throws ArgumentError on hard violations; returns soft warnings
  /// (e.g. step_size exceeding epsilon for multi-step attacks).
  std::vector<std::string> validate() const;
};

/// Single-step fast gradient sign attack. Untargeted ascends the loss of
/// the true label; targeted descends the loss toward the target. labels
/// carries the true label (untargeted) or the attack target (targeted)
/// per sample. Output is clipped to [0,1].
Tensor<float> fgsm(Classifier& tc, const Tensor<float>& x,
                   const std::vector<int>& labels,
                   const PerturbationBudget& budget);

struct PgdResult {
  Tensor<float> images;
  std::vector<std::uint8_t> success;     // per-sample final success flag
  std::vector<int> winning_restart;      // -1 when no restart succeeded
};

/// Iterative projected sign attack with optional random restarts. Each
/// iterate stays inside the epsilon ball around x intersected with [0,1].
/// restarts == 0 runs one trajectory starting at x (the iterative FGSM
/// case); restarts >= 1 runs that many uniformly random starts inside the
/// ball. The first restart that succeeds on a sample wins; samples with no
/// success keep the iterate with the strongest loss. Restart r draws its
/// start from a stream keyed by (seed, r), so adding restarts never changes
/// earlier ones.
PgdResult pgd(Classifier& tc, const Tensor<float>& x,
              const std::vector<int>& labels, const PerturbationBudget& budget,
              std::uint64_t seed);

/// Evaluates per-sample loss and gradient at x; fills grad (same shape as
/// x) and returns one loss value per sample.
using ObjectiveFn =
    std::function<std::vector<double>(const Tensor<float>&, Tensor<float>&)>;

/// The projected iterate underlying pgd(): steps of x += step*sign(grad)
/// (ascend=false flips the sign), each projected onto the epsilon ball
/// around center and the [0,1] box. Exposed so optimizer behaviour can be
/// tested against brute-force oracles on analytic objectives.
Tensor<float> projected_sign_iterate(const Tensor<float>& center,
                                     const Tensor<float>& start,
                                     const ObjectiveFn& objective,
                                     double epsilon, double step, int steps,
                                     bool ascend);

}  // namespace agan

#endif  // AGAN_BASELINES_HPP
