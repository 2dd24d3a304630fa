#ifndef AGAN_EVALUATION_HPP
#define AGAN_EVALUATION_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agan/data.hpp"
#include "agan/models.hpp"

namespace agan {

struct CellStats {
  long count = 0;
  long success = 0;
  long fidelity = 0;
  long joint = 0;
};

/// Attack evaluation summary. The matrix is indexed row-major by true /
/// conditioned class c (rows) then attack target t (columns). Headline
/// rates are sample-weighted means over off-diagonal (c != t) cells;
/// diagonal cells are reported but excluded, since "success" is vacuous
/// when c == t. Untargeted perturbation reports reuse the matrix as a
/// confusion table (c, predicted) and compute the headline rate over all
/// samples.
struct EvalReport {
  int schema_version = 1;
  std::string mode = "targeted";  // "targeted" | "untargeted"
  int num_classes = 0;
  long samples_per_cell = 0;
  std::vector<CellStats> cells;  // num_classes * num_classes, row-major

  double overall_success_rate = 0.0;
  std::optional<double> fidelity_rate;
  std::optional<double> joint_rate;
  std::optional<double> accuracy;  // classifier accuracy on x_adv

  // L-infinity statistics (perturbation reports only)
  std::optional<double> linf_max;
  std::optional<double> linf_mean;
  std::optional<double> epsilon;
  bool budget_violation = false;

  std::uint64_t seed = 0;
  std::string timestamp;
  std::map<std::string, std::string> model_ids;
  std::string config_echo;  // JSON text echoed into the report

  CellStats& cell(int c, int t) {
    return cells[static_cast<std::size_t>(c) * num_classes + t];
  }
  const CellStats& cell(int c, int t) const {
    return cells[static_cast<std::size_t>(c) * num_classes + t];
  }

  /// Recomputes the headline rates from the per-cell tallies.
  void finalize_rates(bool with_fidelity);
};

/// Per-(c,t) attack success of generated images: success iff the target
/// classifier reads the image as t; fidelity iff the oracle reads it as the
/// conditioned class c; joint iff both. The oracle must not be the same
/// model as the target classifier. For a target-conditioned generator the
/// target is fed to the generator; otherwise the same generator is sampled
/// for every requested target column.
EvalReport attack_success_rate(Classifier& tc, Generator& g,
                               Classifier& oracle,
                               const std::vector<int>& targets,
                               int samples_per_cell, std::uint64_t seed);

/// Success accounting for perturbation attacks plus L-infinity statistics
/// and a budget violation flag. With targets present the report is
/// targeted (cells (true label, target)); otherwise untargeted (confusion
/// cells, overall rate = misclassification rate).
EvalReport perturbation_report(Classifier& tc, const Tensor<float>& x,
                               const Tensor<float>& x_adv,
                               const std::vector<int>& labels,
                               const std::optional<std::vector<int>>& targets,
                               double epsilon);

struct GridOptions {
  int z_variants = 10;        // columns for a non-target-conditioned G
  std::vector<int> targets;   // columns for a target-conditioned G
  std::uint64_t seed = 1;
  int pad = 0;
  bool success_only = false;  // resample cells until the attack succeeds
  int max_tries = 50;
  Classifier* tc = nullptr;       // required when success_only
  int filter_target = -1;         // target used by the success filter
};

/// Writes a PNG grid with one row per class and one column per target (or
/// z variant). Returns the grid dimensions through PngInfo-compatible ints.
void sample_grid(Generator& g, const GridOptions& opt, const std::string& path,
                 int* out_w = nullptr, int* out_h = nullptr);

/// Side-by-side (pre | post) cells from identical (c, z) inputs, one row
/// per class; returns the mean absolute per-pixel difference over the probe.
double retrain_delta_grid(Generator& g_pre, Generator& g_post, int z_variants,
                          std::uint64_t seed, const std::string& path,
                          int* out_w = nullptr, int* out_h = nullptr);

/// Structured JSON report I/O; write(read(write(x))) is byte-identical.
void write_report(const EvalReport& report, const std::string& path);
EvalReport read_report(const std::string& path);

std::string crc_hex(std::uint32_t crc);

}  // namespace agan

#endif  // AGAN_EVALUATION_HPP
