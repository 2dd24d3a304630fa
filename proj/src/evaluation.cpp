#include "agan/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>

#include "agan/errors.hpp"
#include "agan/image_io.hpp"
#include "agan/losses.hpp"
#include "agan/rng.hpp"
#include "json.hpp"

namespace agan {

using nlohmann::json;

std::string crc_hex(std::uint32_t crc) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%08x", crc);
  return buf;
}

namespace {

std::string now_string() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

Tensor<float> generate_cell(Generator& g, int c, int t, int count,
                            std::mt19937& rng) {
  std::vector<int> labels(static_cast<std::size_t>(count), c);
  Tensor<float> z = sample_noise(count, g.spec().z_dim, rng);
  if (g.spec().target_conditioned) {
    std::vector<int> targets(static_cast<std::size_t>(count), t);
    return g.generate(labels, z, &targets);
  }
  return g.generate(labels, z);
}

}  // namespace

void EvalReport::finalize_rates(bool with_fidelity) {
  long cnt = 0, suc = 0, fid = 0, jnt = 0;
  for (int c = 0; c < num_classes; ++c)
    for (int t = 0; t < num_classes; ++t) {
      if (c == t) continue;
      const CellStats& s = cell(c, t);
      cnt += s.count;
      suc += s.success;
      fid += s.fidelity;
      jnt += s.joint;
    }
  overall_success_rate = cnt ? static_cast<double>(suc) / cnt : 0.0;
  if (with_fidelity) {
    fidelity_rate = cnt ? static_cast<double>(fid) / cnt : 0.0;
    joint_rate = cnt ? static_cast<double>(jnt) / cnt : 0.0;
  }
}

EvalReport attack_success_rate(Classifier& tc, Generator& g,
                               Classifier& oracle,
                               const std::vector<int>& targets,
                               int samples_per_cell, std::uint64_t seed) {
  if (samples_per_cell < 1)
    throw ArgumentError("samples_per_cell must be >= 1");
  if (targets.empty()) throw ArgumentError("no attack targets given");
  const int n = tc.num_classes();
  if (oracle.num_classes() != n)
    throw ArgumentError("oracle class count differs from target classifier");
  if (parameter_checksum(tc.parameters()) ==
      parameter_checksum(oracle.parameters()))
    throw ArgumentError("oracle must be a model independent of the target "
                        "classifier");
  for (int t : targets)
    if (t < 0 || t >= n) throw ArgumentError("target out of range");

  EvalReport rep;
  rep.mode = "targeted";
  rep.num_classes = n;
  rep.samples_per_cell = samples_per_cell;
  rep.cells.assign(static_cast<std::size_t>(n) * n, CellStats{});
  rep.seed = seed;
  rep.timestamp = now_string();
  rep.model_ids["target_classifier"] = crc_hex(parameter_checksum(tc.parameters()));
  rep.model_ids["oracle"] = crc_hex(parameter_checksum(oracle.parameters()));
  rep.model_ids["generator"] = crc_hex(parameter_checksum(g.parameters()));

  for (int t : targets) {
    for (int c = 0; c < n; ++c) {
      auto rng = make_rng(mix_seed(seed, static_cast<std::uint64_t>(c) * n + t),
                          RngStream::kEval);
      Tensor<float> images = generate_cell(g, c, t, samples_per_cell, rng);
      auto tc_pred = argmax_rows(tc.classify(images));
      auto oracle_pred = argmax_rows(oracle.classify(images));
      CellStats& cell = rep.cell(c, t);
      cell.count += samples_per_cell;
      for (int i = 0; i < samples_per_cell; ++i) {
        const bool s = tc_pred[static_cast<std::size_t>(i)] == t;
        const bool f = oracle_pred[static_cast<std::size_t>(i)] == c;
        cell.success += s;
        cell.fidelity += f;
        cell.joint += (s && f);
      }
    }
  }
  rep.finalize_rates(true);
  return rep;
}

EvalReport perturbation_report(Classifier& tc, const Tensor<float>& x,
                               const Tensor<float>& x_adv,
                               const std::vector<int>& labels,
                               const std::optional<std::vector<int>>& targets,
                               double epsilon) {
  if (!x.same_shape(x_adv))
    throw ArgumentError("x and x_adv must have identical shapes");
  const int b = x.dim(0);
  if (static_cast<int>(labels.size()) != b)
    throw ArgumentError("labels size does not match batch");
  if (targets && static_cast<int>(targets->size()) != b)
    throw ArgumentError("targets size does not match batch");
  const int n = tc.num_classes();

  EvalReport rep;
  rep.mode = targets ? "targeted" : "untargeted";
  rep.num_classes = n;
  rep.samples_per_cell = 0;
  rep.cells.assign(static_cast<std::size_t>(n) * n, CellStats{});
  rep.timestamp = now_string();
  rep.model_ids["target_classifier"] = crc_hex(parameter_checksum(tc.parameters()));
  rep.epsilon = epsilon;

  const std::size_t per = x.size() / static_cast<std::size_t>(b);
  double max_linf = 0.0, sum_linf = 0.0;
  for (int i = 0; i < b; ++i) {
    double m = 0.0;
    const float* a = x.data() + static_cast<std::size_t>(i) * per;
    const float* bp = x_adv.data() + static_cast<std::size_t>(i) * per;
    for (std::size_t j = 0; j < per; ++j)
      m = std::max(m, static_cast<double>(std::fabs(a[j] - bp[j])));
    max_linf = std::max(max_linf, m);
    sum_linf += m;
  }
  rep.linf_max = max_linf;
  rep.linf_mean = b ? sum_linf / b : 0.0;
  rep.budget_violation = max_linf > epsilon + 1e-6;
  for (float v : x_adv.vec())
    if (v < -1e-6f || v > 1.0f + 1e-6f) rep.budget_violation = true;

  auto pred = argmax_rows(tc.classify(x_adv));
  long correct = 0, success = 0;
  for (int i = 0; i < b; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    const int p = pred[static_cast<std::size_t>(i)];
    correct += (p == y);
    if (targets) {
      const int t = (*targets)[static_cast<std::size_t>(i)];
      CellStats& cell = rep.cell(y, t);
      cell.count += 1;
      cell.success += (p == t);
      if (y != t) success += (p == t);
    } else {
      CellStats& cell = rep.cell(y, p);
      cell.count += 1;
      cell.success += (p != y);
      success += (p != y);
    }
  }
  rep.accuracy = b ? static_cast<double>(correct) / b : 0.0;
  if (targets) {
    rep.finalize_rates(false);
  } else {
    rep.overall_success_rate = b ? static_cast<double>(success) / b : 0.0;
  }
  return rep;
}

void sample_grid(Generator& g, const GridOptions& opt, const std::string& path,
                 int* out_w, int* out_h) {
  const int n = g.spec().num_classes;
  const ImageShape& shape = g.spec().output_shape;
  std::vector<int> col_targets;
  int cols;
  if (g.spec().target_conditioned) {
    col_targets = opt.targets;
    if (col_targets.empty())
      for (int t = 0; t < n; ++t) col_targets.push_back(t);
    cols = static_cast<int>(col_targets.size());
  } else {
    cols = opt.z_variants;
    if (cols < 1) throw ArgumentError("z_variants must be >= 1");
  }
  if (opt.success_only && (opt.tc == nullptr || opt.filter_target < 0))
    throw ArgumentError("success_only grid needs a classifier and target");

  std::vector<Tensor<float>> cells;
  cells.reserve(static_cast<std::size_t>(n) * cols);
  const std::size_t flat = static_cast<std::size_t>(shape.flat());
  for (int c = 0; c < n; ++c) {
    for (int col = 0; col < cols; ++col) {
      auto rng = make_rng(mix_seed(opt.seed, static_cast<std::uint64_t>(c) * cols + col),
                          RngStream::kEval);
      const int t = g.spec().target_conditioned
                        ? col_targets[static_cast<std::size_t>(col)]
                        : opt.filter_target;
      Tensor<float> img;
      int tries = 0;
      while (true) {
        img = generate_cell(g, c, t, 1, rng);
        ++tries;
        if (!opt.success_only || tries >= opt.max_tries) break;
        auto p = argmax_rows(opt.tc->classify(img));
        if (p[0] == opt.filter_target || (g.spec().target_conditioned && p[0] == t))
          break;
      }
      Tensor<float> cell({shape.height, shape.width, shape.channels});
      std::copy_n(img.data(), flat, cell.data());
      cells.push_back(std::move(cell));
    }
  }
  int w = 0, h = 0;
  auto pixels = compose_grid(cells, n, cols, shape.height, shape.width,
                             shape.channels, opt.pad, &w, &h);
  write_png(path, w, h, shape.channels, pixels);
  if (out_w) *out_w = w;
  if (out_h) *out_h = h;
}

double retrain_delta_grid(Generator& g_pre, Generator& g_post, int z_variants,
                          std::uint64_t seed, const std::string& path,
                          int* out_w, int* out_h) {
  if (!(g_pre.spec().z_dim == g_post.spec().z_dim &&
        g_pre.spec().num_classes == g_post.spec().num_classes &&
        g_pre.spec().output_shape == g_post.spec().output_shape &&
        g_pre.spec().target_conditioned == g_post.spec().target_conditioned))
    throw ArgumentError("generators do not share a spec");
  if (g_pre.spec().target_conditioned)
    throw ArgumentError("delta grids compare per-target generators; "
                        "target-conditioned handles are not supported");
  if (z_variants < 1) throw ArgumentError("z_variants must be >= 1");
  const int n = g_pre.spec().num_classes;
  const ImageShape& shape = g_pre.spec().output_shape;
  const std::size_t flat = static_cast<std::size_t>(shape.flat());

  std::vector<Tensor<float>> cells;
  cells.reserve(static_cast<std::size_t>(n) * z_variants * 2);
  double delta_sum = 0.0;
  std::size_t delta_count = 0;
  for (int c = 0; c < n; ++c) {
    for (int col = 0; col < z_variants; ++col) {
      auto rng = make_rng(
          mix_seed(seed, static_cast<std::uint64_t>(c) * z_variants + col),
          RngStream::kProbe);
      std::vector<int> labels{c};
      Tensor<float> z = sample_noise(1, g_pre.spec().z_dim, rng);
      Tensor<float> a = g_pre.generate(labels, z);
      Tensor<float> b = g_post.generate(labels, z);
      for (std::size_t i = 0; i < flat; ++i)
        delta_sum += std::fabs(a[i] - b[i]);
      delta_count += flat;
      Tensor<float> ca({shape.height, shape.width, shape.channels});
      Tensor<float> cb({shape.height, shape.width, shape.channels});
      std::copy_n(a.data(), flat, ca.data());
      std::copy_n(b.data(), flat, cb.data());
      cells.push_back(std::move(ca));
      cells.push_back(std::move(cb));
    }
  }
  int w = 0, h = 0;
  auto pixels = compose_grid(cells, n, z_variants * 2, shape.height,
                             shape.width, shape.channels, 0, &w, &h);
  write_png(path, w, h, shape.channels, pixels);
  if (out_w) *out_w = w;
  if (out_h) *out_h = h;
  return delta_count ? delta_sum / static_cast<double>(delta_count) : 0.0;
}

namespace {

json cells_to_json(const EvalReport& r, long CellStats::*field) {
  json rows = json::array();
  for (int c = 0; c < r.num_classes; ++c) {
    json row = json::array();
    for (int t = 0; t < r.num_classes; ++t) row.push_back(r.cell(c, t).*field);
    rows.push_back(row);
  }
  return rows;
}

void cells_from_json(EvalReport& r, const json& rows, long CellStats::*field) {
  for (int c = 0; c < r.num_classes; ++c)
    for (int t = 0; t < r.num_classes; ++t)
      r.cell(c, t).*field = rows.at(c).at(t).get<long>();
}

json opt_to_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> opt_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

void write_report(const EvalReport& r, const std::string& path) {
  json j{
      {"schema_version", r.schema_version},
      {"kind", "evaluation_report"},
      {"mode", r.mode},
      {"matrix_order",
       "row-major: rows are the true/conditioned class c, columns the attack "
       "target t (predicted class for untargeted reports)"},
      {"diagonal_excluded_from_overall", true},
      {"num_classes", r.num_classes},
      {"samples_per_cell", r.samples_per_cell},
      {"cell_counts", cells_to_json(r, &CellStats::count)},
      {"cell_success", cells_to_json(r, &CellStats::success)},
      {"cell_fidelity", cells_to_json(r, &CellStats::fidelity)},
      {"cell_joint", cells_to_json(r, &CellStats::joint)},
      {"overall_success_rate", r.overall_success_rate},
      {"fidelity_rate", opt_to_json(r.fidelity_rate)},
      {"joint_rate", opt_to_json(r.joint_rate)},
      {"accuracy", opt_to_json(r.accuracy)},
      {"linf_max", opt_to_json(r.linf_max)},
      {"linf_mean", opt_to_json(r.linf_mean)},
      {"epsilon", opt_to_json(r.epsilon)},
      {"budget_violation", r.budget_violation},
      {"seed", r.seed},
      {"timestamp", r.timestamp},
      {"model_ids", r.model_ids},
      {"config_echo", r.config_echo},
  };
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write report: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed writing report: " + path);
}

EvalReport read_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open report: " + path);
  json j = json::parse(in, nullptr, true);
  EvalReport r;
  r.schema_version = j.at("schema_version");
  r.mode = j.at("mode");
  r.num_classes = j.at("num_classes");
  r.samples_per_cell = j.at("samples_per_cell");
  r.cells.assign(static_cast<std::size_t>(r.num_classes) * r.num_classes,
                 CellStats{});
  cells_from_json(r, j.at("cell_counts"), &CellStats::count);
  cells_from_json(r, j.at("cell_success"), &CellStats::success);
  cells_from_json(r, j.at("cell_fidelity"), &CellStats::fidelity);
  cells_from_json(r, j.at("cell_joint"), &CellStats::joint);
  r.overall_success_rate = j.at("overall_success_rate");
  r.fidelity_rate = opt_from_json(j.at("fidelity_rate"));
  r.joint_rate = opt_from_json(j.at("joint_rate"));
  r.accuracy = opt_from_json(j.at("accuracy"));
  r.linf_max = opt_from_json(j.at("linf_max"));
  r.linf_mean = opt_from_json(j.at("linf_mean"));
  r.epsilon = opt_from_json(j.at("epsilon"));
  r.budget_violation = j.at("budget_violation");
  r.seed = j.at("seed").get<std::uint64_t>();
  r.timestamp = j.at("timestamp");
  r.model_ids = j.at("model_ids").get<std::map<std::string, std::string>>();
  r.config_echo = j.at("config_echo");
  return r;
}

}  // namespace agan
