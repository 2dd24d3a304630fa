#ifndef AGAN_CHECKPOINT_HPP
#define AGAN_CHECKPOINT_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agan/losses.hpp"
#include "agan/models.hpp"

namespace agan {

constexpr std::uint32_t kCheckpointFormatVersion = 1;

struct NamedArray {
  std::string name;
  std::vector<int> shape;
  std::vector<float> data;
};

/// In-memory form of the versioned checkpoint container. The binary layout
/// is little-endian: magic "AGCP", format version, metadata JSON, named
/// float arrays, then a CRC-32 over everything after the magic. A
/// human-readable JSON sidecar (<path>.json) mirrors the metadata.
struct Checkpoint {
  std::uint32_t format_version = kCheckpointFormatVersion;
  std::string metadata_json;  // serialized metadata object
  std::vector<NamedArray> arrays;
};

void write_checkpoint_file(const Checkpoint& ckpt, const std::string& path);
Checkpoint read_checkpoint_file(const std::string& path);

/// CRC-32 of the on-disk payload (everything between magic and trailer),
/// recomputed from an in-memory checkpoint. Reported in manifests so a run
/// can be tied to exact weights.
std::uint32_t checkpoint_payload_crc(const Checkpoint& ckpt);

// --- typed save/load on top of the container -------------------------------

struct GanCheckpointMeta {
  GeneratorSpec generator;
  DiscriminatorSpec discriminator;
  std::string dataset = "mnist";
  int epochs_completed = 0;
  std::uint64_t seed = 0;
  std::optional<AttackObjectiveConfig> attack;
  double learning_rate = 2e-4;
  double beta1 = 0.5;
};

struct ClassifierCheckpointMeta {
  ClassifierSpec spec;
  std::string dataset = "mnist";
  int epochs_completed = 0;
  std::uint64_t seed = 0;
  double test_accuracy = 0.0;
};

void save_gan_checkpoint(Generator& g, Discriminator& d,
                         const GanCheckpointMeta& meta,
                         const std::string& path);

struct LoadedGan {
  Generator generator;
  Discriminator discriminator;
  GanCheckpointMeta meta;
};
LoadedGan load_gan_checkpoint(const std::string& path);

void save_classifier_checkpoint(Classifier& c,
                                const ClassifierCheckpointMeta& meta,
                                const std::string& path);

struct LoadedClassifier {
  Classifier classifier;
  ClassifierCheckpointMeta meta;
};
LoadedClassifier load_classifier_checkpoint(const std::string& path);

}  // namespace agan

#endif  // AGAN_CHECKPOINT_HPP
