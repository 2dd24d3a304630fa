#include "agan/checkpoint.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

#include "agan/errors.hpp"
#include "agan/spec_json.hpp"
#include "json.hpp"

namespace agan {

namespace {

constexpr char kMagic[4] = {'A', 'G', 'C', 'P'};

void append_u32(std::vector<unsigned char>& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void append_u64(std::vector<unsigned char>& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i)
    buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void append_bytes(std::vector<unsigned char>& buf, const void* p,
                  std::size_t n) {
  const auto* b = static_cast<const unsigned char*>(p);
  buf.insert(buf.end(), b, b + n);
}

class Reader {
 public:
  Reader(const unsigned char* p, std::size_t n) : p_(p), n_(n) {}
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(p_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(p_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  const unsigned char* bytes(std::size_t n) {
    need(n);
    const unsigned char* out = p_ + pos_;
    pos_ += n;
    return out;
  }
  std::size_t remaining() const { return n_ - pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > n_) throw CorruptCheckpointError("checkpoint truncated");
  }
  const unsigned char* p_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

std::vector<unsigned char> serialize_payload(const Checkpoint& ckpt) {
  std::vector<unsigned char> payload;
  append_u32(payload, ckpt.format_version);
  append_u64(payload, ckpt.metadata_json.size());
  append_bytes(payload, ckpt.metadata_json.data(), ckpt.metadata_json.size());
  append_u32(payload, static_cast<std::uint32_t>(ckpt.arrays.size()));
  for (const auto& a : ckpt.arrays) {
    append_u32(payload, static_cast<std::uint32_t>(a.name.size()));
    append_bytes(payload, a.name.data(), a.name.size());
    append_u32(payload, static_cast<std::uint32_t>(a.shape.size()));
    for (int d : a.shape) append_u32(payload, static_cast<std::uint32_t>(d));
    append_u64(payload, a.data.size() * sizeof(float));
    append_bytes(payload, a.data.data(), a.data.size() * sizeof(float));
  }
  return payload;
}

std::uint32_t crc_of(const std::vector<unsigned char>& payload) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, payload.data(), static_cast<uInt>(payload.size()));
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::uint32_t checkpoint_payload_crc(const Checkpoint& ckpt) {
  return crc_of(serialize_payload(ckpt));
}

void write_checkpoint_file(const Checkpoint& ckpt, const std::string& path) {
  const auto payload = serialize_payload(ckpt);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  std::vector<unsigned char> tail;
  append_u32(tail, crc_of(payload));
  out.write(reinterpret_cast<const char*>(tail.data()), 4);
  if (!out) throw IoError("failed writing checkpoint: " + path);

  // Human-readable sidecar with the same metadata.
  std::ofstream side(path + ".json", std::ios::binary);
  if (side) side << ckpt.metadata_json << "\n";
}

Checkpoint read_checkpoint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (buf.size() < 8 || std::memcmp(buf.data(), kMagic, 4) != 0)
    throw CorruptCheckpointError("not a checkpoint file: " + path);
  const std::size_t payload_len = buf.size() - 8;
  std::uint32_t stored_crc = 0;
  for (int i = 0; i < 4; ++i)
    stored_crc |= std::uint32_t(buf[buf.size() - 4 + i]) << (8 * i);
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, buf.data() + 4, static_cast<uInt>(payload_len));
  if (static_cast<std::uint32_t>(crc) != stored_crc)
    throw CorruptCheckpointError("checksum mismatch in " + path);

  Reader r(buf.data() + 4, payload_len);
  Checkpoint ckpt;
  ckpt.format_version = r.u32();
  if (ckpt.format_version > kCheckpointFormatVersion)
    throw VersionError("checkpoint format version " +
                       std::to_string(ckpt.format_version) +
                       " is newer than supported version " +
                       std::to_string(kCheckpointFormatVersion));
  const std::uint64_t meta_len = r.u64();
  const unsigned char* meta = r.bytes(meta_len);
  ckpt.metadata_json.assign(reinterpret_cast<const char*>(meta), meta_len);
  const std::uint32_t narrays = r.u32();
  ckpt.arrays.resize(narrays);
  for (auto& a : ckpt.arrays) {
    const std::uint32_t name_len = r.u32();
    const unsigned char* name = r.bytes(name_len);
    a.name.assign(reinterpret_cast<const char*>(name), name_len);
    const std::uint32_t ndim = r.u32();
    a.shape.resize(ndim);
    std::size_t count = 1;
    for (auto& d : a.shape) {
      d = static_cast<int>(r.u32());
      count *= static_cast<std::size_t>(d);
    }
    const std::uint64_t nbytes = r.u64();
    if (nbytes != count * sizeof(float))
      throw CorruptCheckpointError("array byte length inconsistent");
    a.data.resize(count);
    std::memcpy(a.data.data(), r.bytes(nbytes), nbytes);
  }
  if (r.remaining() != 0)
    throw CorruptCheckpointError("trailing bytes in checkpoint payload");
  return ckpt;
}

// ---------------------------------------------------------------------------
// typed layers on top of the container

namespace {

using nlohmann::json;

void dump_params(const std::string& prefix,
                 const std::vector<Parameter<float>*>& params,
                 std::vector<NamedArray>& out) {
  for (const auto* p : params)
    out.push_back(NamedArray{
        prefix + p->name, p->value.shape(),
        std::vector<float>(p->value.vec().begin(), p->value.vec().end())});
}

void restore_params(const std::string& prefix,
                    const std::vector<Parameter<float>*>& params,
                    const std::vector<NamedArray>& arrays) {
  for (auto* p : params) {
    const std::string want = prefix + p->name;
    const NamedArray* found = nullptr;
    for (const auto& a : arrays)
      if (a.name == want) {
        found = &a;
        break;
      }
    if (!found)
      throw CorruptCheckpointError("missing parameter array: " + want);
    if (found->shape != p->value.shape())
      throw CorruptCheckpointError("parameter shape mismatch: " + want);
    p->value.vec().assign(found->data.begin(), found->data.end());
  }
}

}  // namespace

void save_gan_checkpoint(Generator& g, Discriminator& d,
                         const GanCheckpointMeta& meta,
                         const std::string& path) {
  Checkpoint ckpt;
  json m{{"kind", "gan"},
         {"format_version", kCheckpointFormatVersion},
         {"generator", to_json(meta.generator)},
         {"discriminator", to_json(meta.discriminator)},
         {"dataset", meta.dataset},
         {"epochs_completed", meta.epochs_completed},
         {"seed", meta.seed},
         {"optimizer",
          {{"name", "adam"}, {"learning_rate", meta.learning_rate}, {"beta1", meta.beta1}}},
         {"attack", meta.attack ? to_json(*meta.attack) : json(nullptr)}};
  ckpt.metadata_json = m.dump(2);
  dump_params("generator.", g.parameters(), ckpt.arrays);
  dump_params("generator.", g.buffers(), ckpt.arrays);
  dump_params("discriminator.", d.parameters(), ckpt.arrays);
  dump_params("discriminator.", d.buffers(), ckpt.arrays);
  write_checkpoint_file(ckpt, path);
}

LoadedGan load_gan_checkpoint(const std::string& path) {
  const Checkpoint ckpt = read_checkpoint_file(path);
  json m = json::parse(ckpt.metadata_json);
  if (m.at("kind") != "gan")
    throw ArgumentError("checkpoint is not a GAN checkpoint: " + path);
  GanCheckpointMeta meta;
  meta.generator = generator_spec_from_json(m.at("generator"));
  meta.discriminator = discriminator_spec_from_json(m.at("discriminator"));
  meta.dataset = m.at("dataset");
  meta.epochs_completed = m.at("epochs_completed");
  meta.seed = m.at("seed");
  meta.learning_rate = m.at("optimizer").at("learning_rate");
  meta.beta1 = m.at("optimizer").at("beta1");
  if (!m.at("attack").is_null())
    meta.attack = attack_config_from_json(m.at("attack"));
  LoadedGan out{Generator(meta.generator, meta.seed),
                Discriminator(meta.discriminator, meta.seed), meta};
  restore_params("generator.", out.generator.parameters(), ckpt.arrays);
  restore_params("generator.", out.generator.buffers(), ckpt.arrays);
  restore_params("discriminator.", out.discriminator.parameters(), ckpt.arrays);
  restore_params("discriminator.", out.discriminator.buffers(), ckpt.arrays);
  return out;
}

void save_classifier_checkpoint(Classifier& c,
                                const ClassifierCheckpointMeta& meta,
                                const std::string& path) {
  Checkpoint ckpt;
  json m{{"kind", "classifier"},
         {"format_version", kCheckpointFormatVersion},
         {"spec", to_json(meta.spec)},
         {"dataset", meta.dataset},
         {"epochs_completed", meta.epochs_completed},
         {"seed", meta.seed},
         {"test_accuracy", meta.test_accuracy}};
  ckpt.metadata_json = m.dump(2);
  dump_params("classifier.", c.parameters(), ckpt.arrays);
  dump_params("classifier.", c.buffers(), ckpt.arrays);
  write_checkpoint_file(ckpt, path);
}

LoadedClassifier load_classifier_checkpoint(const std::string& path) {
  const Checkpoint ckpt = read_checkpoint_file(path);
  json m = json::parse(ckpt.metadata_json);
  if (m.at("kind") != "classifier")
    throw ArgumentError("checkpoint is not a classifier checkpoint: " + path);
  ClassifierCheckpointMeta meta;
  meta.spec = classifier_spec_from_json(m.at("spec"));
  meta.dataset = m.at("dataset");
  meta.epochs_completed = m.at("epochs_completed");
  meta.seed = m.at("seed");
  meta.test_accuracy = m.at("test_accuracy");
  LoadedClassifier out{Classifier(meta.spec, meta.seed), meta};
  restore_params("classifier.", out.classifier.parameters(), ckpt.arrays);
  restore_params("classifier.", out.classifier.buffers(), ckpt.arrays);
  return out;
}

}  // namespace agan
