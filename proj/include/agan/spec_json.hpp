#ifndef AGAN_SPEC_JSON_HPP
#define AGAN_SPEC_JSON_HPP

#include "agan/losses.hpp"
#include "agan/models.hpp"
#include "json.hpp"

namespace agan {

inline nlohmann::json to_json(const ImageShape& s) {
  return {{"height", s.height}, {"width", s.width}, {"channels", s.channels}};
}

inline ImageShape image_shape_from_json(const nlohmann::json& j) {
  return ImageShape{j.at("height"), j.at("width"), j.at("channels")};
}

inline nlohmann::json to_json(const GeneratorSpec& s) {
  return {{"z_dim", s.z_dim},
          {"num_classes", s.num_classes},
          {"conditioning", conditioning_string(s.conditioning)},
          {"target_conditioned", s.target_conditioned},
          {"output_shape", to_json(s.output_shape)},
          {"architecture", arch_string(s.architecture)},
          {"hidden_sizes", s.hidden_sizes},
          {"base_channels", s.base_channels},
          {"embed_dim", s.embed_dim}};
}

inline GeneratorSpec generator_spec_from_json(const nlohmann::json& j) {
  GeneratorSpec s;
  s.z_dim = j.at("z_dim");
  s.num_classes = j.at("num_classes");
  s.conditioning = conditioning_from_string(j.at("conditioning"));
  s.target_conditioned = j.at("target_conditioned");
  s.output_shape = image_shape_from_json(j.at("output_shape"));
  s.architecture = arch_from_string(j.at("architecture"));
  s.hidden_sizes = j.at("hidden_sizes").get<std::vector<int>>();
  s.base_channels = j.at("base_channels");
  s.embed_dim = j.at("embed_dim");
  return s;
}

inline nlohmann::json to_json(const DiscriminatorSpec& s) {
  return {{"mode", discriminator_mode_string(s.mode)},
          {"num_classes", s.num_classes},
          {"input_shape", to_json(s.input_shape)},
          {"architecture", arch_string(s.architecture)},
          {"hidden_sizes", s.hidden_sizes},
          {"base_channels", s.base_channels}};
}

inline DiscriminatorSpec discriminator_spec_from_json(const nlohmann::json& j) {
  DiscriminatorSpec s;
  s.mode = discriminator_mode_from_string(j.at("mode"));
  s.num_classes = j.at("num_classes");
  s.input_shape = image_shape_from_json(j.at("input_shape"));
  s.architecture = arch_from_string(j.at("architecture"));
  s.hidden_sizes = j.at("hidden_sizes").get<std::vector<int>>();
  s.base_channels = j.at("base_channels");
  return s;
}

inline nlohmann::json to_json(const ClassifierSpec& s) {
  return {{"input_shape", to_json(s.input_shape)},
          {"num_classes", s.num_classes},
          {"architecture", arch_string(s.architecture)},
          {"hidden_sizes", s.hidden_sizes},
          {"base_channels", s.base_channels},
          {"dense_width", s.dense_width}};
}

inline ClassifierSpec classifier_spec_from_json(const nlohmann::json& j) {
  ClassifierSpec s;
  s.input_shape = image_shape_from_json(j.at("input_shape"));
  s.num_classes = j.at("num_classes");
  s.architecture = arch_from_string(j.at("architecture"));
  s.hidden_sizes = j.at("hidden_sizes").get<std::vector<int>>();
  s.base_channels = j.at("base_channels");
  s.dense_width = j.at("dense_width");
  return s;
}

inline std::string base_loss_string(BaseLoss l) {
  return l == BaseLoss::kCrossEntropy ? "cross_entropy" : "cw_logit";
}

inline BaseLoss base_loss_from_string(const std::string& s) {
  if (s == "cross_entropy") return BaseLoss::kCrossEntropy;
  if (s == "cw_logit") return BaseLoss::kCwLogit;
  throw ArgumentError("unknown base loss: " + s);
}

inline nlohmann::json to_json(const AttackObjectiveConfig& a) {
  return {{"target", a.target},
          {"alpha", a.alpha},
          {"mask_weight", a.mask_weight},
          {"base_loss", base_loss_string(a.base_loss)}};
}

inline AttackObjectiveConfig attack_config_from_json(const nlohmann::json& j) {
  AttackObjectiveConfig a;
  a.target = j.at("target");
  a.alpha = j.at("alpha");
  a.mask_weight = j.at("mask_weight");
  a.base_loss = base_loss_from_string(j.at("base_loss"));
  return a;
}

}  // namespace agan

#endif  // AGAN_SPEC_JSON_HPP
