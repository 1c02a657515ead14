#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "gripscribe/dynamics.hpp"
#include "gripscribe/handlemount.hpp"
#include "gripscribe/kinematics.hpp"
#include "gripscribe/penholder.hpp"
#include "gripscribe/signals.hpp"

namespace gripscribe {

/// Everything a run needs. An empty JSON object is a valid config: all
/// fields default.
struct ProjectConfig {
  MechanismConfig mechanism;
  DynamicParams dynamics;
  HandImpedance hand;
  TremorSpec tremor;
  IntentPath intent;
  GripperGeometry gripper;
  SpringSpec spring;
  MountConfig mount;
  std::filesystem::path output_dir = "out";
};

/// Parses a JSON document. Unknown fields, wrong types and violated
/// invariants raise ConfigError naming the field path (e.g. `mechanism.l1`).
/// When `dynamics.damper_placement` is absent it follows the mechanism
/// variant.
ProjectConfig parse_config(std::string_view json_text);

ProjectConfig load_config(const std::filesystem::path& path);

/// Pretty-printed JSON with every field, accepted back by parse_config.
std::string dump_config(const ProjectConfig& config);

}  // namespace gripscribe
