#pragma once

// Run configuration: a JSON file plus command-line overrides.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "switchvol/jump_model.hpp"
#include "switchvol/stable_model.hpp"

namespace switchvol {

enum class ModelKind { jump, stable };

ModelKind parse_model(const std::string& name);
std::string model_name(ModelKind kind);

struct SamplerConfig {
  int iterations = 20000;
  int burn_in = 5000;
  std::optional<std::uint64_t> seed;
};

struct RunConfig {
  ModelKind model = ModelKind::jump;
  int states = 4;
  SamplerConfig sampler;
  JumpPriors jump = JumpPriors::defaults(4);
  double b = 40.0;
  StablePriors stable = StablePriors::defaults(4);
  double alpha = 1.7;
  std::vector<double> pi0;  // empty means uniform
  std::string data_path;
  std::string reference_path;
  std::string out_dir = "out";

  /// Rebuilds state-count dependent defaults that were not set explicitly.
  void resize_defaults(int m);
  void validate() const;
  std::uint64_t seed() const;
};

/// Flags given on the command line; unset fields leave the file value.
struct ConfigOverrides {
  std::optional<std::string> model;
  std::optional<int> states;
  std::optional<int> iterations;
  std::optional<int> burn_in;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> data;
  std::optional<std::string> reference;
  std::optional<std::string> out;
  std::optional<double> b;
  std::optional<double> alpha;
};

/// Parses a JSON configuration document. Unknown keys are rejected.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

/// File (optional) first, then flags. State-count dependent defaults are
/// rebuilt when the count changes and the file did not pin them.
RunConfig resolve_config(const std::optional<std::filesystem::path>& file,
                         const ConfigOverrides& flags);

/// JSON echo of the resolved configuration, stored with every export.
std::string config_to_json(const RunConfig& cfg);

}  // namespace switchvol
