#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fedsleep/agent/dqn.hpp"
#include "fedsleep/attack/gan_attack.hpp"
#include "fedsleep/attack/regularization.hpp"
#include "fedsleep/defense/autoencoder_filter.hpp"
#include "fedsleep/defense/kd.hpp"
#include "fedsleep/radio/network.hpp"
#include "fedsleep/radio/scenario.hpp"

namespace fedsleep::exp {

enum class AttackKind { kNone, kDataPoison, kGan, kRegularization };
enum class DefenseKind { kNone, kKrum, kAutoencoder, kKd };

const char* to_string(AttackKind k);
const char* to_string(DefenseKind k);
AttackKind parse_attack_kind(const std::string& s);    // throws ConfigError
DefenseKind parse_defense_kind(const std::string& s);  // throws ConfigError

struct AttackConfig {
  AttackKind kind = AttackKind::kNone;
  std::vector<int> malicious_ids;
  double poison_fraction = 0.05;
  double omega = 0.1;
  /// Learning rate of the malicious objective; 0 reuses agent.lr.
  double lr = 0.0;
  attack::RegObjective objective = attack::RegObjective::kComplement;
  /// Scale on a model-poisoning (GAN or regularization) submission's
  /// deviation from the global model; 0 means n_sbs / |malicious_ids|.
  double boost = 0.0;
  /// First aggregation round at which attackers act.
  int start_round = 0;
  attack::GanConfig gan;
};

struct DefenseConfig {
  DefenseKind kind = DefenseKind::kNone;
  defense::AeFilterConfig ae;
  defense::KdConfig kd;
};

struct ExperimentConfig {
  std::string name = "run";
  std::string profile = "full";
  radio::ScenarioConfig scenario;
  radio::RewardWeights reward;
  agent::AgentConfig agent;
  AttackConfig attack;
  DefenseConfig defense;
  int episodes = 10;
  int ttis_per_episode = 1440;
  /// <= 0 disables aggregation.
  int aggregate_every_ttis = 50;
  std::vector<std::uint64_t> seeds{1};
  std::string output_dir;
  int workers = 1;
  bool checkpoints = false;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Full-scale reference settings (20 SBSs).
ExperimentConfig full_profile();
/// Reduced settings that run in minutes on one core (8 SBSs, 4 UEs each).
ExperimentConfig desk_profile();

/// Parses JSON text. An optional top-level "profile" ("full" or "desk")
/// selects the base settings; every other key overrides it. Unknown keys and
/// type errors raise ConfigError with the key path.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// The configuration as JSON (every field, round-trips through parse_config).
std::string to_json(const ExperimentConfig& config);

}  // namespace fedsleep::exp
