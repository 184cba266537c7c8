#include "fedsleep/exp/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fedsleep/common/error.hpp"

namespace fedsleep::exp {

using json = nlohmann::ordered_json;

const char* to_string(AttackKind k) {
  switch (k) {
    case AttackKind::kNone: return "none";
    case AttackKind::kDataPoison: return "data_poison";
    case AttackKind::kGan: return "gan";
    case AttackKind::kRegularization: return "regularization";
  }
  return "none";
}

const char* to_string(DefenseKind k) {
  switch (k) {
    case DefenseKind::kNone: return "none";
    case DefenseKind::kKrum: return "krum";
    case DefenseKind::kAutoencoder: return "autoencoder";
    case DefenseKind::kKd: return "kd";
  }
  return "none";
}

AttackKind parse_attack_kind(const std::string& s) {
  for (auto k : {AttackKind::kNone, AttackKind::kDataPoison, AttackKind::kGan, AttackKind::kRegularization}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("attack.kind", "unknown attack '" + s + "'");
}

DefenseKind parse_defense_kind(const std::string& s) {
  for (auto k : {DefenseKind::kNone, DefenseKind::kKrum, DefenseKind::kAutoencoder, DefenseKind::kKd}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("defense.kind", "unknown defense '" + s + "'");
}

ExperimentConfig full_profile() { return ExperimentConfig{}; }

ExperimentConfig desk_profile() {
  ExperimentConfig c;
  c.profile = "desk";
  c.scenario.n_sbs = 8;
  c.scenario.ues_per_sbs_min = 4;
  c.scenario.ues_per_sbs_max = 4;
  c.scenario.mbs_prb_count = 40;
  c.episodes = 10;
  c.ttis_per_episode = 96;
  c.aggregate_every_ttis = 8;
  c.agent.lr_decay = 0.75;
  c.agent.warmup_transitions = 96;
  c.seeds = {1, 2, 3};
  c.attack.gan.warmup_samples = 16;
  c.defense.ae.hidden = {64};
  c.defense.ae.latent_width = 16;
  c.defense.ae.epochs = 60;
  return c;
}

void ExperimentConfig::validate() const {
  try {
    scenario.validate();
  } catch (const DomainError& e) {
    throw ConfigError("scenario", e.what());
  }
  try {
    agent.validate();
  } catch (const DomainError& e) {
    throw ConfigError("agent", e.what());
  }
  if (episodes < 1) throw ConfigError("episodes", "must be at least 1");
  if (ttis_per_episode < 1) throw ConfigError("ttis_per_episode", "must be at least 1");
  if (seeds.empty()) throw ConfigError("seeds", "at least one seed is required");
  if (workers < 1) throw ConfigError("workers", "must be at least 1");
  std::set<int> seen;
  for (std::size_t i = 0; i < attack.malicious_ids.size(); ++i) {
    const int id = attack.malicious_ids[i];
    const std::string key = "attack.malicious_ids[" + std::to_string(i) + "]";
    if (id < 0 || id >= scenario.n_sbs) {
      throw ConfigError(key, "participant " + std::to_string(id) + " outside [0, " +
                                 std::to_string(scenario.n_sbs) + ")");
    }
    if (!seen.insert(id).second) throw ConfigError(key, "duplicate participant " + std::to_string(id));
  }
  if (attack.kind != AttackKind::kNone && attack.malicious_ids.empty()) {
    throw ConfigError("attack.malicious_ids", "an attack needs at least one malicious participant");
  }
  if (!(attack.poison_fraction >= 0.0 && attack.poison_fraction <= 1.0)) {
    throw ConfigError("attack.poison_fraction", "must lie in [0, 1]");
  }
  if (!(attack.omega >= 0.0)) throw ConfigError("attack.omega", "must be non-negative");
  if (!(attack.boost >= 0.0)) throw ConfigError("attack.boost", "must be non-negative");
  if (!(attack.lr >= 0.0)) throw ConfigError("attack.lr", "must be non-negative");
  if (attack.gan.warmup_samples < 1) throw ConfigError("attack.gan.warmup_samples", "must be positive");
  if (attack.gan.latent_width < 1) throw ConfigError("attack.gan.latent_width", "must be positive");
  if (attack.gan.batch < 1) throw ConfigError("attack.gan.batch", "must be positive");
  if (!(attack.gan.train_sigma > 0.0)) throw ConfigError("attack.gan.train_noise", "sigma must be positive");
  if (!(attack.gan.attack_sigma > 0.0)) throw ConfigError("attack.gan.attack_noise", "sigma must be positive");
  if (defense.ae.reliable_set_size < 0 || defense.ae.reliable_set_size > scenario.n_sbs) {
    throw ConfigError("defense.reliable_set_size", "must lie in [1, n_sbs] (0 selects ceil(N/2))");
  }
  if (defense.ae.latent_width < 1) throw ConfigError("defense.ae.latent_width", "must be positive");
  if (defense.ae.epochs < 0) throw ConfigError("defense.ae.epochs", "must be non-negative");
  if (!(defense.kd.theta > 0.0)) throw ConfigError("defense.kd.theta", "must be positive");
  if (!(defense.kd.xi >= 0.0 && defense.kd.xi <= 1.0)) throw ConfigError("defense.kd.xi", "must lie in [0, 1]");
  if (defense.kind == DefenseKind::kKrum && scenario.n_sbs < 2) {
    throw ConfigError("defense.kind", "krum needs at least two participants");
  }
}

namespace {

// Reads one JSON object, rejecting keys nobody asked for.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  Obj child(const char* key) { return Obj(j_.at(key), key_path(key)); }

  void get(const char* key, double& out) {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(key_path(key), "expected a number");
    out = v.get<double>();
  }
  void get(const char* key, int& out) {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(key_path(key), "expected an integer");
    out = v.get<int>();
  }
  void get(const char* key, std::int64_t& out) {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(key_path(key), "expected an integer");
    out = v.get<std::int64_t>();
  }
  void get(const char* key, bool& out) {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(key_path(key), "expected true or false");
    out = v.get<bool>();
  }
  void get(const char* key, std::string& out) {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(key_path(key), "expected a string");
    out = v.get<std::string>();
  }
  template <class T>
  void get_list(const char* key, std::vector<T>& out) {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(key_path(key), "expected an array");
    std::vector<T> items;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto& e = v[i];
      const std::string p = key_path(key) + "[" + std::to_string(i) + "]";
      if constexpr (std::is_floating_point_v<T>) {
        if (!e.is_number()) throw ConfigError(p, "expected a number");
      } else if constexpr (std::is_unsigned_v<T>) {
        if (!e.is_number_unsigned()) throw ConfigError(p, "expected a non-negative integer");
      } else {
        if (!e.is_number_integer()) throw ConfigError(p, "expected an integer");
      }
      items.push_back(e.get<T>());
    }
    out = std::move(items);
  }
  void get_noise(const char* key, double& mu, double& sigma) {
    std::vector<double> v;
    get_list(key, v);
    if (!has(key)) return;
    if (v.size() != 2) throw ConfigError(key_path(key), "expected [mu, sigma]");
    mu = v[0];
    sigma = v[1];
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) throw ConfigError(key_path(it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_scenario(Obj o, radio::ScenarioConfig& s) {
  o.get("n_sbs", s.n_sbs);
  o.get("ues_per_sbs_min", s.ues_per_sbs_min);
  o.get("ues_per_sbs_max", s.ues_per_sbs_max);
  o.get_list("peak_load_choices_mbps", s.peak_load_choices_mbps);
  o.get("bandwidth_hz", s.bandwidth_hz);
  o.get("n_prb", s.n_prb);
  o.get("subcarriers_per_prb", s.subcarriers_per_prb);
  o.get("subcarrier_hz", s.subcarrier_hz);
  o.get("p_tx_mbs_w", s.p_tx_mbs_w);
  o.get("p_tx_sbs_w", s.p_tx_sbs_w);
  o.get("carrier_sbs_ghz", s.carrier_sbs_ghz);
  o.get("carrier_mbs_ghz", s.carrier_mbs_ghz);
  o.get("sleep_ratio", s.sleep_ratio);
  o.get("deep_sleep_ratio", s.deep_sleep_ratio);
  o.get("p_full_w", s.p_full_w);
  o.get("p_mbs_static_w", s.p_mbs_static_w);
  o.get("noise_density_dbm_hz", s.noise_density_dbm_hz);
  o.get("noise_figure_db", s.noise_figure_db);
  o.get("tti_ms", s.tti_ms);
  o.get("deep_sleep_wake_ttis", s.deep_sleep_wake_ttis);
  o.get("latency_budget_ms", s.latency_budget_ms);
  o.get("packet_bits", s.packet_bits);
  o.get("trough_fraction", s.trough_fraction);
  o.get("trough_hour", s.trough_hour);
  o.get("peak_hour", s.peak_hour);
  o.get("day_length_ttis", s.day_length_ttis);
  o.get("mbs_ues", s.mbs_ues);
  o.get("mbs_peak_load_mbps", s.mbs_peak_load_mbps);
  o.get("sbs_ring_min_m", s.sbs_ring_min_m);
  o.get("sbs_ring_max_m", s.sbs_ring_max_m);
  o.get("min_sbs_spacing_m", s.min_sbs_spacing_m);
  o.get("ue_radius_min_m", s.ue_radius_min_m);
  o.get("ue_radius_max_m", s.ue_radius_max_m);
  o.get("mbs_ue_radius_min_m", s.mbs_ue_radius_min_m);
  o.get("mbs_ue_radius_max_m", s.mbs_ue_radius_max_m);
  o.get("mbs_prb_count", s.mbs_prb_count);
  o.get("neighbour_macro_sites", s.neighbour_macro_sites);
  o.get("macro_isd_m", s.macro_isd_m);
  o.get("neighbour_macro_activity", s.neighbour_macro_activity);
  o.get("iid", s.iid);
  o.get("iid_peak_load_mbps", s.iid_peak_load_mbps);
  o.get("state_width", s.state_width);
  o.finish();
}

void read_agent(Obj o, agent::AgentConfig& a) {
  o.get("lr", a.lr);
  o.get("lr_decay", a.lr_decay);
  o.get("gamma", a.gamma);
  o.get("epsilon", a.epsilon);
  o.get("batch", a.batch);
  o.get_list("hidden", a.hidden);
  o.get("target_sync_ttis", a.target_sync_ttis);
  o.get("buffer_capacity", a.buffer_capacity);
  o.get("warmup_transitions", a.warmup_transitions);
  o.get("random_warmup", a.random_warmup);
  o.get("grad_clip", a.grad_clip);
  o.finish();
}

void read_gan(Obj o, attack::GanConfig& g) {
  o.get("warmup_samples", g.warmup_samples);
  o.get_list("gen_hidden", g.gen_hidden);
  o.get_list("disc_hidden", g.disc_hidden);
  o.get("latent_width", g.latent_width);
  o.get("lr", g.lr);
  o.get_noise("train_noise", g.train_mu, g.train_sigma);
  o.get_noise("attack_noise", g.attack_mu, g.attack_sigma);
  o.get("pretrain_epochs", g.pretrain_epochs);
  o.get("train_steps", g.train_steps);
  o.get("steps_per_round", g.steps_per_round);
  o.get("batch", g.batch);
  o.finish();
}

void read_attack(Obj o, AttackConfig& a) {
  std::string kind = to_string(a.kind);
  o.get("kind", kind);
  a.kind = parse_attack_kind(kind);
  o.get_list("malicious_ids", a.malicious_ids);
  o.get("poison_fraction", a.poison_fraction);
  o.get("omega", a.omega);
  o.get("boost", a.boost);
  o.get("lr", a.lr);
  std::string objective = a.objective == attack::RegObjective::kAscent ? "ascent" : "complement";
  o.get("objective", objective);
  if (objective == "ascent") a.objective = attack::RegObjective::kAscent;
  else if (objective == "complement") a.objective = attack::RegObjective::kComplement;
  else throw ConfigError(o.key_path("objective"), "expected \"ascent\" or \"complement\"");
  o.get("start_round", a.start_round);
  if (o.has("gan")) read_gan(o.child("gan"), a.gan);
  o.finish();
}

void read_defense(Obj o, DefenseConfig& d) {
  std::string kind = to_string(d.kind);
  o.get("kind", kind);
  d.kind = parse_defense_kind(kind);
  o.get("reliable_set_size", d.ae.reliable_set_size);
  if (o.has("ae")) {
    Obj ae = o.child("ae");
    ae.get_list("hidden", d.ae.hidden);
    ae.get("latent_width", d.ae.latent_width);
    ae.get("lr", d.ae.lr);
    ae.get("epochs", d.ae.epochs);
    ae.finish();
  }
  if (o.has("kd")) {
    Obj kd = o.child("kd");
    kd.get("theta", d.kd.theta);
    kd.get("xi", d.kd.xi);
    kd.finish();
  }
  o.finish();
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("JSON parse error: ") + e.what());
  }
  Obj root(j, "");
  std::string profile = "full";
  root.get("profile", profile);
  ExperimentConfig c;
  if (profile == "desk") c = desk_profile();
  else if (profile != "full") throw ConfigError("profile", "expected \"full\" or \"desk\"");

  root.get("name", c.name);
  if (root.has("scenario")) read_scenario(root.child("scenario"), c.scenario);
  if (root.has("reward")) {
    Obj r = root.child("reward");
    r.get("throughput", c.reward.throughput);
    r.get("drop", c.reward.drop);
    r.get("energy", c.reward.energy);
    r.finish();
  }
  if (root.has("agent")) read_agent(root.child("agent"), c.agent);
  if (root.has("attack")) read_attack(root.child("attack"), c.attack);
  if (root.has("defense")) read_defense(root.child("defense"), c.defense);
  root.get("episodes", c.episodes);
  root.get("ttis_per_episode", c.ttis_per_episode);
  root.get("aggregate_every_ttis", c.aggregate_every_ttis);
  root.get_list("seeds", c.seeds);
  root.get("output_dir", c.output_dir);
  root.get("workers", c.workers);
  root.get("checkpoints", c.checkpoints);
  root.finish();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_json(const ExperimentConfig& c) {
  const auto& s = c.scenario;
  json j;
  j["profile"] = c.profile;
  j["name"] = c.name;
  j["episodes"] = c.episodes;
  j["ttis_per_episode"] = c.ttis_per_episode;
  j["aggregate_every_ttis"] = c.aggregate_every_ttis;
  j["seeds"] = c.seeds;
  j["output_dir"] = c.output_dir;
  j["workers"] = c.workers;
  j["checkpoints"] = c.checkpoints;
  j["scenario"] = {
      {"n_sbs", s.n_sbs},
      {"ues_per_sbs_min", s.ues_per_sbs_min},
      {"ues_per_sbs_max", s.ues_per_sbs_max},
      {"peak_load_choices_mbps", s.peak_load_choices_mbps},
      {"bandwidth_hz", s.bandwidth_hz},
      {"n_prb", s.n_prb},
      {"subcarriers_per_prb", s.subcarriers_per_prb},
      {"subcarrier_hz", s.subcarrier_hz},
      {"p_tx_mbs_w", s.p_tx_mbs_w},
      {"p_tx_sbs_w", s.p_tx_sbs_w},
      {"carrier_sbs_ghz", s.carrier_sbs_ghz},
      {"carrier_mbs_ghz", s.carrier_mbs_ghz},
      {"sleep_ratio", s.sleep_ratio},
      {"deep_sleep_ratio", s.deep_sleep_ratio},
      {"p_full_w", s.p_full_w},
      {"p_mbs_static_w", s.p_mbs_static_w},
      {"noise_density_dbm_hz", s.noise_density_dbm_hz},
      {"noise_figure_db", s.noise_figure_db},
      {"tti_ms", s.tti_ms},
      {"deep_sleep_wake_ttis", s.deep_sleep_wake_ttis},
      {"latency_budget_ms", s.latency_budget_ms},
      {"packet_bits", s.packet_bits},
      {"trough_fraction", s.trough_fraction},
      {"trough_hour", s.trough_hour},
      {"peak_hour", s.peak_hour},
      {"day_length_ttis", s.day_length_ttis},
      {"mbs_ues", s.mbs_ues},
      {"mbs_peak_load_mbps", s.mbs_peak_load_mbps},
      {"sbs_ring_min_m", s.sbs_ring_min_m},
      {"sbs_ring_max_m", s.sbs_ring_max_m},
      {"min_sbs_spacing_m", s.min_sbs_spacing_m},
      {"ue_radius_min_m", s.ue_radius_min_m},
      {"ue_radius_max_m", s.ue_radius_max_m},
      {"mbs_ue_radius_min_m", s.mbs_ue_radius_min_m},
      {"mbs_ue_radius_max_m", s.mbs_ue_radius_max_m},
      {"mbs_prb_count", s.mbs_prb_count},
      {"neighbour_macro_sites", s.neighbour_macro_sites},
      {"macro_isd_m", s.macro_isd_m},
      {"neighbour_macro_activity", s.neighbour_macro_activity},
      {"iid", s.iid},
      {"iid_peak_load_mbps", s.iid_peak_load_mbps},
      {"state_width", s.state_width},
  };
  j["reward"] = {{"throughput", c.reward.throughput}, {"drop", c.reward.drop}, {"energy", c.reward.energy}};
  j["agent"] = {
      {"lr", c.agent.lr},
      {"gamma", c.agent.gamma},
      {"epsilon", c.agent.epsilon},
      {"batch", c.agent.batch},
      {"hidden", c.agent.hidden},
      {"target_sync_ttis", c.agent.target_sync_ttis},
      {"buffer_capacity", c.agent.buffer_capacity},
      {"lr_decay", c.agent.lr_decay},
      {"warmup_transitions", c.agent.warmup_transitions},
      {"random_warmup", c.agent.random_warmup},
      {"grad_clip", c.agent.grad_clip},
  };
  const auto& g = c.attack.gan;
  j["attack"] = {
      {"kind", to_string(c.attack.kind)},
      {"malicious_ids", c.attack.malicious_ids},
      {"poison_fraction", c.attack.poison_fraction},
      {"omega", c.attack.omega},
      {"boost", c.attack.boost},
      {"lr", c.attack.lr},
      {"objective", c.attack.objective == attack::RegObjective::kAscent ? "ascent" : "complement"},
      {"start_round", c.attack.start_round},
      {"gan",
       {
           {"warmup_samples", g.warmup_samples},
           {"gen_hidden", g.gen_hidden},
           {"disc_hidden", g.disc_hidden},
           {"latent_width", g.latent_width},
           {"lr", g.lr},
           {"train_noise", {g.train_mu, g.train_sigma}},
           {"attack_noise", {g.attack_mu, g.attack_sigma}},
           {"pretrain_epochs", g.pretrain_epochs},
           {"train_steps", g.train_steps},
           {"steps_per_round", g.steps_per_round},
           {"batch", g.batch},
       }},
  };
  j["defense"] = {
      {"kind", to_string(c.defense.kind)},
      {"reliable_set_size", c.defense.ae.reliable_set_size},
      {"ae",
       {{"hidden", c.defense.ae.hidden},
        {"latent_width", c.defense.ae.latent_width},
        {"lr", c.defense.ae.lr},
        {"epochs", c.defense.ae.epochs}}},
      {"kd", {{"theta", c.defense.kd.theta}, {"xi", c.defense.kd.xi}}},
  };
  return j.dump(2);
}

}  // namespace fedsleep::exp
