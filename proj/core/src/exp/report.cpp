#include "fedsleep/exp/report.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fedsleep/exp/svg.hpp"

namespace fedsleep::exp {

using json = nlohmann::ordered_json;

namespace {

std::string join_ids(const std::vector<int>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? ";" : "") + std::to_string(ids[i]);
  return s;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_double(v[i]);
  return s;
}

struct ColumnSpec {
  const char* name;
  Column column;
};

constexpr ColumnSpec kColumns[] = {{"throughput_mbps", Column::kThroughput},
                                   {"energy_w", Column::kEnergy},
                                   {"ee", Column::kEe},
                                   {"mean_reward", Column::kReward},
                                   {"drop_rate", Column::kDrop}};

}  // namespace

std::string metrics_csv(const MetricsLog& log) {
  std::string out = "tti,episode,seed,throughput_mbps,energy_w,ee,mean_reward,drop_rate\n";
  for (const auto& r : log.rows) {
    out += std::to_string(r.tti) + ',' + std::to_string(r.episode) + ',' + std::to_string(r.seed) + ',' +
           format_double(r.throughput_mbps) + ',' + format_double(r.energy_w) + ',' + format_double(r.ee) + ',' +
           format_double(r.mean_reward) + ',' + format_double(r.drop_rate) + '\n';
  }
  return out;
}

std::string rounds_csv(const MetricsLog& log) {
  std::string out =
      "seed,round,episode,tti,accepted_ids,rejected_ids,fallback,malicious_rejected,benign_rejected,scores,"
      "gan_disc_loss,gan_gen_loss,reg_td_loss,poisoned_records,kd_mean_kl,kd_local_distill,p_no\n";
  for (const auto& r : log.rounds) {
    out += std::to_string(r.seed) + ',' + std::to_string(r.round) + ',' + std::to_string(r.episode) + ',' +
           std::to_string(r.tti) + ',' + join_ids(r.accepted_ids) + ',' + join_ids(r.rejected_ids) + ',' +
           (r.fallback ? "1" : "0") + ',' + std::to_string(r.malicious_rejected) + ',' +
           std::to_string(r.benign_rejected) + ',' + join_doubles(r.scores) + ',' + format_double(r.gan_disc_loss) +
           ',' + format_double(r.gan_gen_loss) + ',' + format_double(r.reg_td_loss) + ',' +
           std::to_string(r.poisoned_records) + ',' + format_double(r.kd_mean_kl) + ',' +
           std::to_string(r.kd_local_distill) + ',' + format_double(r.p_no) + '\n';
  }
  return out;
}

std::string summary_json(const ExperimentConfig& config, const MetricsLog& log) {
  json j;
  j["name"] = config.name;
  j["profile"] = config.profile;
  j["n_sbs"] = config.scenario.n_sbs;
  j["episodes"] = config.episodes;
  j["ttis_per_episode"] = config.ttis_per_episode;
  j["rows"] = log.rows.size();
  const auto seeds = seeds_of(log);
  j["seeds"] = seeds;
  j["failed_seeds"] = log.failed_seeds;

  json metrics = json::object();
  for (const auto& c : kColumns) {
    double sum = 0.0;
    for (const auto& r : log.rows) sum += column_value(r, c.column);
    std::vector<double> per_seed, first, last;
    for (auto s : seeds) {
      per_seed.push_back(seed_mean(log, s, c.column));
      first.push_back(first_third_mean(log, s, config.episodes, c.column));
      last.push_back(final_third_mean(log, s, config.episodes, c.column));
    }
    const MeanCi ci = mean_ci(per_seed);
    metrics[c.name] = {
        {"mean", log.rows.empty() ? 0.0 : sum / static_cast<double>(log.rows.size())},
        {"ci95_half_width", ci.half_width},
        {"seed_means", per_seed},
        {"first_third", first},
        {"final_third", last},
    };
  }
  j["metrics"] = metrics;

  json episode_reward = json::object();
  for (auto s : seeds) episode_reward[std::to_string(s)] = episode_means(log, s, config.episodes, Column::kReward);
  j["episode_mean_reward"] = episode_reward;

  const std::size_t rounds = log.rounds.size();
  if (config.attack.kind != AttackKind::kNone) {
    json a;
    a["kind"] = to_string(config.attack.kind);
    a["malicious_ids"] = config.attack.malicious_ids;
    double gd = 0, gg = 0, reg = 0, poisoned = 0;
    for (const auto& r : log.rounds) {
      gd += r.gan_disc_loss;
      gg += r.gan_gen_loss;
      reg += r.reg_td_loss;
      poisoned += static_cast<double>(r.poisoned_records);
    }
    const double n = rounds ? static_cast<double>(rounds) : 1.0;
    a["mean_gan_disc_loss"] = gd / n;
    a["mean_gan_gen_loss"] = gg / n;
    a["mean_reg_td_loss"] = reg / n;
    a["mean_poisoned_records"] = poisoned / n;
    j["attack"] = a;
  }
  if (config.defense.kind != DefenseKind::kNone) {
    json d;
    d["kind"] = to_string(config.defense.kind);
    double mal = 0, ben = 0, acc = 0, fallback = 0, kl = 0, pno = 0;
    for (const auto& r : log.rounds) {
      mal += r.malicious_rejected;
      ben += r.benign_rejected;
      acc += static_cast<double>(r.accepted_ids.size());
      fallback += r.fallback ? 1 : 0;
      kl += r.kd_mean_kl;
      pno += r.p_no;
    }
    const double n = rounds ? static_cast<double>(rounds) : 1.0;
    d["rounds"] = rounds;
    d["mean_accepted"] = acc / n;
    d["mean_malicious_rejected"] = mal / n;
    d["mean_benign_rejected"] = ben / n;
    d["fallback_rounds"] = fallback;
    if (config.defense.kind == DefenseKind::kKd) {
      d["theta"] = config.defense.kd.theta;
      d["xi"] = config.defense.kd.xi;
      d["mean_kl"] = kl / n;
      d["mean_p_no"] = pno / n;
    }
    j["defense"] = d;
  }
  return j.dump(2) + "\n";
}

std::vector<PcaRow> pca_rows(const fed::Checkpoint& ck, std::uint64_t seed) {
  std::vector<nn::ParamVector> v;
  for (const auto& s : ck.submissions) v.push_back(s.params);
  std::vector<PcaRow> rows;
  if (v.size() < 3) return rows;
  const PcaResult p = pca_project(v);
  for (std::size_t i = 0; i < v.size(); ++i) {
    rows.push_back({seed, ck.round_index, ck.submissions[i].participant_id, ck.submissions[i].malicious,
                    p.points(static_cast<Eigen::Index>(i), 0), p.points(static_cast<Eigen::Index>(i), 1)});
  }
  return rows;
}

std::string pca_csv(const std::vector<PcaRow>& rows) {
  std::string out = "seed,round,participant,malicious,pc1,pc2\n";
  for (const auto& r : rows) {
    out += std::to_string(r.seed) + ',' + std::to_string(r.round) + ',' + std::to_string(r.participant) + ',' +
           (r.malicious ? "1" : "0") + ',' + format_double(r.pc1) + ',' + format_double(r.pc2) + '\n';
  }
  return out;
}

std::string pca_svg(const std::vector<PcaRow>& rows, std::uint64_t seed) {
  Series benign{"benign", {}, {}}, malicious{"malicious", {}, {}};
  for (const auto& r : rows) {
    if (r.seed != seed) continue;
    Series& s = r.malicious ? malicious : benign;
    s.x.push_back(r.pc1);
    s.y.push_back(r.pc2);
  }
  const Series all[] = {benign, malicious};
  return scatter_plot("Submitted models, seed " + std::to_string(seed), "PC1", "PC2", all);
}

void ensure_writable(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  const auto probe = dir / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw std::runtime_error("directory not writable: " + dir.string());
  }
  std::filesystem::remove(probe, ec);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void emit_report(const ExperimentConfig& config, const ExperimentResult& result, const std::filesystem::path& dir) {
  if (result.log.rows.empty()) throw std::runtime_error("emit_report: empty metrics log");
  ensure_writable(dir);

  std::vector<PcaRow> pca;
  for (const auto& s : result.seeds) {
    if (s.last_round.submissions.empty()) continue;
    const auto rows = pca_rows(s.last_round, s.seed);
    pca.insert(pca.end(), rows.begin(), rows.end());
  }

  std::vector<Series> ee, reward;
  for (auto seed : seeds_of(result.log)) {
    Series e{"seed " + std::to_string(seed), {}, {}}, r{"seed " + std::to_string(seed), {}, {}};
    const auto em = episode_means(result.log, seed, config.episodes, Column::kEe);
    const auto rm = episode_means(result.log, seed, config.episodes, Column::kReward);
    for (int k = 0; k < config.episodes; ++k) {
      e.x.push_back(k);
      e.y.push_back(em[k]);
      r.x.push_back(k);
      r.y.push_back(rm[k]);
    }
    ee.push_back(std::move(e));
    reward.push_back(std::move(r));
  }

  write_text(dir / "metrics.csv", metrics_csv(result.log));
  write_text(dir / "rounds.csv", rounds_csv(result.log));
  write_text(dir / "summary.json", summary_json(config, result.log));
  write_text(dir / "config.json", to_json(config) + "\n");
  write_text(dir / "ee.svg", line_plot("Energy efficiency per episode", "episode", "Mbps/W", ee));
  write_text(dir / "reward.svg", line_plot("Mean reward per episode", "episode", "reward", reward));
  if (!pca.empty()) {
    write_text(dir / "pca.csv", pca_csv(pca));
    write_text(dir / "pca.svg", pca_svg(pca, pca.front().seed));
  }
  for (const auto& s : result.seeds) {
    if (s.last_round.submissions.empty()) continue;
    const auto ck_dir = dir / "checkpoints" / ("seed_" + std::to_string(s.seed));
    std::filesystem::create_directories(ck_dir);
    fed::write_checkpoint(ck_dir / "final.fsck", s.last_round);
  }
}

}  // namespace fedsleep::exp
