// fedsleep: federated sleep-control experiments from the command line.
//
//   fedsleep run <config.json> [--out DIR] [--seeds 1,2,3]
//   fedsleep sweep <config.json> --attacks none,gan --defenses none,kd
//   fedsleep analyze <run_dir>
//   fedsleep bound <run_dir> --theta 0.05
//   fedsleep verify
//
// Output goes to --out, else the config's output_dir, else
// $FEDSLEEP_OUTPUT_ROOT/<name>, else ./runs/<name>.

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fedsleep/common/error.hpp"
#include "fedsleep/defense/bound.hpp"
#include "fedsleep/exp/config.hpp"
#include "fedsleep/exp/experiment.hpp"
#include "fedsleep/exp/report.hpp"
#include "fedsleep/nn/mlp.hpp"
#include "fedsleep/radio/network.hpp"
#include "verify.hpp"

namespace fs = std::filesystem;
using namespace fedsleep;

namespace {

fs::path output_dir(const exp::ExperimentConfig& cfg, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  if (const char* root = std::getenv("FEDSLEEP_OUTPUT_ROOT"); root && *root) return fs::path(root) / cfg.name;
  return fs::path("runs") / cfg.name;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void print_summary(const exp::ExperimentConfig& cfg, const exp::ExperimentResult& res) {
  std::printf("%-28s %6s %12s %12s %12s\n", "config", "seed", "thr_mbps", "ee_mbps_w", "reward");
  for (auto s : exp::seeds_of(res.log)) {
    std::printf("%-28s %6llu %12.4f %12.5f %12.4f   (final third)\n", cfg.name.c_str(),
                static_cast<unsigned long long>(s),
                exp::final_third_mean(res.log, s, cfg.episodes, exp::Column::kThroughput),
                exp::final_third_mean(res.log, s, cfg.episodes, exp::Column::kEe),
                exp::final_third_mean(res.log, s, cfg.episodes, exp::Column::kReward));
  }
}

int do_run(exp::ExperimentConfig cfg, const std::string& out_flag, bool quiet) {
  const fs::path dir = output_dir(cfg, out_flag);
  exp::ensure_writable(dir);
  cfg.output_dir = dir.string();
  const auto t0 = std::chrono::steady_clock::now();
  exp::ProgressFn progress;
  if (!quiet) {
    progress = [](std::uint64_t seed, int ep) {
      std::fprintf(stderr, "seed %llu episode %d done\n", static_cast<unsigned long long>(seed), ep);
    };
  }
  const auto res = exp::run_experiment(cfg, progress);
  if (!res.log.rows.empty()) exp::emit_report(cfg, res, dir);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  print_summary(cfg, res);
  std::printf("wrote %s (%.1f s)\n", dir.string().c_str(), secs);
  for (const auto& s : res.seeds) {
    if (s.failed) std::fprintf(stderr, "seed %llu failed: %s\n", static_cast<unsigned long long>(s.seed), s.error.c_str());
  }
  return res.log.failed() || res.log.rows.empty() ? 1 : 0;
}

std::vector<std::pair<std::uint64_t, fs::path>> final_checkpoints(const fs::path& run_dir) {
  std::vector<std::pair<std::uint64_t, fs::path>> out;
  const fs::path root = run_dir / "checkpoints";
  if (!fs::exists(root)) return out;
  for (const auto& e : fs::directory_iterator(root)) {
    const std::string name = e.path().filename().string();
    if (!e.is_directory() || name.rfind("seed_", 0) != 0) continue;
    const fs::path ck = e.path() / "final.fsck";
    if (fs::exists(ck)) out.emplace_back(std::stoull(name.substr(5)), ck);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int do_analyze(const fs::path& run_dir) {
  const auto cks = final_checkpoints(run_dir);
  if (cks.empty()) {
    std::fprintf(stderr, "no checkpoints under %s\n", run_dir.string().c_str());
    return 1;
  }
  const fs::path out = run_dir / "analysis";
  exp::ensure_writable(out);
  std::vector<exp::PcaRow> rows;
  std::printf("%6s %6s %14s %14s %s\n", "seed", "round", "min_cross", "max_benign", "separated");
  for (const auto& [seed, path] : cks) {
    const auto ck = fed::read_checkpoint(path);
    const auto r = exp::pca_rows(ck, seed);
    rows.insert(rows.end(), r.begin(), r.end());
    nn::Matrix pts(static_cast<Eigen::Index>(r.size()), 2);
    std::vector<int> benign, malicious;
    for (std::size_t i = 0; i < r.size(); ++i) {
      pts(static_cast<Eigen::Index>(i), 0) = r[i].pc1;
      pts(static_cast<Eigen::Index>(i), 1) = r[i].pc2;
      (r[i].malicious ? malicious : benign).push_back(static_cast<int>(i));
    }
    if (!malicious.empty() && !benign.empty()) {
      const double cross = exp::min_cross_distance(pts, malicious, benign);
      const double within = exp::max_within_distance(pts, benign);
      std::printf("%6llu %6d %14.6g %14.6g %s\n", static_cast<unsigned long long>(seed), ck.round_index, cross,
                  within, cross > within ? "yes" : "no");
    } else {
      std::printf("%6llu %6d %14s %14s -\n", static_cast<unsigned long long>(seed), ck.round_index, "-", "-");
    }
    exp::write_text(out / ("pca_seed_" + std::to_string(seed) + ".svg"), exp::pca_svg(r, seed));
  }
  exp::write_text(out / "pca.csv", exp::pca_csv(rows));
  std::printf("wrote %s\n", out.string().c_str());
  return 0;
}

// States visited by a uniformly random sleep policy on the run's scenario.
std::vector<std::vector<double>> probe_states(const exp::ExperimentConfig& cfg, std::uint64_t seed, int ttis) {
  radio::ScenarioConfig sc = cfg.scenario;
  sc.seed = seed;
  if (sc.day_length_ttis == 0) sc.day_length_ttis = cfg.ttis_per_episode;
  radio::Network net(sc);
  Rng rng = make_rng(seed, Stream::kOracle);
  std::uniform_int_distribution<int> pick(0, radio::kActionCount - 1);
  std::vector<std::vector<double>> states;
  std::vector<int> actions(sc.n_sbs);
  for (int t = 0; t < ttis; ++t) {
    for (auto& a : actions) a = pick(rng);
    net.step(actions);
    for (int n = 0; n < sc.n_sbs; ++n) states.push_back(net.observe(n));
  }
  return states;
}

int do_bound(const fs::path& run_dir, double theta, int ttis) {
  const auto cfg = exp::load_config(run_dir / "config.json");
  const auto cks = final_checkpoints(run_dir);
  if (cks.empty()) {
    std::fprintf(stderr, "no checkpoints under %s\n", run_dir.string().c_str());
    return 1;
  }
  nlohmann::ordered_json report = nlohmann::ordered_json::array();
  std::printf("%6s %8s %12s %12s %14s\n", "seed", "theta", "mean_E0", "P_NO", "adv_flipped");
  for (const auto& [seed, path] : cks) {
    const auto ck = fed::read_checkpoint(path);
    const auto states = probe_states(cfg, seed, ttis);
    nn::MlpSpec spec;
    spec.widths.push_back(cfg.scenario.state_width);
    spec.widths.insert(spec.widths.end(), cfg.agent.hidden.begin(), cfg.agent.hidden.end());
    spec.widths.push_back(radio::kActionCount);
    std::vector<std::array<double, 3>> q;
    for (const auto& s : ck.submissions) {
      if (s.malicious) continue;
      for (const auto& st : states) {
        const auto v = nn::mlp_forward(s.params, spec, st);
        q.push_back({v[0], v[1], v[2]});
      }
    }
    const auto b = defense::attack_effect_bound(q, theta);
    Rng rng = make_rng(seed, Stream::kOracle, 1);
    const auto adv = defense::budgeted_flip_adversary(q, theta, rng);
    std::printf("%6llu %8.4f %12.6g %12.6g %14.6g%s\n", static_cast<unsigned long long>(seed), theta, b.mean_e0,
                b.p_no, adv.flipped_fraction(), b.degenerate ? "  (degenerate)" : "");
    report.push_back({{"seed", seed},
                      {"theta", theta},
                      {"states", q.size()},
                      {"mean_e0", b.mean_e0},
                      {"p_no", b.p_no},
                      {"degenerate", b.degenerate},
                      {"adversary_flipped_fraction", adv.flipped_fraction()}});
  }
  exp::write_text(run_dir / "bound.json", report.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated DRL cell sleep control under model poisoning"};
  app.require_subcommand(1);

  std::string config_path, out_flag, seeds_flag, run_dir, attacks_flag = "none", defenses_flag = "none";
  bool quiet = false;
  double theta = 0.05;
  int probe_ttis = 256;

  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_flag, "Output directory");
  run->add_option("--seeds", seeds_flag, "Comma-separated seeds overriding the config");
  run->add_flag("-q,--quiet", quiet, "No progress output");

  auto* sweep = app.add_subcommand("sweep", "Run every attack x defense combination");
  sweep->add_option("config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
  sweep->add_option("--attacks", attacks_flag, "none,data_poison,gan,regularization");
  sweep->add_option("--defenses", defenses_flag, "none,krum,autoencoder,kd");
  sweep->add_option("--out", out_flag, "Output root");
  sweep->add_option("--seeds", seeds_flag, "Comma-separated seeds overriding the config");
  sweep->add_flag("-q,--quiet", quiet, "No progress output");

  auto* analyze = app.add_subcommand("analyze", "PCA of the final submissions of a run");
  analyze->add_option("run_dir", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);

  auto* bound = app.add_subcommand("bound", "Attack-effect bound for the final submissions of a run");
  bound->add_option("run_dir", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
  bound->add_option("--theta", theta, "KL threshold")->check(CLI::PositiveNumber);
  bound->add_option("--ttis", probe_ttis, "TTIs of random play used to sample states")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "Oracle suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed() || sweep->parsed()) {
      auto cfg = exp::load_config(config_path);
      if (!seeds_flag.empty()) {
        cfg.seeds.clear();
        for (const auto& s : split(seeds_flag)) cfg.seeds.push_back(std::stoull(s));
        cfg.validate();
      }
      if (run->parsed()) return do_run(cfg, out_flag, quiet);

      const fs::path root = out_flag.empty() ? output_dir(cfg, "") : fs::path(out_flag);
      int status = 0;
      for (const auto& a : split(attacks_flag)) {
        for (const auto& d : split(defenses_flag)) {
          auto c = cfg;
          c.attack.kind = exp::parse_attack_kind(a);
          c.defense.kind = exp::parse_defense_kind(d);
          c.name = cfg.name + "_" + a + "_" + d;
          c.output_dir.clear();
          c.validate();
          status |= do_run(c, (root / c.name).string(), quiet);
        }
      }
      return status;
    }
    if (analyze->parsed()) return do_analyze(run_dir);
    if (bound->parsed()) return do_bound(run_dir, theta, probe_ttis);
    if (verify->parsed()) {
      const int failures = tools::run_verify(std::cout);
      std::printf("%s\n", failures == 0 ? "all checks passed" : "some checks failed");
      return failures == 0 ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error at %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
