#include "fedsleep/exp/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <filesystem>
#include <memory>
#include <mutex>
#include <thread>

#include "fedsleep/attack/data_poison.hpp"
#include "fedsleep/attack/gan_attack.hpp"
#include "fedsleep/attack/regularization.hpp"
#include "fedsleep/common/error.hpp"
#include "fedsleep/defense/bound.hpp"
#include "fedsleep/defense/kd.hpp"
#include "fedsleep/defense/krum.hpp"

namespace fedsleep::exp {

namespace {

constexpr std::size_t kBoundStates = 64;

std::vector<double> output_block(const nn::ParamVector& p) {
  const auto l = p.layer(p.shapes().size() - 1);
  return {l.begin(), l.end()};
}

class SeedRunner {
 public:
  SeedRunner(const ExperimentConfig& cfg, std::uint64_t seed) : cfg_(cfg), seed_(seed), net_(make_scenario()) {
    const int n = cfg_.scenario.n_sbs;
    malicious_.assign(n, false);
    for (int id : cfg_.attack.malicious_ids) malicious_[id] = true;
    for (int i = 0; i < n; ++i) agents_.emplace_back(cfg_.agent, cfg_.scenario.state_width, seed_, i);
    global_ = agents_[0].params();
    global_.set_id(-1);
    if (cfg_.defense.kind == DefenseKind::kKd) {
      for (int i = 0; i < n; ++i) {
        memes_.push_back(global_);
        memes_.back().set_id(i);
      }
    }
    if (cfg_.attack.kind == AttackKind::kGan) {
      const std::size_t width = output_block(global_).size();
      gans_.resize(n);
      for (int id : cfg_.attack.malicious_ids) {
        gans_[id] = std::make_unique<attack::GanAttacker>(cfg_.attack.gan, width,
                                                          make_rng(seed_, Stream::kAttack, id));
      }
    }
    if (cfg_.attack.kind == AttackKind::kRegularization) {
      shadows_.resize(n);
      for (int id : cfg_.attack.malicious_ids) shadows_[id] = global_;
    }
    const auto attackers = static_cast<double>(std::max<std::size_t>(1, cfg_.attack.malicious_ids.size()));
    boost_ = cfg_.attack.boost > 0.0 ? cfg_.attack.boost : n / attackers;
  }

  SeedResult run(const ProgressFn& progress) {
    SeedResult res;
    res.seed = seed_;
    try {
      loop(res, progress);
    } catch (const std::exception& e) {
      res.failed = true;
      res.error = e.what();
      res.log.failed_seeds.push_back(seed_);
    }
    return res;
  }

 private:
  radio::ScenarioConfig make_scenario() const {
    radio::ScenarioConfig s = cfg_.scenario;
    s.seed = seed_;
    if (s.day_length_ttis == 0) s.day_length_ttis = cfg_.ttis_per_episode;
    return s;
  }

  bool attack_active() const { return cfg_.attack.kind != AttackKind::kNone && round_ >= cfg_.attack.start_round; }

  void loop(SeedResult& res, const ProgressFn& progress) {
    const int n = cfg_.scenario.n_sbs;
    std::int64_t clock = 0;
    std::int64_t tti_total = 0;
    std::vector<std::vector<double>> states(n);
    std::vector<int> actions(n);
    for (int ep = 0; ep < cfg_.episodes; ++ep) {
      net_.reset_episode(clock);
      for (int i = 0; i < n; ++i) {
        agents_[i].set_episode(ep);
        states[i] = net_.observe(i);
      }
      attack_lr_ = cfg_.attack.lr > 0.0 ? cfg_.attack.lr : agents_[0].lr();
      for (int t = 0; t < cfg_.ttis_per_episode; ++t) {
        for (int i = 0; i < n; ++i) actions[i] = agents_[i].select_action(states[i]);
        const radio::StepOutcome out = net_.step(actions);
        double reward_sum = 0.0;
        for (int i = 0; i < n; ++i) {
          const double r = radio::reward(i, out, cfg_.reward);
          reward_sum += r;
          auto next = net_.observe(i);
          agents_[i].buffer().push({states[i], actions[i], r, next});
          states[i] = std::move(next);
          if (malicious_[i] && cfg_.attack.kind == AttackKind::kDataPoison && attack_active()) {
            attack::poison_replay(agents_[i].buffer(), cfg_.attack.poison_fraction);
          }
        }
        for (int i = 0; i < n; ++i) train_local(i);

        TtiRow row;
        row.tti = t;
        row.episode = ep;
        row.seed = seed_;
        row.throughput_mbps = out.total_throughput_bps() * 1e-6;
        row.energy_w = out.total_power_w();
        row.ee = row.throughput_mbps / row.energy_w;
        row.mean_reward = reward_sum / n;
        row.drop_rate = out.mean_drop_rate();
        res.log.rows.push_back(row);

        ++tti_total;
        if (cfg_.aggregate_every_ttis > 0 && tti_total % cfg_.aggregate_every_ttis == 0) {
          aggregate(res, ep, t);
        }
      }
      clock = net_.state().clock;
      if (progress) progress(seed_, ep);
    }
  }

  void train_local(int i) {
    auto& ag = agents_[i];
    const agent::TdBatch batch = ag.sample_batch();
    if (batch.size() == 0) return;
    if (cfg_.defense.kind == DefenseKind::kKd) {
      const auto rep = defense::kd_local_update(ag.params(), memes_[i], ag.target(), ag.spec(), batch,
                                                cfg_.agent.gamma, cfg_.defense.kd, ag.lr(),
                                                cfg_.agent.grad_clip);
      if (!ag.params().all_finite() || !memes_[i].all_finite()) {
        throw NumericError("participant " + std::to_string(i) + ": non-finite parameters");
      }
      ag.count_update();
      kd_kl_sum_ += rep.kl;
      ++kd_updates_;
      kd_local_distill_ += rep.local_distills ? 1 : 0;
    } else {
      ag.td_update(batch);
    }
    if (!shadows_.empty() && malicious_[i]) {
      auto step = attack::regularized_malicious_update(shadows_[i], global_, shadows_[i], ag.spec(), batch,
                                                       cfg_.agent.gamma, cfg_.attack.omega, attack_lr_,
                                                       cfg_.attack.objective, cfg_.agent.grad_clip);
      shadows_[i] = std::move(step.params);
      reg_loss_sum_ += step.td_loss;
      ++reg_steps_;
    }
  }

  double kd_bound() const {
    std::vector<std::array<double, 3>> q;
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      if (malicious_[i]) continue;
      const auto& buf = agents_[i].buffer();
      const std::size_t take = std::min(kBoundStates, buf.size());
      for (std::size_t k = buf.size() - take; k < buf.size(); ++k) {
        const auto v = agents_[i].q_values(buf.at(k).s);
        q.push_back({v[0], v[1], v[2]});
      }
    }
    if (q.empty()) return 0.0;
    return defense::attack_effect_bound(q, cfg_.defense.kd.theta).p_no;
  }

  void aggregate(SeedResult& res, int ep, int t) {
    const int n = cfg_.scenario.n_sbs;
    const bool kd = cfg_.defense.kind == DefenseKind::kKd;
    std::vector<fed::RoundSubmission> subs;
    for (int i = 0; i < n; ++i) {
      fed::RoundSubmission s;
      s.participant_id = i;
      s.params = kd ? memes_[i] : agents_[i].params();
      s.malicious = malicious_[i];
      subs.push_back(std::move(s));
    }

    RoundRow row;
    row.seed = seed_;
    row.round = round_;
    row.episode = ep;
    row.tti = t;

    fed::AttackHook attack_hook;
    if (attack_active()) {
      attack_hook = [&](int id, const nn::ParamVector& honest, const nn::ParamVector& prev) -> nn::ParamVector {
        switch (cfg_.attack.kind) {
          case AttackKind::kGan: {
            auto& g = *gans_[id];
            if (g.phase() == attack::GanPhase::kAttacking && !g.failed()) {
              auto p = prev;
              p.axpy(boost_, g.generate_malicious_update(prev) - prev);
              p.set_id(id);
              return p;
            }
            return honest;
          }
          case AttackKind::kRegularization: {
            auto p = prev;
            p.axpy(boost_, shadows_[id] - prev);
            p.set_id(id);
            return p;
          }
          default: return honest;
        }
      };
    }

    fed::DefenseHook defense_hook;
    const std::uint64_t round_seed = derive_seed(seed_, Stream::kDefense, static_cast<std::uint64_t>(round_));
    if (cfg_.defense.kind == DefenseKind::kKrum) {
      defense_hook = [](std::span<const fed::SubmissionView> v, const nn::ParamVector& prev, int) {
        fed::DefenseDecision d;
        d.accepted_ids = {defense::krum_select(v, prev)};
        d.scores = defense::average_distances(v, prev);
        return d;
      };
    } else if (cfg_.defense.kind == DefenseKind::kAutoencoder) {
      defense_hook = [&](std::span<const fed::SubmissionView> v, const nn::ParamVector& prev, int) {
        const auto r = defense::two_step_filter(v, prev, cfg_.defense.ae, round_seed);
        return fed::DefenseDecision{r.accepted_ids, r.reconstruction_error};
      };
    }

    fed::RoundResult result = fed::run_round(subs, global_, round_, attack_hook, defense_hook);
    if (!result.global.all_finite()) throw NumericError("round " + std::to_string(round_) + ": non-finite global model");

    row.accepted_ids = result.accepted_ids;
    row.rejected_ids = result.rejected_ids;
    row.fallback = result.fallback;
    for (int id : result.rejected_ids) (malicious_[id] ? row.malicious_rejected : row.benign_rejected)++;
    row.scores.assign(n, 0.0);
    for (std::size_t k = 0; k < result.scores.size() && k < subs.size(); ++k) {
      row.scores[subs[k].participant_id] = result.scores[k];
    }

    global_ = result.global;
    std::vector<nn::ParamVector*> receivers;
    for (int i = 0; i < n; ++i) receivers.push_back(kd ? &memes_[i] : &agents_[i].params());
    fed::broadcast(result, receivers);

    if (!shadows_.empty()) {
      for (int id : cfg_.attack.malicious_ids) shadows_[id] = global_;
      row.reg_td_loss = reg_steps_ ? reg_loss_sum_ / reg_steps_ : 0.0;
      reg_loss_sum_ = 0.0;
      reg_steps_ = 0;
    }
    if (!gans_.empty()) {
      const auto block = output_block(global_);
      int count = 0;
      for (int id : cfg_.attack.malicious_ids) {
        const auto l = gans_[id]->observe_global(block);
        row.gan_disc_loss += l.disc;
        row.gan_gen_loss += l.gen;
        ++count;
      }
      if (count) {
        row.gan_disc_loss /= count;
        row.gan_gen_loss /= count;
      }
    }
    if (cfg_.attack.kind == AttackKind::kDataPoison) {
      for (int id : cfg_.attack.malicious_ids) row.poisoned_records += agents_[id].buffer().poisoned_count();
    }
    if (kd) {
      row.kd_mean_kl = kd_updates_ ? kd_kl_sum_ / kd_updates_ : 0.0;
      row.kd_local_distill = kd_local_distill_;
      row.p_no = kd_bound();
      kd_kl_sum_ = 0.0;
      kd_updates_ = 0;
      kd_local_distill_ = 0;
    }
    res.log.rounds.push_back(std::move(row));

    res.last_round.round_index = round_;
    res.last_round.submissions = std::move(subs);
    res.last_round.global = global_;
    if (cfg_.checkpoints && !cfg_.output_dir.empty()) {
      const auto dir = std::filesystem::path(cfg_.output_dir) / "checkpoints" / ("seed_" + std::to_string(seed_));
      std::filesystem::create_directories(dir);
      fed::write_checkpoint(dir / ("round_" + std::to_string(round_) + ".fsck"), res.last_round);
    }
    ++round_;
  }

  const ExperimentConfig& cfg_;
  std::uint64_t seed_;
  radio::Network net_;
  std::vector<bool> malicious_;
  std::vector<agent::DqnAgent> agents_;
  nn::ParamVector global_;
  std::vector<nn::ParamVector> memes_;
  std::vector<std::unique_ptr<attack::GanAttacker>> gans_;
  std::vector<nn::ParamVector> shadows_;
  double attack_lr_ = 0.0;
  double boost_ = 1.0;
  int round_ = 0;
  double reg_loss_sum_ = 0.0;
  int reg_steps_ = 0;
  double kd_kl_sum_ = 0.0;
  int kd_updates_ = 0;
  int kd_local_distill_ = 0;
};

}  // namespace

SeedResult run_seed(const ExperimentConfig& config, std::uint64_t seed, const ProgressFn& progress) {
  config.validate();
  SeedRunner runner(config, seed);
  return runner.run(progress);
}

ExperimentResult run_experiment(const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate();
  ExperimentResult out;
  out.seeds.resize(config.seeds.size());
  std::mutex progress_mutex;
  ProgressFn locked;
  if (progress) {
    locked = [&](std::uint64_t s, int e) {
      std::lock_guard<std::mutex> lock(progress_mutex);
      progress(s, e);
    };
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < config.seeds.size(); i = next++) {
      out.seeds[i] = run_seed(config, config.seeds[i], locked);
    }
  };
  const int w = std::min<int>(config.workers, static_cast<int>(config.seeds.size()));
  if (w <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < w; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<std::size_t> order(config.seeds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return config.seeds[a] < config.seeds[b]; });
  for (std::size_t i : order) {
    const auto& l = out.seeds[i].log;
    out.log.rows.insert(out.log.rows.end(), l.rows.begin(), l.rows.end());
    out.log.rounds.insert(out.log.rounds.end(), l.rounds.begin(), l.rounds.end());
    out.log.failed_seeds.insert(out.log.failed_seeds.end(), l.failed_seeds.begin(), l.failed_seeds.end());
  }
  return out;
}

}  // namespace fedsleep::exp
