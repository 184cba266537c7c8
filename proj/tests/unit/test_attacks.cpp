#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "fedsleep/attack/data_poison.hpp"
#include "fedsleep/attack/gan_attack.hpp"
#include "fedsleep/attack/regularization.hpp"
#include "fedsleep/common/error.hpp"
#include "fedsleep/common/rng.hpp"
#include "fedsleep/nn/grad_check.hpp"

using namespace fedsleep;
using namespace fedsleep::attack;

namespace {

agent::Transition record(double r) { return {{0.0}, 0, r, {0.0}}; }

std::vector<std::vector<double>> bank_around(const std::vector<double>& centre, int n, double sd, Rng& rng) {
  std::normal_distribution<double> nd(0.0, sd);
  std::vector<std::vector<double>> bank;
  for (int k = 0; k < n; ++k) {
    auto x = centre;
    for (auto& v : x) v += nd(rng);
    bank.push_back(std::move(x));
  }
  return bank;
}

double row_mean(const std::vector<double>& x) { return std::accumulate(x.begin(), x.end(), 0.0) / x.size(); }

// Widths {1, 1, 3}: h = relu(w s + b), q_a = v_a h + c_a. Layout: w, b, v0, v1, v2, c0, c1, c2.
const nn::MlpSpec kTiny{{1, 1, 3}};

}  // namespace

TEST(DataPoison, FlipsHighestPositiveRewards) {
  agent::ReplayBuffer b(20);
  for (int i = 0; i < 20; ++i) b.push(record(i - 5.0));  // rewards -5 .. 14
  EXPECT_EQ(poison_replay(b, 0.1), 2u);
  EXPECT_EQ(b.at(19).r, -14.0);
  EXPECT_EQ(b.at(18).r, -13.0);
  EXPECT_EQ(b.at(17).r, 12.0);
  EXPECT_EQ(b.poisoned_count(), 2u);
}

TEST(DataPoison, NegatesSelectedRecordOnly) {
  agent::ReplayBuffer b(4);
  b.push(record(0.5));
  b.push(record(-1.0));
  b.push(record(0.2));
  b.push(record(0.1));
  poison_replay(b, 0.25);
  EXPECT_EQ(b.at(0).r, -0.5);
  EXPECT_EQ(b.at(1).r, -1.0);
  EXPECT_EQ(b.at(2).r, 0.2);
  EXPECT_EQ(b.at(3).r, 0.1);
}

TEST(DataPoison, NoPositiveRewardsIsNoOp) {
  agent::ReplayBuffer b(10);
  for (int i = 0; i < 10; ++i) b.push(record(-i));
  EXPECT_EQ(poison_replay(b, 0.5), 0u);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(b.at(i).r, -double(i));
}

TEST(DataPoison, RepeatedCallsKeepShare) {
  agent::ReplayBuffer b(100);
  for (int i = 0; i < 100; ++i) b.push(record(1.0 + i));
  poison_replay(b, 0.05);
  EXPECT_EQ(poison_replay(b, 0.05), 0u);
  EXPECT_EQ(b.poisoned_count(), 5u);
  EXPECT_THROW(poison_replay(b, 1.5), DomainError);
}

TEST(DataPoison, TiesGoToOlderRecord) {
  agent::ReplayBuffer b(4);
  for (int i = 0; i < 4; ++i) b.push(record(1.0));
  poison_replay(b, 0.25);
  EXPECT_EQ(b.at(0).r, -1.0);
  EXPECT_EQ(b.at(1).r, 1.0);
}

TEST(Gan, PretrainOnConstantBankReconstructs) {
  GanConfig cfg;
  cfg.warmup_samples = 16;
  cfg.gen_hidden = {32};
  cfg.pretrain_epochs = 2000;
  cfg.lr = 1e-2;
  GanAttacker g(cfg, 10, make_rng(1, Stream::kAttack));
  const std::vector<double> x{0.1, -0.2, 0.3, 0.05, 0.0, -0.15, 0.25, 0.2, -0.3, 0.1};
  for (int i = 0; i < 16; ++i) g.add_sample(x);
  const auto [before, after] = g.pretrain();
  EXPECT_LT(std::sqrt(after * 10.0), 1e-3);  // per-sample Euclidean error
  const auto y = g.generate();
  double err = 0.0;
  for (int i = 0; i < 10; ++i) err += (y[i] - x[i]) * (y[i] - x[i]);
  EXPECT_LT(std::sqrt(err), 1e-3);
  EXPECT_EQ(g.gen_spec().output_width(), 10);
}

TEST(Gan, PretrainReducesReconstructionLoss) {
  GanConfig cfg;
  cfg.warmup_samples = 32;
  cfg.pretrain_epochs = 50;
  Rng rng = make_rng(3, Stream::kOracle);
  GanAttacker g(cfg, 20, make_rng(3, Stream::kAttack));
  for (auto& x : bank_around(std::vector<double>(20, 0.1), 32, 0.05, rng)) g.add_sample(std::move(x));
  const auto [before, after] = g.pretrain();
  EXPECT_LT(after, before);
}

TEST(Gan, DiscriminatorLearnsToSeparateUntrainedGenerator) {
  GanConfig cfg;
  cfg.warmup_samples = 64;
  Rng rng = make_rng(2, Stream::kOracle);
  const std::vector<double> centre(99, 0.3);
  GanAttacker g(cfg, 99, make_rng(2, Stream::kAttack));
  for (auto& x : bank_around(centre, 64, 0.05, rng)) g.add_sample(std::move(x));
  const auto gen0 = g.generator();
  nn::ParamVector disc = g.discriminator();
  nn::Adam opt(cfg.lr, 0.5);
  const nn::Matrix real = nn::stack_rows(g.bank());
  for (int step = 0; step < 50; ++step) {
    const nn::Matrix fake = nn::forward_batch(gen0, g.gen_spec(), g.sample_noise(64, 0.0, 1.0));
    nn::ParamVector grad;
    disc_loss_and_grad(disc, g.disc_spec(), real, fake, &grad);
    opt.step(disc, grad);
  }
  const nn::Matrix fake = nn::forward_batch(gen0, g.gen_spec(), g.sample_noise(64, 0.0, 1.0));
  const nn::Matrix lr = nn::forward_batch(disc, g.disc_spec(), real);
  const nn::Matrix lf = nn::forward_batch(disc, g.disc_spec(), fake);
  int correct = 0;
  for (int i = 0; i < 64; ++i) correct += (lr(i, 0) > 0.0) + (lf(i, 0) <= 0.0);
  EXPECT_GT(correct / 128.0, 0.5);
}

TEST(Gan, GradientsMatchFiniteDifferences) {
  Rng rng = make_rng(3, Stream::kOracle);
  const nn::MlpSpec dspec{{5, 8, 1}}, gspec{{3, 8, 5}};
  const auto d = nn::init_params(dspec, rng), gen = nn::init_params(gspec, rng);
  const nn::Matrix real = nn::Matrix::Random(4, 5), fake = nn::Matrix::Random(4, 5), z = nn::Matrix::Random(4, 3);
  nn::ParamVector gd, gg;
  disc_loss_and_grad(d, dspec, real, fake, &gd);
  gen_loss_and_grad(gen, gspec, d, dspec, z, &gg);
  EXPECT_LE(nn::grad_check([&](const nn::ParamVector& x) { return disc_loss_and_grad(x, dspec, real, fake, nullptr); },
                           gd, d)
                .max_rel_error,
            1e-4);
  EXPECT_LE(nn::grad_check([&](const nn::ParamVector& x) { return gen_loss_and_grad(x, gspec, d, dspec, z, nullptr); },
                           gg, gen)
                .max_rel_error,
            1e-4);
}

TEST(Gan, TrainStepDeterministicForFixedNoise) {
  GanConfig cfg;
  cfg.warmup_samples = 8;
  Rng rng = make_rng(4, Stream::kOracle);
  GanAttacker a(cfg, 6, make_rng(4, Stream::kAttack)), b(cfg, 6, make_rng(4, Stream::kAttack));
  const auto bank = bank_around(std::vector<double>(6, 0.1), 8, 0.1, rng);
  for (const auto& x : bank) {
    a.add_sample(x);
    b.add_sample(x);
  }
  const nn::Matrix real = nn::stack_rows(bank), z1 = nn::Matrix::Random(8, 16), z2 = nn::Matrix::Random(8, 16);
  const auto la = a.train_step(real, z1, z2), lb = b.train_step(real, z1, z2);
  EXPECT_EQ(la.disc, lb.disc);
  EXPECT_EQ(la.gen, lb.gen);
  EXPECT_TRUE(std::isfinite(la.disc) && std::isfinite(la.gen));
  for (std::size_t i = 0; i < a.generator().size(); ++i) EXPECT_EQ(a.generator()[i], b.generator()[i]);
}

TEST(Gan, PhasesAdvanceOnceBankFills) {
  GanConfig cfg;
  cfg.warmup_samples = 4;
  cfg.pretrain_epochs = 10;
  cfg.train_steps = 5;
  GanAttacker g(cfg, 5, make_rng(5, Stream::kAttack));
  for (int i = 0; i < 3; ++i) {
    g.observe_global(std::vector<double>(5, 0.1 * i));
    EXPECT_EQ(g.phase(), GanPhase::kCollecting);
  }
  g.observe_global(std::vector<double>(5, 0.4));
  EXPECT_EQ(g.phase(), GanPhase::kAttacking);
}

TEST(Gan, MaliciousUpdateSplicesOutputLayer) {
  GanConfig cfg;
  const nn::MlpSpec victim{{12, 64, 32, 3}};
  Rng rng = make_rng(6, Stream::kModelInit);
  const auto global = nn::init_params(victim, rng);
  const std::size_t block = global.layer(2).size();
  EXPECT_EQ(block, 99u);
  GanAttacker g(cfg, block, make_rng(6, Stream::kAttack));
  const auto bad = g.generate_malicious_update(global);
  EXPECT_TRUE(bad.same_shape(global));
  const std::size_t off = global.layer_offset(2);
  for (std::size_t i = 0; i < off; ++i) EXPECT_EQ(bad[i], global[i]);
  bool differs = false;
  for (std::size_t i = off; i < global.size(); ++i) differs |= bad[i] != global[i];
  EXPECT_TRUE(differs);
  GanAttacker wrong(cfg, 10, make_rng(6, Stream::kAttack));
  EXPECT_THROW(wrong.generate_malicious_update(global), ShapeError);
}

// Welch t-test on the per-block mean coordinate, 200 generations against the bank.
TEST(Gan, GeneratedBlocksMatchBankLocation) {
  GanConfig cfg;
  Rng rng = make_rng(7, Stream::kOracle);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  std::vector<double> centre(99);
  for (auto& v : centre) v = u(rng);
  GanAttacker g(cfg, 99, make_rng(7, Stream::kAttack));
  for (auto& x : bank_around(centre, cfg.warmup_samples, 0.02, rng)) g.observe_global(x);
  ASSERT_EQ(g.phase(), GanPhase::kAttacking);
  std::vector<double> real, fake;
  for (const auto& x : g.bank()) real.push_back(row_mean(x));
  for (int i = 0; i < 200; ++i) fake.push_back(row_mean(g.generate()));
  auto stats = [](const std::vector<double>& v) {
    const double m = row_mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::pair{m, s / (v.size() - 1)};
  };
  const auto [mr, vr] = stats(real);
  const auto [mf, vf] = stats(fake);
  const double t = (mf - mr) / std::sqrt(vr / real.size() + vf / fake.size());
  EXPECT_LT(std::abs(t), 2.576) << "real mean " << mr << " fake mean " << mf;
}

TEST(Regularization, ScalarOracleAscent) {
  const double w = 0.5, b = 0.1, v1 = 0.8, c1 = -0.2, s = 2.0, r = 1.5, alpha = 0.05, omega = 0.3;
  const nn::ParamVector local(kTiny.layer_shapes(), {w, b, 0.3, v1, -0.4, 0.0, c1, 0.0});
  const nn::ParamVector global(kTiny.layer_shapes(), {0.4, 0.0, 0.2, 0.6, -0.1, 0.1, 0.0, 0.2});
  agent::TdBatch batch;
  batch.s = nn::Matrix::Constant(1, 1, s);
  batch.s_next = nn::Matrix::Constant(1, 1, 1.0);
  batch.a = {1};
  batch.r = {r};
  const auto out = regularized_malicious_update(local, global, local, kTiny, batch, 0.0, omega, alpha,
                                                RegObjective::kAscent);
  const double h = w * s + b, q = v1 * h + c1, d = 2.0 * (q - r);
  const std::vector<double> g_td{d * v1 * s, d * v1, 0.0, d * h, 0.0, 0.0, d, 0.0};
  for (std::size_t i = 0; i < local.size(); ++i) {
    const double want = local[i] + alpha * g_td[i] - 2.0 * omega * alpha * (local[i] - global[i]);
    EXPECT_NEAR(out.params[i], want, 1e-12) << "coordinate " << i;
  }
  EXPECT_NEAR(out.td_loss, (q - r) * (q - r), 1e-12);
}

TEST(Regularization, ScalarOracleComplement) {
  const double w = 0.5, b = 0.1, v1 = 0.8, c1 = -0.2, s = 2.0, r = 1.5, alpha = 0.05, omega = 0.3;
  const nn::ParamVector local(kTiny.layer_shapes(), {w, b, 0.3, v1, -0.4, 0.0, c1, 0.0});
  const nn::ParamVector global = local;
  agent::TdBatch batch;
  batch.s = nn::Matrix::Constant(1, 1, s);
  batch.s_next = nn::Matrix::Constant(1, 1, 1.0);
  batch.a = {1};
  batch.r = {r};
  const auto out = regularized_malicious_update(local, global, local, kTiny, batch, 0.0, omega, alpha,
                                                RegObjective::kComplement);
  const double h = w * s + b, q = v1 * h + c1, d = 2.0 * (q + r);
  const std::vector<double> g{d * v1 * s, d * v1, 0.0, d * h, 0.0, 0.0, d, 0.0};
  for (std::size_t i = 0; i < local.size(); ++i) EXPECT_NEAR(out.params[i], local[i] - alpha * g[i], 1e-12);
}

TEST(Regularization, AscentRaisesTdLossWithoutProximalTerm) {
  const nn::MlpSpec spec{{4, 8, 3}};
  Rng rng = make_rng(8, Stream::kOracle);
  const auto local = nn::init_params(spec, rng), target = nn::init_params(spec, rng);
  agent::TdBatch batch;
  batch.s = nn::Matrix::Random(16, 4);
  batch.s_next = nn::Matrix::Random(16, 4);
  for (int i = 0; i < 16; ++i) {
    batch.a.push_back(i % 3);
    batch.r.push_back(0.1 * i);
  }
  const auto out = regularized_malicious_update(local, local, target, spec, batch, 0.8, 0.0, 1e-3);
  EXPECT_GE(agent::td_loss_and_grad(out.params, target, spec, batch, 0.8).loss, out.td_loss);
  const auto still = regularized_malicious_update(local, local, target, spec, batch, 0.8, 0.5, 0.0);
  for (std::size_t i = 0; i < local.size(); ++i) EXPECT_EQ(still.params[i], local[i]);
}

TEST(Regularization, DeviationNonIncreasingInOmega) {
  const nn::MlpSpec spec{{4, 8, 3}};
  Rng rng = make_rng(9, Stream::kOracle);
  const auto global = nn::init_params(spec, rng), target = nn::init_params(spec, rng);
  auto local = global;
  std::normal_distribution<double> nd(0.0, 0.1);
  for (auto& v : local.values()) v += nd(rng);
  agent::TdBatch batch;
  batch.s = nn::Matrix::Random(8, 4);
  batch.s_next = nn::Matrix::Random(8, 4);
  for (int i = 0; i < 8; ++i) {
    batch.a.push_back(i % 3);
    batch.r.push_back(0.2);
  }
  double prev = std::numeric_limits<double>::infinity();
  for (double omega = 0.0; omega <= 2.0; omega += 0.1) {
    const auto out = regularized_malicious_update(local, global, target, spec, batch, 0.8, omega, 0.1);
    const double dev = nn::distance(out.params, global);
    EXPECT_LE(dev, prev + 1e-12);
    prev = dev;
  }
}

TEST(Regularization, ComplementGradientMatchesFiniteDifferences) {
  const nn::MlpSpec spec{{4, 6, 3}};
  Rng rng = make_rng(10, Stream::kOracle);
  const auto p = nn::init_params(spec, rng), t = nn::init_params(spec, rng);
  agent::TdBatch batch;
  batch.s = nn::Matrix::Random(5, 4);
  batch.s_next = nn::Matrix::Random(5, 4);
  batch.a = {0, 1, 2, 0, 1};
  batch.r = {0.1, 0.5, -0.3, 0.0, 1.0};
  const auto g = complement_loss_and_grad(p, t, spec, batch, 0.8).grad;
  EXPECT_LE(nn::grad_check([&](const nn::ParamVector& x) { return complement_loss_and_grad(x, t, spec, batch, 0.8).loss; },
                           g, p)
                .max_rel_error,
            1e-4);
}

TEST(Regularization, EmptyBatchThrows) {
  const nn::MlpSpec spec{{4, 6, 3}};
  Rng rng = make_rng(11, Stream::kOracle);
  const auto p = nn::init_params(spec, rng);
  EXPECT_THROW(regularized_malicious_update(p, p, p, spec, agent::TdBatch{}, 0.8, 0.1, 0.1), DomainError);
}
