#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "fedsleep/agent/dqn.hpp"
#include "fedsleep/attack/gan_attack.hpp"
#include "fedsleep/defense/bound.hpp"
#include "fedsleep/defense/kd.hpp"
#include "fedsleep/fed/federation.hpp"
#include "fedsleep/nn/autoencoder.hpp"
#include "fedsleep/nn/grad_check.hpp"
#include "fedsleep/nn/ops.hpp"

namespace fedsleep::tools {

namespace {

constexpr double kGradTol = 1e-4;

nn::Matrix random_matrix(Rng& rng, int rows, int cols, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  nn::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = nd(rng);
  return m;
}

agent::TdBatch random_batch(Rng& rng, int n, int width) {
  agent::TdBatch b;
  b.s = random_matrix(rng, n, width);
  b.s_next = random_matrix(rng, n, width);
  std::uniform_int_distribution<int> act(0, 2);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    b.a.push_back(act(rng));
    b.r.push_back(nd(rng));
  }
  return b;
}

struct Reporter {
  std::ostream& out;
  int failures = 0;

  void line(bool ok, const std::string& name, const std::string& detail) {
    out << (ok ? "PASS " : "FAIL ") << name << "  " << detail << '\n';
    if (!ok) ++failures;
  }

  void grad(const std::string& name, const nn::GradCheckResult& r) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "max rel error %.3e at %zu", r.max_rel_error, r.worst_index);
    line(r.max_rel_error <= kGradTol, name, buf);
  }
};

}  // namespace

int run_verify(std::ostream& out) {
  Reporter rep{out};
  Rng rng = make_rng(2024, Stream::kOracle);

  // TD loss.
  {
    const nn::MlpSpec spec{{4, 8, 6, 3}};
    const auto p = nn::init_params(spec, rng);
    const auto t = nn::init_params(spec, rng);
    const auto batch = random_batch(rng, 6, 4);
    const auto g = agent::td_loss_and_grad(p, t, spec, batch, 0.8).grad;
    rep.grad("td_loss", nn::grad_check([&](const nn::ParamVector& x) {
      return agent::td_loss_and_grad(x, t, spec, batch, 0.8).loss;
    }, g, p));
  }

  // GAN losses.
  {
    const nn::MlpSpec dspec{{5, 8, 1}}, gspec{{3, 8, 5}};
    const auto d = nn::init_params(dspec, rng);
    const auto gen = nn::init_params(gspec, rng);
    const auto real = random_matrix(rng, 4, 5), fake = random_matrix(rng, 4, 5), z = random_matrix(rng, 4, 3);
    nn::ParamVector gd, gg;
    attack::disc_loss_and_grad(d, dspec, real, fake, &gd);
    attack::gen_loss_and_grad(gen, gspec, d, dspec, z, &gg);
    rep.grad("gan_discriminator_loss", nn::grad_check([&](const nn::ParamVector& x) {
      return attack::disc_loss_and_grad(x, dspec, real, fake, nullptr);
    }, gd, d));
    rep.grad("gan_generator_loss", nn::grad_check([&](const nn::ParamVector& x) {
      return attack::gen_loss_and_grad(x, gspec, d, dspec, z, nullptr);
    }, gg, gen));
  }

  // Autoencoder reconstruction loss.
  {
    nn::Autoencoder ae(nn::AutoencoderSpec{6, {5}, 3}, rng);
    const auto x = random_matrix(rng, 5, 6);
    nn::ParamVector ge, gd;
    ae.loss_and_grad(x, ge, gd);
    const auto enc = ae.encoder(), dec = ae.decoder();
    rep.grad("autoencoder_loss_encoder", nn::grad_check([&](const nn::ParamVector& p) {
      nn::Autoencoder copy = ae;
      copy.encoder() = p;
      return copy.loss(x);
    }, ge, enc));
    rep.grad("autoencoder_loss_decoder", nn::grad_check([&](const nn::ParamVector& p) {
      nn::Autoencoder copy = ae;
      copy.decoder() = p;
      return copy.loss(x);
    }, gd, dec));
  }

  // Distillation losses.
  {
    const nn::MlpSpec spec{{4, 8, 3}};
    const auto local = nn::init_params(spec, rng), meme = nn::init_params(spec, rng), target = nn::init_params(spec, rng);
    const auto batch = random_batch(rng, 5, 4);
    const auto gm = defense::mixed_loss_and_grad(local, target, meme, spec, batch, 0.8, 0.7).grad;
    rep.grad("kd_mixed_loss", nn::grad_check([&](const nn::ParamVector& p) {
      return defense::mixed_loss_and_grad(p, target, meme, spec, batch, 0.8, 0.7).loss;
    }, gm, local));
    const auto gme = defense::meme_loss_and_grad(meme, local, spec, batch).grad;
    rep.grad("kd_meme_loss", nn::grad_check([&](const nn::ParamVector& p) {
      return defense::meme_loss_and_grad(p, local, spec, batch).loss;
    }, gme, meme));
  }

  // Closed-form E0 against the numerical minimum.
  {
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      std::array<double, 3> q{u(rng), u(rng), u(rng)};
      std::sort(q.begin(), q.end(), std::greater<>());
      const auto lp = nn::log_softmax(q);
      worst = std::max(worst, std::abs(defense::e_zero(lp[0], lp[1]) - defense::e_zero_numeric(q)));
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "max |closed - numeric| %.3e over 100 triples", worst);
    rep.line(worst <= 1e-6, "e_zero_vs_numeric", buf);
  }

  // FedAvg.
  {
    std::uniform_int_distribution<int> kdist(2, 10);
    std::normal_distribution<double> nd(0.0, 3.0);
    const std::vector<nn::LayerShape> shapes{{5, 10, true}};
    double worst = 0.0;
    bool invariant = true;
    for (int trial = 0; trial < 100; ++trial) {
      const int k = kdist(rng);
      std::vector<nn::ParamVector> subs;
      for (int i = 0; i < k; ++i) {
        nn::ParamVector v(shapes, i);
        for (auto& x : v.values()) x = nd(rng);
        subs.push_back(std::move(v));
      }
      const auto avg = fed::fed_avg(subs);
      for (std::size_t c = 0; c < avg.size(); ++c) {
        long double s = 0.0L;
        for (const auto& v : subs) s += v[c];
        worst = std::max(worst, std::abs(avg[c] - static_cast<double>(s / k)));
      }
      auto shuffled = subs;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      const auto again = fed::fed_avg(shuffled);
      invariant = invariant && std::equal(avg.values().begin(), avg.values().end(), again.values().begin());
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "max deviation %.3e over 100 sets", worst);
    rep.line(worst <= 1e-12, "fed_avg_mean", buf);
    rep.line(invariant, "fed_avg_permutation", invariant ? "bit-identical" : "differs");
  }

  return rep.failures;
}

}  // namespace fedsleep::tools
