#include "fedsleep/attack/gan_attack.hpp"

#include <cmath>
#include <limits>

#include "fedsleep/common/error.hpp"
#include "fedsleep/nn/ops.hpp"

namespace fedsleep::attack {

double disc_loss_and_grad(const nn::ParamVector& disc, const nn::MlpSpec& disc_spec, const nn::Matrix& real,
                          const nn::Matrix& fake, nn::ParamVector* grad) {
  nn::ForwardCache rc, fc;
  const nn::Matrix lr = nn::forward_batch(disc, disc_spec, real, &rc);
  const nn::Matrix lf = nn::forward_batch(disc, disc_spec, fake, &fc);
  const double nr = static_cast<double>(lr.rows()), nf = static_cast<double>(lf.rows());
  double loss = 0.0;
  nn::Matrix ur(lr.rows(), 1), uf(lf.rows(), 1);
  for (Eigen::Index i = 0; i < lr.rows(); ++i) {
    loss += nn::softplus(-lr(i, 0)) / nr;
    ur(i, 0) = (nn::sigmoid(lr(i, 0)) - 1.0) / nr;
  }
  for (Eigen::Index i = 0; i < lf.rows(); ++i) {
    loss += nn::softplus(lf(i, 0)) / nf;
    uf(i, 0) = nn::sigmoid(lf(i, 0)) / nf;
  }
  if (grad) {
    *grad = nn::backward_batch(disc, disc_spec, rc, ur);
    *grad += nn::backward_batch(disc, disc_spec, fc, uf);
  }
  return loss;
}

double gen_loss_and_grad(const nn::ParamVector& gen, const nn::MlpSpec& gen_spec, const nn::ParamVector& disc,
                         const nn::MlpSpec& disc_spec, const nn::Matrix& z, nn::ParamVector* grad) {
  nn::ForwardCache gc, dc;
  const nn::Matrix fake = nn::forward_batch(gen, gen_spec, z, &gc);
  const nn::Matrix logit = nn::forward_batch(disc, disc_spec, fake, &dc);
  const double n = static_cast<double>(logit.rows());
  double loss = 0.0;
  nn::Matrix up(logit.rows(), 1);
  for (Eigen::Index i = 0; i < logit.rows(); ++i) {
    // log(1 - sigmoid(l)) = -softplus(l)
    loss -= nn::softplus(logit(i, 0)) / n;
    up(i, 0) = -nn::sigmoid(logit(i, 0)) / n;
  }
  if (grad) {
    nn::Matrix fake_grad;
    nn::backward_batch(disc, disc_spec, dc, up, &fake_grad);
    *grad = nn::backward_batch(gen, gen_spec, gc, fake_grad);
  }
  return loss;
}

namespace {

nn::MlpSpec make_spec(int in, const std::vector<int>& hidden, int out) {
  nn::MlpSpec s;
  s.widths.push_back(in);
  s.widths.insert(s.widths.end(), hidden.begin(), hidden.end());
  s.widths.push_back(out);
  s.validate();
  return s;
}

}  // namespace

GanAttacker::GanAttacker(GanConfig config, std::size_t block_width, Rng rng)
    : config_(std::move(config)),
      block_width_(block_width),
      rng_(std::move(rng)),
      gen_spec_(make_spec(config_.latent_width, config_.gen_hidden, static_cast<int>(block_width))),
      disc_spec_(make_spec(static_cast<int>(block_width), config_.disc_hidden, 1)),
      gen_(nn::init_params(gen_spec_, rng_)),
      disc_(nn::init_params(disc_spec_, rng_)),
      gen_opt_(config_.lr, 0.5),
      disc_opt_(config_.lr, 0.5) {
  if (config_.warmup_samples < 1) throw DomainError("gan.warmup_samples must be positive");
}

void GanAttacker::add_sample(std::vector<double> block) {
  if (block.size() != block_width_) throw ShapeError("GAN sample width mismatch");
  bank_.push_back(std::move(block));
}

GanLosses GanAttacker::observe_global(const std::vector<double>& output_block) {
  add_sample(output_block);
  GanLosses last;
  if (failed_) return last;
  if (phase_ == GanPhase::kCollecting && bank_.size() >= static_cast<std::size_t>(config_.warmup_samples)) {
    phase_ = GanPhase::kTraining;
    pretrain();
    for (int i = 0; i < config_.train_steps && !failed_; ++i) last = train_step();
    if (!failed_) phase_ = GanPhase::kAttacking;
  } else if (phase_ == GanPhase::kAttacking) {
    for (int i = 0; i < config_.steps_per_round && !failed_; ++i) last = train_step();
  }
  return last;
}

std::pair<double, double> GanAttacker::pretrain() {
  if (bank_.size() < static_cast<std::size_t>(config_.warmup_samples)) return {0.0, 0.0};
  nn::AutoencoderSpec spec{static_cast<int>(block_width_), config_.gen_hidden, config_.latent_width};
  // The decoder must mirror the generator: latent -> reversed hidden -> block.
  std::vector<int> reversed(config_.gen_hidden.rbegin(), config_.gen_hidden.rend());
  spec.hidden = reversed;
  nn::Autoencoder ae(spec, rng_);
  const nn::Matrix raw = nn::stack_rows(bank_);
  centre_ = raw.colwise().mean();
  scale_ = ((raw.rowwise() - centre_).colwise().squaredNorm() / static_cast<double>(raw.rows()))
               .cwiseSqrt()
               .cwiseMax(kMinScale);
  const nn::Matrix x = standardize(raw);
  const double before = ae.loss(x);
  const double after = ae.train(x, config_.pretrain_epochs, config_.lr);
  gen_ = ae.decoder();
  gen_opt_.reset();
  return {before, after};
}

nn::Matrix GanAttacker::standardize(const nn::Matrix& x) const {
  if (centre_.size() != x.cols()) return x;
  return (x.rowwise() - centre_).array().rowwise() / scale_.array();
}

nn::Matrix GanAttacker::sample_noise(int rows, double mu, double sigma) {
  std::normal_distribution<double> nd(mu, sigma);
  nn::Matrix z(rows, config_.latent_width);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = nd(rng_);
  return z;
}

GanLosses GanAttacker::train_step() {
  const int b = std::min<int>(config_.batch, static_cast<int>(bank_.size()));
  std::vector<std::vector<double>> rows;
  rows.reserve(b);
  std::uniform_int_distribution<std::size_t> pick(0, bank_.size() - 1);
  for (int i = 0; i < b; ++i) rows.push_back(bank_[pick(rng_)]);
  const nn::Matrix real = standardize(nn::stack_rows(rows));
  const nn::Matrix z1 = sample_noise(b, config_.train_mu, config_.train_sigma);
  const nn::Matrix z2 = sample_noise(b, config_.train_mu, config_.train_sigma);
  return train_step(real, z1, z2);
}

GanLosses GanAttacker::train_step(const nn::Matrix& real, const nn::Matrix& z_disc, const nn::Matrix& z_gen) {
  GanLosses out;
  nn::ParamVector g;
  const nn::Matrix fake = nn::forward_batch(gen_, gen_spec_, z_disc);
  out.disc = disc_loss_and_grad(disc_, disc_spec_, real, fake, &g);
  if (std::isfinite(out.disc) && g.all_finite()) disc_opt_.step(disc_, g);
  out.gen = gen_loss_and_grad(gen_, gen_spec_, disc_, disc_spec_, z_gen, &g);
  if (std::isfinite(out.gen) && g.all_finite()) gen_opt_.step(gen_, g);
  if (!std::isfinite(out.disc) || !std::isfinite(out.gen) || !gen_.all_finite() || !disc_.all_finite()) {
    failed_ = true;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
  }
  return out;
}

std::vector<double> GanAttacker::generate() {
  const nn::Matrix z = sample_noise(1, config_.attack_mu, config_.attack_sigma);
  nn::Matrix y = nn::forward_batch(gen_, gen_spec_, z);
  if (centre_.size() == y.cols()) y = (y.array().rowwise() * scale_.array()).rowwise() + centre_.array();
  return std::vector<double>(y.data(), y.data() + y.size());
}

nn::ParamVector GanAttacker::generate_malicious_update(const nn::ParamVector& received_global) {
  const std::size_t last = received_global.shapes().size() - 1;
  if (received_global.shapes().empty() || received_global.layer(last).size() != block_width_) {
    throw ShapeError("GAN block width does not match the received model's output layer");
  }
  nn::ParamVector out = received_global;
  const auto block = generate();
  auto slot = out.layer(last);
  std::copy(block.begin(), block.end(), slot.begin());
  return out;
}

}  // namespace fedsleep::attack
