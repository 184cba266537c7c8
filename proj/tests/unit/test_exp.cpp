#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fedsleep/common/error.hpp"
#include "fedsleep/common/rng.hpp"
#include "fedsleep/exp/config.hpp"
#include "fedsleep/exp/experiment.hpp"
#include "fedsleep/exp/pca.hpp"
#include "fedsleep/exp/report.hpp"
#include "fedsleep/exp/svg.hpp"

using namespace fedsleep;
using namespace fedsleep::exp;

namespace {

ExperimentConfig tiny_config() {
  auto c = desk_profile();
  c.scenario.n_sbs = 4;
  c.episodes = 3;
  c.ttis_per_episode = 24;
  c.aggregate_every_ttis = 8;
  c.agent.warmup_transitions = 8;
  c.agent.batch = 16;
  c.seeds = {1, 2};
  return c;
}

std::string key_path_of(const std::string& json_text) {
  try {
    parse_config(json_text);
  } catch (const ConfigError& e) {
    return e.key_path();
  }
  return "";
}

// Two leading eigenvectors of the covariance by power iteration with deflation.
nn::Matrix power_iteration_projection(const nn::Matrix& x) {
  nn::Matrix c = x.rowwise() - x.colwise().mean();
  Eigen::MatrixXd cov = (c.transpose() * c) / static_cast<double>(x.rows() - 1);
  nn::Matrix out(x.rows(), 2);
  for (int k = 0; k < 2; ++k) {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(cov.rows()).normalized();
    for (int it = 0; it < 20000; ++it) v = (cov * v).normalized();
    const double lambda = v.dot(cov * v);
    Eigen::Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0) v = -v;
    out.col(k) = c * v;
    cov -= lambda * v * v.transpose();
  }
  return out;
}

}  // namespace

TEST(Config, EmptyObjectIsFullDefault) {
  const auto c = parse_config("{}");
  EXPECT_EQ(c.scenario.n_sbs, 20);
  EXPECT_EQ(c.attack.kind, AttackKind::kNone);
  EXPECT_EQ(c.defense.kind, DefenseKind::kNone);
  EXPECT_EQ(c.agent.hidden, (std::vector<int>{64, 32}));
  EXPECT_DOUBLE_EQ(c.agent.lr, 0.01);
  EXPECT_DOUBLE_EQ(c.agent.gamma, 0.8);
  EXPECT_DOUBLE_EQ(c.agent.epsilon, 0.05);
  EXPECT_EQ(c.agent.batch, 256);
}

TEST(Config, GanOnThreeParticipants) {
  const auto c = parse_config(R"({"attack":{"kind":"gan","malicious_ids":[0,1,2]}})");
  EXPECT_EQ(c.attack.kind, AttackKind::kGan);
  EXPECT_EQ(c.attack.malicious_ids, (std::vector<int>{0, 1, 2}));
}

TEST(Config, DeskProfile) {
  const auto c = parse_config(R"({"profile":"desk"})");
  EXPECT_EQ(c.scenario.n_sbs, 8);
  EXPECT_EQ(c.scenario.ues_per_sbs_min, 4);
  EXPECT_EQ(c.scenario.ues_per_sbs_max, 4);
  EXPECT_EQ(c.seeds.size(), 3u);
}

TEST(Config, ErrorsNameTheKey) {
  EXPECT_EQ(key_path_of(R"({"attack":{"kind":"gan","malicious_ids":[0,25]}})"), "attack.malicious_ids[1]");
  EXPECT_EQ(key_path_of(R"({"scenario":{"n_sbz":3}})"), "scenario.n_sbz");
  EXPECT_EQ(key_path_of(R"({"agent":{"lr":"fast"}})"), "agent.lr");
  EXPECT_EQ(key_path_of(R"({"attack":{"kind":"meteor"}})"), "attack.kind");
  EXPECT_EQ(key_path_of(R"({"defense":{"kd":{"xi":2}}})"), "defense.kd.xi");
  EXPECT_EQ(key_path_of(R"({"seeds":[]})"), "seeds");
  EXPECT_EQ(key_path_of(R"({"attack":{"kind":"gan"}})"), "attack.malicious_ids");
  EXPECT_EQ(key_path_of("{not json"), "<root>");
}

TEST(Config, JsonRoundTrip) {
  auto c = desk_profile();
  c.attack.kind = AttackKind::kRegularization;
  c.attack.malicious_ids = {1, 4};
  c.defense.kind = DefenseKind::kKd;
  c.defense.kd.theta = 0.07;
  const auto back = parse_config(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
}

TEST(Experiment, DeterministicMetrics) {
  const auto c = tiny_config();
  const auto a = run_experiment(c), b = run_experiment(c);
  EXPECT_EQ(metrics_csv(a.log), metrics_csv(b.log));
  EXPECT_EQ(a.log.rows.size(), c.seeds.size() * c.episodes * c.ttis_per_episode);
}

TEST(Experiment, WorkersDoNotChangeResults) {
  auto c = tiny_config();
  const auto a = run_experiment(c);
  c.workers = 2;
  const auto b = run_experiment(c);
  EXPECT_EQ(metrics_csv(a.log), metrics_csv(b.log));
}

TEST(Experiment, AttackedRunsComplete) {
  for (auto kind : {AttackKind::kDataPoison, AttackKind::kGan, AttackKind::kRegularization}) {
    for (auto def : {DefenseKind::kNone, DefenseKind::kKrum, DefenseKind::kAutoencoder, DefenseKind::kKd}) {
      auto c = tiny_config();
      c.seeds = {1};
      c.attack.kind = kind;
      c.attack.malicious_ids = {0};
      c.attack.gan.warmup_samples = 2;
      c.attack.gan.pretrain_epochs = 5;
      c.attack.gan.train_steps = 5;
      c.defense.kind = def;
      c.defense.ae.epochs = 5;
      const auto r = run_experiment(c);
      EXPECT_FALSE(r.log.failed()) << to_string(kind) << "/" << to_string(def);
      EXPECT_EQ(r.log.rows.size(), static_cast<std::size_t>(c.episodes * c.ttis_per_episode));
      EXPECT_FALSE(r.log.rounds.empty());
    }
  }
}

TEST(Experiment, MonotoneTtiWithinEpisode) {
  const auto r = run_experiment(tiny_config());
  for (std::size_t i = 1; i < r.log.rows.size(); ++i) {
    const auto &p = r.log.rows[i - 1], &q = r.log.rows[i];
    if (p.seed == q.seed && p.episode == q.episode) {
      EXPECT_EQ(q.tti, p.tti + 1);
    }
  }
}

TEST(Report, MetricsHeaderAndEeConsistency) {
  const auto r = run_experiment(tiny_config());
  const auto csv = metrics_csv(r.log);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "tti,episode,seed,throughput_mbps,energy_w,ee,mean_reward,drop_rate");
  for (const auto& row : r.log.rows) EXPECT_NEAR(row.ee, row.throughput_mbps / row.energy_w, 1e-9);
}

TEST(Report, SummaryMatchesColumnsAndOmitsAttackForSecureRun) {
  const auto c = tiny_config();
  const auto r = run_experiment(c);
  const auto j = nlohmann::json::parse(summary_json(c, r.log));
  EXPECT_FALSE(j.contains("attack"));
  EXPECT_FALSE(j.contains("defense"));
  double sum = 0.0;
  for (const auto& row : r.log.rows) sum += row.ee;
  EXPECT_NEAR(j["metrics"]["ee"]["mean"].get<double>(), sum / r.log.rows.size(), 1e-12);
}

TEST(Report, EmitWritesFileSet) {
  auto c = tiny_config();
  c.seeds = {1};
  c.attack.kind = AttackKind::kDataPoison;
  c.attack.malicious_ids = {0};
  const auto r = run_experiment(c);
  const auto dir = std::filesystem::temp_directory_path() / "fedsleep_emit_test";
  std::filesystem::remove_all(dir);
  emit_report(c, r, dir);
  for (const char* f : {"metrics.csv", "rounds.csv", "summary.json", "config.json", "ee.svg", "reward.svg", "pca.csv",
                        "pca.svg"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  const auto j = nlohmann::json::parse(std::ifstream(dir / "summary.json"));
  EXPECT_TRUE(j.contains("attack"));
  std::filesystem::remove_all(dir);
}

TEST(Report, UnwritableDirectoryFailsFirst) {
  EXPECT_THROW(ensure_writable("/proc/fedsleep_cannot_write_here"), std::runtime_error);
}

TEST(Metrics, ThirdsAndConfidenceInterval) {
  MetricsLog log;
  for (int ep = 0; ep < 6; ++ep) log.rows.push_back({0, ep, 1, 0.0, 1.0, double(ep), double(ep), 0.0});
  EXPECT_DOUBLE_EQ(first_third_mean(log, 1, 6, Column::kReward), 0.5);
  EXPECT_DOUBLE_EQ(final_third_mean(log, 1, 6, Column::kReward), 4.5);
  const auto ci = mean_ci({1.0, 2.0, 3.0});
  EXPECT_DOUBLE_EQ(ci.mean, 2.0);
  EXPECT_NEAR(ci.half_width, 1.96 * 1.0 / std::sqrt(3.0), 1e-12);
}

TEST(Metrics, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(Pca, MatchesPowerIterationOracle) {
  Rng rng = make_rng(1, Stream::kOracle);
  std::normal_distribution<double> nd(0.0, 1.0);
  nn::Matrix x(5, 20);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = nd(rng);
  const auto r = pca_project(x);
  const auto want = power_iteration_projection(x);
  ASSERT_EQ(r.points.rows(), 5);
  for (int i = 0; i < 5; ++i) {
    for (int k = 0; k < 2; ++k) EXPECT_NEAR(r.points(i, k), want(i, k), 1e-8);
  }
  EXPECT_GE(r.explained[0], r.explained[1]);
}

TEST(Pca, AxisAlignedInput) {
  nn::Matrix x(4, 2);
  x << 3, 0.5, -3, 0.5, 1, -0.5, -1, -0.5;
  const auto r = pca_project(x);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(std::abs(r.points(i, 0)), std::abs(x(i, 0)), 1e-12);
    EXPECT_NEAR(std::abs(r.points(i, 1)), std::abs(x(i, 1)), 1e-12);
  }
}

TEST(Pca, IdenticalVectorsCollapseToOrigin) {
  nn::Matrix x = nn::Matrix::Constant(4, 6, 0.7);
  const auto r = pca_project(x);
  EXPECT_TRUE(r.degenerate);
  EXPECT_NEAR(r.points.norm(), 0.0, 1e-12);
}

TEST(Pca, SeparationHelpers) {
  nn::Matrix p(4, 2);
  p << 0, 0, 1, 0, 10, 0, 12, 0;
  EXPECT_DOUBLE_EQ(min_cross_distance(p, {0, 1}, {2, 3}), 9.0);
  EXPECT_DOUBLE_EQ(max_within_distance(p, {0, 1}), 1.0);
}

TEST(Svg, LinePlotIsStandaloneDocument) {
  std::vector<Series> s{{"a", {0, 1, 2}, {1, 3, 2}}};
  const auto doc = line_plot("t", "x", "y", s);
  EXPECT_NE(doc.find("<svg"), std::string::npos);
  EXPECT_NE(doc.find("</svg>"), std::string::npos);
  EXPECT_NE(doc.find("<polyline"), std::string::npos);
}
