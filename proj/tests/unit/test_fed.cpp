#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

#include "fedsleep/common/error.hpp"
#include "fedsleep/common/rng.hpp"
#include "fedsleep/fed/federation.hpp"

using namespace fedsleep;
using namespace fedsleep::fed;

namespace {

const std::vector<nn::LayerShape> kShapes{{3, 2, true}};

nn::ParamVector random_vector(Rng& rng, int id = -1) {
  std::normal_distribution<double> nd(0.0, 1.0);
  nn::ParamVector v(kShapes, id);
  for (auto& x : v.values()) x = nd(rng);
  return v;
}

std::vector<RoundSubmission> random_submissions(Rng& rng, int n, std::vector<int> malicious = {}) {
  std::vector<RoundSubmission> subs;
  for (int i = 0; i < n; ++i) {
    const bool bad = std::find(malicious.begin(), malicious.end(), i) != malicious.end();
    subs.push_back({i, random_vector(rng, i), bad});
  }
  return subs;
}

}  // namespace

TEST(FedAvg, TwoVectorMean) {
  const std::vector<nn::LayerShape> s{{1, 2, false}};
  std::vector<nn::ParamVector> v{nn::ParamVector(s, {1, 2}), nn::ParamVector(s, {3, 4})};
  const auto m = fed_avg(v);
  EXPECT_EQ(m[0], 2.0);
  EXPECT_EQ(m[1], 3.0);
}

TEST(FedAvg, IdenticalInputsReturnedExactly) {
  Rng rng = make_rng(1, Stream::kOracle);
  const auto v = random_vector(rng);
  std::vector<nn::ParamVector> copies(9, v);
  const auto m = fed_avg(copies);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(m[i], v[i], 1e-15);
}

TEST(FedAvg, PermutationInvariantBitForBit) {
  Rng rng = make_rng(2, Stream::kOracle);
  for (int t = 0; t < 50; ++t) {
    std::vector<nn::ParamVector> v;
    for (int i = 0; i < 7; ++i) v.push_back(random_vector(rng));
    const auto a = fed_avg(v);
    std::shuffle(v.begin(), v.end(), rng);
    const auto b = fed_avg(v);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
  }
}

TEST(FedAvg, Linear) {
  Rng rng = make_rng(3, Stream::kOracle);
  std::vector<nn::ParamVector> v, scaled;
  for (int i = 0; i < 5; ++i) {
    v.push_back(random_vector(rng));
    scaled.push_back(2.5 * v.back());
  }
  const auto a = fed_avg(v), b = fed_avg(scaled);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(b[i], 2.5 * a[i], 1e-12);
}

TEST(FedAvg, ShapeMismatchThrows) {
  std::vector<nn::ParamVector> v{nn::ParamVector(kShapes), nn::ParamVector(std::vector<nn::LayerShape>{{2, 2, true}})};
  EXPECT_THROW(fed_avg(v), ShapeError);
}

TEST(Round, PassThroughEqualsFedAvg) {
  Rng rng = make_rng(4, Stream::kOracle);
  auto subs = random_submissions(rng, 5);
  std::vector<nn::ParamVector> raw;
  for (const auto& s : subs) raw.push_back(s.params);
  const auto prev = random_vector(rng);
  const auto r = run_round(subs, prev, 0);
  const auto m = fed_avg(raw);
  for (std::size_t i = 0; i < m.size(); ++i) EXPECT_EQ(r.global[i], m[i]);
  EXPECT_EQ(r.accepted_ids.size(), 5u);
  EXPECT_TRUE(r.rejected_ids.empty());
}

TEST(Round, RejectedSubmissionsHaveNoInfluence) {
  Rng rng = make_rng(5, Stream::kOracle);
  auto subs = random_submissions(rng, 5);
  const auto prev = random_vector(rng);
  const DefenseHook reject_1_3 = [](std::span<const SubmissionView> s, const nn::ParamVector&, int) {
    DefenseDecision d;
    for (const auto& v : s) {
      if (v.participant_id != 1 && v.participant_id != 3) d.accepted_ids.push_back(v.participant_id);
    }
    return d;
  };
  const auto a = run_round(subs, prev, 0, {}, reject_1_3);
  subs[1].params *= 100.0;
  subs[3].params.fill(-7.0);
  const auto b = run_round(subs, prev, 0, {}, reject_1_3);
  for (std::size_t i = 0; i < a.global.size(); ++i) EXPECT_EQ(a.global[i], b.global[i]);
  EXPECT_EQ(a.rejected_ids, (std::vector<int>{1, 3}));
}

TEST(Round, OracleDefenseEqualsBenignOnlyRun) {
  Rng rng = make_rng(6, Stream::kOracle);
  auto subs = random_submissions(rng, 20, {0, 1, 2});
  const auto prev = random_vector(rng);
  const AttackHook flip = [](int, const nn::ParamVector& honest, const nn::ParamVector&) { return -50.0 * honest; };
  std::vector<int> malicious{0, 1, 2};
  const DefenseHook oracle = [&](std::span<const SubmissionView> s, const nn::ParamVector&, int) {
    DefenseDecision d;
    for (const auto& v : s) {
      if (std::find(malicious.begin(), malicious.end(), v.participant_id) == malicious.end()) {
        d.accepted_ids.push_back(v.participant_id);
      }
    }
    return d;
  };
  std::vector<RoundSubmission> benign(subs.begin() + 3, subs.end());
  for (auto& b : benign) b.malicious = false;
  const auto attacked = run_round(subs, prev, 0, flip, oracle);
  const auto secure = run_round(benign, prev, 0);
  for (std::size_t i = 0; i < secure.global.size(); ++i) EXPECT_EQ(attacked.global[i], secure.global[i]);
}

TEST(Round, AttackHookOnlyTouchesMalicious) {
  Rng rng = make_rng(7, Stream::kOracle);
  auto subs = random_submissions(rng, 4, {2});
  const auto before = subs;
  std::vector<int> called;
  const AttackHook hook = [&](int id, const nn::ParamVector& honest, const nn::ParamVector&) {
    called.push_back(id);
    return 3.0 * honest;
  };
  run_round(subs, random_vector(rng), 0, hook);
  EXPECT_EQ(called, std::vector<int>{2});
  for (int i : {0, 1, 3}) {
    for (std::size_t k = 0; k < subs[i].params.size(); ++k) EXPECT_EQ(subs[i].params[k], before[i].params[k]);
  }
}

TEST(Round, RejectingEveryoneKeepsPreviousGlobal) {
  Rng rng = make_rng(8, Stream::kOracle);
  auto subs = random_submissions(rng, 3);
  const auto prev = random_vector(rng);
  const DefenseHook none = [](std::span<const SubmissionView>, const nn::ParamVector&, int) { return DefenseDecision{}; };
  const auto r = run_round(subs, prev, 4, {}, none);
  EXPECT_TRUE(r.fallback);
  for (std::size_t i = 0; i < prev.size(); ++i) EXPECT_EQ(r.global[i], prev[i]);
  EXPECT_EQ(r.round_index, 4);
}

TEST(Broadcast, ReceiversEqualGlobalAndIdempotent) {
  Rng rng = make_rng(9, Stream::kOracle);
  RoundResult r;
  r.global = random_vector(rng);
  auto a = random_vector(rng, 0), b = random_vector(rng, 1);
  std::vector<nn::ParamVector*> rx{&a, &b};
  broadcast(r, rx);
  broadcast(r, rx);
  for (std::size_t i = 0; i < r.global.size(); ++i) {
    EXPECT_EQ(a[i], r.global[i]);
    EXPECT_EQ(b[i], r.global[i]);
  }
  EXPECT_EQ(a.id(), 0);
  EXPECT_EQ(b.id(), 1);
}

TEST(Checkpoint, RoundTrip) {
  Rng rng = make_rng(10, Stream::kOracle);
  Checkpoint ck;
  ck.round_index = 12;
  ck.submissions = random_submissions(rng, 4, {1});
  ck.global = random_vector(rng);
  const auto path = std::filesystem::temp_directory_path() / "fedsleep_ck_roundtrip.fsck";
  write_checkpoint(path, ck);
  const auto back = read_checkpoint(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.round_index, 12);
  ASSERT_EQ(back.submissions.size(), 4u);
  EXPECT_TRUE(back.submissions[1].malicious);
  EXPECT_FALSE(back.submissions[0].malicious);
  for (std::size_t i = 0; i < ck.global.size(); ++i) EXPECT_EQ(back.global[i], ck.global[i]);
  for (std::size_t i = 0; i < ck.global.size(); ++i) {
    EXPECT_EQ(back.submissions[3].params[i], ck.submissions[3].params[i]);
  }
}
