#include "fedsleep/fed/federation.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <string>

#include "fedsleep/common/error.hpp"
#include "fedsleep/nn/serialize.hpp"

namespace fedsleep::fed {

nn::ParamVector fed_avg(std::span<const nn::ParamVector> submissions) {
  if (submissions.empty()) throw ShapeError("fed_avg: no submissions");
  return nn::mean(submissions);
}

RoundResult run_round(std::vector<RoundSubmission>& submissions, const nn::ParamVector& prev_global,
                      int round_index, const AttackHook& attack, const DefenseHook& defense) {
  if (submissions.empty()) throw ShapeError("run_round: no submissions");
  if (attack) {
    for (auto& s : submissions) {
      if (s.malicious) s.params = attack(s.participant_id, s.params, prev_global);
    }
  }
  for (const auto& s : submissions) require_same_shape(prev_global, s.params, "run_round");

  std::vector<SubmissionView> views;
  views.reserve(submissions.size());
  for (const auto& s : submissions) views.push_back({s.participant_id, &s.params});

  RoundResult result;
  result.round_index = round_index;
  std::set<int> accepted;
  if (defense) {
    DefenseDecision d = defense(views, prev_global, round_index);
    result.scores = std::move(d.scores);
    std::set<int> known;
    for (const auto& s : submissions) known.insert(s.participant_id);
    for (int id : d.accepted_ids) {
      if (!known.contains(id)) throw DomainError("defense accepted unknown id " + std::to_string(id));
      accepted.insert(id);
    }
  } else {
    for (const auto& s : submissions) accepted.insert(s.participant_id);
  }

  std::vector<nn::ParamVector> survivors;
  for (const auto& s : submissions) {
    if (accepted.contains(s.participant_id)) {
      result.accepted_ids.push_back(s.participant_id);
      survivors.push_back(s.params);
    } else {
      result.rejected_ids.push_back(s.participant_id);
    }
  }
  if (survivors.empty()) {
    result.global = prev_global;
    result.fallback = true;
  } else {
    result.global = fed_avg(survivors);
  }
  result.global.set_id(-1);
  return result;
}

void broadcast(const RoundResult& result, std::span<nn::ParamVector* const> receivers) {
  for (nn::ParamVector* r : receivers) {
    require_same_shape(result.global, *r, "broadcast");
    const int id = r->id();
    *r = result.global;
    r->set_id(id);
  }
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write("FSCK", 4);
  nn::write_u32(out, 1);
  nn::write_u32(out, static_cast<std::uint32_t>(ck.round_index));
  nn::write_u32(out, static_cast<std::uint32_t>(ck.submissions.size()));
  for (const auto& s : ck.submissions) {
    nn::write_u32(out, static_cast<std::uint32_t>(s.participant_id));
    nn::write_u32(out, s.malicious ? 1u : 0u);
    nn::write_param_vector(out, s.params);
  }
  nn::write_param_vector(out, ck.global);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "FSCK") throw std::runtime_error(path.string() + ": not a checkpoint");
  if (nn::read_u32(in) != 1) throw std::runtime_error(path.string() + ": unsupported checkpoint version");
  Checkpoint ck;
  ck.round_index = static_cast<int>(nn::read_u32(in));
  const std::uint32_t count = nn::read_u32(in);
  for (std::uint32_t i = 0; i < count; ++i) {
    RoundSubmission s;
    s.participant_id = static_cast<int>(nn::read_u32(in));
    s.malicious = nn::read_u32(in) != 0;
    s.params = nn::read_param_vector(in);
    ck.submissions.push_back(std::move(s));
  }
  ck.global = nn::read_param_vector(in);
  return ck;
}

}  // namespace fedsleep::fed
