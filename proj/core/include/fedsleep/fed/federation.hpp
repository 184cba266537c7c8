#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "fedsleep/nn/param_vector.hpp"

namespace fedsleep::fed {

struct RoundSubmission {
  int participant_id = 0;
  nn::ParamVector params;
  bool malicious = false;  // ground truth, for evaluation only
};

struct RoundResult {
  nn::ParamVector global;
  std::vector<int> accepted_ids;
  std::vector<int> rejected_ids;
  int round_index = 0;
  bool fallback = false;        // defense rejected everyone; previous global kept
  std::vector<double> scores;   // defense scores in submission order, if any
};

/// What a defense is allowed to see of a submission.
struct SubmissionView {
  int participant_id = 0;
  const nn::ParamVector* params = nullptr;
};

struct DefenseDecision {
  std::vector<int> accepted_ids;
  std::vector<double> scores;
};

using AttackHook =
    std::function<nn::ParamVector(int participant_id, const nn::ParamVector& honest, const nn::ParamVector& prev_global)>;
using DefenseHook = std::function<DefenseDecision(std::span<const SubmissionView> submissions,
                                                  const nn::ParamVector& prev_global, int round_index)>;

/// Unweighted coordinatewise mean. Throws ShapeError on mismatch.
nn::ParamVector fed_avg(std::span<const nn::ParamVector> submissions);

/// One synchronous round. The attack hook (when set) replaces the upload of
/// every malicious participant; the defense hook (when set) picks the accepted
/// ids; survivors are averaged. If the defense accepts nobody the previous
/// global model is returned with `fallback` set.
RoundResult run_round(std::vector<RoundSubmission>& submissions, const nn::ParamVector& prev_global,
                      int round_index, const AttackHook& attack = {}, const DefenseHook& defense = {});

/// Overwrites every receiver with the global vector, keeping receiver ids.
void broadcast(const RoundResult& result, std::span<nn::ParamVector* const> receivers);

/// Binary round checkpoint, little-endian:
///
///   "FSCK"  u32 version (1)  u32 round  u32 count
///   count x { i32 participant_id, u32 malicious, ParamVector }
///   ParamVector global
struct Checkpoint {
  int round_index = 0;
  std::vector<RoundSubmission> submissions;
  nn::ParamVector global;
};

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ck);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace fedsleep::fed
