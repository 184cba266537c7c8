#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fedsleep/exp/experiment.hpp"
#include "fedsleep/exp/pca.hpp"

namespace fedsleep::exp {

/// Header: tti,episode,seed,throughput_mbps,energy_w,ee,mean_reward,drop_rate
std::string metrics_csv(const MetricsLog& log);

/// One row per aggregation round with defense and attack diagnostics.
std::string rounds_csv(const MetricsLog& log);

/// Per-configuration means and 95% intervals over seeds. Attack and defense
/// sections appear only when those are configured.
std::string summary_json(const ExperimentConfig& config, const MetricsLog& log);

struct PcaRow {
  std::uint64_t seed = 0;
  int round = 0;
  int participant = 0;
  bool malicious = false;
  double pc1 = 0.0;
  double pc2 = 0.0;
};

/// PCA of one checkpoint's submissions.
std::vector<PcaRow> pca_rows(const fed::Checkpoint& ck, std::uint64_t seed);
std::string pca_csv(const std::vector<PcaRow>& rows);
std::string pca_svg(const std::vector<PcaRow>& rows, std::uint64_t seed);

/// Writes metrics.csv, rounds.csv, summary.json, config.json, pca.csv, the
/// SVG plots and one final-round checkpoint per seed into `dir`. Checks that
/// the directory is writable before writing anything.
void emit_report(const ExperimentConfig& config, const ExperimentResult& result, const std::filesystem::path& dir);

/// Throws std::runtime_error when `dir` cannot be created or written.
void ensure_writable(const std::filesystem::path& dir);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace fedsleep::exp
