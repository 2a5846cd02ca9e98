#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "mlsf/game.hpp"
#include "mlsf/protocols.hpp"

namespace mlsf {

inline constexpr const char* kCheckpointSchema = "mlsf-checkpoint-v1";
inline constexpr const char* kSummarySchema = "mlsf-summary-v1";

struct GeneratorSpec {
  std::size_t leaders = 1;
  std::size_t actions = 2;
  std::size_t follower_actions = 2;
  double epsilon_floor = 0.1;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  std::variant<GeneratorSpec, GameSpec> game;
  ProtocolConfig protocol;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_dir = "out";
  nlohmann::json source;  // the document this was parsed from, echoed in summary.json
};

// Parses and validates an experiment document; ConfigError names the field.
ExperimentConfig parse_experiment(const nlohmann::json& doc);
ExperimentConfig load_experiment(const std::filesystem::path& path);

GameSpec materialize_game(const ExperimentConfig& config);

// One CSV row per checkpoint, preceded by a schema line and a header.
void write_checkpoint_csv(std::ostream& os, std::size_t leaders,
                          const std::vector<Checkpoint>& checkpoints);

// OLS slope of log10(max(regret, 0) + 1) against log10(t - origin), one per
// leader, over the checkpoints with t > origin. With stage2 the post-commit
// regret is fitted. Empty when fewer than two checkpoints qualify.
std::vector<double> regret_slopes(const std::vector<Checkpoint>& checkpoints,
                                  bool stage2 = false, std::int64_t origin = 0);

// Same fit on raw (round, regret) pairs.
double loglog_slope(const std::vector<double>& rounds, const std::vector<double>& regrets);

nlohmann::json schedule_to_json(const RealizedSchedule& schedule);

struct SeedOutcome {
  std::uint64_t seed = 0;
  Trajectory trajectory;
  // Two-stage: committed table compared with an exhaustive best-response scan.
  std::optional<bool> misidentified;
  std::vector<std::size_t> misidentified_actions;
  std::vector<double> slopes;
  // Two-stage: slope of the post-commit regret against rounds since t0.
  std::vector<double> stage2_slopes;
};

// Runs every seed (up to `threads` at a time), writes <out>/seed<k>.csv and
// <out>/summary.json and returns the per-seed outcomes in seed order.
std::vector<SeedOutcome> run_experiment(const ExperimentConfig& config, std::size_t threads = 1);

nlohmann::json summarize(const ExperimentConfig& config, const GameSpec& game,
                         const std::vector<SeedOutcome>& outcomes);

// Flat or nested (depth m, width n) joint distribution document. Throws
// ValidationError on a shape mismatch.
std::vector<double> chi_from_json(const nlohmann::json& doc, const JointIndexer& indexer);

struct VerifyReport {
  std::vector<double> decomposed;  // metrics route
  std::optional<std::vector<double>> enumerated;  // exhaustive route, when within caps
  double max_disagreement = 0.0;
  bool agree = true;
};

VerifyReport verify_gap(const GameSpec& game, const std::vector<double>& chi,
                        double tolerance = 1e-9);

nlohmann::json read_json_file(const std::filesystem::path& path);

std::string build_id();

}  // namespace mlsf
