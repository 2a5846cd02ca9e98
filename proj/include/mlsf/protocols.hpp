#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlsf/follower.hpp"
#include "mlsf/game.hpp"
#include "mlsf/leader.hpp"
#include "mlsf/metrics.hpp"
#include "mlsf/noise.hpp"

namespace mlsf {

// Feedback regime of a repeated game.
//   kFullInfo      Hedge leaders see exact expected losses; follower is the Br oracle.
//   kSemiBandit    EXP3 leaders see their own realized loss; follower is the Br oracle.
//   kAlphaExp3Ucb  exploration-mixed EXP3 leaders, UCB follower, noisy feedback.
//   kTwoStage      uniform exploration with a UCB-E follower, then commit + EXP3.
enum class Setting { kFullInfo, kSemiBandit, kAlphaExp3Ucb, kTwoStage };

std::string_view to_string(Setting setting);
// Accepts "full-info", "semi-bandit", "alpha-exp3-ucb", "two-stage".
Setting setting_from_string(std::string_view name);

struct ProtocolConfig {
  Setting setting = Setting::kAlphaExp3Ucb;
  std::int64_t horizon = 1;

  // Schedule overrides; unset values come from the closed-form schedules.
  std::optional<double> alpha;
  std::optional<double> eta;
  std::optional<double> beta;
  std::optional<double> exploration;  // UCB-E e, applied to every joint action
  std::optional<std::int64_t> q;
  std::optional<std::int64_t> commit_round;  // t0
  // Failure probability p for the two-stage q schedule.
  double failure_probability = 0.05;
  // Upper bound on H used instead of the game's ground-truth hardness. When
  // set, one global UCB-E e is derived from it.
  std::optional<double> hardness_bound;
  // With false, a schedule alpha above 1 is an error instead of being clamped.
  bool clamp_alpha = true;

  NoiseModel noise = NoiseModel::bernoulli();
  // Semi-bandit leaders observe noiseless losses unless this is set.
  bool semi_bandit_noise = false;
  // Average chi and charge regret against the distribution actions were
  // actually drawn from (P-tilde, or uniform in stage 1). With false, the
  // base strategy P is used.
  bool average_played = true;

  // Rounds at which checkpoint metrics are taken; empty means {horizon}.
  std::vector<std::int64_t> checkpoints;
  std::uint64_t seed = 0;
  // Keep every round's played strategies, joint action and response.
  bool record_trajectory = false;
  // Above this many joint actions the ledger is only fed at checkpoints.
  std::size_t exact_regret_limit = 4096;

  // ConfigError naming the offending field.
  void validate() const;
  std::vector<std::int64_t> effective_checkpoints() const;
};

// Parameter values a run actually used.
struct RealizedSchedule {
  std::optional<double> alpha;
  std::optional<double> eta;
  std::optional<double> beta;
  std::optional<std::int64_t> q;
  std::optional<std::int64_t> commit_round;
  std::optional<double> hardness;  // H that fed q
  // UCB-E e: one global value or one per joint action.
  std::vector<double> exploration;
};

RealizedSchedule resolve_schedule(const GameSpec& game, const ProtocolConfig& config);

struct Checkpoint {
  std::int64_t round = 0;
  std::vector<double> regret;
  std::vector<double> average_regret;
  double max_gap = 0.0;
  std::vector<double> gaps;
  std::uint64_t mispulls = 0;
  // Regret accumulated after the commit round (two-stage only).
  std::vector<double> stage2_regret;
};

// State visible to per-round observers, taken after every update of the round.
struct RoundView {
  std::int64_t round;
  const GameSpec& game;
  std::span<const MixedStrategy> base;    // P^t before this round's update
  std::span<const MixedStrategy> played;  // what actions were drawn from
  std::span<const MixedStrategy> next;    // strategies after this round's update
  std::span<const std::size_t> actions;   // empty under full information
  std::optional<std::size_t> joint;
  std::optional<std::size_t> response;
  const UcbState* follower;  // null when the follower is the Br oracle
  const EmpiricalJoint& chi;
  const RegretLedger& ledger;
};

struct Observers {
  std::function<void(const RoundView&)> on_round;
  std::function<void(const Checkpoint&)> on_checkpoint;
};

struct Trajectory {
  Setting setting = Setting::kFullInfo;
  RealizedSchedule schedule;
  std::vector<Checkpoint> checkpoints;
  std::vector<double> final_regret;
  CseGap final_gap;
  std::uint64_t mispulls = 0;
  std::vector<double> chi;
  std::vector<MixedStrategy> final_strategies;
  // Two-stage: committed table and the joint actions where it differs from Br.
  std::optional<ResponsePredictor> predictor;
  std::vector<std::size_t> misidentified;

  // Filled only when record_trajectory is set.
  std::vector<std::vector<MixedStrategy>> played_history;
  std::vector<std::size_t> joint_history;
  std::vector<std::size_t> response_history;
};

Trajectory run_full_info(const GameSpec& game, const ProtocolConfig& config,
                         const Observers& observers = {});
Trajectory run_semi_bandit(const GameSpec& game, const ProtocolConfig& config,
                           const Observers& observers = {});
Trajectory run_alpha_exp3_ucb(const GameSpec& game, const ProtocolConfig& config,
                              const Observers& observers = {});
Trajectory run_two_stage(const GameSpec& game, const ProtocolConfig& config,
                         const Observers& observers = {});

// Dispatches on config.setting.
Trajectory run_protocol(const GameSpec& game, const ProtocolConfig& config,
                        const Observers& observers = {});

}  // namespace mlsf
