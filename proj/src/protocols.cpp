#include "mlsf/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mlsf/errors.hpp"
#include "mlsf/rng.hpp"
#include "mlsf/schedule.hpp"

namespace mlsf {

std::string_view to_string(Setting setting) {
  switch (setting) {
    case Setting::kFullInfo:
      return "full-info";
    case Setting::kSemiBandit:
      return "semi-bandit";
    case Setting::kAlphaExp3Ucb:
      return "alpha-exp3-ucb";
    case Setting::kTwoStage:
      return "two-stage";
  }
  return "unknown";
}

Setting setting_from_string(std::string_view name) {
  for (Setting s : {Setting::kFullInfo, Setting::kSemiBandit, Setting::kAlphaExp3Ucb,
                    Setting::kTwoStage}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("protocol.setting: unknown setting '" + std::string(name) + "'");
}

void ProtocolConfig::validate() const {
  if (horizon < 1) throw ConfigError("protocol.T: horizon must be >= 1");
  if (alpha && !(*alpha >= 0.0 && *alpha <= 1.0)) {
    throw ConfigError("protocol.alpha: must lie in [0,1]");
  }
  if (eta && !(*eta > 0.0 && std::isfinite(*eta))) throw ConfigError("protocol.eta: must be > 0");
  if (beta && !(*beta >= 3.0 && std::isfinite(*beta))) {
    throw ConfigError("protocol.beta: must be >= 3");
  }
  if (exploration && !(*exploration > 0.0 && std::isfinite(*exploration))) {
    throw ConfigError("protocol.e: must be > 0");
  }
  if (q && *q < 1) throw ConfigError("protocol.q: must be >= 1");
  if (commit_round && (*commit_round < 1 || *commit_round >= horizon)) {
    throw ConfigError("protocol.t0: must satisfy 1 <= t0 < T");
  }
  if (!(failure_probability > 0.0 && failure_probability < 1.0)) {
    throw ConfigError("protocol.p: must lie in (0,1)");
  }
  if (hardness_bound && !(*hardness_bound > 0.0 && std::isfinite(*hardness_bound))) {
    throw ConfigError("protocol.hardness_bound: must be > 0");
  }
  std::int64_t previous = 0;
  for (std::int64_t c : checkpoints) {
    if (c <= previous) throw ConfigError("checkpoints: must be strictly increasing and >= 1");
    if (c > horizon) throw ConfigError("checkpoints: " + std::to_string(c) + " exceeds T");
    previous = c;
  }
}

std::vector<std::int64_t> ProtocolConfig::effective_checkpoints() const {
  if (checkpoints.empty()) return {horizon};
  return checkpoints;
}

RealizedSchedule resolve_schedule(const GameSpec& game, const ProtocolConfig& config) {
  config.validate();
  const std::size_t m = game.leaders(), n = game.actions(), nf = game.follower_actions();
  const std::int64_t horizon = config.horizon;
  RealizedSchedule s;
  switch (config.setting) {
    case Setting::kFullInfo:
      s.eta = config.eta.value_or(schedule::hedge_eta(horizon, n));
      break;
    case Setting::kSemiBandit:
      s.eta = config.eta.value_or(schedule::exp3_eta(horizon, n));
      break;
    case Setting::kAlphaExp3Ucb: {
      const auto rates = schedule::alpha_exp3(horizon, n, m);
      if (config.alpha) {
        s.alpha = *config.alpha;
      } else {
        if (rates.raw_alpha > 1.0 && !config.clamp_alpha) {
          throw ScheduleError("alpha schedule gives " + std::to_string(rates.raw_alpha) +
                              " > 1 and clamping is disabled");
        }
        s.alpha = rates.alpha;
      }
      s.eta = config.eta.value_or(rates.eta);
      s.beta = config.beta.value_or(3.0);
      break;
    }
    case Setting::kTwoStage: {
      const auto profile = gap_profile(game);
      const double hardness = config.hardness_bound.value_or(profile.max_hardness());
      s.hardness = hardness;
      if (config.q) {
        s.q = *config.q;
      } else if (hardness > 0.0) {
        s.q = schedule::commit_budget(config.failure_probability, hardness, m, n, nf);
      } else {
        // n_f == 1: nothing to identify.
        s.q = static_cast<std::int64_t>(nf) + 1;
      }
      if (config.exploration) {
        s.exploration = {*config.exploration};
      } else if (hardness == 0.0) {
        s.exploration = {1.0};
      } else if (config.hardness_bound) {
        s.exploration = {schedule::ucbe_exploration(*s.q, nf, *config.hardness_bound)};
      } else {
        s.exploration.resize(game.joint_size());
        for (std::size_t a = 0; a < game.joint_size(); ++a) {
          s.exploration[a] = schedule::ucbe_exploration(*s.q, nf, profile.hardness[a]);
        }
      }
      s.commit_round = config.commit_round.value_or(schedule::commit_round(*s.q, n, m));
      if (*s.commit_round >= horizon) {
        throw ScheduleError("commit round t0 = " + std::to_string(*s.commit_round) +
                            " is not below T = " + std::to_string(horizon));
      }
      s.eta = config.eta.value_or(schedule::exp3_eta(horizon - *s.commit_round, n));
      break;
    }
  }
  return s;
}

namespace {

// Regret ledgers, chi and checkpoint bookkeeping shared by every protocol.
class RunBook {
 public:
  RunBook(const GameSpec& game, const ProtocolConfig& config, Trajectory& out)
      : game_(game),
        config_(config),
        out_(out),
        ledger_(game.leaders(), game.actions()),
        stage2_(game.leaders(), game.actions()),
        chi_(game.indexer()),
        checkpoints_(config.effective_checkpoints()),
        exact_(game.joint_size() <= config.exact_regret_limit) {}

  // Charges round `t` against `dist`. `losses` may carry precomputed
  // expected-loss vectors for `dist`.
  void account(std::int64_t t, std::span<const MixedStrategy> dist, bool stage2,
               const std::vector<std::vector<double>>* losses = nullptr) {
    chi_.update(dist);
    if (losses != nullptr || exact_ || is_checkpoint(t)) {
      for (std::size_t i = 0; i < game_.leaders(); ++i) {
        const auto l = losses != nullptr ? (*losses)[i] : expected_loss_vector(game_, i, dist);
        ledger_.update(i, dist[i], l);
        if (stage2) stage2_.update(i, dist[i], l);
      }
    }
  }

  void mispull(bool wrong) { mispulls_ += wrong ? 1 : 0; }

  void finish_round(const RoundView& view, const Observers& observers) {
    if (config_.record_trajectory) {
      out_.played_history.emplace_back(view.played.begin(), view.played.end());
      if (view.joint) out_.joint_history.push_back(*view.joint);
      if (view.response) out_.response_history.push_back(*view.response);
    }
    if (observers.on_round) observers.on_round(view);
    if (is_checkpoint(view.round)) {
      take_checkpoint(view.round, observers);
      ++next_checkpoint_;
    }
  }

  void finish(std::span<const MixedStrategy> final_strategies) {
    out_.mispulls = mispulls_;
    out_.chi = chi_.distribution();
    out_.final_gap = cse_gap(game_, out_.chi);
    out_.final_regret.resize(game_.leaders());
    for (std::size_t i = 0; i < game_.leaders(); ++i) out_.final_regret[i] = ledger_.regret(i);
    out_.final_strategies.assign(final_strategies.begin(), final_strategies.end());
  }

  const RegretLedger& ledger() const { return ledger_; }
  const EmpiricalJoint& chi() const { return chi_; }

 private:
  bool is_checkpoint(std::int64_t t) const {
    return next_checkpoint_ < checkpoints_.size() && checkpoints_[next_checkpoint_] == t;
  }

  void take_checkpoint(std::int64_t t, const Observers& observers) {
    Checkpoint c;
    c.round = t;
    const std::size_t m = game_.leaders();
    c.regret.resize(m);
    c.average_regret.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      c.regret[i] = ledger_.regret(i);
      c.average_regret[i] = c.regret[i] / static_cast<double>(t);
    }
    if (config_.setting == Setting::kTwoStage) {
      c.stage2_regret.resize(m);
      for (std::size_t i = 0; i < m; ++i) {
        c.stage2_regret[i] = stage2_.rounds(i) > 0 ? stage2_.regret(i) : 0.0;
      }
    }
    const auto gap = cse_gap(game_, chi_.distribution());
    c.gaps = gap.gaps;
    c.max_gap = gap.max_gap;
    c.mispulls = mispulls_;
    if (observers.on_checkpoint) observers.on_checkpoint(c);
    out_.checkpoints.push_back(std::move(c));
  }

  const GameSpec& game_;
  const ProtocolConfig& config_;
  Trajectory& out_;
  RegretLedger ledger_;
  RegretLedger stage2_;
  EmpiricalJoint chi_;
  std::vector<std::int64_t> checkpoints_;
  std::size_t next_checkpoint_ = 0;
  bool exact_;
  std::uint64_t mispulls_ = 0;
};

void require_setting(const ProtocolConfig& config, Setting expected) {
  if (config.setting != expected) {
    throw ConfigError("protocol.setting: expected '" + std::string(to_string(expected)) + "'");
  }
}

std::vector<Rng> leader_streams(const ProtocolConfig& config, std::size_t leaders, Stream kind) {
  std::vector<Rng> streams;
  streams.reserve(leaders);
  for (std::size_t i = 0; i < leaders; ++i) streams.push_back(make_stream(config.seed, kind, i));
  return streams;
}

}  // namespace

Trajectory run_full_info(const GameSpec& game, const ProtocolConfig& config,
                         const Observers& observers) {
  require_setting(config, Setting::kFullInfo);
  Trajectory out;
  out.setting = config.setting;
  out.schedule = resolve_schedule(game, config);
  const std::size_t m = game.leaders(), n = game.actions();

  std::vector<HedgeState> learners(m, HedgeState::uniform(n, *out.schedule.eta));
  std::vector<MixedStrategy> current(m, MixedStrategy::uniform(n));
  std::vector<MixedStrategy> next = current;
  std::vector<std::vector<double>> losses(m);
  RunBook book(game, config, out);

  for (std::int64_t t = 1; t <= config.horizon; ++t) {
    for (std::size_t i = 0; i < m; ++i) losses[i] = expected_loss_vector(game, i, current);
    for (std::size_t i = 0; i < m; ++i) {
      learners[i] = hedge_update(std::move(learners[i]), losses[i]);
      next[i] = learners[i].strategy();
    }
    book.account(t, current, false, &losses);
    book.finish_round({t, game, current, current, next, {}, std::nullopt, std::nullopt, nullptr,
                       book.chi(), book.ledger()},
                      observers);
    std::swap(current, next);
  }
  book.finish(current);
  return out;
}

Trajectory run_semi_bandit(const GameSpec& game, const ProtocolConfig& config,
                           const Observers& observers) {
  require_setting(config, Setting::kSemiBandit);
  Trajectory out;
  out.setting = config.setting;
  out.schedule = resolve_schedule(game, config);
  const std::size_t m = game.leaders(), n = game.actions();
  const auto& idx = game.indexer();

  std::vector<Exp3State> learners(m, Exp3State::uniform(n, *out.schedule.eta));
  auto action_rng = leader_streams(config, m, Stream::kLeaderAction);
  auto noise_rng = leader_streams(config, m, Stream::kLeaderNoise);
  std::vector<MixedStrategy> current(m, MixedStrategy::uniform(n));
  std::vector<MixedStrategy> next = current;
  std::vector<std::size_t> actions(m);
  RunBook book(game, config, out);

  for (std::int64_t t = 1; t <= config.horizon; ++t) {
    for (std::size_t i = 0; i < m; ++i) actions[i] = sample_action(current[i], action_rng[i]);
    const std::size_t joint = idx.encode(actions);
    const std::size_t response = game.best_response(joint);
    for (std::size_t i = 0; i < m; ++i) {
      const double mean = game.leader_loss(i, joint, response);
      const double loss = config.semi_bandit_noise ? config.noise.sample(mean, noise_rng[i]) : mean;
      learners[i] = exp3_update(std::move(learners[i]), actions[i], loss, current[i][actions[i]]);
      next[i] = learners[i].base_strategy();
    }
    book.account(t, current, false);
    book.finish_round({t, game, current, current, next, actions, joint, response, nullptr,
                       book.chi(), book.ledger()},
                      observers);
    std::swap(current, next);
  }
  book.finish(current);
  return out;
}

Trajectory run_alpha_exp3_ucb(const GameSpec& game, const ProtocolConfig& config,
                              const Observers& observers) {
  require_setting(config, Setting::kAlphaExp3Ucb);
  Trajectory out;
  out.setting = config.setting;
  out.schedule = resolve_schedule(game, config);
  const std::size_t m = game.leaders(), n = game.actions();
  const auto& idx = game.indexer();
  const double alpha = *out.schedule.alpha;

  std::vector<Exp3State> learners(m, Exp3State::uniform(n, *out.schedule.eta, alpha));
  UcbState follower(game.joint_size(), game.follower_actions(), *out.schedule.beta);
  auto action_rng = leader_streams(config, m, Stream::kLeaderAction);
  auto noise_rng = leader_streams(config, m, Stream::kLeaderNoise);
  Rng follower_rng = make_stream(config.seed, Stream::kFollowerNoise);

  std::vector<MixedStrategy> base(m, MixedStrategy::uniform(n));
  std::vector<MixedStrategy> next = base;
  std::vector<MixedStrategy> played;
  played.reserve(m);
  for (std::size_t i = 0; i < m; ++i) played.push_back(mix_exploration(base[i], alpha));
  std::vector<std::size_t> actions(m);
  RunBook book(game, config, out);

  for (std::int64_t t = 1; t <= config.horizon; ++t) {
    for (std::size_t i = 0; i < m; ++i) {
      played[i] = mix_exploration(base[i], alpha);
      actions[i] = sample_action(played[i], action_rng[i]);
    }
    const std::size_t joint = idx.encode(actions);
    // Selection reads the statistics of rounds 1..t-1.
    const std::size_t response = follower.select(joint, IndexMode::kUcb);
    book.mispull(response != game.best_response(joint));
    follower.observe(joint, response,
                     config.noise.sample(game.follower_loss(joint, response), follower_rng));
    for (std::size_t i = 0; i < m; ++i) {
      const double loss = config.noise.sample(game.leader_loss(i, joint, response), noise_rng[i]);
      learners[i] = exp3_update(std::move(learners[i]), actions[i], loss, played[i][actions[i]]);
      next[i] = learners[i].base_strategy();
    }
    book.account(t, config.average_played ? played : base, false);
    book.finish_round({t, game, base, played, next, actions, joint, response, &follower,
                       book.chi(), book.ledger()},
                      observers);
    std::swap(base, next);
  }
  book.finish(base);
  return out;
}

Trajectory run_two_stage(const GameSpec& game, const ProtocolConfig& config,
                         const Observers& observers) {
  require_setting(config, Setting::kTwoStage);
  Trajectory out;
  out.setting = config.setting;
  out.schedule = resolve_schedule(game, config);
  const std::size_t m = game.leaders(), n = game.actions();
  const auto& idx = game.indexer();
  const std::int64_t t0 = *out.schedule.commit_round;

  UcbState follower(game.joint_size(), game.follower_actions());
  if (out.schedule.exploration.size() == 1) {
    follower.set_exploration(out.schedule.exploration[0]);
  } else {
    follower.set_exploration(out.schedule.exploration);
  }
  auto action_rng = leader_streams(config, m, Stream::kLeaderAction);
  auto noise_rng = leader_streams(config, m, Stream::kLeaderNoise);
  Rng follower_rng = make_stream(config.seed, Stream::kFollowerNoise);

  const std::vector<MixedStrategy> uniform(m, MixedStrategy::uniform(n));
  std::vector<std::size_t> actions(m);
  RunBook book(game, config, out);

  // Stage 1: uniform leaders, no leader updates; the follower explores.
  for (std::int64_t t = 1; t <= t0; ++t) {
    for (std::size_t i = 0; i < m; ++i) actions[i] = sample_action(uniform[i], action_rng[i]);
    const std::size_t joint = idx.encode(actions);
    const std::size_t response = follower.select(joint, IndexMode::kUcbE);
    book.mispull(response != game.best_response(joint));
    follower.observe(joint, response,
                     config.noise.sample(game.follower_loss(joint, response), follower_rng));
    // Leaders receive their feedback but do not learn from it.
    for (std::size_t i = 0; i < m; ++i) {
      (void)config.noise.sample(game.leader_loss(i, joint, response), noise_rng[i]);
    }
    book.account(t, uniform, false);
    if (t == t0) out.predictor = follower.commit();
    book.finish_round({t, game, uniform, uniform, uniform, actions, joint, response, &follower,
                       book.chi(), book.ledger()},
                      observers);
  }

  const ResponsePredictor& predictor = *out.predictor;
  for (std::size_t a = 0; a < game.joint_size(); ++a) {
    if (predictor(a) != game.best_response(a)) out.misidentified.push_back(a);
  }

  // Stage 2: fresh EXP3 leaders against the committed table.
  std::vector<Exp3State> learners(m, Exp3State::uniform(n, *out.schedule.eta));
  std::vector<MixedStrategy> current = uniform;
  std::vector<MixedStrategy> next = current;
  for (std::int64_t t = t0 + 1; t <= config.horizon; ++t) {
    for (std::size_t i = 0; i < m; ++i) actions[i] = sample_action(current[i], action_rng[i]);
    const std::size_t joint = idx.encode(actions);
    const std::size_t response = predictor(joint);
    book.mispull(response != game.best_response(joint));
    for (std::size_t i = 0; i < m; ++i) {
      const double loss = config.noise.sample(game.leader_loss(i, joint, response), noise_rng[i]);
      learners[i] = exp3_update(std::move(learners[i]), actions[i], loss, current[i][actions[i]]);
      next[i] = learners[i].base_strategy();
    }
    book.account(t, current, true);
    book.finish_round({t, game, current, current, next, actions, joint, response, &follower,
                       book.chi(), book.ledger()},
                      observers);
    std::swap(current, next);
  }
  book.finish(current);
  return out;
}

Trajectory run_protocol(const GameSpec& game, const ProtocolConfig& config,
                        const Observers& observers) {
  switch (config.setting) {
    case Setting::kFullInfo:
      return run_full_info(game, config, observers);
    case Setting::kSemiBandit:
      return run_semi_bandit(game, config, observers);
    case Setting::kAlphaExp3Ucb:
      return run_alpha_exp3_ucb(game, config, observers);
    case Setting::kTwoStage:
      return run_two_stage(game, config, observers);
  }
  throw ConfigError("protocol.setting: unsupported");
}

}  // namespace mlsf
