#include "mlsf/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "mlsf/errors.hpp"
#include "mlsf/oracle.hpp"

#ifndef MLSF_BUILD_ID
#define MLSF_BUILD_ID "unknown"
#endif

namespace mlsf {

std::string build_id() { return MLSF_BUILD_ID; }

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!keys.contains(key)) throw ConfigError(where + key + ": unknown field");
  }
}

const json& require(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) throw ConfigError(where + key + ": required field missing");
  return obj.at(key);
}

std::int64_t as_integer(const json& v, const std::string& field, std::int64_t min) {
  if (!v.is_number_integer()) throw ConfigError(field + ": must be an integer");
  const auto x = v.get<std::int64_t>();
  if (x < min) throw ConfigError(field + ": must be >= " + std::to_string(min));
  return x;
}

double as_number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field + ": must be a number");
  return v.get<double>();
}

bool as_bool(const json& v, const std::string& field) {
  if (!v.is_boolean()) throw ConfigError(field + ": must be true or false");
  return v.get<bool>();
}

GeneratorSpec parse_generator(const json& g) {
  const std::string w = "game.generator.";
  if (!g.is_object()) throw ConfigError("game.generator: must be an object");
  reject_unknown(g, w, {"m", "n", "n_f", "epsilon_floor", "seed"});
  GeneratorSpec spec;
  spec.leaders = static_cast<std::size_t>(as_integer(require(g, w, "m"), w + "m", 1));
  spec.actions = static_cast<std::size_t>(as_integer(require(g, w, "n"), w + "n", 1));
  spec.follower_actions = static_cast<std::size_t>(as_integer(require(g, w, "n_f"), w + "n_f", 1));
  spec.epsilon_floor = as_number(require(g, w, "epsilon_floor"), w + "epsilon_floor");
  if (!(spec.epsilon_floor > 0.0 && spec.epsilon_floor < 0.5)) {
    throw ConfigError(w + "epsilon_floor: must lie in (0, 1/2)");
  }
  spec.seed = static_cast<std::uint64_t>(as_integer(require(g, w, "seed"), w + "seed", 0));
  return spec;
}

ProtocolConfig parse_protocol(const json& p) {
  const std::string w = "protocol.";
  if (!p.is_object()) throw ConfigError("protocol: must be an object");
  reject_unknown(p, w,
                 {"setting", "T", "alpha", "eta", "beta", "e", "q", "t0", "p", "hardness_bound",
                  "clamp_alpha", "noise", "semi_bandit_noise", "average_played"});
  ProtocolConfig c;
  const auto& setting = require(p, w, "setting");
  if (!setting.is_string()) throw ConfigError("protocol.setting: must be a string");
  c.setting = setting_from_string(setting.get<std::string>());
  c.horizon = as_integer(require(p, w, "T"), w + "T", 1);
  if (p.contains("alpha")) c.alpha = as_number(p.at("alpha"), w + "alpha");
  if (p.contains("eta")) c.eta = as_number(p.at("eta"), w + "eta");
  if (p.contains("beta")) c.beta = as_number(p.at("beta"), w + "beta");
  if (p.contains("e")) c.exploration = as_number(p.at("e"), w + "e");
  if (p.contains("q")) c.q = as_integer(p.at("q"), w + "q", 1);
  if (p.contains("t0")) c.commit_round = as_integer(p.at("t0"), w + "t0", 1);
  if (p.contains("p")) c.failure_probability = as_number(p.at("p"), w + "p");
  if (p.contains("hardness_bound")) {
    c.hardness_bound = as_number(p.at("hardness_bound"), w + "hardness_bound");
  }
  if (p.contains("clamp_alpha")) c.clamp_alpha = as_bool(p.at("clamp_alpha"), w + "clamp_alpha");
  if (p.contains("noise")) c.noise = noise_from_json(p.at("noise"));
  if (p.contains("semi_bandit_noise")) {
    c.semi_bandit_noise = as_bool(p.at("semi_bandit_noise"), w + "semi_bandit_noise");
  }
  if (p.contains("average_played")) {
    c.average_played = as_bool(p.at("average_played"), w + "average_played");
  }
  return c;
}

}  // namespace

ExperimentConfig parse_experiment(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config: must be a JSON object");
  reject_unknown(doc, "", {"game", "protocol", "seeds", "checkpoints", "output_dir"});
  ExperimentConfig config;
  config.source = doc;

  const auto& game = require(doc, "", "game");
  if (!game.is_object() || game.size() != 1) {
    throw ConfigError("game: must hold exactly one of 'generator' or 'inline'");
  }
  if (game.contains("generator")) {
    config.game = parse_generator(game.at("generator"));
  } else if (game.contains("inline")) {
    try {
      config.game = game_from_json(game.at("inline"));
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("game.inline: ") + e.what());
    }
  } else {
    throw ConfigError("game: must hold exactly one of 'generator' or 'inline'");
  }

  config.protocol = parse_protocol(require(doc, "", "protocol"));

  const auto& seeds = require(doc, "", "seeds");
  if (!seeds.is_array() || seeds.empty()) throw ConfigError("seeds: need at least one seed");
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    config.seeds.push_back(static_cast<std::uint64_t>(
        as_integer(seeds[k], "seeds[" + std::to_string(k) + "]", 0)));
  }
  if (doc.contains("checkpoints")) {
    const auto& cps = doc.at("checkpoints");
    if (!cps.is_array()) throw ConfigError("checkpoints: must be an array");
    for (std::size_t k = 0; k < cps.size(); ++k) {
      config.protocol.checkpoints.push_back(
          as_integer(cps[k], "checkpoints[" + std::to_string(k) + "]", 1));
    }
  }
  if (doc.contains("output_dir")) {
    if (!doc.at("output_dir").is_string()) throw ConfigError("output_dir: must be a string");
    config.output_dir = doc.at("output_dir").get<std::string>();
  }
  config.protocol.validate();
  return config;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  return parse_experiment(read_json_file(path));
}

GameSpec materialize_game(const ExperimentConfig& config) {
  if (const auto* g = std::get_if<GeneratorSpec>(&config.game)) {
    return generate_game(g->leaders, g->actions, g->follower_actions, g->epsilon_floor, g->seed);
  }
  return std::get<GameSpec>(config.game);
}

namespace {

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

void write_checkpoint_csv(std::ostream& os, std::size_t leaders,
                          const std::vector<Checkpoint>& checkpoints) {
  os << "# " << kCheckpointSchema << '\n';
  os << 't';
  for (std::size_t i = 1; i <= leaders; ++i) os << ",regret_" << i;
  for (std::size_t i = 1; i <= leaders; ++i) os << ",avg_regret_" << i;
  os << ",cse_gap_max";
  for (std::size_t i = 1; i <= leaders; ++i) os << ",gap_" << i;
  os << ",follower_mispulls\n";
  for (const auto& c : checkpoints) {
    os << c.round;
    for (double v : c.regret) os << ',' << fmt12(v);
    for (double v : c.average_regret) os << ',' << fmt12(v);
    os << ',' << fmt12(c.max_gap);
    for (double v : c.gaps) os << ',' << fmt12(v);
    os << ',' << c.mispulls << '\n';
  }
}

double loglog_slope(const std::vector<double>& rounds, const std::vector<double>& regrets) {
  const std::size_t k = rounds.size();
  if (k < 2 || regrets.size() != k) return std::nan("");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t j = 0; j < k; ++j) {
    const double x = std::log10(rounds[j]);
    const double y = std::log10(std::max(regrets[j], 0.0) + 1.0);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double kk = static_cast<double>(k);
  const double denom = kk * sxx - sx * sx;
  if (denom == 0.0) return std::nan("");
  return (kk * sxy - sx * sy) / denom;
}

std::vector<double> regret_slopes(const std::vector<Checkpoint>& checkpoints, bool stage2,
                                  std::int64_t origin) {
  std::vector<const Checkpoint*> used;
  for (const auto& c : checkpoints) {
    if (c.round - origin >= 1) used.push_back(&c);
  }
  if (used.size() < 2) return {};
  const std::size_t m = used.front()->regret.size();
  std::vector<double> slopes(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> rounds, regrets;
    for (const Checkpoint* c : used) {
      rounds.push_back(static_cast<double>(c->round - origin));
      regrets.push_back(stage2 ? c->stage2_regret.at(i) : c->regret[i]);
    }
    slopes[i] = loglog_slope(rounds, regrets);
  }
  return slopes;
}

nlohmann::json schedule_to_json(const RealizedSchedule& s) {
  nlohmann::json j = nlohmann::json::object();
  auto put = [&j](const char* key, const auto& opt) {
    j[key] = opt ? nlohmann::json(*opt) : nlohmann::json(nullptr);
  };
  put("alpha", s.alpha);
  put("eta", s.eta);
  put("beta", s.beta);
  put("q", s.q);
  put("t0", s.commit_round);
  put("hardness", s.hardness);
  j["e"] = s.exploration.empty() ? nlohmann::json(nullptr) : nlohmann::json(s.exploration);
  return j;
}

namespace {

SeedOutcome run_seed(const GameSpec& game, const ExperimentConfig& config, std::uint64_t seed) {
  ProtocolConfig protocol = config.protocol;
  protocol.seed = seed;
  SeedOutcome outcome;
  outcome.seed = seed;
  outcome.trajectory = run_protocol(game, protocol);
  outcome.slopes = regret_slopes(outcome.trajectory.checkpoints);
  if (const auto t0 = outcome.trajectory.schedule.commit_round) {
    outcome.stage2_slopes = regret_slopes(outcome.trajectory.checkpoints, true, *t0);
  }
  if (outcome.trajectory.predictor) {
    const auto truth = oracle::best_response_table(game);
    const auto& predictor = *outcome.trajectory.predictor;
    for (std::size_t a = 0; a < truth.size(); ++a) {
      if (predictor(a) != truth[a]) outcome.misidentified_actions.push_back(a);
    }
    outcome.misidentified = !outcome.misidentified_actions.empty();
  }
  std::ofstream csv(config.output_dir / ("seed" + std::to_string(seed) + ".csv"),
                    std::ios::binary);
  if (!csv) throw ConfigError("output_dir: cannot write to '" + config.output_dir.string() + "'");
  write_checkpoint_csv(csv, game.leaders(), outcome.trajectory.checkpoints);
  return outcome;
}

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

std::vector<SeedOutcome> run_experiment(const ExperimentConfig& config, std::size_t threads) {
  const GameSpec game = materialize_game(config);
  // Fail on schedule problems before any output is written.
  resolve_schedule(game, config.protocol);
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) throw ConfigError("output_dir: cannot create '" + config.output_dir.string() + "'");

  std::vector<SeedOutcome> outcomes(config.seeds.size());
  std::vector<std::exception_ptr> errors(config.seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < config.seeds.size(); k = next++) {
      try {
        outcomes[k] = run_seed(game, config, config.seeds[k]);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, config.seeds.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::ofstream summary(config.output_dir / "summary.json", std::ios::binary);
  if (!summary) throw ConfigError("output_dir: cannot write summary.json");
  summary << summarize(config, game, outcomes).dump(2) << '\n';
  return outcomes;
}

nlohmann::json summarize(const ExperimentConfig& config, const GameSpec& game,
                         const std::vector<SeedOutcome>& outcomes) {
  const auto profile = gap_profile(game);
  nlohmann::json seeds = nlohmann::json::array();
  for (const auto& o : outcomes) {
    const auto& tr = o.trajectory;
    auto slope_json = [](const std::vector<double>& values) {
      if (values.empty()) return nlohmann::json(nullptr);
      nlohmann::json out = nlohmann::json::array();
      for (double s : values) out.push_back(number_or_null(s));
      return out;
    };
    std::vector<double> avg(tr.final_regret.size());
    for (std::size_t i = 0; i < avg.size(); ++i) {
      avg[i] = tr.final_regret[i] / static_cast<double>(config.protocol.horizon);
    }
    seeds.push_back({
        {"seed", o.seed},
        {"csv", "seed" + std::to_string(o.seed) + ".csv"},
        {"final_regret", tr.final_regret},
        {"final_average_regret", avg},
        {"final_cse_gap", tr.final_gap.max_gap},
        {"final_gaps", tr.final_gap.gaps},
        {"follower_mispulls", tr.mispulls},
        {"misidentified", o.misidentified ? nlohmann::json(*o.misidentified)
                                          : nlohmann::json(nullptr)},
        {"misidentified_actions", o.misidentified_actions},
        {"regret_slope", slope_json(o.slopes)},
        {"stage2_regret_slope", slope_json(o.stage2_slopes)},
        {"schedule", schedule_to_json(tr.schedule)},
    });
  }
  return {
      {"schema", kSummarySchema},
      {"build_id", build_id()},
      {"config", config.source},
      {"game",
       {{"m", game.leaders()},
        {"n", game.actions()},
        {"n_f", game.follower_actions()},
        {"epsilon_min", number_or_null(profile.epsilon_min)},
        {"max_hardness", profile.max_hardness()}}},
      {"seeds", std::move(seeds)},
  };
}

namespace {

void flatten(const nlohmann::json& node, std::size_t depth, std::size_t leaders,
             std::size_t width, std::vector<double>& out) {
  if (depth == leaders) {
    if (!node.is_number()) throw ValidationError("chi: expected a number at depth " +
                                                 std::to_string(depth));
    out.push_back(node.get<double>());
    return;
  }
  if (!node.is_array() || node.size() != width) {
    throw ValidationError("chi: expected an array of " + std::to_string(width) +
                          " entries at depth " + std::to_string(depth));
  }
  for (const auto& child : node) flatten(child, depth + 1, leaders, width, out);
}

}  // namespace

std::vector<double> chi_from_json(const nlohmann::json& doc, const JointIndexer& indexer) {
  const nlohmann::json& body = doc.is_object() && doc.contains("chi") ? doc.at("chi") : doc;
  if (!body.is_array()) throw ValidationError("chi: expected a JSON array");
  std::vector<double> chi;
  chi.reserve(indexer.size());
  const bool flat = !body.empty() && body[0].is_number();
  if (flat && indexer.leaders() > 1) {
    if (body.size() != indexer.size()) {
      throw ValidationError("chi: has " + std::to_string(body.size()) + " entries, expected " +
                            std::to_string(indexer.size()));
    }
    for (const auto& v : body) {
      if (!v.is_number()) throw ValidationError("chi: holds a non-number");
      chi.push_back(v.get<double>());
    }
  } else {
    flatten(body, 0, indexer.leaders(), indexer.actions(), chi);
  }
  try {
    return EmpiricalJoint::from_distribution(indexer, chi).distribution();
  } catch (const DomainError& e) {
    throw ValidationError(std::string("chi: ") + e.what());
  }
}

VerifyReport verify_gap(const GameSpec& game, const std::vector<double>& chi, double tolerance) {
  VerifyReport report;
  report.decomposed = cse_gap(game, chi).gaps;
  std::size_t count = 1;
  bool within_cap = true;
  for (std::size_t j = 0; j < game.actions(); ++j) {
    if (count > oracle::kSwapEnumerationCap / game.actions()) {
      within_cap = false;
      break;
    }
    count *= game.actions();
  }
  if (within_cap) {
    std::vector<double> enumerated(game.leaders());
    for (std::size_t i = 0; i < game.leaders(); ++i) {
      enumerated[i] = oracle::enumerate_swap_gap(game, chi, i);
      report.max_disagreement =
          std::max(report.max_disagreement, std::abs(enumerated[i] - report.decomposed[i]));
    }
    report.enumerated = std::move(enumerated);
  }
  report.agree = report.max_disagreement <= tolerance;
  return report;
}

}  // namespace mlsf
