// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--cli PATH] [N ...]
//
// With no numbers every criterion runs. --cli points at the mlsf executable
// for the determinism check; without it the library entry point is used.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "mlsf/errors.hpp"
#include "mlsf/experiment.hpp"
#include "mlsf/follower.hpp"
#include "mlsf/metrics.hpp"
#include "mlsf/oracle.hpp"
#include "mlsf/protocols.hpp"
#include "mlsf/schedule.hpp"
#include "support.hpp"

using namespace mlsf;
namespace fs = std::filesystem;

namespace {

// Tolerances and thresholds.
constexpr double kOracleTolerance = 1e-12;
constexpr double kEstimatorTolerance = 1e-12;
constexpr double kSumTolerance = 1e-9;
constexpr double kHedgeSlope = 0.75;
constexpr double kExp3Slope = 0.85;
constexpr double kSlsfSlope = 0.80;
constexpr double kStage2Slope = 0.70;
constexpr double kMisidentificationRate = 0.096;  // 0.05 + 3 sqrt(0.05 * 0.95 / 200)

struct Result {
  bool pass;
  std::string detail;
  double limit_seconds;
};

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string list(const std::vector<double>& values, const char* format = "%.3f") {
  std::string out = "(";
  for (std::size_t k = 0; k < values.size(); ++k) out += (k ? ", " : "") + fmt(format, values[k]);
  return out + ")";
}

// Seed-averaged regret at each checkpoint, one curve per leader.
struct MeanCurve {
  std::vector<double> rounds;
  std::vector<std::vector<double>> regret;  // [leader][checkpoint]
};

MeanCurve average_regret(const std::vector<Trajectory>& runs, bool stage2, std::int64_t origin) {
  MeanCurve curve;
  const auto& first = runs.front().checkpoints;
  const std::size_t m = first.front().regret.size();
  curve.regret.assign(m, std::vector<double>(first.size(), 0.0));
  for (const auto& c : first) curve.rounds.push_back(static_cast<double>(c.round - origin));
  for (const auto& run : runs) {
    for (std::size_t k = 0; k < run.checkpoints.size(); ++k) {
      const auto& c = run.checkpoints[k];
      for (std::size_t i = 0; i < m; ++i) {
        curve.regret[i][k] += (stage2 ? c.stage2_regret[i] : c.regret[i]) / runs.size();
      }
    }
  }
  return curve;
}

std::vector<double> curve_slopes(const MeanCurve& curve) {
  std::vector<double> slopes;
  for (const auto& r : curve.regret) slopes.push_back(loglog_slope(curve.rounds, r));
  return slopes;
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

// 1. Decomposed CSE gap against exhaustive swap enumeration.
Result oracle_equivalence() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto game = generate_game(2, 3, 3, 0.1, seed);
    Rng rng = make_stream(seed, Stream::kGame, 99);
    const auto chi = testing::random_distribution(game.joint_size(), rng);
    const auto gap = cse_gap(game, chi);
    for (std::size_t i = 0; i < 2; ++i) {
      worst = std::max(worst, std::abs(gap.gaps[i] - oracle::enumerate_swap_gap(game, chi, i)));
    }
  }
  return {worst <= kOracleTolerance,
          "oracle equivalence, 50 games: max |decomposed - enumerated| = " + fmt("%.3g", worst) +
              " (tol 1e-12)",
          10};
}

std::vector<Trajectory> run_family(Setting setting, std::size_t m, std::size_t n, std::size_t nf,
                                   double floor, std::int64_t horizon,
                                   std::vector<std::int64_t> checkpoints, int seeds) {
  std::vector<Trajectory> runs;
  for (int s = 1; s <= seeds; ++s) {
    const auto game = generate_game(m, n, nf, floor, static_cast<std::uint64_t>(s));
    ProtocolConfig cfg;
    cfg.setting = setting;
    cfg.horizon = horizon;
    cfg.checkpoints = checkpoints;
    cfg.seed = static_cast<std::uint64_t>(s);
    runs.push_back(run_protocol(game, cfg));
  }
  return runs;
}

// 2. Hedge under full information.
Result full_information() {
  const auto runs =
      run_family(Setting::kFullInfo, 2, 4, 3, 0.1, 100000, {1000, 10000, 100000}, 20);
  double early = 0.0, late = 0.0;
  for (const auto& r : runs) {
    early += r.checkpoints.front().max_gap / runs.size();
    late += r.checkpoints.back().max_gap / runs.size();
  }
  const auto slopes = curve_slopes(average_regret(runs, false, 0));
  const bool gap_ok = late <= 0.5 * early + 0.01;
  const bool slope_ok = max_of(slopes) <= kHedgeSlope;
  return {gap_ok && slope_ok,
          "full-info Hedge, 20 seeds: mean CSE gap " + fmt("%.4f", early) + " at 1e3 -> " +
              fmt("%.4f", late) + " at 1e5 (need <= " + fmt("%.4f", 0.5 * early + 0.01) +
              "); regret slopes " + list(slopes) + " (need <= 0.75)",
          120};
}

// 3. EXP3 under semi-bandit feedback.
Result semi_bandit() {
  const auto runs =
      run_family(Setting::kSemiBandit, 2, 4, 3, 0.1, 100000, {1000, 10000, 100000}, 20);
  const auto slopes = curve_slopes(average_regret(runs, false, 0));
  return {max_of(slopes) <= kExp3Slope,
          "semi-bandit EXP3, 20 seeds: regret slopes " + list(slopes) + " (need <= 0.85)", 120};
}

// 4. Single leader alpha-EXP3 against a UCB follower.
Result slsf_alpha_exp3() {
  const auto runs =
      run_family(Setting::kAlphaExp3Ucb, 1, 4, 4, 0.2, 1000000, {10000, 100000, 1000000}, 20);
  double early = 0.0, late = 0.0;
  for (const auto& r : runs) {
    early += static_cast<double>(r.checkpoints.front().mispulls) / 1e4 / runs.size();
    late += static_cast<double>(r.checkpoints.back().mispulls) / 1e6 / runs.size();
  }
  const auto slopes = curve_slopes(average_regret(runs, false, 0));
  const bool slope_ok = max_of(slopes) <= kSlsfSlope;
  const bool pulls_ok = late <= 0.5 * early;
  return {slope_ok && pulls_ok,
          "SLSF alpha-EXP3-UCB, 20 seeds: regret slope " + list(slopes) +
              " (need <= 0.80); mispull fraction " + fmt("%.4f", early) + " at 1e4 -> " +
              fmt("%.4f", late) + " at 1e6 (need <= " + fmt("%.4f", 0.5 * early) + ")",
          600};
}

// 5. Two-stage exploration, commit and EXP3.
Result two_stage() {
  constexpr int kSeeds = 200;
  constexpr std::int64_t kStage2 = 100000;
  std::vector<Trajectory> runs;
  int misidentified = 0;
  bool consistent = true;
  std::int64_t t0_min = INT64_MAX, t0_max = 0;
  for (int s = 1; s <= kSeeds; ++s) {
    const auto game = generate_game(2, 2, 3, 0.2, static_cast<std::uint64_t>(s));
    ProtocolConfig cfg;
    cfg.setting = Setting::kTwoStage;
    cfg.failure_probability = 0.05;
    cfg.seed = static_cast<std::uint64_t>(s);
    cfg.horizon = INT64_MAX / 4;
    const std::int64_t t0 = *resolve_schedule(game, cfg).commit_round;
    t0_min = std::min(t0_min, t0);
    t0_max = std::max(t0_max, t0);
    cfg.horizon = t0 + kStage2;
    cfg.checkpoints = {t0 + 1000, t0 + 10000, t0 + kStage2};
    auto run = run_two_stage(game, cfg);
    const auto truth = oracle::best_response_table(game);
    bool wrong = false;
    for (std::size_t a = 0; a < truth.size(); ++a) wrong |= (*run.predictor)(a) != truth[a];
    consistent &= wrong == !run.misidentified.empty();
    misidentified += wrong ? 1 : 0;
    // Re-key checkpoints to rounds since the commit so seeds can be averaged.
    for (auto& c : run.checkpoints) c.round -= t0;
    runs.push_back(std::move(run));
  }
  const double rate = static_cast<double>(misidentified) / kSeeds;
  const auto slopes = curve_slopes(average_regret(runs, true, 0));
  return {consistent && rate <= kMisidentificationRate && max_of(slopes) <= kStage2Slope,
          "two-stage, 200 seeds (t0 in [" + std::to_string(t0_min) + ", " +
              std::to_string(t0_max) + "]): misidentification rate " + fmt("%.3f", rate) +
              " (need <= 0.096); stage-2 regret slopes " + list(slopes) + " (need <= 0.70)",
          900};
}

// 6. Importance estimator unbiasedness.
Result estimator() {
  Rng rng(606);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 31);
    const auto p = testing::random_strategy(n, rng, 1e-3);
    worst = std::max(worst,
                     oracle::estimator_unbiasedness_check(p, testing::random_losses(n, rng)));
  }
  return {worst <= kEstimatorTolerance,
          "estimator unbiasedness, 100 pairs: max deviation " + fmt("%.3g", worst) +
              " (tol 1e-12)",
          1};
}

double strategy_error(std::span<const MixedStrategy> strategies) {
  double worst = 0.0;
  for (const auto& p : strategies) {
    double total = 0.0;
    for (double x : p.probs()) {
      if (!(x >= 0.0)) return INFINITY;
      total += x;
    }
    worst = std::max(worst, std::abs(total - 1.0));
  }
  return worst;
}

// 7. Per-round invariants on fuzzed short runs.
Result invariants() {
  Rng rng(707);
  auto pick = [&rng](std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng.uniform() * static_cast<double>(hi - lo + 1));
  };
  int violations = 0, configs = 0;
  std::uint64_t rounds_checked = 0;
  std::string first;
  auto fail = [&](const std::string& what, std::int64_t t) {
    if (violations++ == 0) first = what + " at config " + std::to_string(configs) +
                                   ", round " + std::to_string(t);
  };
  while (configs < 100) {
    const auto setting = static_cast<Setting>(pick(0, 3));
    const std::size_t m = pick(1, 3), n = pick(1, 4), nf = pick(1, 4);
    if (setting == Setting::kTwoStage && std::pow(double(n), double(m)) > 16) continue;
    const auto game = generate_game(m, n, nf, 0.05, rng.next_u64());
    ProtocolConfig cfg;
    cfg.setting = setting;
    cfg.seed = rng.next_u64();
    cfg.horizon = static_cast<std::int64_t>(pick(50, 1000));
    const int noise = static_cast<int>(pick(0, 2));
    cfg.noise = noise == 0   ? NoiseModel::bernoulli()
                : noise == 1 ? NoiseModel::deterministic()
                             : NoiseModel::truncated_gaussian(0.05 + 0.9 * rng.uniform());
    if (setting == Setting::kTwoStage) {
      cfg.horizon = static_cast<std::int64_t>(pick(600, 1000));
      cfg.q = static_cast<std::int64_t>(nf + pick(1, 50));
      cfg.commit_round = static_cast<std::int64_t>(pick(400, 550));
    }
    if (setting == Setting::kAlphaExp3Ucb && pick(0, 1) == 1) cfg.beta = 3.0 + 3.0 * rng.uniform();
    cfg.checkpoints = {cfg.horizon / 2, cfg.horizon};
    ++configs;
    Observers obs;
    obs.on_round = [&](const RoundView& v) {
      ++rounds_checked;
      if (strategy_error(v.base) > kSumTolerance || strategy_error(v.played) > kSumTolerance ||
          strategy_error(v.next) > kSumTolerance) {
        fail("strategy normalization", v.round);
      }
      const auto chi = v.chi.distribution();
      double total = 0.0;
      for (double x : chi) {
        if (!(x >= 0.0)) fail("negative chi entry", v.round);
        total += x;
      }
      if (std::abs(total - 1.0) > kSumTolerance) fail("chi normalization", v.round);
      for (double g : cse_gap(v.game, chi).gaps) {
        if (!(g >= 0.0)) fail("negative CSE gap", v.round);
      }
      if (v.follower != nullptr) {
        const auto& f = *v.follower;
        std::uint64_t all = 0;
        for (std::size_t a = 0; a < f.joint_size(); ++a) {
          std::uint64_t per = 0;
          for (std::size_t k = 0; k < f.arms(); ++k) {
            per += f.count(a, k);
            if (f.count(a, k) > 0 && !(f.mean(a, k) >= 0.0 && f.mean(a, k) <= 1.0)) {
              fail("follower mean outside [0,1]", v.round);
            }
          }
          if (per != f.visits(a)) fail("per-joint counter conservation", v.round);
          all += per;
        }
        // A committed follower stops counting; otherwise every round is one pull.
        const auto expected = f.committed() ? f.total_rounds() : static_cast<std::uint64_t>(v.round);
        if (all != f.total_rounds() || all != expected) fail("total counter conservation", v.round);
      }
    };
    run_protocol(game, cfg, obs);
  }
  return {violations == 0,
          "invariants, 100 fuzzed configs, " + std::to_string(rounds_checked) +
              " rounds: " + std::to_string(violations) + " violations" +
              (first.empty() ? "" : " (first: " + first + ")"),
          60};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 8. Byte-identical CSVs from two identical runs.
Result determinism(const std::string& cli) {
  const fs::path root = fs::temp_directory_path() / "mlsf_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const nlohmann::json doc = {
      {"game", {{"generator", {{"m", 2}, {"n", 3}, {"n_f", 3}, {"epsilon_floor", 0.1}, {"seed", 8}}}}},
      {"protocol", {{"setting", "alpha-exp3-ucb"}, {"T", 20000}}},
      {"seeds", {1, 2, 3}},
      {"checkpoints", {100, 1000, 10000, 20000}}};
  std::ofstream(root / "config.json") << doc.dump(2);
  for (const char* out : {"a", "b"}) {
    if (cli.empty()) {
      auto cfg = parse_experiment(doc);
      cfg.output_dir = root / out;
      run_experiment(cfg, 1);
    } else {
      const std::string cmd = "\"" + cli + "\" run \"" + (root / "config.json").string() +
                              "\" --out \"" + (root / out).string() + "\" --threads 1 > /dev/null";
      if (std::system(cmd.c_str()) != 0) return {false, "determinism: CLI run failed", 10};
    }
  }
  int identical = 0;
  for (int s = 1; s <= 3; ++s) {
    const auto name = "seed" + std::to_string(s) + ".csv";
    const auto a = slurp(root / "a" / name);
    if (!a.empty() && a == slurp(root / "b" / name)) ++identical;
  }
  return {identical == 3,
          std::string("determinism (") + (cli.empty() ? "library" : "CLI --threads 1") +
              "): " + std::to_string(identical) + "/3 seed CSVs byte-identical",
          60};
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  std::set<int> selected;
  for (int k = 1; k < argc; ++k) {
    const std::string arg = argv[k];
    if (arg == "--cli" && k + 1 < argc) {
      cli = argv[++k];
    } else {
      selected.insert(std::atoi(arg.c_str()));
    }
  }
  const std::vector<std::function<Result()>> criteria = {
      oracle_equivalence, full_information, semi_bandit, slsf_alpha_exp3,
      two_stage,          estimator,        invariants,  [&cli] { return determinism(cli); }};

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Result r;
    try {
      r = criteria[k]();
    } catch (const std::exception& e) {
      r = {false, std::string("threw: ") + e.what(), 0};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = r.limit_seconds <= 0 || seconds <= r.limit_seconds;
    const bool pass = r.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("AC%d %s  %s [%.1f s, limit %.0f s]\n", id, pass ? "PASS" : "FAIL",
                r.detail.c_str(), seconds, r.limit_seconds);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
