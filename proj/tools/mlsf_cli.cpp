// Command-line front end: run experiments, verify equilibrium gaps, generate
// games.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "mlsf/errors.hpp"
#include "mlsf/experiment.hpp"
#include "mlsf/metrics.hpp"

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfig = 2,
  kValidation = 3,
  kCap = 4,
  kDisagreement = 5,
};

int report(const char* kind, const std::exception& e, int code) {
  std::cerr << "mlsf: " << kind << ": " << e.what() << '\n';
  return code;
}

template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const mlsf::ConfigError& e) {
    return report("config error", e, kConfig);
  } catch (const mlsf::ScheduleError& e) {
    return report("config error", e, kConfig);
  } catch (const mlsf::ValidationError& e) {
    return report("validation error", e, kValidation);
  } catch (const mlsf::GenerationError& e) {
    return report("validation error", e, kValidation);
  } catch (const mlsf::CapError& e) {
    return report("cap error", e, kCap);
  } catch (const mlsf::DomainError& e) {
    return report("config error", e, kConfig);
  } catch (const std::exception& e) {
    return report("error", e, kFailure);
  }
}

int cmd_run(const std::string& config_path, const std::string& out_dir, std::size_t threads) {
  auto config = mlsf::load_experiment(config_path);
  if (!out_dir.empty()) config.output_dir = out_dir;
  const auto outcomes = mlsf::run_experiment(config, threads);
  for (const auto& o : outcomes) {
    std::cout << "seed " << o.seed << ": max CSE gap " << o.trajectory.final_gap.max_gap;
    if (o.misidentified) std::cout << (*o.misidentified ? ", Br misidentified" : ", Br exact");
    std::cout << '\n';
  }
  std::cout << "wrote " << (config.output_dir / "summary.json").string() << '\n';
  return kOk;
}

int cmd_verify(const std::string& game_path, const std::string& chi_path) {
  // Unreadable inputs are shape problems for verify, not config errors.
  auto load = [](const std::string& path) {
    try {
      return mlsf::read_json_file(path);
    } catch (const mlsf::ConfigError& e) {
      throw mlsf::ValidationError(e.what());
    }
  };
  const mlsf::GameSpec game = mlsf::game_from_json(load(game_path));
  const auto chi = mlsf::chi_from_json(load(chi_path), game.indexer());
  const auto rep = mlsf::verify_gap(game, chi);
  for (std::size_t i = 0; i < game.leaders(); ++i) {
    std::printf("leader %zu: gap %.17g", i + 1, rep.decomposed[i]);
    if (rep.enumerated) std::printf("  enumerated %.17g", (*rep.enumerated)[i]);
    std::printf("\n");
  }
  if (!rep.enumerated) std::printf("swap enumeration skipped: n^n above the cap\n");
  std::printf("max disagreement %.3g -> %s\n", rep.max_disagreement,
              rep.agree ? "agree" : "DISAGREE");
  return rep.agree ? kOk : kDisagreement;
}

int cmd_generate(std::size_t m, std::size_t n, std::size_t nf, double floor, std::uint64_t seed,
                 const std::string& out) {
  const auto game = mlsf::generate_game(m, n, nf, floor, seed);
  const auto text = mlsf::game_to_json(game).dump(2);
  if (out.empty() || out == "-") {
    std::cout << text << '\n';
  } else {
    std::ofstream(out) << text << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Repeated multi-leader single-follower games: learning dynamics and "
               "correlated Stackelberg equilibrium gaps"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::size_t threads = 1;
  auto* run = app.add_subcommand("run", "Run a seeded experiment from a JSON config");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  run->add_option("--threads", threads, "Seeds run concurrently")->check(CLI::PositiveNumber);

  std::string game_path, chi_path;
  auto* verify = app.add_subcommand("verify", "Compare CSE gaps against swap enumeration");
  verify->add_option("game", game_path, "Game tensors (JSON)")->required();
  verify->add_option("chi", chi_path, "Joint distribution over leader actions (JSON)")
      ->required();

  std::size_t m = 2, n = 2, nf = 2;
  double floor = 0.1;
  std::uint64_t seed = 0;
  std::string game_out;
  auto* gen = app.add_subcommand("generate", "Write a random valid game as JSON");
  gen->add_option("--m", m, "Leaders")->check(CLI::PositiveNumber);
  gen->add_option("--n", n, "Actions per leader")->check(CLI::PositiveNumber);
  gen->add_option("--nf", nf, "Follower actions")->check(CLI::PositiveNumber);
  gen->add_option("--epsilon-floor", floor, "Minimum follower gap");
  gen->add_option("--seed", seed, "Generator seed");
  gen->add_option("-o,--output", game_out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (*run) return guarded([&] { return cmd_run(config_path, out_dir, threads); });
  if (*verify) return guarded([&] { return cmd_verify(game_path, chi_path); });
  if (*gen) return guarded([&] { return cmd_generate(m, n, nf, floor, seed, game_out); });
  return kFailure;
}
