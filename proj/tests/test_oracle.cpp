#include <cmath>

#include "doctest.h"
#include "mlsf/errors.hpp"
#include "mlsf/leader.hpp"
#include "mlsf/oracle.hpp"
#include "support.hpp"

using namespace mlsf;

TEST_CASE("identity swap optimal gives zero gap") {
  // Each leader already plays its best action at every joint action.
  const auto game = testing::constant_leader_game(2, 3, 2, 0.0);
  Rng rng(1);
  const auto chi = testing::random_distribution(9, rng);
  CHECK(oracle::enumerate_swap_gap(game, chi, 0) == 0.0);
}

TEST_CASE("single action leaders have zero gap") {
  const auto game = generate_game(2, 1, 3, 0.1, 4);
  const std::vector<double> chi{1.0};
  CHECK(oracle::enumerate_swap_gap(game, chi, 0) == 0.0);
  CHECK(oracle::enumerate_swap_gap(game, chi, 1) == 0.0);
}

TEST_CASE("swap enumeration cap") {
  const auto game = generate_game(1, 7, 2, 0.1, 4);
  const std::vector<double> chi(7, 1.0 / 7);
  CHECK_THROWS_AS(oracle::enumerate_swap_gap(game, chi, 0), CapError);
  const auto six = generate_game(1, 6, 2, 0.1, 4);
  CHECK_NOTHROW(oracle::enumerate_swap_gap(six, std::vector<double>(6, 1.0 / 6), 0));
}

TEST_CASE("swapped loss of the identity is the current loss") {
  const auto game = generate_game(2, 3, 3, 0.1, 8);
  Rng rng(8);
  const auto chi = testing::random_distribution(9, rng);
  double current = 0.0;
  for (std::size_t a = 0; a < 9; ++a) current += chi[a] * game.composed_loss(1, a);
  CHECK(oracle::swapped_loss(game, chi, 1, {{0, 1, 2}}) == doctest::Approx(current).epsilon(1e-14));
}

TEST_CASE("slsf optimum") {
  GameSpec game(1, 3, 1, {0.9, 0.1, 0.4}, {0.5, 0.5, 0.5});
  const auto opt = oracle::slsf_optimum(game);
  CHECK(opt.action == 1);
  CHECK(opt.value == 0.1);
  GameSpec flat(1, 3, 1, {0.4, 0.4, 0.4}, {0.5, 0.5, 0.5});
  CHECK(oracle::slsf_optimum(flat).action == 0);
  CHECK_THROWS_AS(oracle::slsf_optimum(generate_game(2, 2, 2, 0.1, 1)), DomainError);
}

TEST_CASE("slsf optimum on a random game against a double loop") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto game = generate_game(1, 8, 4, 0.05, seed);
    std::size_t best_a = 0;
    double best = 2.0;
    for (std::size_t a = 0; a < 8; ++a) {
      std::size_t br = 0;
      for (std::size_t b = 1; b < 4; ++b)
        if (game.follower_loss(a, b) < game.follower_loss(a, br)) br = b;
      if (game.leader_loss(0, a, br) < best) {
        best = game.leader_loss(0, a, br);
        best_a = a;
      }
    }
    const auto opt = oracle::slsf_optimum(game);
    CHECK(opt.action == best_a);
    CHECK(opt.value == best);
  }
}

TEST_CASE("best response table matches the game") {
  const auto game = generate_game(3, 3, 4, 0.05, 17);
  const auto table = oracle::best_response_table(game);
  for (std::size_t a = 0; a < game.joint_size(); ++a) CHECK(table[a] == game.best_response(a));
}

TEST_CASE("estimator check") {
  Rng rng(5);
  const auto loss = testing::random_losses(7, rng);
  CHECK(oracle::estimator_unbiasedness_check(MixedStrategy::uniform(7), loss) == 0.0);
  CHECK(oracle::estimator_unbiasedness_check(MixedStrategy::point_mass(7, 3), loss) == 0.0);
  for (int k = 0; k < 50; ++k) {
    const auto p = testing::random_strategy(16, rng, 0.01);
    CHECK(oracle::estimator_unbiasedness_check(p, testing::random_losses(16, rng)) <= 1e-12);
  }
}
