#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "mlsf/errors.hpp"
#include "mlsf/game.hpp"
#include "support.hpp"

using namespace mlsf;

TEST_CASE("argmin of explicit follower rows") {
  const std::vector<double> row{0.3, 0.1, 0.7};
  CHECK(argmin_unique(row) == 1);
  const std::vector<double> zero_one{0.0, 1.0};
  CHECK(argmin_unique(zero_one) == 0);
  const std::vector<double> tied{0.2, 0.5, 0.2};
  CHECK_THROWS_AS(argmin_unique(tied), ValidationError);
}

TEST_CASE("joint index round trip") {
  for (std::size_t m = 1; m <= 4; ++m) {
    for (std::size_t n = 1; n <= 6; ++n) {
      const JointIndexer idx(m, n);
      if (idx.size() > 10000) continue;
      for (std::size_t flat = 0; flat < idx.size(); ++flat) {
        const auto coords = idx.decode(flat);
        REQUIRE(idx.encode(coords) == flat);
        for (std::size_t i = 0; i < m; ++i) CHECK(idx.coordinate(flat, i) == coords[i]);
      }
    }
  }
}

TEST_CASE("leader 0 is the most significant digit") {
  const JointIndexer idx(3, 4);
  const std::vector<std::size_t> coords{2, 0, 3};
  CHECK(idx.encode(coords) == 2 * 16 + 0 * 4 + 3);
  CHECK(idx.replace(idx.encode(coords), 1, 2) == 2 * 16 + 2 * 4 + 3);
  CHECK(idx.replace(idx.encode(coords), 0, 0) == 3);
}

TEST_CASE("joint action cap") {
  CHECK_NOTHROW(JointIndexer(20, 2));
  CHECK_THROWS_AS(JointIndexer(21, 2), CapError);
  CHECK_THROWS_AS(JointIndexer(3, 102), CapError);
}

TEST_CASE("best response matches an exhaustive scan") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto game = generate_game(2, 2, 2, 0.05, seed);
    for (std::size_t a = 0; a < game.joint_size(); ++a) {
      std::size_t best = 0;
      for (std::size_t b = 0; b < game.follower_actions(); ++b) {
        if (game.follower_loss(a, b) < game.follower_loss(a, best)) best = b;
      }
      CHECK(game.best_response(a) == best);
      CHECK(game.composed_loss(0, a) == game.leader_loss(0, a, best));
      CHECK(game.composed_loss(1, a) == game.leader_loss(1, a, best));
    }
  }
}

TEST_CASE("gap profile of an explicit row") {
  const double d = 0.2;
  GameSpec game(1, 1, 3, {0.1, 0.2, 0.3}, {0.5, 0.5 + d, 0.5 + 2 * d});
  const auto profile = gap_profile(game);
  CHECK(profile.gap(0, 0) == 0.0);
  CHECK(profile.gap(0, 1) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(profile.gap(0, 2) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(profile.hardness[0] == doctest::Approx(31.25).epsilon(1e-12));
  CHECK(profile.epsilon_min == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("gap profile with a single follower action") {
  GameSpec game(1, 2, 1, {0.1, 0.2}, {0.4, 0.9});
  const auto profile = gap_profile(game);
  CHECK(profile.gap(0, 0) == 0.0);
  CHECK(profile.gap(1, 0) == 0.0);
  CHECK(profile.hardness[0] == 0.0);
  CHECK(std::isinf(profile.epsilon_min));
}

TEST_CASE("identical follower rows give identical gaps") {
  const std::vector<double> row{0.6, 0.1, 0.35};
  std::vector<double> follower;
  for (int a = 0; a < 4; ++a) follower.insert(follower.end(), row.begin(), row.end());
  GameSpec game(2, 2, 3, std::vector<double>(2 * 4 * 3, 0.5), follower);
  const auto profile = gap_profile(game);
  for (std::size_t a = 0; a < 4; ++a) {
    CHECK(profile.hardness[a] == profile.hardness[0]);
    CHECK(game.best_response(a) == 1);
  }
  CHECK(profile.epsilon_min == doctest::Approx(0.25));
}

TEST_CASE("gap profile invariants on generated games") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto game = generate_game(2, 3, 4, 0.1, seed);
    const auto profile = gap_profile(game);
    CHECK(profile.epsilon_min >= 0.1);
    for (std::size_t a = 0; a < game.joint_size(); ++a) {
      const auto br = game.best_response(a);
      CHECK(profile.gap(a, br) == 0.0);
      for (std::size_t k = 0; k < game.follower_actions(); ++k) {
        if (k != br) CHECK(profile.gap(a, k) > 0.0);
      }
      CHECK(profile.hardness[a] > 0.0);
    }
  }
}

TEST_CASE("generated game: m=2 n=2 n_f=2 seed 7 against a hand scan") {
  const auto game = generate_game(2, 2, 2, 0.1, 7);
  const auto profile = gap_profile(game);
  double eps = 1.0;
  for (std::size_t a = 0; a < 4; ++a) {
    const double l0 = game.follower_loss(a, 0), l1 = game.follower_loss(a, 1);
    const double gap = std::abs(l0 - l1);
    CHECK(profile.hardness[a] == doctest::Approx(1.0 / (gap * gap)).epsilon(1e-12));
    CHECK(gap >= 0.1);
    eps = std::min(eps, gap);
  }
  CHECK(profile.epsilon_min == doctest::Approx(eps).epsilon(1e-15));
}

TEST_CASE("generation is deterministic in the seed") {
  const auto a = generate_game(2, 3, 3, 0.1, 42);
  const auto b = generate_game(2, 3, 3, 0.1, 42);
  const auto c = generate_game(2, 3, 3, 0.1, 43);
  CHECK(a == b);
  CHECK_FALSE(a == c);
}

TEST_CASE("generation errors") {
  CHECK_THROWS_AS(generate_game(1, 2, 2, 0.0, 1), DomainError);
  CHECK_THROWS_AS(generate_game(1, 2, 2, 0.5, 1), DomainError);
  // One draw per row at a 0.49 floor fails for most of 64 rows.
  CHECK_THROWS_AS(generate_game(3, 4, 2, 0.49, 1, 1), GenerationError);
}

TEST_CASE("validation rejects bad tensors") {
  CHECK_THROWS_AS(GameSpec(1, 2, 2, {0.1, 0.2, 0.3, 1.5}, {0.1, 0.2, 0.3, 0.4}), ValidationError);
  CHECK_THROWS_AS(GameSpec(1, 2, 2, {0.1, 0.2, 0.3, 0.5}, {0.1, -0.2, 0.3, 0.4}), ValidationError);
  CHECK_THROWS_AS(GameSpec(1, 2, 2, {0.1, 0.2, 0.3, 0.5}, {0.1, 0.2, 0.3, 0.3}), ValidationError);
  CHECK_THROWS_AS(GameSpec(1, 2, 2, {0.1, 0.2, 0.3}, {0.1, 0.2, 0.3, 0.4}), ValidationError);
  CHECK_THROWS_AS(GameSpec(1, 2, 2, {0.1, 0.2, 0.3, 0.5}, {0.1, 0.2, 0.3}), ValidationError);
  CHECK_THROWS_AS(GameSpec(1, 2, 2, {0.1, 0.2, 0.3, NAN}, {0.1, 0.2, 0.3, 0.4}), ValidationError);
  CHECK_NOTHROW(GameSpec(1, 2, 2, {0.0, 1.0, 0.3, 0.5}, {0.0, 1.0, 0.3, 0.4}));
}

TEST_CASE("json round trip is value exact") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto game = generate_game(1 + seed % 3, 2 + seed % 2, 2 + seed % 3, 0.05, seed);
    const auto text = game_to_json(game).dump();
    CHECK(game_from_json(nlohmann::json::parse(text)) == game);
  }
}

TEST_CASE("json layout is [leader][joint][follower]") {
  const auto game = generate_game(2, 2, 3, 0.1, 3);
  const auto doc = game_to_json(game);
  CHECK(doc["m"] == 2);
  CHECK(doc["n_f"] == 3);
  CHECK(doc["leader_losses"][1][2][0].get<double>() == game.leader_loss(1, 2, 0));
  CHECK(doc["follower_losses"][3][2].get<double>() == game.follower_loss(3, 2));
}

TEST_CASE("json shape errors") {
  auto doc = game_to_json(generate_game(2, 2, 2, 0.1, 1));
  auto bad = doc;
  bad["follower_losses"].erase(0);
  CHECK_THROWS_AS(game_from_json(bad), ValidationError);
  bad = doc;
  bad["leader_losses"][0][1].push_back(0.5);
  CHECK_THROWS_AS(game_from_json(bad), ValidationError);
  bad = doc;
  bad.erase("n_f");
  CHECK_THROWS_AS(game_from_json(bad), ValidationError);
  bad = doc;
  bad["m"] = 3;
  CHECK_THROWS_AS(game_from_json(bad), ValidationError);
}
