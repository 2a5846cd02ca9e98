#pragma once

// Random instances for property-style tests.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "mlsf/game.hpp"
#include "mlsf/leader.hpp"
#include "mlsf/rng.hpp"

namespace mlsf::testing {

inline MixedStrategy random_strategy(std::size_t n, Rng& rng, double min_prob = 0.0) {
  std::vector<double> w(n);
  double total = 0.0;
  for (double& x : w) {
    x = -std::log(1.0 - rng.uniform());  // Dirichlet(1,...,1)
    total += x;
  }
  for (double& x : w) x = min_prob + (1.0 - min_prob * static_cast<double>(n)) * x / total;
  return normalized(w);
}

inline std::vector<double> random_distribution(std::size_t size, Rng& rng) {
  std::vector<double> p(size);
  double total = 0.0;
  for (double& x : p) {
    x = -std::log(1.0 - rng.uniform());
    total += x;
  }
  for (double& x : p) x /= total;
  return p;
}

inline std::vector<double> random_losses(std::size_t n, Rng& rng) {
  std::vector<double> l(n);
  for (double& x : l) x = rng.uniform();
  return l;
}

// Game whose losses are the same constant everywhere except the follower,
// which needs a unique best response.
inline GameSpec constant_leader_game(std::size_t m, std::size_t n, std::size_t nf, double c) {
  const JointIndexer idx(m, n);
  std::vector<double> leader(m * idx.size() * nf, c);
  std::vector<double> follower(idx.size() * nf);
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = 0; b < nf; ++b) {
      follower[a * nf + b] = static_cast<double>((a + b) % nf) / static_cast<double>(nf);
    }
  }
  return GameSpec(m, n, nf, std::move(leader), std::move(follower));
}

}  // namespace mlsf::testing
