#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mlsf/game.hpp"
#include "mlsf/leader.hpp"

namespace mlsf {

// Expected loss of `leader` playing `action` while every other leader j draws
// from strategies[j] and the follower best-responds:
//   sum_{a_-i} prod_{j != i} P_j(a_j) * l_i(a_i, a_-i, Br(a_i, a_-i)).
// strategies[leader] is ignored.
double expected_loss(const GameSpec& game, std::size_t leader, std::size_t action,
                     std::span<const MixedStrategy> strategies);

// expected_loss for every action of `leader` in one pass over the joint space.
std::vector<double> expected_loss_vector(const GameSpec& game, std::size_t leader,
                                         std::span<const MixedStrategy> strategies);

// Running sums behind the Stackelberg regret of each leader: the expected
// loss actually incurred minus that of the best fixed action in hindsight.
class RegretLedger {
 public:
  RegretLedger(std::size_t leaders, std::size_t actions);

  // cum_expected += <P, L>; cum_per_action += L.
  void update(std::size_t leader, const MixedStrategy& played, std::span<const double> losses);

  double regret(std::size_t leader) const;
  double cumulative_expected(std::size_t leader) const { return expected_[leader]; }
  std::span<const double> cumulative_per_action(std::size_t leader) const {
    return {per_action_.data() + leader * actions_, actions_};
  }
  std::uint64_t rounds(std::size_t leader) const { return rounds_[leader]; }
  std::size_t leaders() const { return expected_.size(); }

 private:
  std::size_t actions_;
  std::vector<double> expected_;
  std::vector<double> per_action_;
  std::vector<std::uint64_t> rounds_;
};

// Round-uniform average of the product of the leaders' strategies.
class EmpiricalJoint {
 public:
  explicit EmpiricalJoint(const JointIndexer& indexer);

  // Wraps a fixed distribution, e.g. one read from disk. DomainError unless
  // it is non-negative and sums to 1 within 1e-9.
  static EmpiricalJoint from_distribution(const JointIndexer& indexer,
                                          std::vector<double> distribution);

  void update(std::span<const MixedStrategy> strategies);

  std::uint64_t rounds() const { return rounds_; }
  std::vector<double> distribution() const;
  const JointIndexer& indexer() const { return indexer_; }

 private:
  JointIndexer indexer_;
  std::vector<double> sums_;
  std::vector<double> product_;
  std::uint64_t rounds_ = 0;
};

// Product distribution prod_i P_i(a_i) over the joint action space.
std::vector<double> product_distribution(const JointIndexer& indexer,
                                         std::span<const MixedStrategy> strategies);

struct CseGap {
  std::vector<double> gaps;
  double max_gap = 0.0;
  // best_swap[i][a_i] is the loss-minimizing replacement for a_i.
  std::vector<std::vector<std::size_t>> best_swap;
};

// Largest improvement any leader gets from a swap function on its own
// actions, with the follower best-responding. The optimal swap decomposes per
// source action, so gap_i = V_i - sum_{a_i} min_{a_i'} D_i(a_i, a_i').
CseGap cse_gap(const GameSpec& game, std::span<const double> chi);

}  // namespace mlsf
