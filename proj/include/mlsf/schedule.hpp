#pragma once

#include <cstddef>
#include <cstdint>

// Closed-form parameter schedules. Every rate is used with constant 1; callers
// can override any of them through the protocol configuration.
namespace mlsf::schedule {

// Hedge under full information: sqrt(ln n / T).
double hedge_eta(std::int64_t horizon, std::size_t actions);

// EXP3 under semi-bandit feedback: sqrt(ln n / (n T)).
double exp3_eta(std::int64_t horizon, std::size_t actions);

// Exploration weight and learning rate for alpha-EXP3 paired with a UCB
// follower.
//   m = 1:  alpha = n^(2/3) (ln n)^(1/3) T^(-1/3),  eta = n^(-2/3) (ln n)^(2/3) T^(-2/3)
//   m >= 2: alpha = n T^(-1/(m+1)),                 eta = sqrt(T^(-(m+2)/(m+1)) n ln n)
// raw_alpha is the unclamped value; alpha = min(1, raw_alpha).
struct ExplorationRates {
  double alpha;
  double raw_alpha;
  double eta;
};
ExplorationRates alpha_exp3(std::int64_t horizon, std::size_t actions, std::size_t leaders);

// Smallest integer q with q >= 18 H (ln(2 q n_f / p) + m ln n) + n_f, found by
// iterating q <- ceil(rhs(q)) upward from n_f + 1. The right-hand side is
// increasing in q, so the iteration stops at the least solution.
std::int64_t commit_budget(double p, double max_hardness, std::size_t leaders,
                           std::size_t actions, std::size_t follower_actions);

// UCB-E exploration e = (25/36) (q - n_f) / H.
double ucbe_exploration(std::int64_t q, std::size_t follower_actions, double hardness);

// Length of the exploration stage, t0 = ceil(28 q n^m / 3).
std::int64_t commit_round(std::int64_t q, std::size_t actions, std::size_t leaders);

// Learning rates are only meaningful for n >= 2; a single-action learner
// never moves, so n = 1 gets eta = 1.
inline constexpr double kSingleActionEta = 1.0;

}  // namespace mlsf::schedule
