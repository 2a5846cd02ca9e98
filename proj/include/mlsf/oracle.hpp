#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mlsf/game.hpp"
#include "mlsf/leader.hpp"

// Brute-force reference computations. Everything here is written as plain
// nested loops over the raw loss tensors and shares no code with the metrics
// module it is used to check.
namespace mlsf::oracle {

// Largest n^n the swap enumeration accepts.
inline constexpr std::size_t kSwapEnumerationCap = 100000;

// Total map from one leader's action set to itself.
struct SwapFunction {
  std::vector<std::size_t> mapping;
};

// Follower best response found by scanning the raw follower row.
std::size_t scan_best_response(const GameSpec& game, std::size_t joint);
std::vector<std::size_t> best_response_table(const GameSpec& game);

// E_{a~chi}[l_i(a, Br(a))] - min_s E_{a~chi}[l_i(s(a_i), a_-i, Br(s(a_i), a_-i))]
// over all n^n swap functions s. CapError if n^n exceeds the cap.
double enumerate_swap_gap(const GameSpec& game, std::span<const double> chi, std::size_t leader);

// Expected loss of leader `leader` under chi after applying `swap`.
double swapped_loss(const GameSpec& game, std::span<const double> chi, std::size_t leader,
                    const SwapFunction& swap);

struct SlsfOptimum {
  std::size_t action;
  double value;
};

// argmin_a l(a, Br(a)) for a single-leader game, ties to the lowest action.
// DomainError unless m == 1.
SlsfOptimum slsf_optimum(const GameSpec& game);

// Sum over j of P[j] * importance_estimate(played = j), compared with the
// true loss vector; returns the max absolute deviation over the support of P.
double estimator_unbiasedness_check(const MixedStrategy& sampling, std::span<const double> loss);

}  // namespace mlsf::oracle
