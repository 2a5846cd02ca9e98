#include "mlsf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mlsf/errors.hpp"

namespace mlsf::oracle {

std::size_t scan_best_response(const GameSpec& game, std::size_t joint) {
  const auto losses = game.follower_losses();
  const std::size_t nf = game.follower_actions();
  std::size_t best = 0;
  for (std::size_t b = 1; b < nf; ++b) {
    if (losses[joint * nf + b] < losses[joint * nf + best]) best = b;
  }
  return best;
}

std::vector<std::size_t> best_response_table(const GameSpec& game) {
  std::vector<std::size_t> table(game.joint_size());
  for (std::size_t a = 0; a < table.size(); ++a) table[a] = scan_best_response(game, a);
  return table;
}

namespace {

// l_i at joint `a`, looked up straight from the raw tensor.
double raw_leader_loss(const GameSpec& game, std::size_t leader, std::size_t joint,
                       std::size_t response) {
  const std::size_t nf = game.follower_actions();
  return game.leader_losses()[(leader * game.joint_size() + joint) * nf + response];
}

// Digit of `leader` in `joint` and the joint index with that digit replaced,
// recomputed from scratch with repeated division.
std::size_t digit_of(std::size_t joint, std::size_t leader, std::size_t m, std::size_t n) {
  for (std::size_t j = m - 1; j > leader; --j) joint /= n;
  return joint % n;
}

std::size_t with_digit(std::size_t joint, std::size_t leader, std::size_t value, std::size_t m,
                       std::size_t n) {
  std::vector<std::size_t> digits(m);
  for (std::size_t j = m; j-- > 0;) {
    digits[j] = joint % n;
    joint /= n;
  }
  digits[leader] = value;
  std::size_t out = 0;
  for (std::size_t j = 0; j < m; ++j) out = out * n + digits[j];
  return out;
}

}  // namespace

double swapped_loss(const GameSpec& game, std::span<const double> chi, std::size_t leader,
                    const SwapFunction& swap) {
  const std::size_t m = game.leaders(), n = game.actions();
  double total = 0.0;
  for (std::size_t a = 0; a < game.joint_size(); ++a) {
    if (chi[a] == 0.0) continue;
    const std::size_t moved = with_digit(a, leader, swap.mapping[digit_of(a, leader, m, n)], m, n);
    total += chi[a] * raw_leader_loss(game, leader, moved, scan_best_response(game, moved));
  }
  return total;
}

double enumerate_swap_gap(const GameSpec& game, std::span<const double> chi, std::size_t leader) {
  const std::size_t n = game.actions();
  if (chi.size() != game.joint_size()) throw DomainError("chi does not match the joint space");
  std::size_t count = 1;
  for (std::size_t j = 0; j < n; ++j) {
    if (count > kSwapEnumerationCap / n) throw CapError("n^n exceeds the swap enumeration cap");
    count *= n;
  }

  SwapFunction identity{std::vector<std::size_t>(n)};
  for (std::size_t j = 0; j < n; ++j) identity.mapping[j] = j;
  const double baseline = swapped_loss(game, chi, leader, identity);

  double best = std::numeric_limits<double>::infinity();
  SwapFunction swap{std::vector<std::size_t>(n, 0)};
  for (std::size_t code = 0; code < count; ++code) {
    std::size_t rest = code;
    for (std::size_t j = 0; j < n; ++j) {
      swap.mapping[j] = rest % n;
      rest /= n;
    }
    const double v = swapped_loss(game, chi, leader, swap);
    if (v < best) best = v;
  }
  return baseline - best;
}

SlsfOptimum slsf_optimum(const GameSpec& game) {
  if (game.leaders() != 1) throw DomainError("slsf_optimum requires a single leader");
  const std::size_t nf = game.follower_actions();
  SlsfOptimum best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t a = 0; a < game.actions(); ++a) {
    std::size_t response = 0;
    double response_loss = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < nf; ++b) {
      if (game.follower_losses()[a * nf + b] < response_loss) {
        response_loss = game.follower_losses()[a * nf + b];
        response = b;
      }
    }
    const double value = raw_leader_loss(game, 0, a, response);
    if (value < best.value) best = {a, value};
  }
  return best;
}

double estimator_unbiasedness_check(const MixedStrategy& sampling, std::span<const double> loss) {
  const std::size_t n = sampling.size();
  if (loss.size() != n) throw DomainError("loss vector has wrong length");
  std::vector<double> mean(n, 0.0);
  for (std::size_t played = 0; played < n; ++played) {
    if (sampling[played] == 0.0) continue;
    const auto estimate = importance_estimate(n, played, loss[played], sampling[played]);
    for (std::size_t k = 0; k < n; ++k) mean[k] += sampling[played] * estimate[k];
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (sampling[k] == 0.0) continue;
    worst = std::max(worst, std::abs(mean[k] - loss[k]));
  }
  return worst;
}

}  // namespace mlsf::oracle
