#include "mlsf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mlsf/errors.hpp"

namespace mlsf {

namespace {

void check_profile(const GameSpec& game, std::span<const MixedStrategy> strategies) {
  if (strategies.size() != game.leaders()) throw DomainError("need one strategy per leader");
  for (const auto& s : strategies) {
    if (s.size() != game.actions()) throw DomainError("strategy has wrong number of actions");
  }
}

}  // namespace

std::vector<double> expected_loss_vector(const GameSpec& game, std::size_t leader,
                                         std::span<const MixedStrategy> strategies) {
  check_profile(game, strategies);
  const auto& idx = game.indexer();
  const std::size_t m = game.leaders();
  std::vector<double> losses(game.actions(), 0.0);
  std::vector<std::size_t> coords(m);
  for (std::size_t a = 0; a < game.joint_size(); ++a) {
    idx.decode(a, coords);
    double weight = 1.0;
    for (std::size_t j = 0; j < m && weight != 0.0; ++j) {
      if (j != leader) weight *= strategies[j][coords[j]];
    }
    if (weight != 0.0) losses[coords[leader]] += weight * game.composed_loss(leader, a);
  }
  return losses;
}

double expected_loss(const GameSpec& game, std::size_t leader, std::size_t action,
                     std::span<const MixedStrategy> strategies) {
  if (leader >= game.leaders() || action >= game.actions()) {
    throw DomainError("leader or action out of range");
  }
  return expected_loss_vector(game, leader, strategies)[action];
}

RegretLedger::RegretLedger(std::size_t leaders, std::size_t actions)
    : actions_(actions),
      expected_(leaders, 0.0),
      per_action_(leaders * actions, 0.0),
      rounds_(leaders, 0) {}

void RegretLedger::update(std::size_t leader, const MixedStrategy& played,
                          std::span<const double> losses) {
  if (played.size() != actions_ || losses.size() != actions_) {
    throw DomainError("ledger update has wrong length");
  }
  double inner = 0.0;
  for (std::size_t j = 0; j < actions_; ++j) {
    inner += played[j] * losses[j];
    per_action_[leader * actions_ + j] += losses[j];
  }
  expected_[leader] += inner;
  ++rounds_[leader];
}

double RegretLedger::regret(std::size_t leader) const {
  const auto row = cumulative_per_action(leader);
  return expected_[leader] - *std::min_element(row.begin(), row.end());
}

EmpiricalJoint::EmpiricalJoint(const JointIndexer& indexer)
    : indexer_(indexer), sums_(indexer.size(), 0.0), product_(indexer.size(), 0.0) {}

EmpiricalJoint EmpiricalJoint::from_distribution(const JointIndexer& indexer,
                                                 std::vector<double> distribution) {
  if (distribution.size() != indexer.size()) {
    throw DomainError("joint distribution has " + std::to_string(distribution.size()) +
                      " entries, expected " + std::to_string(indexer.size()));
  }
  double total = 0.0;
  for (double p : distribution) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("joint distribution entry invalid");
    total += p;
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance) {
    throw DomainError("joint distribution sums to " + std::to_string(total));
  }
  EmpiricalJoint chi(indexer);
  chi.sums_ = std::move(distribution);
  chi.rounds_ = 1;
  return chi;
}

std::vector<double> product_distribution(const JointIndexer& indexer,
                                         std::span<const MixedStrategy> strategies) {
  if (strategies.size() != indexer.leaders()) throw DomainError("need one strategy per leader");
  // Built leader by leader; leader 0 is the most significant digit.
  std::vector<double> product{1.0};
  product.reserve(indexer.size());
  for (const auto& s : strategies) {
    if (s.size() != indexer.actions()) throw DomainError("strategy has wrong number of actions");
    std::vector<double> next(product.size() * s.size());
    for (std::size_t p = 0; p < product.size(); ++p) {
      for (std::size_t j = 0; j < s.size(); ++j) next[p * s.size() + j] = product[p] * s[j];
    }
    product = std::move(next);
  }
  return product;
}

void EmpiricalJoint::update(std::span<const MixedStrategy> strategies) {
  const auto product = product_distribution(indexer_, strategies);
  for (std::size_t a = 0; a < sums_.size(); ++a) sums_[a] += product[a];
  ++rounds_;
}

std::vector<double> EmpiricalJoint::distribution() const {
  std::vector<double> out(sums_.size(), 0.0);
  if (rounds_ == 0) return out;
  const double scale = 1.0 / static_cast<double>(rounds_);
  std::transform(sums_.begin(), sums_.end(), out.begin(), [scale](double s) { return s * scale; });
  return out;
}

CseGap cse_gap(const GameSpec& game, std::span<const double> chi) {
  if (chi.size() != game.joint_size()) throw DomainError("chi does not match the joint space");
  const auto& idx = game.indexer();
  const std::size_t m = game.leaders(), n = game.actions();
  CseGap result;
  result.gaps.assign(m, 0.0);
  result.best_swap.assign(m, std::vector<std::size_t>(n, 0));

  std::vector<double> deviation(n * n);
  for (std::size_t i = 0; i < m; ++i) {
    std::fill(deviation.begin(), deviation.end(), 0.0);
    for (std::size_t a = 0; a < game.joint_size(); ++a) {
      const double w = chi[a];
      if (w == 0.0) continue;
      const std::size_t source = idx.coordinate(a, i);
      for (std::size_t target = 0; target < n; ++target) {
        deviation[source * n + target] += w * game.composed_loss(i, idx.replace(a, i, target));
      }
    }
    // V_i is accumulated from the identity entries D_i(a_i, a_i) in the same
    // order as the minima, so gap_i >= 0 holds exactly in floating point.
    double value = 0.0, best_total = 0.0;
    for (std::size_t source = 0; source < n; ++source) {
      const auto row = std::span<const double>(deviation).subspan(source * n, n);
      const auto it = std::min_element(row.begin(), row.end());
      result.best_swap[i][source] = static_cast<std::size_t>(it - row.begin());
      value += row[source];
      best_total += *it;
    }
    result.gaps[i] = value - best_total;
  }
  result.max_gap = *std::max_element(result.gaps.begin(), result.gaps.end());
  return result;
}

}  // namespace mlsf
