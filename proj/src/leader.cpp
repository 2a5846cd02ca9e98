#include "mlsf/leader.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mlsf/errors.hpp"

namespace mlsf {

MixedStrategy::MixedStrategy(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw DomainError("mixed strategy must be non-empty");
  double total = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) throw DomainError("mixed strategy entry is negative or NaN");
    total += p;
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance) {
    throw DomainError("mixed strategy sums to " + std::to_string(total));
  }
}

MixedStrategy MixedStrategy::uniform(std::size_t n) {
  if (n == 0) throw DomainError("mixed strategy must be non-empty");
  return MixedStrategy(std::vector<double>(n, 1.0 / static_cast<double>(n)), Unchecked{});
}

MixedStrategy MixedStrategy::point_mass(std::size_t n, std::size_t action) {
  if (action >= n) throw DomainError("point mass outside the action set");
  std::vector<double> probs(n, 0.0);
  probs[action] = 1.0;
  return MixedStrategy(std::move(probs), Unchecked{});
}

MixedStrategy normalized(std::span<const double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0) || !std::isfinite(total)) throw DomainError("weights cannot be normalized");
  std::vector<double> probs(weights.size());
  std::transform(weights.begin(), weights.end(), probs.begin(),
                 [total](double w) { return w / total; });
  return MixedStrategy(std::move(probs), MixedStrategy::Unchecked{});
}

MixedStrategy mix_exploration(const MixedStrategy& strategy, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0,1]");
  if (alpha == 0.0) return strategy;
  const double floor = alpha / static_cast<double>(strategy.size());
  std::vector<double> probs(strategy.size());
  for (std::size_t j = 0; j < probs.size(); ++j) probs[j] = (1.0 - alpha) * strategy[j] + floor;
  return MixedStrategy(std::move(probs));
}

std::size_t sample_action(const MixedStrategy& strategy, Rng& rng) {
  const double u = rng.uniform();
  double cdf = 0.0;
  const std::size_t last = strategy.size() - 1;
  for (std::size_t j = 0; j < last; ++j) {
    cdf += strategy[j];
    if (u < cdf) return j;
  }
  // Rounding can leave the cdf just below 1; the remainder falls on the last
  // action that has positive mass.
  std::size_t j = last;
  while (j > 0 && strategy[j] == 0.0) --j;
  return j;
}

namespace {

void check_losses(std::span<const double> loss) {
  for (double l : loss) {
    if (!(l >= -kLossTolerance && l <= 1.0 + kLossTolerance)) {
      throw DomainError("loss " + std::to_string(l) + " outside [0,1]");
    }
  }
}

// Divides by the sum and keeps every weight a positive normal number.
void renormalize(std::vector<double>& weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w = std::max(w / total, std::numeric_limits<double>::min());
}

void check_eta(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("learning rate eta must be > 0");
}

}  // namespace

HedgeState HedgeState::uniform(std::size_t n, double eta) {
  if (n == 0) throw DomainError("learner needs at least one action");
  check_eta(eta);
  return {std::vector<double>(n, 1.0 / static_cast<double>(n)), eta};
}

HedgeState hedge_update(HedgeState state, std::span<const double> loss) {
  if (loss.size() != state.weights.size()) throw DomainError("loss vector has wrong length");
  check_losses(loss);
  for (std::size_t j = 0; j < loss.size(); ++j) state.weights[j] *= std::exp(-state.eta * loss[j]);
  renormalize(state.weights);
  return state;
}

Exp3State Exp3State::uniform(std::size_t n, double eta, double alpha) {
  if (n == 0) throw DomainError("learner needs at least one action");
  check_eta(eta);
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0,1]");
  return {std::vector<double>(n, 1.0 / static_cast<double>(n)), eta, alpha};
}

std::vector<double> importance_estimate(std::size_t n, std::size_t played, double observed_loss,
                                        double prob_played) {
  if (played >= n) throw DomainError("played action outside the action set");
  if (!(prob_played > 0.0) || prob_played > 1.0 + kProbabilityTolerance) {
    throw DomainError("prob_played must lie in (0,1]");
  }
  const double loss = observed_loss;
  check_losses(std::span<const double>(&loss, 1));
  std::vector<double> estimate(n, 0.0);
  estimate[played] = observed_loss / prob_played;
  return estimate;
}

Exp3State exp3_update(Exp3State state, std::size_t played, double observed_loss,
                      double prob_played) {
  const auto estimate =
      importance_estimate(state.weights.size(), played, observed_loss, prob_played);
  // Only the played coordinate of the estimate is non-zero.
  state.weights[played] *= std::exp(-state.eta * estimate[played]);
  renormalize(state.weights);
  return state;
}

nlohmann::json learner_to_json(const Exp3State& state) {
  return {{"weights", state.weights}, {"eta", state.eta}, {"alpha", state.alpha}};
}

nlohmann::json learner_to_json(const HedgeState& state) {
  return {{"weights", state.weights}, {"eta", state.eta}, {"alpha", 0.0}};
}

namespace {

std::vector<double> read_weights(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("weights") || !doc.at("weights").is_array() ||
      !doc.contains("eta") || !doc.at("eta").is_number()) {
    throw DomainError("learner snapshot needs 'weights' and 'eta'");
  }
  auto weights = doc.at("weights").get<std::vector<double>>();
  if (weights.empty()) throw DomainError("learner snapshot has no weights");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("learner weights must be positive");
  }
  return weights;
}

}  // namespace

Exp3State exp3_from_json(const nlohmann::json& doc) {
  Exp3State state{read_weights(doc), doc.at("eta").get<double>(), doc.value("alpha", 0.0)};
  check_eta(state.eta);
  if (!(state.alpha >= 0.0 && state.alpha <= 1.0)) throw DomainError("alpha must lie in [0,1]");
  return state;
}

HedgeState hedge_from_json(const nlohmann::json& doc) {
  HedgeState state{read_weights(doc), doc.at("eta").get<double>()};
  check_eta(state.eta);
  return state;
}

}  // namespace mlsf
