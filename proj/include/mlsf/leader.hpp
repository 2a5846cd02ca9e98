#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"
#include "mlsf/rng.hpp"

namespace mlsf {

// Probability vector over one leader's actions.
class MixedStrategy {
 public:
  // Throws DomainError unless entries are finite, non-negative and sum to 1
  // within 1e-9.
  explicit MixedStrategy(std::vector<double> probs);

  static MixedStrategy uniform(std::size_t n);
  static MixedStrategy point_mass(std::size_t n, std::size_t action);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t j) const { return probs_[j]; }
  std::span<const double> probs() const { return probs_; }

  friend bool operator==(const MixedStrategy&, const MixedStrategy&) = default;

 private:
  struct Unchecked {};
  MixedStrategy(std::vector<double> probs, Unchecked) : probs_(std::move(probs)) {}
  friend MixedStrategy normalized(std::span<const double> weights);

  std::vector<double> probs_;
};

inline constexpr double kProbabilityTolerance = 1e-9;
inline constexpr double kLossTolerance = 1e-9;

// weights / sum(weights).
MixedStrategy normalized(std::span<const double> weights);

// (1 - alpha) P + alpha * uniform.
MixedStrategy mix_exploration(const MixedStrategy& strategy, double alpha);

// Inverse-CDF draw over the stored order.
std::size_t sample_action(const MixedStrategy& strategy, Rng& rng);

// Exponential weights under full information.
struct HedgeState {
  std::vector<double> weights;
  double eta = 0.0;

  static HedgeState uniform(std::size_t n, double eta);
  MixedStrategy strategy() const { return normalized(weights); }
};

// w_j <- w_j exp(-eta * loss_j), then renormalized to sum 1.
HedgeState hedge_update(HedgeState state, std::span<const double> loss);

// EXP3 with an optional uniform exploration mix (alpha = 0 is plain EXP3).
struct Exp3State {
  std::vector<double> weights;
  double eta = 0.0;
  double alpha = 0.0;

  static Exp3State uniform(std::size_t n, double eta, double alpha = 0.0);
  // P = w / sum(w).
  MixedStrategy base_strategy() const { return normalized(weights); }
  // The distribution actions are drawn from.
  MixedStrategy sampling_strategy() const { return mix_exploration(base_strategy(), alpha); }
};

// Importance-weighted loss estimate: observed / prob_played at `played`,
// zero elsewhere.
std::vector<double> importance_estimate(std::size_t n, std::size_t played, double observed_loss,
                                        double prob_played);

Exp3State exp3_update(Exp3State state, std::size_t played, double observed_loss,
                      double prob_played);

// {"weights": [...], "eta": f, "alpha": f}; Hedge snapshots carry alpha = 0.
nlohmann::json learner_to_json(const Exp3State& state);
nlohmann::json learner_to_json(const HedgeState& state);
Exp3State exp3_from_json(const nlohmann::json& doc);
HedgeState hedge_from_json(const nlohmann::json& doc);

}  // namespace mlsf
