#pragma once

#include <string>

#include "json.hpp"
#include "mlsf/rng.hpp"

namespace mlsf {

// Stochastic loss feedback xi in [0,1] with E[xi] equal to the true loss.
class NoiseModel {
 public:
  enum class Kind { kDeterministic, kBernoulli, kTruncatedGaussian };

  static NoiseModel deterministic() { return NoiseModel(Kind::kDeterministic, 0.0); }
  static NoiseModel bernoulli() { return NoiseModel(Kind::kBernoulli, 0.0); }
  // Gaussian around the mean, redrawn until the value lands in [0,1]. The
  // realized mean is biased toward 1/2 when the mean sits within a few sigma
  // of either boundary. Requires 0 < sigma <= 1.
  static NoiseModel truncated_gaussian(double sigma);

  Kind kind() const { return kind_; }
  double sigma() const { return sigma_; }

  double sample(double mean, Rng& rng) const;

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;

 private:
  NoiseModel(Kind kind, double sigma) : kind_(kind), sigma_(sigma) {}

  Kind kind_;
  double sigma_;
};

inline double sample_noise(const NoiseModel& model, double mean, Rng& rng) {
  return model.sample(mean, rng);
}

// {"kind": "bernoulli" | "deterministic" | "truncated-gaussian", "sigma": f}
nlohmann::json noise_to_json(const NoiseModel& model);
NoiseModel noise_from_json(const nlohmann::json& doc);

}  // namespace mlsf
