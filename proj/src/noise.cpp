#include "mlsf/noise.hpp"

#include <cassert>

#include "mlsf/errors.hpp"

namespace mlsf {

NoiseModel NoiseModel::truncated_gaussian(double sigma) {
  if (!(sigma > 0.0 && sigma <= 1.0)) {
    throw DomainError("truncated-gaussian sigma must lie in (0, 1]");
  }
  return NoiseModel(Kind::kTruncatedGaussian, sigma);
}

double NoiseModel::sample(double mean, Rng& rng) const {
  assert(mean >= 0.0 && mean <= 1.0);
  switch (kind_) {
    case Kind::kDeterministic:
      return mean;
    case Kind::kBernoulli:
      return rng.uniform() < mean ? 1.0 : 0.0;
    case Kind::kTruncatedGaussian:
      for (;;) {
        const double x = mean + sigma_ * rng.normal();
        if (x >= 0.0 && x <= 1.0) return x;
      }
  }
  return mean;
}

nlohmann::json noise_to_json(const NoiseModel& model) {
  switch (model.kind()) {
    case NoiseModel::Kind::kDeterministic:
      return {{"kind", "deterministic"}};
    case NoiseModel::Kind::kBernoulli:
      return {{"kind", "bernoulli"}};
    case NoiseModel::Kind::kTruncatedGaussian:
      return {{"kind", "truncated-gaussian"}, {"sigma", model.sigma()}};
  }
  return {};
}

NoiseModel noise_from_json(const nlohmann::json& doc) {
  if (doc.is_string()) return noise_from_json(nlohmann::json{{"kind", doc}});
  if (!doc.is_object() || !doc.contains("kind") || !doc.at("kind").is_string()) {
    throw ConfigError("noise: expected an object with a string 'kind'");
  }
  const auto kind = doc.at("kind").get<std::string>();
  if (kind == "bernoulli") return NoiseModel::bernoulli();
  if (kind == "deterministic") return NoiseModel::deterministic();
  if (kind == "truncated-gaussian") {
    if (!doc.contains("sigma") || !doc.at("sigma").is_number()) {
      throw ConfigError("noise.sigma: required number for truncated-gaussian");
    }
    try {
      return NoiseModel::truncated_gaussian(doc.at("sigma").get<double>());
    } catch (const DomainError& e) {
      throw ConfigError(std::string("noise.sigma: ") + e.what());
    }
  }
  throw ConfigError("noise.kind: unknown kind '" + kind + "'");
}

}  // namespace mlsf
