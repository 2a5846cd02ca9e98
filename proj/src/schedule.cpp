#include "mlsf/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mlsf/errors.hpp"

namespace mlsf::schedule {

namespace {

void check_inputs(std::int64_t horizon, std::size_t actions) {
  if (horizon < 1) throw ScheduleError("horizon T must be >= 1");
  if (actions < 1) throw ScheduleError("action count n must be >= 1");
}

}  // namespace

double hedge_eta(std::int64_t horizon, std::size_t actions) {
  check_inputs(horizon, actions);
  if (actions == 1) return kSingleActionEta;
  return std::sqrt(std::log(static_cast<double>(actions)) / static_cast<double>(horizon));
}

double exp3_eta(std::int64_t horizon, std::size_t actions) {
  check_inputs(horizon, actions);
  if (actions == 1) return kSingleActionEta;
  const double n = static_cast<double>(actions);
  return std::sqrt(std::log(n) / (n * static_cast<double>(horizon)));
}

ExplorationRates alpha_exp3(std::int64_t horizon, std::size_t actions, std::size_t leaders) {
  check_inputs(horizon, actions);
  if (leaders < 1) throw ScheduleError("leader count m must be >= 1");
  const double n = static_cast<double>(actions);
  const double t = static_cast<double>(horizon);
  const double log_n = std::log(n);
  ExplorationRates rates{};
  if (leaders == 1) {
    rates.raw_alpha = std::cbrt(n * n * log_n / t);
    rates.eta = std::cbrt(log_n * log_n / (n * n * t * t));
  } else {
    const double m = static_cast<double>(leaders);
    rates.raw_alpha = n * std::pow(t, -1.0 / (m + 1.0));
    rates.eta = std::sqrt(std::pow(t, -(m + 2.0) / (m + 1.0)) * n * log_n);
  }
  if (actions == 1) rates.eta = kSingleActionEta;
  rates.alpha = std::min(1.0, rates.raw_alpha);
  return rates;
}

std::int64_t commit_budget(double p, double max_hardness, std::size_t leaders,
                           std::size_t actions, std::size_t follower_actions) {
  if (!(p > 0.0 && p < 1.0)) throw ScheduleError("failure probability p must lie in (0,1)");
  if (!(max_hardness > 0.0) || !std::isfinite(max_hardness)) {
    throw ScheduleError("hardness H must be positive and finite");
  }
  const double nf = static_cast<double>(follower_actions);
  const double m_log_n = static_cast<double>(leaders) * std::log(static_cast<double>(actions));
  auto rhs = [&](std::int64_t q) {
    return 18.0 * max_hardness * (std::log(2.0 * static_cast<double>(q) * nf / p) + m_log_n) + nf;
  };
  std::int64_t q = static_cast<std::int64_t>(follower_actions) + 1;
  for (int iter = 0; iter < 1000; ++iter) {
    const double next = std::ceil(rhs(q));
    if (next > static_cast<double>(std::numeric_limits<std::int64_t>::max() / 64)) {
      throw ScheduleError("commit budget q overflows");
    }
    if (static_cast<double>(q) >= next) return q;
    q = static_cast<std::int64_t>(next);
  }
  throw ScheduleError("commit budget q did not converge");
}

double ucbe_exploration(std::int64_t q, std::size_t follower_actions, double hardness) {
  const double slack = static_cast<double>(q) - static_cast<double>(follower_actions);
  if (!(slack > 0.0)) throw ScheduleError("q must exceed n_f");
  if (!(hardness > 0.0) || !std::isfinite(hardness)) {
    throw ScheduleError("hardness H must be positive and finite");
  }
  return 25.0 / 36.0 * slack / hardness;
}

std::int64_t commit_round(std::int64_t q, std::size_t actions, std::size_t leaders) {
  double joint = 1.0;
  for (std::size_t i = 0; i < leaders; ++i) joint *= static_cast<double>(actions);
  return static_cast<std::int64_t>(std::ceil(28.0 * static_cast<double>(q) * joint / 3.0));
}

}  // namespace mlsf::schedule
