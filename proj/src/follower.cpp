#include "mlsf/follower.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mlsf/errors.hpp"

namespace mlsf {

UcbState::UcbState(std::size_t joint_size, std::size_t arms, double beta)
    : arms_(arms),
      beta_(beta),
      counts_(joint_size * arms, 0),
      sums_(joint_size * arms, 0.0),
      visits_(joint_size, 0) {
  if (joint_size == 0 || arms == 0) throw DomainError("follower needs joint actions and arms");
  if (!(beta >= 3.0) || !std::isfinite(beta)) throw DomainError("beta must be >= 3");
}

double UcbState::mean(std::size_t joint, std::size_t arm) const {
  const std::size_t cell = joint * arms_ + arm;
  if (counts_[cell] == 0) return std::numeric_limits<double>::quiet_NaN();
  return sums_[cell] / static_cast<double>(counts_[cell]);
}

void UcbState::set_exploration(double e) {
  if (!(e > 0.0) || !std::isfinite(e)) throw DomainError("UCB-E exploration e must be > 0");
  exploration_.assign(1, e);
}

void UcbState::set_exploration(std::vector<double> per_joint) {
  if (per_joint.size() != joint_size()) {
    throw DomainError("UCB-E exploration needs one value per joint action");
  }
  for (double e : per_joint) {
    if (!(e > 0.0) || !std::isfinite(e)) throw DomainError("UCB-E exploration e must be > 0");
  }
  exploration_ = std::move(per_joint);
}

double UcbState::exploration(std::size_t joint) const {
  if (exploration_.empty()) throw DomainError("UCB-E exploration parameter not set");
  return exploration_.size() == 1 ? exploration_[0] : exploration_[joint];
}

double UcbState::index(std::size_t joint, std::size_t arm, IndexMode mode) const {
  const std::size_t cell = joint * arms_ + arm;
  const auto pulls = counts_[cell];
  if (pulls == 0) return -std::numeric_limits<double>::infinity();
  const double mu = sums_[cell] / static_cast<double>(pulls);
  const double t = static_cast<double>(pulls);
  if (mode == IndexMode::kUcb) {
    // pulls > 0 implies visits >= 1, so the log is finite and ln(1) = 0.
    const double log_visits = std::log(static_cast<double>(visits_[joint]));
    return mu - std::sqrt(2.0 * beta_ * log_visits / t);
  }
  return mu - std::sqrt(exploration(joint) / t);
}

std::size_t UcbState::select(std::size_t joint, IndexMode mode) const {
  std::size_t best = 0;
  double best_index = index(joint, 0, mode);
  for (std::size_t k = 1; k < arms_; ++k) {
    const double v = index(joint, k, mode);
    if (v < best_index) {
      best = k;
      best_index = v;
    }
  }
  return best;
}

void UcbState::observe(std::size_t joint, std::size_t arm, double sample) {
  if (committed_) throw CommitError("follower statistics are frozen after commit");
  if (!(sample >= 0.0 && sample <= 1.0)) {
    throw DomainError("follower loss sample " + std::to_string(sample) + " outside [0,1]");
  }
  const std::size_t cell = joint * arms_ + arm;
  ++counts_[cell];
  sums_[cell] += sample;
  ++visits_[joint];
  ++total_;
}

ResponsePredictor UcbState::commit() {
  std::vector<std::size_t> table(joint_size());
  for (std::size_t a = 0; a < joint_size(); ++a) {
    if (visits_[a] == 0) {
      throw CommitError("joint action " + std::to_string(a) + " was never played before commit");
    }
    std::size_t best = arms_;
    double best_mean = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < arms_; ++k) {
      if (count(a, k) == 0) continue;
      const double mu = mean(a, k);
      if (best == arms_ || mu < best_mean) {
        best = k;
        best_mean = mu;
      }
    }
    table[a] = best;
  }
  committed_ = true;
  return ResponsePredictor(std::move(table));
}

nlohmann::json follower_to_json(const UcbState& state) {
  nlohmann::json counts = nlohmann::json::array();
  nlohmann::json means = nlohmann::json::array();
  for (std::size_t a = 0; a < state.joint_size(); ++a) {
    nlohmann::json c = nlohmann::json::array(), mu = nlohmann::json::array();
    for (std::size_t k = 0; k < state.arms(); ++k) {
      c.push_back(state.count(a, k));
      if (state.count(a, k) == 0) {
        mu.push_back(nullptr);
      } else {
        mu.push_back(state.mean(a, k));
      }
    }
    counts.push_back(std::move(c));
    means.push_back(std::move(mu));
  }
  return {{"counts", std::move(counts)},    {"means", std::move(means)},
          {"visits", state.visits_},        {"beta", state.beta_},
          {"explore_e", state.exploration_}, {"committed", state.committed_}};
}

UcbState follower_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("counts") || !doc.contains("means") ||
      !doc.contains("visits") || !doc.contains("beta")) {
    throw DomainError("follower snapshot needs 'counts', 'means', 'visits' and 'beta'");
  }
  const auto& counts = doc.at("counts");
  const auto& means = doc.at("means");
  const auto visits = doc.at("visits").get<std::vector<std::uint64_t>>();
  if (!counts.is_array() || counts.empty() || counts.size() != visits.size() ||
      !means.is_array() || means.size() != visits.size()) {
    throw DomainError("follower snapshot tables disagree in size");
  }
  const std::size_t arms = counts[0].size();
  UcbState state(visits.size(), arms, doc.at("beta").get<double>());
  for (std::size_t a = 0; a < visits.size(); ++a) {
    if (counts[a].size() != arms || means[a].size() != arms) {
      throw DomainError("follower snapshot rows disagree in size");
    }
    std::uint64_t row_total = 0;
    for (std::size_t k = 0; k < arms; ++k) {
      const auto c = counts[a][k].get<std::uint64_t>();
      state.counts_[a * arms + k] = c;
      row_total += c;
      if (c > 0) {
        const double mu = means[a][k].get<double>();
        if (!(mu >= 0.0 && mu <= 1.0)) throw DomainError("follower snapshot mean outside [0,1]");
        state.sums_[a * arms + k] = mu * static_cast<double>(c);
      }
    }
    if (row_total != visits[a]) throw DomainError("follower snapshot counts do not sum to visits");
    state.visits_[a] = visits[a];
    state.total_ += visits[a];
  }
  if (doc.contains("explore_e") && !doc.at("explore_e").empty()) {
    auto e = doc.at("explore_e").get<std::vector<double>>();
    if (e.size() == 1) {
      state.set_exploration(e[0]);
    } else {
      state.set_exploration(std::move(e));
    }
  }
  state.committed_ = doc.value("committed", false);
  return state;
}

}  // namespace mlsf
