#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"

namespace mlsf {

// Confidence index used by the follower's per-joint-action bandits.
//   kUcb:  mean - sqrt(2 beta ln(visits) / pulls)
//   kUcbE: mean - sqrt(e / pulls)
// Unpulled arms have index -inf. The follower minimizes loss, so the bonus is
// subtracted.
enum class IndexMode { kUcb, kUcbE };

// Fixed follower response per joint action, learned once and never changed.
class ResponsePredictor {
 public:
  explicit ResponsePredictor(std::vector<std::size_t> table) : table_(std::move(table)) {}

  std::size_t operator()(std::size_t joint) const { return table_[joint]; }
  std::span<const std::size_t> table() const { return table_; }
  std::size_t size() const { return table_.size(); }

  friend bool operator==(const ResponsePredictor&, const ResponsePredictor&) = default;

 private:
  std::vector<std::size_t> table_;
};

// One bandit per joint leader action, each over the follower's n_f arms.
class UcbState {
 public:
  // beta >= 3 is required by the UCB schedule; DomainError otherwise.
  UcbState(std::size_t joint_size, std::size_t arms, double beta = 3.0);

  std::size_t joint_size() const { return visits_.size(); }
  std::size_t arms() const { return arms_; }
  double beta() const { return beta_; }

  std::uint64_t count(std::size_t joint, std::size_t arm) const {
    return counts_[joint * arms_ + arm];
  }
  // Running mean of samples for (joint, arm); NaN when never pulled.
  double mean(std::size_t joint, std::size_t arm) const;
  std::uint64_t visits(std::size_t joint) const { return visits_[joint]; }
  std::uint64_t total_rounds() const { return total_; }

  // UCB-E exploration parameter e, either one global value or one per joint
  // action. Must be > 0.
  void set_exploration(double e);
  void set_exploration(std::vector<double> per_joint);
  double exploration(std::size_t joint) const;

  double index(std::size_t joint, std::size_t arm, IndexMode mode) const;

  // argmin of the index over arms; ties, including several unpulled arms,
  // go to the lowest arm.
  std::size_t select(std::size_t joint, IndexMode mode) const;

  // Records the loss sample of the arm actually played at `joint`.
  // DomainError if the sample lies outside [0,1]; CommitError after commit().
  void observe(std::size_t joint, std::size_t arm, double sample);

  // Freezes the statistics and returns argmin_k mean per joint action,
  // ignoring unpulled arms. CommitError if a joint action was never visited.
  ResponsePredictor commit();
  bool committed() const { return committed_; }

 private:
  std::size_t arms_;
  double beta_;
  std::vector<std::uint64_t> counts_;
  std::vector<double> sums_;
  std::vector<std::uint64_t> visits_;
  std::uint64_t total_ = 0;
  std::vector<double> exploration_;
  bool committed_ = false;

  friend nlohmann::json follower_to_json(const UcbState& state);
  friend UcbState follower_from_json(const nlohmann::json& doc);
};

// Free-function forms of the member operations.
inline double ucb_index(const UcbState& state, std::size_t joint, std::size_t arm,
                        IndexMode mode) {
  return state.index(joint, arm, mode);
}
inline std::size_t select_response(const UcbState& state, std::size_t joint, IndexMode mode) {
  return state.select(joint, mode);
}
inline void observe(UcbState& state, std::size_t joint, std::size_t arm, double sample) {
  state.observe(joint, arm, sample);
}
inline ResponsePredictor commit_predictor(UcbState& state) { return state.commit(); }

// {"counts": [[...]], "means": [[...]], "visits": [...], "beta": f,
//  "explore_e": [...], "committed": bool}. Means of unpulled arms are null.
nlohmann::json follower_to_json(const UcbState& state);
UcbState follower_from_json(const nlohmann::json& doc);

}  // namespace mlsf
