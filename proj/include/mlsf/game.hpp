#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "json.hpp"

namespace mlsf {

// Largest joint leader action space (n^m) accepted anywhere in the library.
inline constexpr std::size_t kJointActionCap = std::size_t{1} << 20;

// Mixed-radix encoding of joint leader actions with leader 0 most
// significant: flat = sum_i a_i * n^(m-1-i).
class JointIndexer {
 public:
  JointIndexer(std::size_t leaders, std::size_t actions);

  std::size_t leaders() const { return leaders_; }
  std::size_t actions() const { return actions_; }
  std::size_t size() const { return size_; }

  // Place value of `leader`'s coordinate.
  std::size_t stride(std::size_t leader) const { return strides_[leader]; }

  std::size_t encode(std::span<const std::size_t> coords) const;
  std::vector<std::size_t> decode(std::size_t flat) const;
  void decode(std::size_t flat, std::span<std::size_t> coords) const;

  std::size_t coordinate(std::size_t flat, std::size_t leader) const {
    return (flat / strides_[leader]) % actions_;
  }

  // Joint action equal to `flat` except that `leader` plays `action`.
  std::size_t replace(std::size_t flat, std::size_t leader, std::size_t action) const {
    return flat + (action - coordinate(flat, leader)) * strides_[leader];
  }

  friend bool operator==(const JointIndexer&, const JointIndexer&) = default;

 private:
  std::size_t leaders_;
  std::size_t actions_;
  std::size_t size_;
  std::vector<std::size_t> strides_;
};

// Index of the unique minimum of `row`. Throws ValidationError on ties or an
// empty row.
std::size_t argmin_unique(std::span<const double> row);

// Loss tensors of a repeated game with m leaders (n actions each) and one
// follower (n_f actions). Immutable; construction validates every invariant
// and caches the follower's best-response table.
class GameSpec {
 public:
  // leader_losses is laid out [leader][joint][follower], follower_losses
  // [joint][follower].
  GameSpec(std::size_t leaders, std::size_t actions, std::size_t follower_actions,
           std::vector<double> leader_losses, std::vector<double> follower_losses);

  std::size_t leaders() const { return indexer_.leaders(); }
  std::size_t actions() const { return indexer_.actions(); }
  std::size_t follower_actions() const { return follower_actions_; }
  std::size_t joint_size() const { return indexer_.size(); }
  const JointIndexer& indexer() const { return indexer_; }

  double leader_loss(std::size_t leader, std::size_t joint, std::size_t response) const {
    return leader_losses_[(leader * joint_size() + joint) * follower_actions_ + response];
  }
  double follower_loss(std::size_t joint, std::size_t response) const {
    return follower_losses_[joint * follower_actions_ + response];
  }
  std::span<const double> follower_row(std::size_t joint) const {
    return {follower_losses_.data() + joint * follower_actions_, follower_actions_};
  }

  std::span<const double> leader_losses() const { return leader_losses_; }
  std::span<const double> follower_losses() const { return follower_losses_; }

  std::size_t best_response(std::size_t joint) const { return best_response_[joint]; }
  std::span<const std::size_t> best_responses() const { return best_response_; }

  // l_i(a, Br(a)).
  double composed_loss(std::size_t leader, std::size_t joint) const {
    return composed_[leader * joint_size() + joint];
  }

  friend bool operator==(const GameSpec&, const GameSpec&) = default;

 private:
  JointIndexer indexer_;
  std::size_t follower_actions_;
  std::vector<double> leader_losses_;
  std::vector<double> follower_losses_;
  std::vector<std::size_t> best_response_;
  std::vector<double> composed_;
};

// Follower suboptimality gaps. delta is laid out [joint][follower].
struct GapProfile {
  std::size_t follower_actions = 0;
  std::vector<double> delta;
  // Smallest positive gap over all joint actions; +inf when n_f == 1.
  double epsilon_min = std::numeric_limits<double>::infinity();
  // Per joint action, sum of 1/delta^2 over the non-best arms (0 when n_f == 1).
  std::vector<double> hardness;

  double gap(std::size_t joint, std::size_t arm) const {
    return delta[joint * follower_actions + arm];
  }
  double max_hardness() const;
};

GapProfile gap_profile(const GameSpec& game);

// Random game with every loss uniform on [0,1]; each follower row is redrawn
// until its two smallest entries differ by at least `epsilon_floor`.
GameSpec generate_game(std::size_t leaders, std::size_t actions, std::size_t follower_actions,
                       double epsilon_floor, std::uint64_t seed,
                       std::size_t resample_budget = 10000);

nlohmann::json game_to_json(const GameSpec& game);
// Throws ValidationError on missing fields, bad shapes or invalid values.
GameSpec game_from_json(const nlohmann::json& doc);

}  // namespace mlsf
