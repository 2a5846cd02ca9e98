#include "mlsf/game.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mlsf/errors.hpp"
#include "mlsf/rng.hpp"

namespace mlsf {

JointIndexer::JointIndexer(std::size_t leaders, std::size_t actions)
    : leaders_(leaders), actions_(actions), size_(1), strides_(leaders, 1) {
  if (leaders == 0) throw ValidationError("leader count m must be >= 1");
  if (actions == 0) throw ValidationError("leader action count n must be >= 1");
  for (std::size_t i = 0; i < leaders; ++i) {
    if (size_ > kJointActionCap / actions) {
      throw CapError("joint action space n^m = " + std::to_string(actions) + "^" +
                     std::to_string(leaders) + " exceeds the cap of 2^20");
    }
    size_ *= actions;
  }
  for (std::size_t i = leaders; i-- > 1;) strides_[i - 1] = strides_[i] * actions;
}

std::size_t JointIndexer::encode(std::span<const std::size_t> coords) const {
  if (coords.size() != leaders_) throw DomainError("joint action has wrong arity");
  std::size_t flat = 0;
  for (std::size_t c : coords) {
    if (c >= actions_) throw DomainError("joint action coordinate out of range");
    flat = flat * actions_ + c;
  }
  return flat;
}

std::vector<std::size_t> JointIndexer::decode(std::size_t flat) const {
  std::vector<std::size_t> coords(leaders_);
  decode(flat, coords);
  return coords;
}

void JointIndexer::decode(std::size_t flat, std::span<std::size_t> coords) const {
  if (flat >= size_) throw DomainError("flat joint index out of range");
  for (std::size_t i = leaders_; i-- > 0;) {
    coords[i] = flat % actions_;
    flat /= actions_;
  }
}

std::size_t argmin_unique(std::span<const double> row) {
  if (row.empty()) throw ValidationError("empty follower row");
  std::size_t best = 0;
  bool tied = false;
  for (std::size_t k = 1; k < row.size(); ++k) {
    if (row[k] < row[best]) {
      best = k;
      tied = false;
    } else if (row[k] == row[best]) {
      tied = true;
    }
  }
  if (tied) throw ValidationError("follower best response is not unique");
  return best;
}

namespace {

void check_unit_interval(std::span<const double> values, const char* what) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double v = values[k];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ValidationError(std::string(what) + "[" + std::to_string(k) + "] = " +
                            std::to_string(v) + " lies outside [0,1]");
    }
  }
}

}  // namespace

GameSpec::GameSpec(std::size_t leaders, std::size_t actions, std::size_t follower_actions,
                   std::vector<double> leader_losses, std::vector<double> follower_losses)
    : indexer_(leaders, actions),
      follower_actions_(follower_actions),
      leader_losses_(std::move(leader_losses)),
      follower_losses_(std::move(follower_losses)) {
  if (follower_actions == 0) throw ValidationError("follower action count n_f must be >= 1");
  const std::size_t joint = indexer_.size();
  if (follower_losses_.size() != joint * follower_actions) {
    throw ValidationError("follower_losses has " + std::to_string(follower_losses_.size()) +
                          " entries, expected n^m * n_f = " +
                          std::to_string(joint * follower_actions));
  }
  if (leader_losses_.size() != leaders * joint * follower_actions) {
    throw ValidationError("leader_losses has " + std::to_string(leader_losses_.size()) +
                          " entries, expected m * n^m * n_f = " +
                          std::to_string(leaders * joint * follower_actions));
  }
  check_unit_interval(leader_losses_, "leader_losses");
  check_unit_interval(follower_losses_, "follower_losses");

  best_response_.resize(joint);
  for (std::size_t a = 0; a < joint; ++a) {
    try {
      best_response_[a] = argmin_unique(follower_row(a));
    } catch (const ValidationError&) {
      throw ValidationError("follower row for joint action " + std::to_string(a) +
                            " has a tied minimum");
    }
  }
  composed_.resize(leaders * joint);
  for (std::size_t i = 0; i < leaders; ++i) {
    for (std::size_t a = 0; a < joint; ++a) {
      composed_[i * joint + a] = leader_loss(i, a, best_response_[a]);
    }
  }
}

double GapProfile::max_hardness() const {
  return hardness.empty() ? 0.0 : *std::max_element(hardness.begin(), hardness.end());
}

GapProfile gap_profile(const GameSpec& game) {
  const std::size_t joint = game.joint_size();
  const std::size_t arms = game.follower_actions();
  GapProfile profile;
  profile.follower_actions = arms;
  profile.delta.resize(joint * arms);
  profile.hardness.assign(joint, 0.0);
  for (std::size_t a = 0; a < joint; ++a) {
    const auto row = game.follower_row(a);
    const std::size_t best = argmin_unique(row);
    for (std::size_t k = 0; k < arms; ++k) {
      const double d = row[k] - row[best];
      profile.delta[a * arms + k] = d;
      if (k == best) continue;
      profile.hardness[a] += 1.0 / (d * d);
      profile.epsilon_min = std::min(profile.epsilon_min, d);
    }
  }
  return profile;
}

GameSpec generate_game(std::size_t leaders, std::size_t actions, std::size_t follower_actions,
                       double epsilon_floor, std::uint64_t seed, std::size_t resample_budget) {
  if (!(epsilon_floor > 0.0 && epsilon_floor < 0.5)) {
    throw DomainError("epsilon_floor must lie in (0, 1/2)");
  }
  const JointIndexer indexer(leaders, actions);
  if (follower_actions == 0) throw ValidationError("follower action count n_f must be >= 1");
  Rng rng = make_stream(seed, Stream::kGame);
  const std::size_t joint = indexer.size();

  std::vector<double> leader(leaders * joint * follower_actions);
  for (double& v : leader) v = rng.uniform();

  std::vector<double> follower(joint * follower_actions);
  std::vector<double> sorted(follower_actions);
  for (std::size_t a = 0; a < joint; ++a) {
    auto row = std::span<double>(follower).subspan(a * follower_actions, follower_actions);
    bool accepted = false;
    for (std::size_t attempt = 0; attempt < resample_budget && !accepted; ++attempt) {
      for (double& v : row) v = rng.uniform();
      if (follower_actions == 1) {
        accepted = true;
        break;
      }
      std::copy(row.begin(), row.end(), sorted.begin());
      std::partial_sort(sorted.begin(), sorted.begin() + 2, sorted.end());
      accepted = sorted[1] - sorted[0] >= epsilon_floor;
    }
    if (!accepted) {
      throw GenerationError("follower row " + std::to_string(a) + " did not reach gap " +
                            std::to_string(epsilon_floor) + " within " +
                            std::to_string(resample_budget) + " draws");
    }
  }
  return GameSpec(leaders, actions, follower_actions, std::move(leader), std::move(follower));
}

nlohmann::json game_to_json(const GameSpec& game) {
  const std::size_t m = game.leaders(), joint = game.joint_size(), nf = game.follower_actions();
  nlohmann::json leader = nlohmann::json::array();
  for (std::size_t i = 0; i < m; ++i) {
    nlohmann::json table = nlohmann::json::array();
    for (std::size_t a = 0; a < joint; ++a) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t b = 0; b < nf; ++b) row.push_back(game.leader_loss(i, a, b));
      table.push_back(std::move(row));
    }
    leader.push_back(std::move(table));
  }
  nlohmann::json follower = nlohmann::json::array();
  for (std::size_t a = 0; a < joint; ++a) {
    const auto row = game.follower_row(a);
    follower.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return {{"m", m},
          {"n", game.actions()},
          {"n_f", nf},
          {"leader_losses", std::move(leader)},
          {"follower_losses", std::move(follower)}};
}

namespace {

std::size_t read_count(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key)) throw ValidationError(std::string("game: missing field '") + key + "'");
  const auto& v = doc.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw ValidationError(std::string("game: field '") + key + "' must be a positive integer");
  }
  return v.get<std::size_t>();
}

void append_rows(const nlohmann::json& rows, std::size_t count, std::size_t width,
                 const std::string& field, std::vector<double>& out) {
  if (!rows.is_array() || rows.size() != count) {
    throw ValidationError("game: '" + field + "' must hold " + std::to_string(count) + " rows");
  }
  for (std::size_t a = 0; a < count; ++a) {
    const auto& row = rows[a];
    if (!row.is_array() || row.size() != width) {
      throw ValidationError("game: '" + field + "[" + std::to_string(a) + "]' must hold " +
                            std::to_string(width) + " numbers");
    }
    for (const auto& v : row) {
      if (!v.is_number()) throw ValidationError("game: '" + field + "' holds a non-number");
      out.push_back(v.get<double>());
    }
  }
}

}  // namespace

GameSpec game_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("game: document must be a JSON object");
  const std::size_t m = read_count(doc, "m");
  const std::size_t n = read_count(doc, "n");
  const std::size_t nf = read_count(doc, "n_f");
  const JointIndexer indexer(m, n);
  const std::size_t joint = indexer.size();
  if (!doc.contains("leader_losses") || !doc.contains("follower_losses")) {
    throw ValidationError("game: missing 'leader_losses' or 'follower_losses'");
  }
  const auto& leader_doc = doc.at("leader_losses");
  if (!leader_doc.is_array() || leader_doc.size() != m) {
    throw ValidationError("game: 'leader_losses' must hold m = " + std::to_string(m) + " tables");
  }
  std::vector<double> leader;
  leader.reserve(m * joint * nf);
  for (std::size_t i = 0; i < m; ++i) {
    append_rows(leader_doc[i], joint, nf, "leader_losses[" + std::to_string(i) + "]", leader);
  }
  std::vector<double> follower;
  follower.reserve(joint * nf);
  append_rows(doc.at("follower_losses"), joint, nf, "follower_losses", follower);
  return GameSpec(m, n, nf, std::move(leader), std::move(follower));
}

}  // namespace mlsf
