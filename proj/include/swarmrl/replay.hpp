#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "swarmrl/common.hpp"
#include "swarmrl/nn.hpp"

namespace swarmrl {

inline constexpr std::int64_t kNoSnapshot = -1;

// Replay element. The action is an index for DQN and a flat action vector
// for DDPG. snapshot_id points into the SnapshotStore entry that was live
// when the transition was collected (kNoSnapshot if none).
template <class Action>
struct Transition {
  std::vector<double> state;
  Action action{};
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;
  std::int64_t snapshot_id = kNoSnapshot;
};

// Bounded ring with uniform with-replacement sampling. One buffer per
// explorer; never shared across workers.
template <class Action>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ConfigError("ReplayBuffer: capacity must be positive");
    ring_.reserve(capacity);
  }

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return ring_.size(); }

  void push(Transition<Action> t) {
    if (ring_.size() < capacity_) {
      ring_.push_back(std::move(t));
    } else {
      ring_[cursor_] = std::move(t);
    }
    cursor_ = (cursor_ + 1) % capacity_;
  }

  // Uniform with replacement. Returns nullopt (not ready) while the buffer
  // holds fewer than batch items; the caller skips its learn step.
  std::optional<std::vector<Transition<Action>>> sample(std::size_t batch,
                                                        Rng& rng) const {
    std::vector<Transition<Action>> out;
    if (!sample_into(batch, rng, out)) return std::nullopt;
    return out;
  }

  // Same draw, writing into a reusable batch buffer (element assignment
  // reuses the vectors' heap storage across learn steps).
  bool sample_into(std::size_t batch, Rng& rng,
                   std::vector<Transition<Action>>& out) const {
    if (ring_.size() < batch) return false;
    out.resize(batch);
    for (std::size_t i = 0; i < batch; ++i)
      out[i] = ring_[uniform_index(rng, ring_.size())];
    return true;
  }

  const Transition<Action>& at(std::size_t i) const { return ring_.at(i); }

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  std::vector<Transition<Action>> ring_;
};

// Bounded ring of parameter snapshots (one vector for DQN, an actor/critic
// pair for DDPG). A compact stand-in for storing full parameters with every
// transition: ids are handed out once per episode and strictly increase for
// the lifetime of a run; evicted ids miss rather than alias newer data.
class SnapshotStore {
 public:
  explicit SnapshotStore(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ConfigError("SnapshotStore: capacity must be positive");
  }

  std::int64_t snapshot(std::vector<ParamVector> params) {
    const std::int64_t id = next_id_++;
    if (entries_.size() < capacity_) {
      entries_.push_back({id, std::move(params)});
    } else {
      entries_[static_cast<std::size_t>(id) % capacity_] = {id, std::move(params)};
    }
    return id;
  }

  std::optional<std::vector<ParamVector>> lookup(std::int64_t id) const {
    for (const auto& e : entries_)
      if (e.id == id) return e.params;
    return std::nullopt;
  }

  std::int64_t next_id() const { return next_id_; }

 private:
  struct Entry {
    std::int64_t id;
    std::vector<ParamVector> params;
  };
  std::size_t capacity_;
  std::int64_t next_id_ = 0;
  std::vector<Entry> entries_;
};

}  // namespace swarmrl
