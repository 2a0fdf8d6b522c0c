#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "swarmrl/nn.hpp"

namespace swarmrl {

// Versioned global-best record published to every explorer. params holds one
// vector for DQN and an actor/critic pair for DDPG; empty params marks the
// sentinel state before any commit (score -inf, c 0), in which explorers
// behave as independent learners.
struct BestRecord {
  std::int64_t version = 0;
  std::vector<ParamVector> params;
  double score = -std::numeric_limits<double>::infinity();
  double c = 0.0;
  std::int64_t x = 0;

  bool is_sentinel() const { return params.empty(); }
};

// Unvalidated parameter snapshot submitted by an explorer.
struct Candidate {
  std::int64_t id = -1;  // assigned by the server at submission
  std::vector<ParamVector> params;
  double claimed_score = 0.0;
  int source_agent = -1;
  std::int64_t submit_step = 0;
};

struct CommitEntry {
  std::int64_t version = 0;
  std::int64_t step = 0;
  double score = 0.0;
  double c = 0.0;
  std::int64_t x = 0;
  int source_agent = -1;
  std::int64_t candidate_id = -1;
};

// In-process parameter server: many explorers call submit_candidate and
// read_best concurrently while one supervisor calls take_candidate and
// commit_best. Commits are atomic and totally ordered; reads copy a shared
// reference under the lock, so no caller blocks another for longer than a
// record copy.
class ParameterServer {
 public:
  explicit ParameterServer(std::size_t queue_capacity = 4);

  // Enqueues iff claimed_score is strictly greater than the current best
  // score and finite. When the queue is full the lowest-claimed pending
  // candidate is dropped first. Returns whether the candidate was enqueued.
  bool submit_candidate(Candidate cand);

  // Removes and returns the highest-claimed pending candidate.
  std::optional<Candidate> take_candidate();

  // Replaces the best record if score >= current best score; returns the new
  // version, or nullopt when the commit lost a race and must be revalidated.
  std::optional<std::int64_t> commit_best(std::vector<ParamVector> params,
                                          double score, double c, std::int64_t x,
                                          int source_agent, std::int64_t step,
                                          std::int64_t candidate_id = -1);

  // Consistent snapshot of the latest committed record.
  std::shared_ptr<const BestRecord> read_best() const;

  std::vector<CommitEntry> commit_log() const;
  std::int64_t submissions() const;
  std::int64_t rejected_submissions() const;

 private:
  mutable std::mutex best_mu_;
  std::shared_ptr<const BestRecord> best_;
  std::vector<CommitEntry> log_;

  mutable std::mutex queue_mu_;
  std::size_t queue_capacity_;
  std::vector<Candidate> queue_;
  std::int64_t next_candidate_id_ = 0;
  std::int64_t submissions_ = 0;
  std::int64_t rejected_ = 0;
};

}  // namespace swarmrl
