#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "swarmrl/envs.hpp"
#include "swarmrl/paramsrv.hpp"

namespace swarmrl {

// Runs one greedy episode under a parameter bundle. Implemented per
// algorithm (argmax over Q for DQN, the deterministic actor for DDPG).
class PolicyEvaluator {
 public:
  virtual ~PolicyEvaluator() = default;
  struct Episode {
    double ret = 0.0;
    int steps = 0;
  };
  virtual Episode run_episode(const std::vector<ParamVector>& params, Rng& rng) = 0;
};

struct SupervisorConfig {
  std::int64_t b = 5;
  double schedule_divisor = 200.0;
  // Validation budget per candidate: an uncommitted candidate is dropped
  // after this many greedy episodes and the supervisor resumes testing the
  // current best. Must exceed b for any candidate to be committable.
  int episodes_per_candidate = 12;
};

struct ValidationRow {
  std::int64_t sup_episode = 0;
  std::int64_t candidate_id = -1;  // -1 while retesting the committed best
  double ret = 0.0;
  std::int64_t x = 0;
  double c = 0.0;
  bool committed = false;
};

struct CandidateRow {
  std::int64_t candidate_id = -1;
  int source_agent = -1;
  double claimed_score = 0.0;
  double best_at_load = 0.0;
  int eval_episodes = 0;
  double eval_mean = 0.0;
  bool committed = false;
  std::int64_t committed_version = -1;
};

// The supervise agent: loads pending candidates, validates them with greedy
// episodes, counts successes x, derives c from the schedule, and commits the
// record once x exceeds b. Between candidates it keeps testing the current
// best so x and c keep growing while the record survives.
class Supervisor {
 public:
  Supervisor(const SupervisorConfig& cfg, envs::EnvTag env, PolicyEvaluator& eval,
             ParameterServer& server, std::uint64_t run_seed,
             std::function<std::int64_t()> step_clock);

  // One turn = at most one candidate load plus one greedy validation
  // episode. Returns false when there is nothing to evaluate yet.
  bool turn();

  std::int64_t env_steps() const { return env_steps_; }
  std::int64_t episodes() const { return sup_episode_; }
  const std::vector<ValidationRow>& validation_log() const { return validations_; }
  const std::vector<CandidateRow>& candidate_ledger() const { return candidates_; }

 private:
  void load_candidate(Candidate cand);
  void adopt_best_record();

  SupervisorConfig cfg_;
  envs::EnvTag env_;
  PolicyEvaluator& eval_;
  ParameterServer& server_;
  Rng rng_;
  std::function<std::int64_t()> step_clock_;

  std::optional<std::vector<ParamVector>> current_;
  std::int64_t current_candidate_id_ = -1;
  int current_source_ = -1;
  std::size_t current_row_ = 0;  // index into candidates_ when id >= 0
  bool current_committed_ = false;
  int episodes_current_ = 0;
  std::int64_t x_ = 0;
  double c_ = 0.0;
  // Unbiased score of the current params: mean over every validation
  // episode run under them, not just the ones that beat the bar.
  double all_sum_ = 0.0;
  std::int64_t all_n_ = 0;

  std::int64_t sup_episode_ = 0;
  std::int64_t env_steps_ = 0;
  std::vector<ValidationRow> validations_;
  std::vector<CandidateRow> candidates_;
};

}  // namespace swarmrl
