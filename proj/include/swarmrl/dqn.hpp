#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "swarmrl/envs.hpp"
#include "swarmrl/hybrid.hpp"
#include "swarmrl/nn.hpp"
#include "swarmrl/paramsrv.hpp"
#include "swarmrl/replay.hpp"
#include "swarmrl/supervisor.hpp"

namespace swarmrl {
namespace dqn {

// How explorers decide to submit a candidate: at episode end when the
// episode return beats the server best (default), or the per-step variant
// keyed on the minibatch TD target.
enum class CandidateRule { kEpisode, kTdTarget };

CandidateRule candidate_rule_from_name(std::string_view name);

struct Config {
  std::vector<int> hidden = {64, 64};
  Activation hidden_act = Activation::kTanh;
  double lr = 0.01;
  std::string optimizer = "adam";  // adam | sgd
  double gamma = 0.99;
  int target_sync_period = 500;  // C, in environment steps
  std::size_t replay_capacity = 50000;
  std::size_t warmup = 1000;
  std::size_t batch_size = 32;
  int learn_every = 4;
  int read_period = 1;
  double eps_start = 1.0;
  double eps_final = 0.05;
  double eps_anneal_frac = 0.2;
  CandidateRule candidate_rule = CandidateRule::kEpisode;
  AttractionRMode r_mode = AttractionRMode::kPerDim;
  std::size_t snapshot_capacity = 16;
};

Network make_qnet(envs::EnvTag env, const Config& cfg);

// Bootstrapped regression target: r if done, else r + gamma * max_a Q^(s',a).
double td_target(double reward, std::span<const double> next_obs, bool done,
                 const Network& target_net, double gamma);

struct LossGrad {
  double loss = 0.0;
  ParamGrad grad;
  double max_td_target = 0.0;
};

// Mean squared TD error over the batch and its exact gradient with respect
// to the online parameters; the target branch is treated as a constant
// (semi-gradient).
LossGrad dqn_loss_grad(const std::vector<Transition<int>>& batch,
                       const Network& online, const Network& target, double gamma);

int greedy_action(const Network& net, std::span<const double> obs);

struct EpisodeStats {
  int episode = 0;
  std::int64_t steps_total = 0;
  int env_steps = 0;
  double ret = 0.0;
  double epsilon = 0.0;
  double loss_mean = 0.0;
  double c_seen = 0.0;
  std::int64_t best_version_seen = 0;
  bool truncated_by_budget = false;
  bool submitted = false;
};

// One explorer agent: owns its networks, replay buffer and environment.
// server may be null, in which case the agent is the vanilla baseline (no
// reads, no submissions). pin_c0 forces the attraction weight to zero while
// keeping server reads and submissions alive.
class Explorer {
 public:
  Explorer(int id, envs::EnvTag env, const Config& cfg, std::uint64_t run_seed,
           std::int64_t step_budget, ParameterServer* server, bool pin_c0);

  // Runs one episode, stopping early if the step budget runs out.
  EpisodeStats run_episode();

  bool budget_exhausted() const { return steps_ >= budget_; }
  std::int64_t steps() const { return steps_; }
  int id() const { return id_; }
  const Network& online() const { return net_; }
  const Network& target() const { return target_; }
  ParamVector params() const { return net_.flatten(); }
  double epsilon_at(std::int64_t step) const;

 private:
  void learn_step();
  void maybe_submit_td_candidates(double max_td_target);

  int id_;
  envs::EnvTag env_;
  Config cfg_;
  std::int64_t budget_;
  ParameterServer* server_;
  bool pin_c0_;

  Network net_;
  Network target_;
  Optimizer opt_;
  ReplayBuffer<int> buf_;
  SnapshotStore snapshots_;

  Rng env_rng_;
  Rng action_rng_;
  Rng sample_rng_;
  Rng attract_rng_;

  std::int64_t steps_ = 0;
  int episode_ = 0;
  std::shared_ptr<const BestRecord> best_;
  std::vector<Transition<int>> batch_scratch_;
  double y_global_local_;  // td_target rule tracker
  double loss_sum_ = 0.0;
  std::int64_t loss_n_ = 0;
  bool submitted_this_episode_ = false;
  std::vector<double> obs_scratch_;
};

// Greedy evaluator used by the supervisor and the runner's probe evals.
class Evaluator : public PolicyEvaluator {
 public:
  Evaluator(envs::EnvTag env, const Config& cfg);
  Episode run_episode(const std::vector<ParamVector>& params, Rng& rng) override;

 private:
  envs::EnvTag env_;
  Network scratch_;
};

}  // namespace dqn
}  // namespace swarmrl
