#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "swarmrl/dqn.hpp"
#include "swarmrl/envs.hpp"
#include "swarmrl/hybrid.hpp"
#include "swarmrl/nn.hpp"
#include "swarmrl/paramsrv.hpp"
#include "swarmrl/replay.hpp"
#include "swarmrl/supervisor.hpp"

namespace swarmrl {
namespace ddpg {

using dqn::CandidateRule;

// Whether targets track the agent's own online networks (standard soft
// update) or mix toward the server's global best.
enum class TargetUpdate { kOwn, kGlobalBest };

TargetUpdate target_update_from_name(std::string_view name);

struct Config {
  std::vector<int> hidden = {64, 64};
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  std::string optimizer = "adam";
  double gamma = 0.99;
  double tau = 0.005;
  double noise_sigma = 0.1;  // fraction of the action scale
  std::size_t replay_capacity = 50000;
  std::size_t warmup = 1000;
  std::size_t batch_size = 24;
  int learn_every = 2;
  int read_period = 1;
  CandidateRule candidate_rule = CandidateRule::kEpisode;
  TargetUpdate target_update = TargetUpdate::kOwn;
  AttractionRMode r_mode = AttractionRMode::kPerDim;
  std::size_t snapshot_capacity = 16;
};

// Actor maps observation to a tanh-squashed action in [-1, 1]; the agent
// scales it by the environment's action bound. Critic consumes the
// concatenated (observation, scaled action).
Network make_actor(envs::EnvTag env, const Config& cfg);
Network make_critic(envs::EnvTag env, const Config& cfg);

double critic_target(double reward, std::span<const double> next_obs, bool done,
                     const Network& target_actor, const Network& target_critic,
                     double gamma, double action_scale);

using ContTransition = Transition<std::vector<double>>;

struct LossGrad {
  double loss = 0.0;
  ParamGrad grad;
};

// Mean squared error against precomputed targets and its exact gradient with
// respect to the critic parameters.
LossGrad critic_loss_grad(const std::vector<ContTransition>& batch,
                          const Network& critic, std::span<const double> targets);

// Deterministic policy gradient estimate: the exact gradient of
// (1/N) sum_i Q(s_i, mu(s_i)) with respect to the actor parameters, i.e. an
// ascent direction for the actor objective. mean_q, when given, receives the
// batch objective value itself.
ParamGrad actor_grad(const std::vector<ContTransition>& batch, const Network& actor,
                     const Network& critic, double action_scale,
                     double* mean_q = nullptr);

ParamVector soft_update(const ParamVector& target, const ParamVector& online,
                        double tau);

// Same blend applied directly to a target network's layer arrays.
void soft_update_in_place(Network& target, const Network& online, double tau);
void soft_update_in_place(Network& target, const ParamVector& online, double tau);

struct EpisodeStats {
  int episode = 0;
  std::int64_t steps_total = 0;
  int env_steps = 0;
  double ret = 0.0;
  double loss_mean = 0.0;        // critic loss
  double actor_loss_proxy = 0.0; // -(1/N) sum Q(s, mu(s)) over learn steps
  double c_seen = 0.0;
  std::int64_t best_version_seen = 0;
  bool truncated_by_budget = false;
  bool submitted = false;
};

class Explorer {
 public:
  Explorer(int id, envs::EnvTag env, const Config& cfg, std::uint64_t run_seed,
           std::int64_t step_budget, ParameterServer* server, bool pin_c0);

  EpisodeStats run_episode();

  bool budget_exhausted() const { return steps_ >= budget_; }
  std::int64_t steps() const { return steps_; }
  int id() const { return id_; }
  const Network& actor() const { return actor_; }
  const Network& critic() const { return critic_; }
  const Network& target_actor() const { return target_actor_; }
  const Network& target_critic() const { return target_critic_; }
  std::vector<ParamVector> params() const {
    return {actor_.flatten(), critic_.flatten()};
  }

 private:
  void learn_step();

  int id_;
  envs::EnvTag env_;
  Config cfg_;
  std::int64_t budget_;
  ParameterServer* server_;
  bool pin_c0_;
  double action_scale_;

  Network actor_;
  Network critic_;
  Network target_actor_;
  Network target_critic_;
  Optimizer actor_opt_;
  Optimizer critic_opt_;
  ReplayBuffer<std::vector<double>> buf_;
  SnapshotStore snapshots_;

  Rng env_rng_;
  Rng action_rng_;
  Rng sample_rng_;
  Rng attract_rng_;

  std::int64_t steps_ = 0;
  int episode_ = 0;
  std::shared_ptr<const BestRecord> best_;
  std::vector<ContTransition> batch_scratch_;
  double y_global_local_;
  double critic_loss_sum_ = 0.0;
  double actor_proxy_sum_ = 0.0;
  std::int64_t loss_n_ = 0;
  bool submitted_this_episode_ = false;
};

// Greedy (noise-free) evaluator over the candidate actor.
class Evaluator : public PolicyEvaluator {
 public:
  Evaluator(envs::EnvTag env, const Config& cfg);
  Episode run_episode(const std::vector<ParamVector>& params, Rng& rng) override;

 private:
  envs::EnvTag env_;
  Network scratch_actor_;
  double action_scale_;
};

}  // namespace ddpg
}  // namespace swarmrl
