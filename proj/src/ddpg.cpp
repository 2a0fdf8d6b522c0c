#include "swarmrl/ddpg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace swarmrl {
namespace ddpg {

TargetUpdate target_update_from_name(std::string_view name) {
  if (name == "own") return TargetUpdate::kOwn;
  if (name == "global_best") return TargetUpdate::kGlobalBest;
  throw ConfigError("unknown target_update: " + std::string(name));
}

Network make_actor(envs::EnvTag env, const Config& cfg) {
  const auto spec = envs::env_spec(env);
  if (spec.n_actions != 0)
    throw ConfigError("ddpg requires a continuous-action environment");
  return Network::mlp(spec.obs_dim, cfg.hidden, 1, Activation::kTanh,
                      Activation::kTanh);
}

Network make_critic(envs::EnvTag env, const Config& cfg) {
  const auto spec = envs::env_spec(env);
  if (spec.n_actions != 0)
    throw ConfigError("ddpg requires a continuous-action environment");
  return Network::mlp(spec.obs_dim + 1, cfg.hidden, 1, Activation::kTanh,
                      Activation::kIdentity);
}

double critic_target(double reward, std::span<const double> next_obs, bool done,
                     const Network& target_actor, const Network& target_critic,
                     double gamma, double action_scale) {
  if (done) return reward;
  const auto raw = target_actor.forward(next_obs);
  std::vector<double> input(next_obs.begin(), next_obs.end());
  input.push_back(action_scale * raw[0]);
  const auto q = target_critic.forward(input);
  return reward + gamma * q[0];
}

namespace {

// Feature-major transpose of (state, action) pairs for the critic input.
void transpose_critic_inputs(const std::vector<ContTransition>& batch,
                             int obs_dim, std::vector<double>& out) {
  const std::size_t b = batch.size();
  out.assign(static_cast<std::size_t>(obs_dim + 1) * b, 0.0);
  for (std::size_t s = 0; s < b; ++s) {
    const auto& t = batch[s];
    if (static_cast<int>(t.state.size()) != obs_dim || t.action.size() != 1)
      throw ShapeError("ddpg: transition shape mismatch");
    for (int j = 0; j < obs_dim; ++j)
      out[static_cast<std::size_t>(j) * b + s] = t.state[j];
    out[static_cast<std::size_t>(obs_dim) * b + s] = t.action[0];
  }
}

void transpose_states(const std::vector<ContTransition>& batch, int obs_dim,
                      bool next, std::vector<double>& out) {
  const std::size_t b = batch.size();
  out.assign(static_cast<std::size_t>(obs_dim) * b, 0.0);
  for (std::size_t s = 0; s < b; ++s) {
    const auto& v = next ? batch[s].next_state : batch[s].state;
    if (static_cast<int>(v.size()) != obs_dim)
      throw ShapeError("ddpg: transition state size mismatch");
    for (int j = 0; j < obs_dim; ++j)
      out[static_cast<std::size_t>(j) * b + s] = v[j];
  }
}

}  // namespace

LossGrad critic_loss_grad(const std::vector<ContTransition>& batch,
                          const Network& critic, std::span<const double> targets) {
  if (batch.empty()) throw ConfigError("critic_loss_grad: empty batch");
  if (targets.size() != batch.size())
    throw ShapeError("critic_loss_grad: one target per transition required");
  const int n = static_cast<int>(batch.size());
  const std::size_t b = batch.size();
  const int obs_dim = critic.input_size() - 1;

  thread_local std::vector<double> inputs, upstream;
  transpose_critic_inputs(batch, obs_dim, inputs);
  thread_local Network::BatchTape tape;
  critic.forward_batch(inputs.data(), n, tape);
  const auto& q = tape.activ[critic.layers().size() - 1];

  LossGrad out;
  out.grad = zero_grad(critic.layout());
  const double inv_n = 1.0 / static_cast<double>(n);
  upstream.assign(b, 0.0);
  double loss = 0.0;
  for (int s = 0; s < n; ++s) {
    const double err = q[s] - targets[s];
    loss += err * err * inv_n;
    upstream[s] = 2.0 * err * inv_n;
  }
  if (!std::isfinite(loss))
    throw NumericError("critic_loss_grad: non-finite loss over batch of " +
                       std::to_string(batch.size()));
  critic.backward_batch(inputs.data(), n, tape, upstream.data(), out.grad);
  out.loss = loss;
  return out;
}

ParamGrad actor_grad(const std::vector<ContTransition>& batch, const Network& actor,
                     const Network& critic, double action_scale, double* mean_q) {
  if (batch.empty()) throw ConfigError("actor_grad: empty batch");
  const int n = static_cast<int>(batch.size());
  const std::size_t b = batch.size();
  const int obs_dim = actor.input_size();
  const double inv_n = 1.0 / static_cast<double>(n);

  thread_local std::vector<double> xs, critic_in, ones, critic_in_grad, actor_up;
  transpose_states(batch, obs_dim, false, xs);
  thread_local Network::BatchTape actor_tape, critic_tape;
  actor.forward_batch(xs.data(), n, actor_tape);
  const auto& raw = actor_tape.activ[actor.layers().size() - 1];

  critic_in.assign(static_cast<std::size_t>(obs_dim + 1) * b, 0.0);
  std::copy_n(xs.data(), static_cast<std::size_t>(obs_dim) * b, critic_in.data());
  for (int s = 0; s < n; ++s)
    critic_in[static_cast<std::size_t>(obs_dim) * b + s] = action_scale * raw[s];

  critic.forward_batch(critic_in.data(), n, critic_tape);
  const auto& q = critic_tape.activ[critic.layers().size() - 1];
  if (mean_q != nullptr) {
    double q_sum = 0.0;
    for (int s = 0; s < n; ++s) q_sum += q[s];
    *mean_q = q_sum * inv_n;
  }

  // dQ/da from the critic's input gradient (action slot last); critic
  // parameters are not touched.
  ones.assign(b, 1.0);
  critic_in_grad.assign(static_cast<std::size_t>(obs_dim + 1) * b, 0.0);
  critic.input_gradient_batch(critic_in.data(), n, critic_tape, ones.data(),
                              critic_in_grad.data());

  actor_up.assign(b, 0.0);
  for (int s = 0; s < n; ++s) {
    const double dq_da = critic_in_grad[static_cast<std::size_t>(obs_dim) * b + s];
    if (!std::isfinite(dq_da)) throw NumericError("actor_grad: non-finite dQ/da");
    actor_up[s] = inv_n * action_scale * dq_da;
  }
  ParamGrad grad = zero_grad(actor.layout());
  actor.backward_batch(xs.data(), n, actor_tape, actor_up.data(), grad);
  return grad;
}

ParamVector soft_update(const ParamVector& target, const ParamVector& online,
                        double tau) {
  check_same_layout(target.layout, online.layout, "soft_update");
  ParamVector out = target;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = tau * online.values[i] + (1.0 - tau) * target.values[i];
  return out;
}

void soft_update_in_place(Network& target, const Network& online, double tau) {
  check_same_layout(target.layout(), online.layout(), "soft_update");
  for (std::size_t k = 0; k < target.layers().size(); ++k) {
    auto& tl = target.layers()[k];
    const auto& ol = online.layers()[k];
    for (std::size_t i = 0; i < tl.w.size(); ++i)
      tl.w[i] = tau * ol.w[i] + (1.0 - tau) * tl.w[i];
    for (std::size_t i = 0; i < tl.b.size(); ++i)
      tl.b[i] = tau * ol.b[i] + (1.0 - tau) * tl.b[i];
  }
}

void soft_update_in_place(Network& target, const ParamVector& online, double tau) {
  check_same_layout(target.layout(), online.layout, "soft_update");
  std::size_t off = 0;
  for (auto& tl : target.layers()) {
    for (std::size_t i = 0; i < tl.w.size(); ++i, ++off)
      tl.w[i] = tau * online.values[off] + (1.0 - tau) * tl.w[i];
    for (std::size_t i = 0; i < tl.b.size(); ++i, ++off)
      tl.b[i] = tau * online.values[off] + (1.0 - tau) * tl.b[i];
  }
}

Explorer::Explorer(int id, envs::EnvTag env, const Config& cfg,
                   std::uint64_t run_seed, std::int64_t step_budget,
                   ParameterServer* server, bool pin_c0)
    : id_(id),
      env_(env),
      cfg_(cfg),
      budget_(step_budget),
      server_(server),
      pin_c0_(pin_c0),
      action_scale_(envs::env_spec(env).action_high),
      actor_(make_actor(env, cfg)),
      critic_(make_critic(env, cfg)),
      target_actor_(make_actor(env, cfg)),
      target_critic_(make_critic(env, cfg)),
      actor_opt_(cfg.optimizer == "sgd" ? Optimizer::sgd(cfg.actor_lr)
                                        : Optimizer::adam(cfg.actor_lr)),
      critic_opt_(cfg.optimizer == "sgd" ? Optimizer::sgd(cfg.critic_lr)
                                         : Optimizer::adam(cfg.critic_lr)),
      buf_(cfg.replay_capacity),
      snapshots_(cfg.snapshot_capacity),
      env_rng_(make_rng(run_seed, id, 1)),
      action_rng_(make_rng(run_seed, id, 2)),
      sample_rng_(make_rng(run_seed, id, 3)),
      attract_rng_(make_rng(run_seed, id, 4)),
      y_global_local_(-std::numeric_limits<double>::infinity()) {
  if (cfg.optimizer != "sgd" && cfg.optimizer != "adam")
    throw ConfigError("ddpg: optimizer must be sgd or adam");
  if (!(cfg.tau > 0.0 && cfg.tau <= 1.0))
    throw ConfigError("ddpg: tau must be in (0, 1]");
  Rng init_rng = make_rng(run_seed, id, 0);
  actor_.init_uniform(init_rng);
  critic_.init_uniform(init_rng);
  target_actor_.unflatten(actor_.flatten());
  target_critic_.unflatten(critic_.flatten());
}

void Explorer::learn_step() {
  if (!buf_.sample_into(cfg_.batch_size, sample_rng_, batch_scratch_)) return;
  const auto* batch = &batch_scratch_;

  // Batched form of critic_target over the minibatch.
  const int n = static_cast<int>(batch->size());
  const std::size_t b = batch->size();
  const int obs_dim = actor_.input_size();
  thread_local std::vector<double> nxs, tc_in, targets;
  transpose_states(*batch, obs_dim, true, nxs);
  thread_local Network::BatchTape ta_tape, tc_tape;
  target_actor_.forward_batch(nxs.data(), n, ta_tape);
  const auto& raw = ta_tape.activ[target_actor_.layers().size() - 1];
  tc_in.assign(static_cast<std::size_t>(obs_dim + 1) * b, 0.0);
  std::copy_n(nxs.data(), static_cast<std::size_t>(obs_dim) * b, tc_in.data());
  for (int s = 0; s < n; ++s)
    tc_in[static_cast<std::size_t>(obs_dim) * b + s] = action_scale_ * raw[s];
  target_critic_.forward_batch(tc_in.data(), n, tc_tape);
  const auto& qnext = tc_tape.activ[target_critic_.layers().size() - 1];

  targets.assign(b, 0.0);
  double max_y = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < n; ++s) {
    const auto& t = (*batch)[s];
    targets[s] = t.done ? t.reward : t.reward + cfg_.gamma * qnext[s];
    max_y = std::max(max_y, targets[s]);
  }

  // One server read per learn step; the same record feeds both attractions.
  const ParamVector* star_actor = nullptr;
  const ParamVector* star_critic = nullptr;
  double c_eff = 0.0;
  if (server_ != nullptr && !pin_c0_ && best_ && !best_->is_sentinel()) {
    star_actor = &best_->params[0];
    star_critic = &best_->params[1];
    c_eff = best_->c;
  }

  auto clg = critic_loss_grad(*batch, critic_, targets);
  critic_loss_sum_ += clg.loss;
  hybrid_step_with_optimizer(critic_, clg.grad, star_critic, critic_opt_, c_eff,
                             attract_rng_, cfg_.r_mode);

  double q_mean = 0.0;
  ParamGrad ascent = actor_grad(*batch, actor_, critic_, action_scale_, &q_mean);
  actor_proxy_sum_ += -q_mean;
  ++loss_n_;
  for (auto& g : ascent.values) g = -g;  // optimizer descends the loss -J
  hybrid_step_with_optimizer(actor_, ascent, star_actor, actor_opt_, c_eff,
                             attract_rng_, cfg_.r_mode);

  // Soft target updates, by default toward the agent's own online networks.
  if (cfg_.target_update == TargetUpdate::kGlobalBest && star_actor != nullptr) {
    soft_update_in_place(target_actor_, *star_actor, cfg_.tau);
    soft_update_in_place(target_critic_, *star_critic, cfg_.tau);
  } else {
    soft_update_in_place(target_actor_, actor_, cfg_.tau);
    soft_update_in_place(target_critic_, critic_, cfg_.tau);
  }

  if (server_ != nullptr && cfg_.candidate_rule == CandidateRule::kTdTarget &&
      max_y >= y_global_local_) {
    y_global_local_ = max_y;
    Candidate cand;
    cand.params = params();
    cand.claimed_score = max_y;
    cand.source_agent = id_;
    cand.submit_step = steps_;
    if (server_->submit_candidate(std::move(cand))) submitted_this_episode_ = true;
  }
}

EpisodeStats Explorer::run_episode() {
  EpisodeStats stats;
  stats.episode = ++episode_;
  if (budget_exhausted()) {
    stats.steps_total = steps_;
    return stats;
  }

  snapshots_.snapshot(params());
  const std::int64_t snap_id = snapshots_.next_id() - 1;

  envs::EnvState state = envs::env_reset(env_, env_rng_);
  std::vector<double> obs = envs::observe(state);
  critic_loss_sum_ = 0.0;
  actor_proxy_sum_ = 0.0;
  loss_n_ = 0;
  submitted_this_episode_ = false;
  double ret = 0.0;
  int ep_steps = 0;
  bool natural_end = false;

  while (true) {
    const auto raw = actor_.forward(obs);
    double action = action_scale_ * raw[0] +
                    cfg_.noise_sigma * action_scale_ * gaussian(action_rng_);
    action = std::clamp(action, -action_scale_, action_scale_);

    const auto sr = envs::env_step(state, action);
    ++steps_;
    ++ep_steps;
    ret += sr.reward;

    ContTransition tr;
    tr.state = obs;
    tr.action = {action};
    tr.reward = sr.reward;
    tr.next_state = envs::observe(sr.next);
    tr.done = sr.done;
    tr.snapshot_id = snap_id;
    buf_.push(std::move(tr));

    if (server_ != nullptr && steps_ % cfg_.read_period == 0)
      best_ = server_->read_best();

    if (buf_.size() >= cfg_.warmup && steps_ % cfg_.learn_every == 0) learn_step();

    state = sr.next;
    envs::observe_into(state, obs);
    if (sr.done) {
      natural_end = true;
      break;
    }
    if (budget_exhausted()) break;
  }

  if (server_ != nullptr && natural_end &&
      cfg_.candidate_rule == CandidateRule::kEpisode) {
    if (ret > server_->read_best()->score) {
      Candidate cand;
      cand.params = params();
      cand.claimed_score = ret;
      cand.source_agent = id_;
      cand.submit_step = steps_;
      if (server_->submit_candidate(std::move(cand))) submitted_this_episode_ = true;
    }
  }

  stats.steps_total = steps_;
  stats.env_steps = ep_steps;
  stats.ret = ret;
  stats.loss_mean = loss_n_ > 0 ? critic_loss_sum_ / static_cast<double>(loss_n_) : 0.0;
  stats.actor_loss_proxy =
      loss_n_ > 0 ? actor_proxy_sum_ / static_cast<double>(loss_n_) : 0.0;
  stats.c_seen = best_ ? best_->c : 0.0;
  stats.best_version_seen = best_ ? best_->version : 0;
  stats.truncated_by_budget = !natural_end;
  stats.submitted = submitted_this_episode_;
  return stats;
}

Evaluator::Evaluator(envs::EnvTag env, const Config& cfg)
    : env_(env),
      scratch_actor_(make_actor(env, cfg)),
      action_scale_(envs::env_spec(env).action_high) {}

PolicyEvaluator::Episode Evaluator::run_episode(
    const std::vector<ParamVector>& params, Rng& rng) {
  if (params.empty()) throw ShapeError("ddpg evaluator: empty parameter bundle");
  scratch_actor_.unflatten(params[0]);
  envs::EnvState state = envs::env_reset(env_, rng);
  std::vector<double> obs = envs::observe(state);
  Episode ep;
  while (true) {
    const auto raw = scratch_actor_.forward(obs);
    const double action =
        std::clamp(action_scale_ * raw[0], -action_scale_, action_scale_);
    const auto sr = envs::env_step(state, action);
    ep.ret += sr.reward;
    ++ep.steps;
    state = sr.next;
    envs::observe_into(state, obs);
    if (sr.done) break;
  }
  return ep;
}

}  // namespace ddpg
}  // namespace swarmrl
