#include "swarmrl/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace swarmrl {
namespace dqn {

CandidateRule candidate_rule_from_name(std::string_view name) {
  if (name == "episode") return CandidateRule::kEpisode;
  if (name == "td_target") return CandidateRule::kTdTarget;
  throw ConfigError("unknown candidate_rule: " + std::string(name));
}

Network make_qnet(envs::EnvTag env, const Config& cfg) {
  const auto spec = envs::env_spec(env);
  if (spec.n_actions == 0)
    throw ConfigError("dqn requires a discrete-action environment");
  return Network::mlp(spec.obs_dim, cfg.hidden, spec.n_actions, cfg.hidden_act,
                      Activation::kIdentity);
}

double td_target(double reward, std::span<const double> next_obs, bool done,
                 const Network& target_net, double gamma) {
  if (done) return reward;
  const auto q = target_net.forward(next_obs);
  return reward + gamma * *std::max_element(q.begin(), q.end());
}

LossGrad dqn_loss_grad(const std::vector<Transition<int>>& batch,
                       const Network& online, const Network& target, double gamma) {
  if (batch.empty()) throw ConfigError("dqn_loss_grad: empty batch");
  const int n = static_cast<int>(batch.size());
  const int in = online.input_size();
  const int n_out = online.output_size();
  const std::size_t b = static_cast<std::size_t>(n);

  // Feature-major transposes of states and next-states.
  thread_local std::vector<double> xs, nxs, upstream;
  xs.assign(static_cast<std::size_t>(in) * b, 0.0);
  nxs.assign(static_cast<std::size_t>(in) * b, 0.0);
  for (int s = 0; s < n; ++s) {
    if (static_cast<int>(batch[s].state.size()) != in ||
        static_cast<int>(batch[s].next_state.size()) != in)
      throw ShapeError("dqn_loss_grad: transition state size mismatch");
    for (int j = 0; j < in; ++j) {
      xs[static_cast<std::size_t>(j) * b + s] = batch[s].state[j];
      nxs[static_cast<std::size_t>(j) * b + s] = batch[s].next_state[j];
    }
  }

  thread_local Network::BatchTape target_tape, online_tape;
  target.forward_batch(nxs.data(), n, target_tape);
  online.forward_batch(xs.data(), n, online_tape);
  const auto& qhat = target_tape.activ[target.layers().size() - 1];
  const auto& q = online_tape.activ[online.layers().size() - 1];

  LossGrad out;
  out.grad = zero_grad(online.layout());
  out.max_td_target = -std::numeric_limits<double>::infinity();
  const double inv_n = 1.0 / static_cast<double>(n);
  upstream.assign(static_cast<std::size_t>(n_out) * b, 0.0);
  double loss = 0.0;
  for (int s = 0; s < n; ++s) {
    const auto& t = batch[s];
    if (t.action < 0 || t.action >= n_out)
      throw ShapeError("dqn_loss_grad: action index out of range");
    double y = t.reward;
    if (!t.done) {
      double m = qhat[s];
      for (int i = 1; i < n_out; ++i)
        m = std::max(m, qhat[static_cast<std::size_t>(i) * b + s]);
      y += gamma * m;
    }
    out.max_td_target = std::max(out.max_td_target, y);
    const double err = q[static_cast<std::size_t>(t.action) * b + s] - y;
    loss += err * err * inv_n;
    upstream[static_cast<std::size_t>(t.action) * b + s] = 2.0 * err * inv_n;
  }
  if (!std::isfinite(loss))
    throw NumericError("dqn_loss_grad: non-finite loss over batch of " +
                       std::to_string(batch.size()));
  online.backward_batch(xs.data(), n, online_tape, upstream.data(), out.grad);
  out.loss = loss;
  return out;
}

int greedy_action(const Network& net, std::span<const double> obs) {
  const auto q = net.forward(obs);
  int best = 0;
  for (int i = 1; i < static_cast<int>(q.size()); ++i)
    if (q[i] > q[best]) best = i;
  return best;
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
      net_(make_qnet(env, cfg)),
      target_(make_qnet(env, cfg)),
      opt_(cfg.optimizer == "sgd" ? Optimizer::sgd(cfg.lr) : Optimizer::adam(cfg.lr)),
      buf_(cfg.replay_capacity),
      snapshots_(cfg.snapshot_capacity),
      env_rng_(make_rng(run_seed, id, 1)),
      action_rng_(make_rng(run_seed, id, 2)),
      sample_rng_(make_rng(run_seed, id, 3)),
      attract_rng_(make_rng(run_seed, id, 4)),
      y_global_local_(-std::numeric_limits<double>::infinity()) {
  if (cfg.optimizer != "sgd" && cfg.optimizer != "adam")
    throw ConfigError("dqn: optimizer must be sgd or adam");
  Rng init_rng = make_rng(run_seed, id, 0);
  net_.init_uniform(init_rng);
  target_.unflatten(net_.flatten());
}

double Explorer::epsilon_at(std::int64_t step) const {
  const double anneal = std::max<double>(1.0, cfg_.eps_anneal_frac *
                                                  static_cast<double>(budget_));
  if (static_cast<double>(step) >= anneal) return cfg_.eps_final;
  const double frac = static_cast<double>(step) / anneal;
  return cfg_.eps_start + (cfg_.eps_final - cfg_.eps_start) * frac;
}

void Explorer::maybe_submit_td_candidates(double max_td_target) {
  if (server_ == nullptr || cfg_.candidate_rule != CandidateRule::kTdTarget) return;
  if (max_td_target >= y_global_local_) {
    y_global_local_ = max_td_target;
    Candidate cand;
    cand.params = {net_.flatten()};
    cand.claimed_score = max_td_target;
    cand.source_agent = id_;
    cand.submit_step = steps_;
    if (server_->submit_candidate(std::move(cand))) submitted_this_episode_ = true;
  }
}

void Explorer::learn_step() {
  if (!buf_.sample_into(cfg_.batch_size, sample_rng_, batch_scratch_)) return;
  auto lg = dqn_loss_grad(batch_scratch_, net_, target_, cfg_.gamma);
  loss_sum_ += lg.loss;
  ++loss_n_;
  const ParamVector* star = nullptr;
  double c_eff = 0.0;
  if (server_ != nullptr && !pin_c0_ && best_ && !best_->is_sentinel()) {
    star = &best_->params[0];
    c_eff = best_->c;
  }
  hybrid_step_with_optimizer(net_, lg.grad, star, opt_, c_eff, attract_rng_,
                             cfg_.r_mode);
  maybe_submit_td_candidates(lg.max_td_target);
}

EpisodeStats Explorer::run_episode() {
  EpisodeStats stats;
  stats.episode = ++episode_;
  if (budget_exhausted()) {
    stats.steps_total = steps_;
    return stats;
  }

  const auto spec = envs::env_spec(env_);
  snapshots_.snapshot({net_.flatten()});
  const std::int64_t snap_id = snapshots_.next_id() - 1;

  envs::EnvState state = envs::env_reset(env_, env_rng_);
  std::vector<double> obs = envs::observe(state);
  loss_sum_ = 0.0;
  loss_n_ = 0;
  submitted_this_episode_ = false;
  double ret = 0.0;
  int ep_steps = 0;
  bool natural_end = false;

  while (true) {
    const double eps = epsilon_at(steps_);
    int action;
    if (uniform01(action_rng_) < eps) {
      action = static_cast<int>(uniform_index(action_rng_, spec.n_actions));
    } else {
      action = greedy_action(net_, obs);
    }

    const auto sr = envs::env_step(state, action);
    ++steps_;
    ++ep_steps;
    ret += sr.reward;
    envs::observe_into(sr.next, obs_scratch_);

    Transition<int> tr;
    tr.state = obs;
    tr.action = action;
    tr.reward = sr.reward;
    tr.next_state = obs_scratch_;
    tr.done = sr.done;
    tr.snapshot_id = snap_id;
    buf_.push(std::move(tr));

    if (server_ != nullptr && steps_ % cfg_.read_period == 0)
      best_ = server_->read_best();

    if (buf_.size() >= cfg_.warmup && steps_ % cfg_.learn_every == 0) learn_step();

    if (steps_ % cfg_.target_sync_period == 0) target_.unflatten(net_.flatten());

    state = sr.next;
    obs.swap(obs_scratch_);
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
      cand.params = {net_.flatten()};
      cand.claimed_score = ret;
      cand.source_agent = id_;
      cand.submit_step = steps_;
      if (server_->submit_candidate(std::move(cand))) submitted_this_episode_ = true;
    }
  }

  stats.steps_total = steps_;
  stats.env_steps = ep_steps;
  stats.ret = ret;
  stats.epsilon = epsilon_at(steps_);
  stats.loss_mean = loss_n_ > 0 ? loss_sum_ / static_cast<double>(loss_n_) : 0.0;
  stats.c_seen = best_ ? best_->c : 0.0;
  stats.best_version_seen = best_ ? best_->version : 0;
  stats.truncated_by_budget = !natural_end;
  stats.submitted = submitted_this_episode_;
  return stats;
}

Evaluator::Evaluator(envs::EnvTag env, const Config& cfg)
    : env_(env), scratch_(make_qnet(env, cfg)) {}

PolicyEvaluator::Episode Evaluator::run_episode(
    const std::vector<ParamVector>& params, Rng& rng) {
  if (params.empty()) throw ShapeError("dqn evaluator: empty parameter bundle");
  scratch_.unflatten(params[0]);
  envs::EnvState state = envs::env_reset(env_, rng);
  std::vector<double> obs = envs::observe(state);
  Episode ep;
  while (true) {
    const int action = greedy_action(scratch_, obs);
    const auto sr = envs::env_step(state, action);
    ep.ret += sr.reward;
    ++ep.steps;
    state = sr.next;
    envs::observe_into(state, obs);
    if (sr.done) break;
  }
  return ep;
}

}  // namespace dqn
}  // namespace swarmrl
