#include "swarmrl/supervisor.hpp"

#include "swarmrl/hybrid.hpp"

namespace swarmrl {

Supervisor::Supervisor(const SupervisorConfig& cfg, envs::EnvTag env,
                       PolicyEvaluator& eval, ParameterServer& server,
                       std::uint64_t run_seed, std::function<std::int64_t()> step_clock)
    : cfg_(cfg),
      env_(env),
      eval_(eval),
      server_(server),
      rng_(make_rng(run_seed, 0x5afe, 0x10007)),
      step_clock_(std::move(step_clock)) {
  if (cfg_.episodes_per_candidate <= cfg_.b)
    throw ConfigError("supervisor: episodes_per_candidate must exceed b");
}

void Supervisor::load_candidate(Candidate cand) {
  current_ = std::move(cand.params);
  current_candidate_id_ = cand.id;
  current_source_ = cand.source_agent;
  current_committed_ = false;
  episodes_current_ = 0;
  x_ = 0;
  c_ = 0.0;
  all_sum_ = 0.0;
  all_n_ = 0;
  CandidateRow row;
  row.candidate_id = cand.id;
  row.source_agent = cand.source_agent;
  row.claimed_score = cand.claimed_score;
  row.best_at_load = server_.read_best()->score;
  candidates_.push_back(row);
  current_row_ = candidates_.size() - 1;
}

void Supervisor::adopt_best_record() {
  auto best = server_.read_best();
  if (best->is_sentinel()) {
    current_.reset();
  } else {
    current_ = best->params;
  }
  current_candidate_id_ = -1;
  current_source_ = -1;
  current_committed_ = false;
  episodes_current_ = 0;
  x_ = 0;
  c_ = 0.0;
  all_sum_ = 0.0;
  all_n_ = 0;
}

bool Supervisor::turn() {
  // An in-progress validation is not preempted: a fresh candidate is loaded
  // only once the current one has concluded (committed, dropped after its
  // episode budget, or mere retesting of the established best).
  const bool concluded = !current_ || current_candidate_id_ < 0 ||
                         current_committed_ ||
                         episodes_current_ >= cfg_.episodes_per_candidate;
  if (concluded) {
    if (auto cand = server_.take_candidate()) load_candidate(std::move(*cand));
  }
  if (!current_) return false;

  const auto ep = eval_.run_episode(*current_, rng_);
  env_steps_ += ep.steps;
  ++sup_episode_;
  ++episodes_current_;
  all_sum_ += ep.ret;
  ++all_n_;

  if (current_candidate_id_ >= 0) {
    auto& row = candidates_[current_row_];
    row.eval_mean = (row.eval_mean * row.eval_episodes + ep.ret) / (row.eval_episodes + 1);
    row.eval_episodes += 1;
  }

  const double bar = server_.read_best()->score;
  bool committed_now = false;
  if (ep.ret >= bar) {
    ++x_;
    c_ = schedule_weight(x_, cfg_.b, cfg_.schedule_divisor);
    if (x_ > cfg_.b) {
      const double validated = all_sum_ / static_cast<double>(all_n_);
      auto version = server_.commit_best(*current_, validated, c_, x_,
                                         current_source_, step_clock_(),
                                         current_candidate_id_);
      if (version) {
        committed_now = true;
        current_committed_ = true;
        if (current_candidate_id_ >= 0) {
          auto& row = candidates_[current_row_];
          row.committed = true;
          if (row.committed_version < 0) row.committed_version = *version;
        }
      }
      // A rejected commit means the bar moved; the next episode revalidates
      // against the fresh best score.
    }
  }

  validations_.push_back({sup_episode_, current_candidate_id_, ep.ret, x_, c_,
                          committed_now});

  // Drop a candidate that failed to commit within its validation budget and
  // go back to exercising the current best.
  if (current_candidate_id_ >= 0 && !current_committed_ &&
      episodes_current_ >= cfg_.episodes_per_candidate) {
    adopt_best_record();
  }
  return true;
}

}  // namespace swarmrl
