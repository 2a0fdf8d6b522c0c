#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "swarmrl/ddpg.hpp"
#include "swarmrl/dqn.hpp"
#include "swarmrl/envs.hpp"
#include "swarmrl/paramsrv.hpp"
#include "swarmrl/supervisor.hpp"

namespace swarmrl {
namespace runner {

// Full experiment description. Everything a run needs; seed fully determines
// deterministic-mode runs.
struct RunConfig {
  std::string algo = "dqn";  // dqn | ddpg
  std::string env = "cartpole";
  int n_explorers = 8;
  std::int64_t steps = 100000;  // per explorer
  std::uint64_t seed = 0;
  std::int64_t b = 5;
  double schedule_divisor = 200.0;
  std::string candidate_rule = "episode";     // episode | td_target
  std::string target_update = "own";          // own | global_best (ddpg)
  std::string attraction_r_mode = "per-dim";  // per-dim | scalar
  bool lr_spread = false;  // log-uniform per-explorer rates in [1e-5, 1e-2]
  bool deterministic = false;
  bool supervisor = true;
  bool pin_c0 = false;
  int eval_episodes = 12;       // E: supervisor validation budget per candidate
  int sup_turns_per_cycle = 2;  // deterministic-mode supervisor pacing
  std::int64_t eval_period = 10000;  // probe-eval period, per-agent steps
  int probe_episodes = 100;
  double threshold = 0.0;  // resolved per env when threshold_set is false
  bool threshold_set = false;
  std::string out_dir = "out";
  int threads = 0;  // 0: SWARM_RL_THREADS, else hardware
  std::size_t candidate_queue = 4;

  dqn::Config dqn;
  ddpg::Config ddpg;
};

// Throws ConfigError listing every offending field. Resolves derived
// defaults (threshold, per-algo sub-config wiring).
void validate(RunConfig& cfg);

// Per-explorer learning rates: log-uniform spread over [1e-5, 1e-2] at
// fraction (i + 0.5) / n when lr_spread is on; base rates otherwise.
double spread_rate(double lo, double hi, int i, int n);

struct AgentEpisodeRow {
  int agent = 0;
  int episode = 0;
  std::int64_t steps = 0;  // cumulative agent steps at episode end
  double ret = 0.0;
  double epsilon = 0.0;  // dqn only
  double loss_mean = 0.0;
  double c_seen = 0.0;
  std::int64_t best_version_seen = 0;
  double actor_loss_proxy = 0.0;  // ddpg only
  double critic_loss = 0.0;       // ddpg only
};

struct ProbeRow {
  std::int64_t step_clock = 0;  // per-agent step clock
  bool has_params = false;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  int episodes = 0;
};

struct RunReport {
  RunConfig config;
  std::vector<AgentEpisodeRow> episodes;
  std::vector<ValidationRow> validations;
  std::vector<CandidateRow> candidates;
  std::vector<CommitEntry> commits;
  std::vector<ProbeRow> probes;
  // Final best committed parameters (empty when nothing committed).
  std::vector<ParamVector> best_params;
  std::vector<std::int64_t> agent_steps;
  std::int64_t supervisor_steps = 0;
  std::int64_t submissions = 0;
  std::int64_t rejected_submissions = 0;
  double final_eval_mean = 0.0;
  bool final_eval_valid = false;
  std::int64_t steps_to_threshold = -1;  // -1: never reached
  double threshold = 0.0;
  double wall_seconds = 0.0;
  bool baseline = false;
};

// Full distributed run (explorers + supervisor + parameter server).
RunReport run(const RunConfig& cfg);

// Vanilla single-agent baseline: one explorer, no server, probe evals on its
// own current parameters.
RunReport run_baseline(const RunConfig& cfg);

struct AblationRow {
  int n_explorers = 0;
  std::uint64_t seed = 0;
  std::int64_t steps_to_threshold = -1;
  double final_eval_mean = 0.0;
};

struct AblationReport {
  RunConfig base;
  std::vector<int> counts;
  std::vector<std::uint64_t> seeds;
  std::vector<AblationRow> rows;
  std::vector<RunReport> reports;
};

// Runs each explorer count with matched seeds, per-agent budgets unchanged.
AblationReport ablation(const RunConfig& base, const std::vector<int>& counts,
                        const std::vector<std::uint64_t>& seeds);

std::vector<std::string> emit_csv(const RunReport& report, const std::string& dir);
std::string emit_plot(const RunReport& report, const std::string& dir);
std::vector<std::string> emit_csv(const AblationReport& report, const std::string& dir);
std::string emit_plot(const AblationReport& report, const std::string& dir);

// Greedy evaluation of a parameter bundle: n_episodes with the probe rng
// stream (seed, probe_salt). Used for probes and final scoring.
struct EvalStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  int episodes = 0;
};
EvalStats evaluate_params(PolicyEvaluator& eval, const std::vector<ParamVector>& params,
                          int n_episodes, std::uint64_t seed, std::uint64_t salt);

}  // namespace runner
}  // namespace swarmrl
