#include "swarmrl/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "swarmrl/svg.hpp"

namespace swarmrl {
namespace runner {

namespace {

constexpr std::uint64_t kProbeSalt = 0xE7A1;

int resolve_threads(const RunConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  if (const char* env = std::getenv("SWARM_RL_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Uniform face over the two explorer types for the scheduling loops.
class AgentAdapter {
 public:
  virtual ~AgentAdapter() = default;
  virtual AgentEpisodeRow run_episode_impl() = 0;
  virtual bool done() const = 0;
  virtual std::vector<ParamVector> params() const = 0;

  void run_episode() {
    AgentEpisodeRow row = run_episode_impl();
    row.agent = id;
    rows.push_back(row);
    steps.store(row.steps, std::memory_order_relaxed);
    episodes.fetch_add(1, std::memory_order_relaxed);
  }

  int id = 0;
  std::atomic<std::int64_t> steps{0};
  std::atomic<std::int64_t> episodes{0};
  std::vector<AgentEpisodeRow> rows;
};

class DqnAgent : public AgentAdapter {
 public:
  DqnAgent(int agent_id, envs::EnvTag env, const dqn::Config& cfg,
           std::uint64_t seed, std::int64_t budget, ParameterServer* server,
           bool pin_c0)
      : explorer_(agent_id, env, cfg, seed, budget, server, pin_c0) {
    id = agent_id;
  }

  AgentEpisodeRow run_episode_impl() override {
    const auto s = explorer_.run_episode();
    AgentEpisodeRow row;
    row.episode = s.episode;
    row.steps = s.steps_total;
    row.ret = s.ret;
    row.epsilon = s.epsilon;
    row.loss_mean = s.loss_mean;
    row.c_seen = s.c_seen;
    row.best_version_seen = s.best_version_seen;
    return row;
  }

  bool done() const override { return explorer_.budget_exhausted(); }
  std::vector<ParamVector> params() const override { return {explorer_.params()}; }
  dqn::Explorer& explorer() { return explorer_; }

 private:
  dqn::Explorer explorer_;
};

class DdpgAgent : public AgentAdapter {
 public:
  DdpgAgent(int agent_id, envs::EnvTag env, const ddpg::Config& cfg,
            std::uint64_t seed, std::int64_t budget, ParameterServer* server,
            bool pin_c0)
      : explorer_(agent_id, env, cfg, seed, budget, server, pin_c0) {
    id = agent_id;
  }

  AgentEpisodeRow run_episode_impl() override {
    const auto s = explorer_.run_episode();
    AgentEpisodeRow row;
    row.episode = s.episode;
    row.steps = s.steps_total;
    row.ret = s.ret;
    row.epsilon = 0.0;
    row.loss_mean = s.loss_mean;
    row.c_seen = s.c_seen;
    row.best_version_seen = s.best_version_seen;
    row.actor_loss_proxy = s.actor_loss_proxy;
    row.critic_loss = s.loss_mean;
    return row;
  }

  bool done() const override { return explorer_.budget_exhausted(); }
  std::vector<ParamVector> params() const override { return explorer_.params(); }
  ddpg::Explorer& explorer() { return explorer_; }

 private:
  ddpg::Explorer explorer_;
};

struct Problems {
  std::vector<std::string> items;
  void add(const std::string& s) { items.push_back(s); }
};

}  // namespace

double spread_rate(double lo, double hi, int i, int n) {
  if (n <= 1) return std::sqrt(lo * hi);
  const double frac = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * frac);
}

void validate(RunConfig& cfg) {
  Problems p;
  if (cfg.algo != "dqn" && cfg.algo != "ddpg")
    p.add("algo: must be dqn or ddpg, got '" + cfg.algo + "'");
  envs::EnvTag tag = envs::EnvTag::kCartPole;
  bool env_ok = true;
  try {
    tag = envs::env_from_name(cfg.env);
  } catch (const ConfigError&) {
    env_ok = false;
    p.add("env: unknown tag '" + cfg.env + "'");
  }
  if (env_ok && cfg.algo == "dqn" && envs::env_spec(tag).n_actions == 0)
    p.add("env: dqn requires a discrete-action environment, got '" + cfg.env + "'");
  if (env_ok && cfg.algo == "ddpg" && envs::env_spec(tag).n_actions != 0)
    p.add("env: ddpg requires a continuous-action environment, got '" + cfg.env + "'");
  if (cfg.n_explorers < 1) p.add("n_explorers: must be >= 1");
  if (cfg.steps < 1) p.add("steps: must be >= 1");
  if (cfg.b < 1) p.add("b: must be >= 1");
  if (!(cfg.schedule_divisor > 0.0)) p.add("schedule_divisor: must be > 0");
  if (cfg.eval_episodes <= cfg.b)
    p.add("eval_episodes: must exceed b so candidates can commit");
  if (cfg.sup_turns_per_cycle < 1) p.add("sup_turns_per_cycle: must be >= 1");
  if (cfg.eval_period < 1) p.add("eval_period: must be >= 1");
  if (cfg.probe_episodes < 1) p.add("probe_episodes: must be >= 1");
  if (cfg.candidate_queue < 1) p.add("candidate_queue: must be >= 1");
  if (cfg.candidate_rule != "episode" && cfg.candidate_rule != "td_target")
    p.add("candidate_rule: must be episode or td_target");
  if (cfg.target_update != "own" && cfg.target_update != "global_best")
    p.add("target_update: must be own or global_best");
  if (cfg.attraction_r_mode != "per-dim" && cfg.attraction_r_mode != "scalar")
    p.add("attraction_r_mode: must be per-dim or scalar");
  if (!(cfg.dqn.lr > 0.0)) p.add("dqn.lr: must be > 0");
  if (!(cfg.ddpg.actor_lr > 0.0)) p.add("ddpg.actor_lr: must be > 0");
  if (!(cfg.ddpg.critic_lr > 0.0)) p.add("ddpg.critic_lr: must be > 0");
  if (!(cfg.dqn.gamma >= 0.0 && cfg.dqn.gamma <= 1.0)) p.add("dqn.gamma: must be in [0,1]");
  if (!(cfg.ddpg.gamma >= 0.0 && cfg.ddpg.gamma <= 1.0)) p.add("ddpg.gamma: must be in [0,1]");
  if (!(cfg.ddpg.tau > 0.0 && cfg.ddpg.tau <= 1.0)) p.add("ddpg.tau: must be in (0,1]");
  if (cfg.dqn.batch_size < 1) p.add("dqn.batch_size: must be >= 1");
  if (cfg.ddpg.batch_size < 1) p.add("ddpg.batch_size: must be >= 1");
  if (cfg.dqn.learn_every < 1) p.add("dqn.learn_every: must be >= 1");
  if (cfg.ddpg.learn_every < 1) p.add("ddpg.learn_every: must be >= 1");
  if (cfg.dqn.read_period < 1) p.add("dqn.read_period: must be >= 1");
  if (cfg.ddpg.read_period < 1) p.add("ddpg.read_period: must be >= 1");

  if (!p.items.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& s : p.items) msg += "\n  - " + s;
    throw ConfigError(msg);
  }

  // Derived defaults and sub-config wiring.
  if (!cfg.threshold_set) {
    if (cfg.env == "cartpole") {
      cfg.threshold = 195.0;
      cfg.threshold_set = true;
    } else if (cfg.env == "acrobot") {
      cfg.threshold = -100.0;
      cfg.threshold_set = true;
    }
    // pendulum: no default threshold; steps_to_threshold stays -1.
  }
  cfg.dqn.candidate_rule = dqn::candidate_rule_from_name(cfg.candidate_rule);
  cfg.ddpg.candidate_rule = dqn::candidate_rule_from_name(cfg.candidate_rule);
  cfg.dqn.r_mode = attraction_r_mode_from_name(cfg.attraction_r_mode);
  cfg.ddpg.r_mode = attraction_r_mode_from_name(cfg.attraction_r_mode);
  cfg.ddpg.target_update = ddpg::target_update_from_name(cfg.target_update);
}

EvalStats evaluate_params(PolicyEvaluator& eval,
                          const std::vector<ParamVector>& params, int n_episodes,
                          std::uint64_t seed, std::uint64_t salt) {
  Rng rng = make_rng(seed, salt, 0xBEEF);
  EvalStats st;
  st.min = std::numeric_limits<double>::infinity();
  st.max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (int i = 0; i < n_episodes; ++i) {
    const auto ep = eval.run_episode(params, rng);
    sum += ep.ret;
    st.min = std::min(st.min, ep.ret);
    st.max = std::max(st.max, ep.ret);
  }
  st.episodes = n_episodes;
  st.mean = sum / static_cast<double>(n_episodes);
  return st;
}

namespace {

struct RunContext {
  RunConfig cfg;
  envs::EnvTag env;
  std::unique_ptr<ParameterServer> server;
  std::vector<std::unique_ptr<AgentAdapter>> agents;
  std::unique_ptr<PolicyEvaluator> sup_eval;
  std::unique_ptr<PolicyEvaluator> probe_eval;
  std::unique_ptr<Supervisor> supervisor;
  bool use_server = true;
};

std::unique_ptr<AgentAdapter> make_agent(const RunConfig& cfg, envs::EnvTag env,
                                         int i, ParameterServer* server) {
  if (cfg.algo == "dqn") {
    dqn::Config c = cfg.dqn;
    if (cfg.lr_spread) c.lr = spread_rate(1e-5, 1e-2, i, cfg.n_explorers);
    if (cfg.n_explorers > 1)
      c.eps_final = 0.01 + (0.2 - 0.01) * static_cast<double>(i) /
                               static_cast<double>(cfg.n_explorers - 1);
    return std::make_unique<DqnAgent>(i, env, c, cfg.seed, cfg.steps, server,
                                      cfg.pin_c0);
  }
  ddpg::Config c = cfg.ddpg;
  if (cfg.lr_spread) {
    c.actor_lr = spread_rate(1e-5, 1e-2, i, cfg.n_explorers);
    c.critic_lr = std::min(10.0 * c.actor_lr, 1e-2);
  }
  if (cfg.n_explorers > 1)
    c.noise_sigma = 0.05 + (0.3 - 0.05) * static_cast<double>(i) /
                               static_cast<double>(cfg.n_explorers - 1);
  return std::make_unique<DdpgAgent>(i, env, c, cfg.seed, cfg.steps, server,
                                     cfg.pin_c0);
}

RunContext build_context(const RunConfig& validated, bool with_server) {
  RunContext ctx;
  ctx.cfg = validated;
  ctx.env = envs::env_from_name(validated.env);
  ctx.use_server = with_server;
  if (with_server) ctx.server = std::make_unique<ParameterServer>(validated.candidate_queue);
  for (int i = 0; i < validated.n_explorers; ++i)
    ctx.agents.push_back(make_agent(validated, ctx.env, i, ctx.server.get()));

  if (validated.algo == "dqn") {
    ctx.sup_eval = std::make_unique<dqn::Evaluator>(ctx.env, validated.dqn);
    ctx.probe_eval = std::make_unique<dqn::Evaluator>(ctx.env, validated.dqn);
  } else {
    ctx.sup_eval = std::make_unique<ddpg::Evaluator>(ctx.env, validated.ddpg);
    ctx.probe_eval = std::make_unique<ddpg::Evaluator>(ctx.env, validated.ddpg);
  }

  if (with_server && validated.supervisor) {
    SupervisorConfig sc;
    sc.b = validated.b;
    sc.schedule_divisor = validated.schedule_divisor;
    sc.episodes_per_candidate = validated.eval_episodes;
    auto clock = [agents = &ctx.agents]() {
      std::int64_t total = 0;
      for (const auto& a : *agents) total += a->steps.load(std::memory_order_relaxed);
      return total;
    };
    ctx.supervisor = std::make_unique<Supervisor>(sc, ctx.env, *ctx.sup_eval,
                                                  *ctx.server, validated.seed, clock);
  }
  return ctx;
}

// Parameters the probes should evaluate right now, or nullopt when there is
// nothing meaningful to grade yet.
std::optional<std::vector<ParamVector>> probe_params(const RunContext& ctx,
                                                     bool agents_quiescent) {
  if (ctx.use_server && ctx.cfg.supervisor) {
    auto best = ctx.server->read_best();
    if (best->is_sentinel()) return std::nullopt;
    return best->params;
  }
  // No supervisor: grade explorer 0's current parameters. Only safe when no
  // explorer thread is running.
  if (ctx.cfg.deterministic || agents_quiescent) return ctx.agents[0]->params();
  return std::nullopt;
}

RunReport finalize_report(RunContext& ctx, std::vector<ProbeRow> probes,
                          std::int64_t steps_to_threshold, double wall_seconds,
                          bool baseline) {
  RunReport rep;
  rep.config = ctx.cfg;
  rep.baseline = baseline;
  for (auto& a : ctx.agents) {
    rep.agent_steps.push_back(a->steps.load());
    for (const auto& row : a->rows) rep.episodes.push_back(row);
  }
  if (ctx.supervisor) {
    rep.validations = ctx.supervisor->validation_log();
    rep.candidates = ctx.supervisor->candidate_ledger();
    rep.supervisor_steps = ctx.supervisor->env_steps();
  }
  if (ctx.server) {
    rep.commits = ctx.server->commit_log();
    rep.submissions = ctx.server->submissions();
    rep.rejected_submissions = ctx.server->rejected_submissions();
    auto best = ctx.server->read_best();
    if (!best->is_sentinel()) rep.best_params = best->params;
  } else {
    rep.best_params = ctx.agents[0]->params();
  }
  rep.probes = std::move(probes);
  rep.steps_to_threshold = steps_to_threshold;
  rep.threshold = ctx.cfg.threshold_set ? ctx.cfg.threshold
                                        : std::numeric_limits<double>::quiet_NaN();
  if (!rep.probes.empty() && rep.probes.back().has_params) {
    rep.final_eval_mean = rep.probes.back().mean;
    rep.final_eval_valid = true;
  }
  rep.wall_seconds = wall_seconds;

  // Accounting: every explorer must have consumed its budget exactly.
  for (std::size_t i = 0; i < rep.agent_steps.size(); ++i) {
    if (rep.agent_steps[i] != ctx.cfg.steps)
      throw NumericError("step accounting mismatch for agent " + std::to_string(i) +
                         ": " + std::to_string(rep.agent_steps[i]) + " vs budget " +
                         std::to_string(ctx.cfg.steps));
  }
  return rep;
}

RunReport run_scheduled(RunConfig cfg, bool with_server) {
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  RunContext ctx = build_context(cfg, with_server);

  std::vector<ProbeRow> probes;
  std::int64_t steps_to_threshold = -1;
  std::int64_t next_probe = cfg.eval_period;

  auto mean_clock = [&ctx]() {
    std::int64_t total = 0;
    for (const auto& a : ctx.agents) total += a->steps.load(std::memory_order_relaxed);
    return total / static_cast<std::int64_t>(ctx.agents.size());
  };

  auto do_probe = [&](std::int64_t clock, bool agents_quiescent) {
    ProbeRow row;
    row.step_clock = clock;
    auto params = probe_params(ctx, agents_quiescent);
    if (params) {
      const auto st = evaluate_params(*ctx.probe_eval, *params, cfg.probe_episodes,
                                      cfg.seed, kProbeSalt);
      row.has_params = true;
      row.mean = st.mean;
      row.min = st.min;
      row.max = st.max;
      row.episodes = st.episodes;
      if (steps_to_threshold < 0 && cfg.threshold_set && st.mean >= cfg.threshold)
        steps_to_threshold = clock;
    }
    probes.push_back(row);
  };

  const bool threaded = !cfg.deterministic && resolve_threads(cfg) > 1 &&
                        static_cast<int>(ctx.agents.size()) > 1;

  if (!threaded) {
    // Fixed round-robin: one episode per agent per cycle, then supervisor
    // turns, then any due probes.
    bool all_done = false;
    while (!all_done) {
      all_done = true;
      for (auto& a : ctx.agents) {
        if (!a->done()) a->run_episode();
        if (!a->done()) all_done = false;
      }
      if (ctx.supervisor) {
        for (int k = 0; k < cfg.sup_turns_per_cycle; ++k) ctx.supervisor->turn();
      }
      while (next_probe <= mean_clock() && next_probe < cfg.steps) {
        do_probe(next_probe, true);
        next_probe += cfg.eval_period;
      }
    }
  } else {
    const int n_threads = std::min<int>(resolve_threads(cfg),
                                        static_cast<int>(ctx.agents.size()));
    std::atomic<bool> stop_supervisor{false};
    std::vector<std::thread> workers;
    for (int t = 0; t < n_threads; ++t) {
      workers.emplace_back([&, t]() {
        bool active = true;
        while (active) {
          active = false;
          for (std::size_t i = t; i < ctx.agents.size();
               i += static_cast<std::size_t>(n_threads)) {
            if (!ctx.agents[i]->done()) {
              ctx.agents[i]->run_episode();
              active = true;
            }
          }
        }
      });
    }
    std::thread sup_thread;
    if (ctx.supervisor) {
      sup_thread = std::thread([&]() {
        while (!stop_supervisor.load(std::memory_order_relaxed)) {
          // Pace validation against explorer progress so the confidence
          // weight grows at the same order as in deterministic mode.
          std::int64_t agent_eps = 0;
          for (const auto& a : ctx.agents)
            agent_eps += a->episodes.load(std::memory_order_relaxed);
          const std::int64_t allowance =
              cfg.sup_turns_per_cycle *
              (agent_eps / static_cast<std::int64_t>(ctx.agents.size()) + 1);
          if (ctx.supervisor->episodes() >= allowance || !ctx.supervisor->turn())
            std::this_thread::sleep_for(std::chrono::microseconds(200));
        }
      });
    }
    while (true) {
      bool all_done = true;
      for (const auto& a : ctx.agents) all_done = all_done && a->done();
      while (next_probe <= mean_clock() && next_probe < cfg.steps) {
        do_probe(next_probe, false);
        next_probe += cfg.eval_period;
      }
      if (all_done) break;
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    for (auto& w : workers) w.join();
    stop_supervisor.store(true);
    if (sup_thread.joinable()) sup_thread.join();
  }

  // Let the supervisor finish validating in-flight candidates, then grade.
  if (ctx.supervisor) {
    const int drain_cap = 4 * cfg.eval_episodes;
    for (int k = 0; k < drain_cap; ++k)
      if (!ctx.supervisor->turn()) break;
  }
  while (next_probe < cfg.steps) {
    do_probe(next_probe, true);
    next_probe += cfg.eval_period;
  }
  do_probe(cfg.steps, true);

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return finalize_report(ctx, std::move(probes), steps_to_threshold, wall,
                         !with_server);
}

}  // namespace

RunReport run(const RunConfig& cfg) { return run_scheduled(cfg, true); }

RunReport run_baseline(const RunConfig& cfg) {
  RunConfig c = cfg;
  c.n_explorers = 1;
  c.supervisor = false;
  c.pin_c0 = true;
  c.lr_spread = false;
  c.deterministic = true;
  return run_scheduled(c, false);
}

AblationReport ablation(const RunConfig& base, const std::vector<int>& counts,
                        const std::vector<std::uint64_t>& seeds) {
  if (counts.empty()) throw ConfigError("ablation: explorer counts must be nonempty");
  if (seeds.empty()) throw ConfigError("ablation: seed list must be nonempty");
  AblationReport rep;
  rep.base = base;
  rep.counts = counts;
  rep.seeds = seeds;
  for (int count : counts) {
    for (std::uint64_t seed : seeds) {
      RunConfig c = base;
      c.n_explorers = count;
      c.seed = seed;
      RunReport r = run(c);
      rep.rows.push_back({count, seed, r.steps_to_threshold,
                          r.final_eval_valid ? r.final_eval_mean
                                             : std::numeric_limits<double>::quiet_NaN()});
      rep.reports.push_back(std::move(r));
    }
  }
  return rep;
}

namespace {

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write: " + path);
  f << contents;
}

std::string summary_row(const RunReport& r) {
  std::ostringstream os;
  os << r.config.seed << "," << r.config.algo << "," << r.config.env << ","
     << r.config.n_explorers << ","
     << (r.final_eval_valid ? fmt_g(r.final_eval_mean) : "nan") << ","
     << r.steps_to_threshold << "\n";
  return os.str();
}

}  // namespace

std::vector<std::string> emit_csv(const RunReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir);
  std::vector<std::string> paths;

  const bool ddpg_run = report.config.algo == "ddpg";
  for (int a = 0; a < report.config.n_explorers; ++a) {
    std::ostringstream os;
    os << "episode,steps,return,epsilon,loss_mean,c_seen,best_version_seen";
    if (ddpg_run) os << ",actor_loss_proxy,critic_loss";
    os << "\n";
    for (const auto& row : report.episodes) {
      if (row.agent != a) continue;
      os << row.episode << "," << row.steps << "," << fmt_g(row.ret) << ","
         << fmt_g(row.epsilon) << "," << fmt_g(row.loss_mean) << ","
         << fmt_g(row.c_seen) << "," << row.best_version_seen;
      if (ddpg_run)
        os << "," << fmt_g(row.actor_loss_proxy) << "," << fmt_g(row.critic_loss);
      os << "\n";
    }
    const std::string path = dir + "/agent_" + std::to_string(a) + ".csv";
    write_file(path, os.str());
    paths.push_back(path);
  }

  {
    std::ostringstream os;
    os << "version,step,score,c,x,source_agent\n";
    for (const auto& e : report.commits)
      os << e.version << "," << e.step << "," << fmt_g(e.score) << ","
         << fmt_g(e.c) << "," << e.x << "," << e.source_agent << "\n";
    const std::string path = dir + "/server_log.csv";
    write_file(path, os.str());
    paths.push_back(path);
  }
  {
    std::ostringstream os;
    os << "sup_episode,candidate_id,return,x,c,committed\n";
    for (const auto& v : report.validations)
      os << v.sup_episode << "," << v.candidate_id << "," << fmt_g(v.ret) << ","
         << v.x << "," << fmt_g(v.c) << "," << (v.committed ? 1 : 0) << "\n";
    const std::string path = dir + "/supervisor.csv";
    write_file(path, os.str());
    paths.push_back(path);
  }
  {
    std::ostringstream os;
    os << "candidate_id,source_agent,claimed_score,best_at_load,eval_episodes,"
          "eval_mean,committed,committed_version\n";
    for (const auto& c : report.candidates)
      os << c.candidate_id << "," << c.source_agent << "," << fmt_g(c.claimed_score)
         << "," << fmt_g(c.best_at_load) << "," << c.eval_episodes << ","
         << fmt_g(c.eval_mean) << "," << (c.committed ? 1 : 0) << ","
         << c.committed_version << "\n";
    const std::string path = dir + "/candidates.csv";
    write_file(path, os.str());
    paths.push_back(path);
  }
  {
    std::ostringstream os;
    os << "step_clock,has_params,mean,min,max,episodes\n";
    for (const auto& e : report.probes)
      os << e.step_clock << "," << (e.has_params ? 1 : 0) << ","
         << (e.has_params ? fmt_g(e.mean) : "nan") << ","
         << (e.has_params ? fmt_g(e.min) : "nan") << ","
         << (e.has_params ? fmt_g(e.max) : "nan") << "," << e.episodes << "\n";
    const std::string path = dir + "/evals.csv";
    write_file(path, os.str());
    paths.push_back(path);
  }
  {
    std::ostringstream os;
    os << "seed,algo,env,n_explorers,final_eval_mean,steps_to_threshold\n";
    os << summary_row(report);
    const std::string path = dir + "/summary.csv";
    write_file(path, os.str());
    paths.push_back(path);
  }
  return paths;
}

namespace {

// Bins one agent's episode returns onto a fixed step grid, carrying the last
// value across empty bins.
std::vector<double> bin_agent_returns(const std::vector<AgentEpisodeRow>& rows,
                                      int agent, std::int64_t budget, int n_bins) {
  std::vector<double> sums(n_bins, 0.0);
  std::vector<int> counts(n_bins, 0);
  for (const auto& r : rows) {
    if (r.agent != agent) continue;
    int bin = static_cast<int>((r.steps - 1) * n_bins / budget);
    bin = std::clamp(bin, 0, n_bins - 1);
    sums[bin] += r.ret;
    counts[bin] += 1;
  }
  std::vector<double> out(n_bins, std::numeric_limits<double>::quiet_NaN());
  double last = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < n_bins; ++i) {
    if (counts[i] > 0) last = sums[i] / counts[i];
    out[i] = last;
  }
  return out;
}

svg::Band band_over_agents(const RunReport& rep, const std::string& label,
                           const std::string& color, int n_bins) {
  const std::int64_t budget = rep.config.steps;
  std::vector<std::vector<double>> per_agent;
  for (int a = 0; a < rep.config.n_explorers; ++a)
    per_agent.push_back(bin_agent_returns(rep.episodes, a, budget, n_bins));
  svg::Band band;
  band.label = label;
  band.color = color;
  for (int i = 0; i < n_bins; ++i) {
    double sum = 0.0, lo = 0.0, hi = 0.0;
    int n = 0;
    for (const auto& series : per_agent) {
      const double v = series[i];
      if (std::isnan(v)) continue;
      if (n == 0) {
        lo = hi = v;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      sum += v;
      ++n;
    }
    if (n == 0) continue;
    band.x.push_back((static_cast<double>(i) + 0.5) * budget / n_bins);
    band.mean.push_back(sum / n);
    band.lo.push_back(lo);
    band.hi.push_back(hi);
  }
  return band;
}

svg::Series supervisor_series(const RunReport& rep, const std::string& label,
                              const std::string& color) {
  svg::Series s;
  s.label = label;
  s.color = color;
  for (const auto& v : rep.validations)
    s.pts.emplace_back(static_cast<double>(v.sup_episode), v.ret);
  return s;
}

}  // namespace

std::string emit_plot(const RunReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir);

  svg::Figure fig;
  svg::Panel returns;
  returns.title = report.config.algo + " on " + report.config.env;
  returns.xlabel = "environment steps per agent";
  returns.ylabel = "episode return";
  if (!report.episodes.empty()) {
    const std::string label = std::to_string(report.config.n_explorers) +
                              (report.config.n_explorers == 1 ? " explorer" : " explorers");
    returns.bands.push_back(band_over_agents(report, label, svg::kPalette[0], 60));
  }
  svg::Panel sup;
  sup.title = "supervise agent score";
  sup.xlabel = "validation episode";
  sup.ylabel = "greedy return";
  if (!report.validations.empty())
    sup.series.push_back(supervisor_series(report, "validation returns", svg::kPalette[1]));
  fig.panels = {returns, sup};

  const std::string path = dir + "/learning_curves.svg";
  svg::write_svg(fig, path);
  return path;
}

std::vector<std::string> emit_csv(const AblationReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir);
  std::vector<std::string> paths;
  {
    std::ostringstream os;
    os << "seed,algo,env,n_explorers,final_eval_mean,steps_to_threshold\n";
    for (const auto& r : report.reports) os << summary_row(r);
    const std::string path = dir + "/summary.csv";
    write_file(path, os.str());
    paths.push_back(path);
  }
  for (const auto& r : report.reports) {
    const std::string sub = dir + "/run_n" + std::to_string(r.config.n_explorers) +
                            "_s" + std::to_string(r.config.seed);
    auto sub_paths = emit_csv(r, sub);
    paths.insert(paths.end(), sub_paths.begin(), sub_paths.end());
  }
  return paths;
}

std::string emit_plot(const AblationReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir);

  svg::Figure fig;
  svg::Panel returns;
  returns.title = report.base.algo + " on " + report.base.env + " (explorer-count ablation)";
  returns.xlabel = "environment steps per agent";
  returns.ylabel = "episode return";
  svg::Panel sup;
  sup.title = "supervise agent score";
  sup.xlabel = "validation episode";
  sup.ylabel = "greedy return";

  // One band per explorer count: mean curve per seed, banded across seeds.
  const int n_bins = 60;
  for (std::size_t ci = 0; ci < report.counts.size(); ++ci) {
    const int count = report.counts[ci];
    std::vector<std::vector<double>> per_seed;
    const RunReport* first_report = nullptr;
    for (const auto& r : report.reports) {
      if (r.config.n_explorers != count) continue;
      if (first_report == nullptr) first_report = &r;
      svg::Band b = band_over_agents(r, "", "", n_bins);
      // Use the per-seed mean curve re-gridded onto the bin index.
      std::vector<double> grid(n_bins, std::numeric_limits<double>::quiet_NaN());
      for (std::size_t k = 0; k < b.x.size(); ++k) {
        const int bin = std::clamp(
            static_cast<int>(b.x[k] * n_bins / report.base.steps), 0, n_bins - 1);
        grid[bin] = b.mean[k];
      }
      per_seed.push_back(std::move(grid));
    }
    if (per_seed.empty()) continue;
    svg::Band band;
    band.label = std::to_string(count) + (count == 1 ? " explorer" : " explorers");
    band.color = svg::kPalette[ci % 8];
    for (int i = 0; i < n_bins; ++i) {
      double sum = 0.0, lo = 0.0, hi = 0.0;
      int n = 0;
      for (const auto& series : per_seed) {
        const double v = series[i];
        if (std::isnan(v)) continue;
        if (n == 0) {
          lo = hi = v;
        } else {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        sum += v;
        ++n;
      }
      if (n == 0) continue;
      band.x.push_back((static_cast<double>(i) + 0.5) * report.base.steps / n_bins);
      band.mean.push_back(sum / n);
      band.lo.push_back(lo);
      band.hi.push_back(hi);
    }
    returns.bands.push_back(std::move(band));
    if (first_report != nullptr && !first_report->validations.empty())
      sup.series.push_back(supervisor_series(
          *first_report, std::to_string(count) + " explorers", svg::kPalette[ci % 8]));
  }

  fig.panels = {returns, sup};
  const std::string path = dir + "/learning_curves.svg";
  svg::write_svg(fig, path);
  return path;
}

}  // namespace runner
}  // namespace swarmrl
