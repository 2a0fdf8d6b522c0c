#include <cstdio>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "swarmrl/nn.hpp"
#include "swarmrl/runner.hpp"

namespace {

using swarmrl::runner::RunConfig;

void add_common_options(CLI::App* cmd, RunConfig& cfg, std::string& config_path) {
  cmd->add_option("--algo", cfg.algo, "Algorithm: dqn or ddpg");
  cmd->add_option("--env", cfg.env, "Environment: cartpole, acrobot or pendulum");
  cmd->add_option("--steps", cfg.steps, "Environment steps per explorer");
  cmd->add_option("--seed", cfg.seed, "Master seed");
  cmd->add_option("--b", cfg.b, "Supervisor success threshold b");
  cmd->add_option("--schedule-divisor", cfg.schedule_divisor,
                  "Divisor in c = arctan(x / (divisor * b))");
  cmd->add_option("--candidate-rule", cfg.candidate_rule,
                  "Candidate submission rule: episode or td_target");
  cmd->add_option("--target-update", cfg.target_update,
                  "DDPG target update: own or global_best");
  cmd->add_option("--attraction-r-mode", cfg.attraction_r_mode,
                  "Attraction randomness: per-dim or scalar");
  cmd->add_flag("--lr-spread,!--no-lr-spread", cfg.lr_spread,
                "Spread per-explorer learning rates log-uniformly in [1e-5, 1e-2]");
  cmd->add_flag("--deterministic", cfg.deterministic,
                "Single-worker round-robin scheduling; byte-identical outputs");
  cmd->add_flag("--pin-c0", cfg.pin_c0,
                "Force the attraction weight to zero (ablation)");
  cmd->add_flag("--supervisor,!--no-supervisor", cfg.supervisor,
                "Run the supervise agent (disable for ablation)");
  cmd->add_option("--eval-episodes", cfg.eval_episodes,
                  "Supervisor validation episodes per candidate");
  cmd->add_option("--eval-period", cfg.eval_period,
                  "Probe-evaluation period in per-agent steps");
  cmd->add_option("--probe-episodes", cfg.probe_episodes,
                  "Episodes per probe evaluation");
  cmd->add_option("--threshold", cfg.threshold, "Steps-to-threshold bar")
      ->each([&cfg](const std::string&) { cfg.threshold_set = true; });
  cmd->add_option("--out", cfg.out_dir, "Output directory");
  cmd->add_option("--threads", cfg.threads,
                  "Worker thread cap (default: SWARM_RL_THREADS or hardware)");
  cmd->add_option("--lr", cfg.dqn.lr, "DQN learning rate");
  cmd->add_option("--optimizer", cfg.dqn.optimizer, "DQN optimizer: adam or sgd");
  cmd->add_option("--actor-lr", cfg.ddpg.actor_lr, "DDPG actor learning rate");
  cmd->add_option("--critic-lr", cfg.ddpg.critic_lr, "DDPG critic learning rate");
  cmd->add_option("--tau", cfg.ddpg.tau, "DDPG soft-update rate");
  cmd->add_option("--gamma", cfg.dqn.gamma, "DQN discount factor");
  cmd->add_option("--ddpg-gamma", cfg.ddpg.gamma, "DDPG discount factor");
  cmd->add_option("--batch", cfg.dqn.batch_size, "DQN minibatch size");
  cmd->add_option("--ddpg-batch", cfg.ddpg.batch_size, "DDPG minibatch size");
  cmd->add_option("--learn-every", cfg.dqn.learn_every, "DQN steps between updates");
  cmd->add_option("--ddpg-learn-every", cfg.ddpg.learn_every,
                  "DDPG steps between updates");
  cmd->add_option("--noise-sigma", cfg.ddpg.noise_sigma,
                  "DDPG exploration noise (fraction of action scale)");
  cmd->set_config("--config", "", "Flat key=value config file; CLI flags win");
  (void)config_path;
}

void print_summary(const swarmrl::runner::RunReport& rep) {
  std::printf("run complete: algo=%s env=%s explorers=%d steps=%lld seed=%llu\n",
              rep.config.algo.c_str(), rep.config.env.c_str(),
              rep.config.n_explorers, static_cast<long long>(rep.config.steps),
              static_cast<unsigned long long>(rep.config.seed));
  if (rep.final_eval_valid)
    std::printf("final greedy eval mean (%d episodes): %.3f\n",
                rep.probes.empty() ? 0 : rep.probes.back().episodes,
                rep.final_eval_mean);
  else
    std::printf("final greedy eval: no validated parameters\n");
  if (rep.steps_to_threshold >= 0)
    std::printf("steps to threshold %.1f: %lld\n", rep.threshold,
                static_cast<long long>(rep.steps_to_threshold));
  std::printf("commits=%zu submissions=%lld wall=%.1fs\n", rep.commits.size(),
              static_cast<long long>(rep.submissions), rep.wall_seconds);
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoull(tok));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed RL training with a swarm-guided parameter update"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;
  std::string explorers_list = "8";
  std::string seeds_list = "0";
  std::string checkpoint_path;

  auto* train = app.add_subcommand("train", "Distributed run: explorers + supervisor");
  train->add_option("--explorers", cfg.n_explorers, "Explorer count");
  add_common_options(train, cfg, config_path);
  train->add_option("--save-checkpoint", checkpoint_path,
                    "Write the final best parameters to this checkpoint file");

  auto* ablate = app.add_subcommand("ablate", "Explorer-count ablation, matched seeds");
  ablate->add_option("--explorers", explorers_list, "Comma-separated counts, e.g. 1,2,8");
  ablate->add_option("--seeds", seeds_list, "Comma-separated seeds, e.g. 0,1,2,3,4");
  add_common_options(ablate, cfg, config_path);

  auto* baseline = app.add_subcommand("baseline", "Vanilla single-agent baseline");
  add_common_options(baseline, cfg, config_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (train->parsed()) {
      auto rep = swarmrl::runner::run(cfg);
      swarmrl::runner::emit_csv(rep, cfg.out_dir);
      swarmrl::runner::emit_plot(rep, cfg.out_dir);
      print_summary(rep);
      if (!checkpoint_path.empty()) {
        if (rep.best_params.empty()) {
          std::fprintf(stderr, "no committed best to checkpoint\n");
        } else {
          const auto env = swarmrl::envs::env_from_name(cfg.env);
          auto net = cfg.algo == "dqn" ? swarmrl::dqn::make_qnet(env, cfg.dqn)
                                       : swarmrl::ddpg::make_actor(env, cfg.ddpg);
          net.unflatten(rep.best_params.at(0));
          swarmrl::save_checkpoint(net, checkpoint_path);
          std::printf("checkpoint written: %s\n", checkpoint_path.c_str());
        }
      }
    } else if (ablate->parsed()) {
      auto counts = parse_int_list(explorers_list);
      auto seeds = parse_seed_list(seeds_list);
      auto rep = swarmrl::runner::ablation(cfg, counts, seeds);
      swarmrl::runner::emit_csv(rep, cfg.out_dir);
      swarmrl::runner::emit_plot(rep, cfg.out_dir);
      std::printf("ablation complete: %zu runs\n", rep.rows.size());
      for (const auto& row : rep.rows)
        std::printf("  n=%d seed=%llu steps_to_threshold=%lld final=%.3f\n",
                    row.n_explorers, static_cast<unsigned long long>(row.seed),
                    static_cast<long long>(row.steps_to_threshold),
                    row.final_eval_mean);
    } else if (baseline->parsed()) {
      auto rep = swarmrl::runner::run_baseline(cfg);
      swarmrl::runner::emit_csv(rep, cfg.out_dir);
      swarmrl::runner::emit_plot(rep, cfg.out_dir);
      print_summary(rep);
    }
  } catch (const swarmrl::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime failure: %s\n", e.what());
    return 1;
  }
  return 0;
}
