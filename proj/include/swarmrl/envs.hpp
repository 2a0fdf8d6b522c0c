#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "swarmrl/common.hpp"

namespace swarmrl {
namespace envs {

enum class EnvTag { kCartPole, kAcrobot, kPendulum };

EnvTag env_from_name(std::string_view name);
const char* env_name(EnvTag tag);

// Dynamics constants, pinned here so tests and the duplicate-integrator
// oracles cite a single source. Values follow the canonical Gym
// classic-control definitions.
namespace constants {

// CartPole
inline constexpr double kCartGravity = 9.8;
inline constexpr double kCartMassCart = 1.0;
inline constexpr double kCartMassPole = 0.1;
inline constexpr double kCartTotalMass = kCartMassCart + kCartMassPole;
inline constexpr double kCartPoleHalfLength = 0.5;
inline constexpr double kCartPoleMassLength = kCartMassPole * kCartPoleHalfLength;
inline constexpr double kCartForceMag = 10.0;
inline constexpr double kCartDt = 0.02;
inline constexpr double kCartThetaThreshold = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;
inline constexpr double kCartXThreshold = 2.4;
inline constexpr int kCartPoleEpisodeCap = 500;
inline constexpr double kCartResetRange = 0.05;

// Acrobot (two-link, book dynamics)
inline constexpr double kAcroLink1Length = 1.0;
inline constexpr double kAcroLink1Mass = 1.0;
inline constexpr double kAcroLink2Mass = 1.0;
inline constexpr double kAcroLink1Com = 0.5;
inline constexpr double kAcroLink2Com = 0.5;
inline constexpr double kAcroMoi = 1.0;
inline constexpr double kAcroGravity = 9.8;
inline constexpr double kAcroDt = 0.2;
inline constexpr double kAcroMaxVel1 = 4.0 * 3.14159265358979323846;
inline constexpr double kAcroMaxVel2 = 9.0 * 3.14159265358979323846;
inline constexpr int kAcrobotEpisodeCap = 500;
inline constexpr double kAcroResetRange = 0.1;

// Pendulum swing-up
inline constexpr double kPendGravity = 10.0;
inline constexpr double kPendMass = 1.0;
inline constexpr double kPendLength = 1.0;
inline constexpr double kPendDt = 0.05;
inline constexpr double kPendMaxSpeed = 8.0;
inline constexpr double kPendMaxTorque = 2.0;
inline constexpr int kPendulumEpisodeCap = 200;

}  // namespace constants

// Physical state plus step counter. CartPole uses
// [cart position, cart velocity, pole angle, pole angular velocity];
// Acrobot [theta1, theta2, theta1_dot, theta2_dot]; Pendulum [theta, theta_dot].
struct EnvState {
  EnvTag tag = EnvTag::kCartPole;
  std::array<double, 4> phys{};
  int step = 0;
};

struct StepResult {
  EnvState next;
  double reward = 0.0;
  bool done = false;
};

struct EnvSpec {
  EnvTag tag;
  int obs_dim;
  int n_actions;       // 0 for continuous-action environments
  double action_low;   // continuous only
  double action_high;  // continuous only
  int episode_cap;
};

EnvSpec env_spec(EnvTag tag);

EnvState env_reset(EnvTag tag, Rng& rng);

// Pure step functions: (state, action) -> StepResult, no hidden state.
StepResult env_step(const EnvState& state, int action);       // discrete envs
StepResult env_step(const EnvState& state, double torque);    // pendulum

// Observation vector fed to networks. CartPole: the raw state; Acrobot:
// [cos t1, sin t1, cos t2, sin t2, t1_dot, t2_dot]; Pendulum:
// [cos theta, sin theta, theta_dot].
std::vector<double> observe(const EnvState& state);
void observe_into(const EnvState& state, std::vector<double>& out);

double wrap_angle(double theta);  // into [-pi, pi)

}  // namespace envs
}  // namespace swarmrl
