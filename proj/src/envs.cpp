#include "swarmrl/envs.hpp"

#include <algorithm>
#include <cmath>

namespace swarmrl {
namespace envs {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

EnvTag env_from_name(std::string_view name) {
  if (name == "cartpole") return EnvTag::kCartPole;
  if (name == "acrobot") return EnvTag::kAcrobot;
  if (name == "pendulum") return EnvTag::kPendulum;
  throw ConfigError("unknown environment tag: " + std::string(name));
}

const char* env_name(EnvTag tag) {
  switch (tag) {
    case EnvTag::kCartPole: return "cartpole";
    case EnvTag::kAcrobot: return "acrobot";
    case EnvTag::kPendulum: return "pendulum";
  }
  return "?";
}

EnvSpec env_spec(EnvTag tag) {
  using namespace constants;
  switch (tag) {
    case EnvTag::kCartPole:
      return {tag, 4, 2, 0.0, 0.0, kCartPoleEpisodeCap};
    case EnvTag::kAcrobot:
      return {tag, 6, 3, 0.0, 0.0, kAcrobotEpisodeCap};
    case EnvTag::kPendulum:
      return {tag, 3, 0, -kPendMaxTorque, kPendMaxTorque, kPendulumEpisodeCap};
  }
  throw ConfigError("env_spec: bad tag");
}

double wrap_angle(double theta) {
  double w = std::fmod(theta + kPi, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  return w - kPi;
}

EnvState env_reset(EnvTag tag, Rng& rng) {
  using namespace constants;
  EnvState s;
  s.tag = tag;
  s.step = 0;
  switch (tag) {
    case EnvTag::kCartPole:
      for (int i = 0; i < 4; ++i)
        s.phys[i] = uniform_range(rng, -kCartResetRange, kCartResetRange);
      break;
    case EnvTag::kAcrobot:
      for (int i = 0; i < 4; ++i)
        s.phys[i] = uniform_range(rng, -kAcroResetRange, kAcroResetRange);
      break;
    case EnvTag::kPendulum:
      s.phys[0] = uniform_range(rng, -kPi, kPi);
      s.phys[1] = uniform_range(rng, -1.0, 1.0);
      s.phys[2] = s.phys[3] = 0.0;
      break;
  }
  return s;
}

namespace {

StepResult step_cartpole(const EnvState& state, int action) {
  using namespace constants;
  if (action != 0 && action != 1)
    throw ConfigError("cartpole: action must be 0 or 1");
  double x = state.phys[0], x_dot = state.phys[1];
  double theta = state.phys[2], theta_dot = state.phys[3];

  const double force = action == 1 ? kCartForceMag : -kCartForceMag;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double temp =
      (force + kCartPoleMassLength * theta_dot * theta_dot * sin_t) / kCartTotalMass;
  const double theta_acc =
      (kCartGravity * sin_t - cos_t * temp) /
      (kCartPoleHalfLength * (4.0 / 3.0 - kCartMassPole * cos_t * cos_t / kCartTotalMass));
  const double x_acc = temp - kCartPoleMassLength * theta_acc * cos_t / kCartTotalMass;

  // Explicit Euler, old velocities advance positions.
  x += kCartDt * x_dot;
  x_dot += kCartDt * x_acc;
  theta += kCartDt * theta_dot;
  theta_dot += kCartDt * theta_acc;

  StepResult r;
  r.next = state;
  r.next.phys = {x, x_dot, theta, theta_dot};
  r.next.step = state.step + 1;
  const bool fell = x < -kCartXThreshold || x > kCartXThreshold ||
                    theta < -kCartThetaThreshold || theta > kCartThetaThreshold;
  r.done = fell || r.next.step >= kCartPoleEpisodeCap;
  r.reward = 1.0;
  return r;
}

StepResult step_acrobot(const EnvState& state, int action) {
  using namespace constants;
  if (action < 0 || action > 2)
    throw ConfigError("acrobot: action must be 0, 1 or 2");
  const double torque = static_cast<double>(action) - 1.0;

  const double t1 = state.phys[0], t2 = state.phys[1];
  const double d1v = state.phys[2], d2v = state.phys[3];

  const double m1 = kAcroLink1Mass, m2 = kAcroLink2Mass;
  const double l1 = kAcroLink1Length, lc1 = kAcroLink1Com, lc2 = kAcroLink2Com;
  const double i1 = kAcroMoi, i2 = kAcroMoi, g = kAcroGravity;

  const double d1 = m1 * lc1 * lc1 +
                    m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * std::cos(t2)) + i1 + i2;
  const double d2 = m2 * (lc2 * lc2 + l1 * lc2 * std::cos(t2)) + i2;
  const double phi2 = m2 * lc2 * g * std::cos(t1 + t2 - kPi / 2.0);
  const double phi1 = -m2 * l1 * lc2 * d2v * d2v * std::sin(t2) -
                      2.0 * m2 * l1 * lc2 * d2v * d1v * std::sin(t2) +
                      (m1 * lc1 + m2 * l1) * g * std::cos(t1 - kPi / 2.0) + phi2;
  const double dd2 =
      (torque + d2 / d1 * phi1 - m2 * l1 * lc2 * d1v * d1v * std::sin(t2) - phi2) /
      (m2 * lc2 * lc2 + i2 - d2 * d2 / d1);
  const double dd1 = -(d2 * dd2 + phi1) / d1;

  // Explicit Euler at the environment timestep.
  double nt1 = wrap_angle(t1 + kAcroDt * d1v);
  double nt2 = wrap_angle(t2 + kAcroDt * d2v);
  double nd1 = std::clamp(d1v + kAcroDt * dd1, -kAcroMaxVel1, kAcroMaxVel1);
  double nd2 = std::clamp(d2v + kAcroDt * dd2, -kAcroMaxVel2, kAcroMaxVel2);

  StepResult r;
  r.next = state;
  r.next.phys = {nt1, nt2, nd1, nd2};
  r.next.step = state.step + 1;
  const bool goal = -std::cos(nt1) - std::cos(nt2 + nt1) > 1.0;
  r.done = goal || r.next.step >= kAcrobotEpisodeCap;
  r.reward = goal ? 0.0 : -1.0;
  return r;
}

StepResult step_pendulum(const EnvState& state, double torque) {
  using namespace constants;
  if (!(torque >= -kPendMaxTorque && torque <= kPendMaxTorque))
    throw ConfigError("pendulum: torque outside [-2, 2]");
  const double th = state.phys[0];
  const double thdot = state.phys[1];
  const double g = kPendGravity, m = kPendMass, l = kPendLength;

  const double angle = wrap_angle(th);
  const double cost = angle * angle + 0.1 * thdot * thdot + 0.001 * torque * torque;

  // Semi-implicit Euler: new velocity advances the angle.
  double new_thdot = thdot + (3.0 * g / (2.0 * l) * std::sin(th) +
                              3.0 / (m * l * l) * torque) * kPendDt;
  new_thdot = std::clamp(new_thdot, -kPendMaxSpeed, kPendMaxSpeed);
  const double new_th = th + new_thdot * kPendDt;

  StepResult r;
  r.next = state;
  r.next.phys = {new_th, new_thdot, 0.0, 0.0};
  r.next.step = state.step + 1;
  r.reward = -cost;
  r.done = r.next.step >= kPendulumEpisodeCap;
  return r;
}

}  // namespace

StepResult env_step(const EnvState& state, int action) {
  switch (state.tag) {
    case EnvTag::kCartPole: return step_cartpole(state, action);
    case EnvTag::kAcrobot: return step_acrobot(state, action);
    case EnvTag::kPendulum:
      throw ConfigError("pendulum takes a continuous torque, not a discrete action");
  }
  throw ConfigError("env_step: bad tag");
}

StepResult env_step(const EnvState& state, double torque) {
  if (state.tag != EnvTag::kPendulum)
    throw ConfigError("continuous actions are only valid for pendulum");
  return step_pendulum(state, torque);
}

void observe_into(const EnvState& state, std::vector<double>& out) {
  switch (state.tag) {
    case EnvTag::kCartPole:
      out.assign(state.phys.begin(), state.phys.end());
      break;
    case EnvTag::kAcrobot:
      // Angles as (cos, sin); angular velocities scaled to roughly [-1, 1]
      // so the tanh hidden layers stay out of saturation.
      out.assign({std::cos(state.phys[0]), std::sin(state.phys[0]),
                  std::cos(state.phys[1]), std::sin(state.phys[1]),
                  state.phys[2] / constants::kAcroMaxVel1,
                  state.phys[3] / constants::kAcroMaxVel2});
      break;
    case EnvTag::kPendulum:
      out.assign({std::cos(state.phys[0]), std::sin(state.phys[0]),
                  state.phys[1] / constants::kPendMaxSpeed});
      break;
  }
}

std::vector<double> observe(const EnvState& state) {
  std::vector<double> out;
  observe_into(state, out);
  return out;
}

}  // namespace envs
}  // namespace swarmrl
