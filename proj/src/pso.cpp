#include "swarmrl/pso.hpp"

#include <cmath>
#include <stdexcept>

namespace swarmrl {
namespace pso {

std::vector<double> velocity_update(const Particle& p,
                                    std::span<const double> global_best,
                                    double omega, double c1, double c2, Rng& rng) {
  const std::size_t dim = p.position.size();
  if (p.velocity.size() != dim || p.local_best.size() != dim ||
      global_best.size() != dim)
    throw ShapeError("velocity_update: dimension mismatch");
  std::vector<double> v(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    const double r1 = uniform01(rng);
    const double r2 = uniform01(rng);
    v[j] = omega * p.velocity[j] + c1 * r1 * (p.local_best[j] - p.position[j]) +
           c2 * r2 * (global_best[j] - p.position[j]);
  }
  return v;
}

std::vector<double> position_update(const Particle& p) {
  std::vector<double> x(p.position.size());
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = p.position[j] + p.velocity[j];
  return x;
}

namespace {

double evaluate(const Objective& objective, std::span<const double> x) {
  const double score = objective(x);
  if (!std::isfinite(score)) throw NumericError("pso: non-finite objective value");
  return score;
}

}  // namespace

Result optimize(const Objective& objective, int dim, int n_particles,
                int iterations, double omega, double c1, double c2,
                std::uint64_t seed, std::pair<double, double> init_box) {
  if (n_particles < 1) throw ConfigError("pso: n_particles must be >= 1");
  if (iterations < 1) throw ConfigError("pso: iterations must be >= 1");
  if (dim < 1) throw ConfigError("pso: dim must be >= 1");

  Rng rng = make_rng(seed, 0x9050);
  Swarm swarm;
  swarm.omega = omega;
  swarm.c1 = c1;
  swarm.c2 = c2;
  swarm.particles.resize(n_particles);
  for (auto& p : swarm.particles) {
    p.position.resize(dim);
    for (auto& x : p.position) x = uniform_range(rng, init_box.first, init_box.second);
    p.velocity.assign(dim, 0.0);
    p.local_best = p.position;
    p.local_best_score = evaluate(objective, p.position);
  }
  swarm.global_best = swarm.particles.front().local_best;
  swarm.global_best_score = swarm.particles.front().local_best_score;
  for (const auto& p : swarm.particles) {
    if (p.local_best_score > swarm.global_best_score) {
      swarm.global_best = p.local_best;
      swarm.global_best_score = p.local_best_score;
    }
  }

  Result result;
  result.trace.reserve(iterations + 1);
  result.trace.push_back(swarm.global_best_score);

  for (int it = 0; it < iterations; ++it) {
    // Synchronous sweep: every particle sees this iteration's global best.
    for (auto& p : swarm.particles) {
      p.velocity = velocity_update(p, swarm.global_best, omega, c1, c2, rng);
      p.position = position_update(p);
      const double score = evaluate(objective, p.position);
      if (score > p.local_best_score) {
        p.local_best = p.position;
        p.local_best_score = score;
      }
    }
    for (const auto& p : swarm.particles) {
      if (p.local_best_score > swarm.global_best_score) {
        swarm.global_best = p.local_best;
        swarm.global_best_score = p.local_best_score;
      }
    }
    result.trace.push_back(swarm.global_best_score);
  }

  result.best = swarm.global_best;
  result.best_score = swarm.global_best_score;
  return result;
}

Result minimize(const Objective& objective, int dim, int n_particles,
                int iterations, double omega, double c1, double c2,
                std::uint64_t seed, std::pair<double, double> init_box) {
  Objective negated = [&objective](std::span<const double> x) { return -objective(x); };
  Result r = optimize(negated, dim, n_particles, iterations, omega, c1, c2, seed, init_box);
  r.best_score = -r.best_score;
  for (auto& t : r.trace) t = -t;
  return r;
}

}  // namespace pso
}  // namespace swarmrl
