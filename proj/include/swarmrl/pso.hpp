#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "swarmrl/common.hpp"

namespace swarmrl {
namespace pso {

struct Particle {
  std::vector<double> position;
  std::vector<double> velocity;
  std::vector<double> local_best;
  double local_best_score = 0.0;
};

struct Swarm {
  std::vector<Particle> particles;
  std::vector<double> global_best;
  double global_best_score = 0.0;
  double omega = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

// New velocity per the inertia/local/global rule. r1 and r2 are drawn per
// dimension, interleaved (r1 then r2 for dimension 0, then dimension 1, ...).
std::vector<double> velocity_update(const Particle& p,
                                    std::span<const double> global_best,
                                    double omega, double c1, double c2, Rng& rng);

// Position advance: x + v, with the velocity already updated this iteration.
std::vector<double> position_update(const Particle& p);

using Objective = std::function<double(std::span<const double>)>;

struct Result {
  std::vector<double> best;
  double best_score = 0.0;
  // Global-best score after initialization and after each iteration
  // (iterations + 1 entries).
  std::vector<double> trace;
};

// Synchronous PSO maximizing the objective. Positions start uniform in
// init_box (same interval per dimension), velocities start at zero.
// No velocity clamping is applied; unbounded objectives can diverge.
Result optimize(const Objective& objective, int dim, int n_particles,
                int iterations, double omega, double c1, double c2,
                std::uint64_t seed, std::pair<double, double> init_box);

// Negating wrapper for minimization benchmarks; best_score and trace are in
// the original (minimized) objective's units.
Result minimize(const Objective& objective, int dim, int n_particles,
                int iterations, double omega, double c1, double c2,
                std::uint64_t seed, std::pair<double, double> init_box);

}  // namespace pso
}  // namespace swarmrl
