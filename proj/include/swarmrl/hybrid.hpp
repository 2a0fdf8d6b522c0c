#pragma once

#include <cstdint>

#include "swarmrl/common.hpp"
#include "swarmrl/nn.hpp"

namespace swarmrl {

// How the attraction randomness is drawn: one r per dimension, or a single
// scalar r shared by all dimensions (ablation mode).
enum class AttractionRMode { kPerDim, kScalar };

AttractionRMode attraction_r_mode_from_name(std::string_view name);

// Confidence weight on the global-best attraction:
//   c = arctan(x / (divisor * b)),  strictly increasing in x, bounded in [0, pi/2).
// divisor defaults to 200; 2 reproduces the master-thread variant.
double schedule_weight(std::int64_t x, std::int64_t b, double divisor = 200.0);

// One hybrid update on flat parameter vectors:
//   theta_new = theta_old + alpha * descent_dir + c * r .* (theta_star - theta_old)
// descent_dir must already point in the improving direction. r is drawn from
// rng only when c != 0, so a c=0 call leaves the stream untouched.
ParamVector hybrid_step(const ParamVector& theta_old, const ParamGrad& descent_dir,
                        const ParamVector& theta_star, double alpha, double c,
                        Rng& rng, AttractionRMode mode = AttractionRMode::kPerDim);

// The same update composed with a stateful optimizer: the optimizer consumes
// loss_grad (loss-gradient convention) to produce the gradient contribution,
// then the attraction term c * r .* (theta_star - theta_pre) is added in the
// same update. The attraction gap is measured from the pre-step parameters.
// net is mutated in place. theta_star may be null (no attraction).
void hybrid_step_with_optimizer(Network& net, const ParamGrad& loss_grad,
                                const ParamVector* theta_star, Optimizer& opt,
                                double c, Rng& rng,
                                AttractionRMode mode = AttractionRMode::kPerDim);

}  // namespace swarmrl
