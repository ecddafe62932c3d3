#pragma once

#include <Eigen/Dense>

#include <optional>

namespace oneclock {

enum class DecayMode { coupled, decoupled };

/// Settings for the balanced (single-beta) Adam update. The optimizer has one
/// momentum parameter: both moment estimates decay on the same time scale.
struct OptimizerConfig {
    double beta = 0.9;          // tied EMA coefficient, in [0, 1)
    double epsilon = 1e-8;      // added to sqrt(v_hat) in the denominator
    double weight_decay = 0.0;
    DecayMode decay_mode = DecayMode::decoupled;
    std::optional<double> clip_norm;  // global gradient-norm ceiling
    // Per-coordinate decay mask; when present, weight decay applies only where
    // the mask is nonzero (stands in for per-group "no decay on bias/norm").
    std::optional<Eigen::VectorXd> decay_mask;
};

void validate(const OptimizerConfig& config);

struct OptimizerState {
    Eigen::VectorXd m;  // first-moment EMA
    Eigen::VectorXd v;  // second-moment EMA, entries >= 0
    long step = 0;
};

/// Zero moments for a parameter vector of length dim. dim must be >= 1.
OptimizerState init_state(long dim);

/// One balanced Adam update, in place:
///   m <- beta*m + (1-beta)*g,  v <- beta*v + (1-beta)*g^2
///   params -= lr * (m / (1-beta^t)) / (sqrt(v / (1-beta^t)) + epsilon)
/// Gradient clipping (if configured) runs before the moment update; coupled
/// weight decay is added to the gradient, decoupled decay subtracts
/// lr*weight_decay*params (pre-update values) afterwards.
/// Non-finite params/grads refuse the update and leave the state untouched.
void adam_step(Eigen::Ref<Eigen::VectorXd> params,
               const Eigen::Ref<const Eigen::VectorXd>& grads,
               OptimizerState& state,
               const OptimizerConfig& config,
               double lr);

/// Memory horizon H = 1/(1-beta).
double effective_horizon(double beta);

/// Rescales grads to norm clip_norm when its L2 norm exceeds it.
Eigen::VectorXd clip_global_norm(const Eigen::Ref<const Eigen::VectorXd>& grads,
                                 double clip_norm);

} // namespace oneclock
