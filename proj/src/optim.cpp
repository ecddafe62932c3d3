#include "oneclock/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace oneclock {

void validate(const OptimizerConfig& config) {
    if (!(config.beta >= 0.0 && config.beta < 1.0))
        throw std::domain_error("optimizer config: beta must be in [0, 1)");
    if (!(config.epsilon >= 0.0))
        throw std::domain_error("optimizer config: epsilon must be >= 0");
    if (!(config.weight_decay >= 0.0))
        throw std::domain_error("optimizer config: weight_decay must be >= 0");
    if (config.clip_norm && !(*config.clip_norm > 0.0))
        throw std::domain_error("optimizer config: clip_norm must be > 0");
}

OptimizerState init_state(long dim) {
    if (dim < 1)
        throw std::invalid_argument("init_state: dim must be >= 1");
    OptimizerState state;
    state.m = Eigen::VectorXd::Zero(dim);
    state.v = Eigen::VectorXd::Zero(dim);
    state.step = 0;
    return state;
}

void adam_step(Eigen::Ref<Eigen::VectorXd> params,
               const Eigen::Ref<const Eigen::VectorXd>& grads,
               OptimizerState& state,
               const OptimizerConfig& config,
               double lr) {
    validate(config);
    if (!(lr > 0.0))
        throw std::domain_error("adam_step: lr must be > 0");
    const long n = params.size();
    if (grads.size() != n || state.m.size() != n || state.v.size() != n)
        throw std::invalid_argument("adam_step: params/grads/state length mismatch");
    if (config.decay_mask && config.decay_mask->size() != n)
        throw std::invalid_argument("adam_step: decay mask length mismatch");
    if (!params.allFinite() || !grads.allFinite())
        throw std::runtime_error("adam_step: non-finite input, update refused");

    Eigen::VectorXd g = grads;
    if (config.clip_norm)
        g = clip_global_norm(g, *config.clip_norm);

    const bool decaying = config.weight_decay > 0.0;
    Eigen::VectorXd decay_direction;
    if (decaying) {
        if (config.decay_mask)
            decay_direction = (params.array() * config.decay_mask->array()).matrix();
        else
            decay_direction = params;
        if (config.decay_mode == DecayMode::coupled)
            g += config.weight_decay * decay_direction;
    }

    const long t = state.step + 1;
    const double one_minus_beta = 1.0 - config.beta;
    state.m = config.beta * state.m + one_minus_beta * g;
    state.v = config.beta * state.v + one_minus_beta * g.cwiseProduct(g);

    const double correction = 1.0 - std::pow(config.beta, static_cast<double>(t));
    const Eigen::ArrayXd m_hat = state.m.array() / correction;
    const Eigen::ArrayXd v_hat = state.v.array() / correction;

    params.array() -= lr * m_hat / (v_hat.sqrt() + config.epsilon);
    if (decaying && config.decay_mode == DecayMode::decoupled)
        params -= (lr * config.weight_decay) * decay_direction;

    state.step = t;
}

double effective_horizon(double beta) {
    if (!(beta >= 0.0 && beta < 1.0))
        throw std::domain_error("effective_horizon: beta must be in [0, 1)");
    return 1.0 / (1.0 - beta);
}

Eigen::VectorXd clip_global_norm(const Eigen::Ref<const Eigen::VectorXd>& grads,
                                 double clip_norm) {
    if (!(clip_norm > 0.0))
        throw std::domain_error("clip_global_norm: clip_norm must be > 0");
    const double norm = grads.norm();
    if (!std::isfinite(norm))
        throw std::runtime_error("clip_global_norm: non-finite gradient norm");
    if (norm <= clip_norm)
        return grads;
    return grads * (clip_norm / norm);
}

} // namespace oneclock
