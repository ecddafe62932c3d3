#pragma once

#include "oneclock/metrics.hpp"
#include "oneclock/rng.hpp"
#include "oneclock/runlog.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace oneclock {

struct PerturbConfig {
    std::vector<double> sigmas;       // ascending, >= 0
    int draws_per_experiment = 20;
    std::uint64_t base_seed = 1;
    double r0 = 1000.0;
    double fixed_beta = 0.0;          // baseline row; 0 selects the grid default
};

void validate(const PerturbConfig& config);

/// Horizon under multiplicative noise: round(T*(1+e)), e ~ N(0, sigma),
/// clamped below at 1.
long perturb_horizon(long horizon_steps, double sigma, SplitMix64& rng);

struct RobustnessRow {
    std::string label;   // "fixed" or "sigma=..."
    double sigma = 0.0;
    bool is_baseline = false;
    std::optional<SubsetStats> development;
    std::optional<SubsetStats> held_out;
    SubsetStats global;
    long evaluations = 0;
    long infeasible = 0;  // draws whose selected beta had no usable loss
};

struct RobustnessReport {
    std::vector<RobustnessRow> rows;
    PerturbConfig config;
    double fixed_beta_used = 0.0;
};

/// Monte Carlo robustness of the refresh rule to horizon noise. Per sigma > 0
/// each experiment is perturbed draws_per_experiment times; each draw selects
/// a beta through the rule and looks up its gap. Draw streams are keyed by
/// (base_seed, experiment id, sigma index, draw index), so record order never
/// changes a draw and no draw is shared between sigma levels. The sigma = 0
/// row is the unperturbed refresh report, reused exactly.
RobustnessReport robustness_study(const std::vector<ExperimentRecord>& records,
                                  const PerturbConfig& config,
                                  const BetaGrid& grid,
                                  double threshold = 0.01);

} // namespace oneclock
