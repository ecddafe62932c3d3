#pragma once

#include "oneclock/betagrid.hpp"
#include "oneclock/optim.hpp"
#include "oneclock/runlog.hpp"
#include "oneclock/schedule.hpp"
#include "oneclock/tasks.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace oneclock {

/// One experiment: a task, optimizer defaults, a schedule, a training budget
/// and the seed list the sweep draws from.
struct ExperimentManifest {
    std::string experiment_id;
    SplitTag split = SplitTag::development;
    TaskSpec task;
    OptimizerConfig optimizer;  // beta is overwritten per sweep point
    double lr_max = 1e-3;
    double lr_min = 0.0;
    long warmup_steps = 0;
    long total_steps = 1000;
    long eval_every = 100;
    std::vector<std::uint64_t> seeds = {1};
};

void validate(const ExperimentManifest& manifest);

LrSchedule schedule_of(const ExperimentManifest& manifest);

/// Runs total_steps balanced-Adam updates with the scheduled rate. Validation
/// loss is recorded before training (step 0), every eval_every steps and at
/// the final step; train loss is recorded alongside. A non-finite loss or
/// gradient marks the run diverged and keeps the records up to that point.
RunLog run_training(const Task& task,
                    const OptimizerConfig& config,
                    const LrSchedule& schedule,
                    long total_steps,
                    long eval_every,
                    std::uint64_t seed,
                    const std::string& experiment_id = "");

struct SweepResult {
    ExperimentRecord record;
    std::vector<RunLog> logs;  // seed-1 pass in grid order, then refinements
};

/// Beta sweep with seed refinement: every grid beta runs with the first
/// manifest seed; the refine_top_k best (by first-seed min val loss) rerun
/// with extra_seeds further seeds. losses(beta) is the mean over seeds of the
/// per-seed minimum validation loss. Fully deterministic.
SweepResult sweep(const ExperimentManifest& manifest,
                  const BetaGrid& grid,
                  int refine_top_k,
                  int extra_seeds);

} // namespace oneclock
