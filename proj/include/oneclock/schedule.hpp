#pragma once

namespace oneclock {

/// Linear warmup to lr_max, then cosine decay to lr_min at total_steps.
struct LrSchedule {
    double lr_max = 1e-3;
    double lr_min = 0.0;
    long warmup_steps = 0;
    long total_steps = 1;
};

void validate(const LrSchedule& schedule);

/// Rate at a step in [0, total_steps]. During warmup the rate is
/// lr_max*(step+1)/warmup_steps so the first update is nonzero; from
/// warmup_steps on it follows the half-cosine from lr_max down to lr_min.
double lr_at(const LrSchedule& schedule, long step);

} // namespace oneclock
