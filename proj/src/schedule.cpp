#include "oneclock/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace oneclock {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void validate(const LrSchedule& schedule) {
    if (!(schedule.lr_max > 0.0))
        throw std::domain_error("schedule: lr_max must be > 0");
    if (!(schedule.lr_min >= 0.0 && schedule.lr_min <= schedule.lr_max))
        throw std::domain_error("schedule: lr_min must be in [0, lr_max]");
    if (schedule.warmup_steps < 0)
        throw std::domain_error("schedule: warmup_steps must be >= 0");
    if (schedule.total_steps <= schedule.warmup_steps)
        throw std::domain_error("schedule: total_steps must exceed warmup_steps");
}

double lr_at(const LrSchedule& schedule, long step) {
    validate(schedule);
    if (step < 0 || step > schedule.total_steps)
        throw std::domain_error("lr_at: step outside [0, total_steps]");
    if (step < schedule.warmup_steps) {
        return schedule.lr_max * static_cast<double>(step + 1) /
               static_cast<double>(schedule.warmup_steps);
    }
    const double progress = static_cast<double>(step - schedule.warmup_steps) /
                            static_cast<double>(schedule.total_steps - schedule.warmup_steps);
    return schedule.lr_min +
           0.5 * (schedule.lr_max - schedule.lr_min) * (1.0 + std::cos(kPi * progress));
}

} // namespace oneclock
