#include "oneclock/horizon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oneclock {

void validate(const ValCurve& curve) {
    if (curve.points.empty())
        throw std::domain_error("val curve: empty");
    long prev = -1;
    for (const auto& p : curve.points) {
        if (p.step <= prev)
            throw std::domain_error("val curve: steps must be strictly increasing");
        if (p.step < 0 || p.step > curve.budget)
            throw std::domain_error("val curve: step outside [0, budget]");
        if (!std::isfinite(p.val_loss))
            throw std::domain_error("val curve: non-finite loss");
        prev = p.step;
    }
}

long early_stop_step(const ValCurve& curve, long patience_steps, double min_delta) {
    validate(curve);
    if (patience_steps < 1)
        throw std::domain_error("early_stop_step: patience must be >= 1");
    if (min_delta < 0.0)
        throw std::domain_error("early_stop_step: min_delta must be >= 0");

    double best = curve.points.front().val_loss;
    long best_step = curve.points.front().step;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& p = curve.points[i];
        if (p.val_loss < best - min_delta) {
            best = p.val_loss;
            best_step = p.step;
        } else if (p.step - best_step > patience_steps) {
            break;
        }
    }
    return best_step;
}

double round_sig1(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::domain_error("round_sig1: input must be positive and finite");
    int exponent = static_cast<int>(std::floor(std::log10(x)));
    double power = std::pow(10.0, exponent);
    double scaled = x / power;
    if (scaled < 1.0) {  // guard log10 rounding at decade boundaries
        --exponent;
        power /= 10.0;
        scaled = x / power;
    } else if (scaled >= 10.0) {
        ++exponent;
        power *= 10.0;
        scaled = x / power;
    }
    const double digit = static_cast<double>(std::llround(scaled));
    return digit * power;
}

long estimate_t_es(const ExperimentRecord& record, double patience_fraction,
                   double min_delta) {
    if (!(patience_fraction > 0.0 && patience_fraction <= 1.0))
        throw std::domain_error("estimate_t_es: patience_fraction must be in (0, 1]");
    if (record.budget < 1)
        throw std::domain_error("estimate_t_es: record has no budget");

    // The two lowest-loss entries with a usable curve; entries are sorted by
    // beta, so equal losses resolve toward the smaller beta.
    const ExperimentRecord::BetaEntry* first = nullptr;
    const ExperimentRecord::BetaEntry* second = nullptr;
    for (const auto& entry : record.entries) {
        if (!std::isfinite(entry.loss) || entry.curve.points.empty()) continue;
        if (!first || entry.loss < first->loss) {
            second = first;
            first = &entry;
        } else if (!second || entry.loss < second->loss) {
            second = &entry;
        }
    }
    if (!first || !second)
        throw std::runtime_error("estimate_t_es: need at least two usable beta curves");

    const long patience = std::max<long>(
        1, std::llround(patience_fraction * static_cast<double>(record.budget)));
    const long stop_a = early_stop_step(first->curve, patience, min_delta);
    const long stop_b = early_stop_step(second->curve, patience, min_delta);
    const double mean_stop = 0.5 * (static_cast<double>(stop_a) + static_cast<double>(stop_b));
    if (!(mean_stop > 0.0))
        throw std::runtime_error("estimate_t_es: early stopping happened at step 0");
    return std::llround(round_sig1(mean_stop));
}

} // namespace oneclock
