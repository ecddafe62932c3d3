#include "oneclock/runlog.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace oneclock {

SplitTag split_tag_from_string(const std::string& name) {
    if (name == "development") return SplitTag::development;
    if (name == "held_out") return SplitTag::held_out;
    throw std::invalid_argument("unknown split tag: " + name);
}

std::string to_string(SplitTag tag) {
    return tag == SplitTag::development ? "development" : "held_out";
}

ValCurve val_curve(const RunLog& log) {
    ValCurve curve;
    curve.budget = log.total_steps;
    for (const auto& r : log.records)
        if (r.split == Split::val) curve.points.push_back({r.step, r.loss});
    return curve;
}

double best_val_loss(const RunLog& log) {
    if (log.diverged) return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : log.records)
        if (r.split == Split::val && r.loss < best) best = r.loss;
    return best;
}

const ExperimentRecord::BetaEntry* find_entry(const ExperimentRecord& record,
                                              double beta) {
    for (const auto& entry : record.entries)
        if (std::abs(entry.beta - beta) < 1e-12) return &entry;
    return nullptr;
}

} // namespace oneclock
