#include "oneclock/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oneclock {

double oracle_beta(const ExperimentRecord& record) {
    const ExperimentRecord::BetaEntry* best = nullptr;
    for (const auto& entry : record.entries) {
        if (!std::isfinite(entry.loss)) continue;
        if (!best || entry.loss < best->loss ||
            (entry.loss == best->loss && entry.beta < best->beta))
            best = &entry;
    }
    if (!best)
        throw std::runtime_error("oracle_beta: no finite losses in record " +
                                 record.experiment_id);
    return best->beta;
}

double relative_gap(double loss_at_beta, double loss_at_oracle) {
    if (!(loss_at_oracle > 0.0))
        throw std::domain_error("relative_gap: oracle loss must be > 0");
    if (loss_at_beta < loss_at_oracle)
        throw std::runtime_error("relative_gap: loss below oracle (inconsistent oracle)");
    return (loss_at_beta - loss_at_oracle) / loss_at_oracle;
}

double cvar(const std::vector<double>& values, double alpha) {
    if (values.empty())
        throw std::domain_error("cvar: empty input");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::domain_error("cvar: alpha must be in (0, 1]");
    const std::size_t n = values.size();
    // Slack keeps fp noise in alpha*n (e.g. 0.1*10) from inflating the tail.
    std::size_t k = static_cast<std::size_t>(
        std::ceil(alpha * static_cast<double>(n) - 1e-9));
    k = std::clamp<std::size_t>(k, 1, n);
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += sorted[i];
    return sum / static_cast<double>(k);
}

SubsetStats summarize(const std::vector<double>& gaps, double threshold) {
    if (gaps.empty())
        throw std::domain_error("summarize: empty gap list");
    SubsetStats stats;
    stats.n = static_cast<long>(gaps.size());
    double sum = 0.0;
    long below = 0;
    stats.max = -std::numeric_limits<double>::infinity();
    for (double g : gaps) {
        sum += g;
        stats.max = std::max(stats.max, g);
        if (g < threshold) ++below;
    }
    stats.mean = sum / static_cast<double>(gaps.size());
    stats.cvar_25 = cvar(gaps, 0.25);
    stats.frac_below = static_cast<double>(below) / static_cast<double>(gaps.size());
    return stats;
}

GapReport aggregate(const std::map<std::string, double>& gaps,
                    const std::map<std::string, SplitTag>& split_of,
                    double threshold) {
    GapReport report;
    report.per_experiment = gaps;
    report.split_of = split_of;
    report.threshold = threshold;

    std::vector<double> dev, held, all;
    for (const auto& [id, gap] : gaps) {
        const auto it = split_of.find(id);
        if (it == split_of.end())
            throw std::invalid_argument("aggregate: experiment " + id +
                                        " has no split assignment");
        if (!(gap >= 0.0))
            throw std::domain_error("aggregate: negative or non-finite gap for " + id);
        (it->second == SplitTag::development ? dev : held).push_back(gap);
        all.push_back(gap);
    }
    if (all.empty())
        throw std::domain_error("aggregate: no experiments");
    if (!dev.empty()) report.development = summarize(dev, threshold);
    if (!held.empty()) report.held_out = summarize(held, threshold);
    report.global = summarize(all, threshold);
    return report;
}

namespace {

double gap_of_beta(const ExperimentRecord& record, double beta) {
    const auto* entry = find_entry(record, beta);
    if (!entry || !std::isfinite(entry->loss))
        throw std::runtime_error("record " + record.experiment_id +
                                 ": no usable loss at the selected beta");
    const auto* oracle = find_entry(record, oracle_beta(record));
    return relative_gap(entry->loss, oracle->loss);
}

} // namespace

double refresh_rule_gap(const ExperimentRecord& record, const RefreshRule& rule) {
    if (record.t_es < 1)
        throw std::runtime_error("record " + record.experiment_id + ": missing horizon");
    const Selection sel = select_beta(rule, record.t_es);
    return gap_of_beta(record, sel.beta);
}

GapReport analyze_refresh(const std::vector<ExperimentRecord>& records,
                          const RefreshRule& rule, double threshold) {
    std::map<std::string, double> gaps;
    std::map<std::string, SplitTag> split_of;
    for (const auto& record : records) {
        gaps[record.experiment_id] = refresh_rule_gap(record, rule);
        split_of[record.experiment_id] = record.split;
    }
    return aggregate(gaps, split_of, threshold);
}

GapReport analyze_fixed(const std::vector<ExperimentRecord>& records,
                        double fixed_beta, double threshold) {
    std::map<std::string, double> gaps;
    std::map<std::string, SplitTag> split_of;
    for (const auto& record : records) {
        gaps[record.experiment_id] = gap_of_beta(record, fixed_beta);
        split_of[record.experiment_id] = record.split;
    }
    return aggregate(gaps, split_of, threshold);
}

CalibrationResult calibrate_r0(const std::vector<ExperimentRecord>& records,
                               const std::vector<double>& candidates,
                               const BetaGrid& grid, double threshold) {
    if (candidates.empty())
        throw std::invalid_argument("calibrate_r0: no candidates");
    bool has_dev = false;
    for (const auto& r : records)
        if (r.split == SplitTag::development) has_dev = true;
    if (!has_dev)
        throw std::invalid_argument("calibrate_r0: no development records");

    CalibrationResult result;
    for (double r0 : candidates) {
        CalibrationRow row;
        row.r0 = r0;
        RefreshRule rule{r0, grid};
        std::map<std::string, double> gaps;
        std::map<std::string, SplitTag> split_of;
        try {
            for (const auto& record : records) {
                gaps[record.experiment_id] = refresh_rule_gap(record, rule);
                split_of[record.experiment_id] = record.split;
            }
            const GapReport report = aggregate(gaps, split_of, threshold);
            row.development = report.development;
            row.held_out = report.held_out;
            row.global = report.global;
        } catch (const std::runtime_error&) {
            row.feasible = false;  // some record lacks the selected beta
        }
        result.rows.push_back(std::move(row));
    }

    const CalibrationRow* best = nullptr;
    for (const auto& row : result.rows) {
        if (!row.feasible || !row.development) continue;
        if (!best || row.development->max < best->development->max ||
            (row.development->max == best->development->max && row.r0 < best->r0))
            best = &row;
    }
    if (!best)
        throw std::runtime_error("calibrate_r0: no feasible candidate");
    result.selected_r0 = best->r0;
    return result;
}

std::vector<double> default_r0_candidates() {
    std::vector<double> candidates;
    for (int r0 = 300; r0 <= 2000; r0 += 100)
        candidates.push_back(static_cast<double>(r0));
    return candidates;
}

} // namespace oneclock
