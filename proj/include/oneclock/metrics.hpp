#pragma once

#include "oneclock/betagrid.hpp"
#include "oneclock/runlog.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace oneclock {

/// Grid beta with the lowest recorded loss; ties toward smaller beta.
double oracle_beta(const ExperimentRecord& record);

/// Fractional excess loss over the oracle: (L - L*)/L*.
double relative_gap(double loss_at_beta, double loss_at_oracle);

/// Mean of the ceil(alpha*n) largest values (tail risk).
double cvar(const std::vector<double>& values, double alpha);

struct SubsetStats {
    long n = 0;
    double mean = 0.0;
    double max = 0.0;
    double cvar_25 = 0.0;
    double frac_below = 0.0;  // fraction strictly under the threshold
};

/// mean/max/CVaR(0.25)/fraction-under-threshold of a gap list.
SubsetStats summarize(const std::vector<double>& gaps, double threshold);

struct GapReport {
    std::map<std::string, double> per_experiment;  // gaps as fractions
    std::map<std::string, SplitTag> split_of;
    double threshold = 0.01;
    std::optional<SubsetStats> development;
    std::optional<SubsetStats> held_out;
    SubsetStats global;
};

/// Aggregates per-experiment gaps by split and globally. Empty subsets are
/// omitted (reported as absent).
GapReport aggregate(const std::map<std::string, double>& gaps,
                    const std::map<std::string, SplitTag>& split_of,
                    double threshold = 0.01);

/// Per-record gap of the refresh rule applied to the record's own horizon.
/// Throws when the selected beta has no usable loss entry.
double refresh_rule_gap(const ExperimentRecord& record, const RefreshRule& rule);

/// Gap report of the refresh rule across records.
GapReport analyze_refresh(const std::vector<ExperimentRecord>& records,
                          const RefreshRule& rule, double threshold = 0.01);

/// Gap report of one fixed beta across records.
GapReport analyze_fixed(const std::vector<ExperimentRecord>& records,
                        double fixed_beta, double threshold = 0.01);

struct CalibrationRow {
    double r0 = 0.0;
    bool feasible = true;  // false when some dev record lacks the selected beta
    std::optional<SubsetStats> development;
    std::optional<SubsetStats> held_out;
    SubsetStats global;
};

struct CalibrationResult {
    double selected_r0 = 0.0;
    std::vector<CalibrationRow> rows;
};

/// Evaluates each refresh-count candidate on every record and picks the one
/// minimizing the development max gap (ties toward the smallest candidate).
/// Held-out records appear in the table but never influence the choice.
CalibrationResult calibrate_r0(const std::vector<ExperimentRecord>& records,
                               const std::vector<double>& candidates,
                               const BetaGrid& grid, double threshold = 0.01);

/// The default calibration sweep 300, 400, ..., 2000.
std::vector<double> default_r0_candidates();

} // namespace oneclock
