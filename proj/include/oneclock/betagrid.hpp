#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace oneclock {

/// Candidate beta values with 1-beta log-uniform: beta_k = 1 - 10^(-k/4).
/// Exact values drive all arithmetic; the 3-decimal labels are display only.
struct BetaGrid {
    std::vector<double> values;
    std::vector<std::string> labels;

    std::size_t size() const { return values.size(); }
};

/// The canonical 13-entry grid, k = 0..12.
BetaGrid build_grid();

std::string beta_label(double beta);   // 3 decimals
std::string beta_label5(double beta);  // 5 decimals

/// Refresh count R = (1-beta)*T: how many times the optimizer's statistics
/// turn over across a horizon of T steps.
double refresh_count(double beta, long horizon_steps);

struct RefreshBeta {
    double value = 0.0;
    bool clamped = false;  // set when r0 >= horizon forced the grid floor 0
};

/// Continuous refresh-rule choice beta = 1 - r0/T, clamped below at 0.
RefreshBeta refresh_beta(double r0, long horizon_steps);

/// Index of the grid value nearest to beta_ref in raw beta distance; ties
/// break toward the smaller grid value.
std::size_t project_to_grid(double beta_ref, const BetaGrid& grid);

/// Horizon range over which the projected grid choice stays put. Endpoints
/// are the nearest-integer markers of r0/(1 - midpoint), with midpoints taken
/// between 5-decimal roundings of the neighboring grid values; adjacent grid
/// values share a marker. A boundary grid value leaves its open side empty.
struct StabilityInterval {
    std::optional<long> lower;
    std::optional<long> upper;
};

StabilityInterval stability_interval(std::size_t selected_index, double r0,
                                     const BetaGrid& grid);

struct RefreshRule {
    double r0 = 1000.0;
    BetaGrid grid = build_grid();
};

struct Selection {
    std::size_t index = 0;
    double beta = 0.0;
    std::string label;
    double beta_ref = 0.0;
    bool clamped = false;
    double refresh_realized = 0.0;  // (1-beta)*T for the selected grid beta
    StabilityInterval interval;
};

/// Full refresh-rule selection: beta_ref = 1 - r0/T projected to the grid,
/// with diagnostics.
Selection select_beta(const RefreshRule& rule, long horizon_steps);

} // namespace oneclock
