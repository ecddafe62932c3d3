#include "oneclock/betagrid.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace oneclock {

namespace {

std::string format_fixed(double x, int decimals) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
    return buf;
}

// Grid values quantized to the 5-decimal precision the interval markers use.
double round5(double x) {
    return static_cast<double>(std::llround(x * 1e5)) / 1e5;
}

} // namespace

BetaGrid build_grid() {
    BetaGrid grid;
    for (int k = 0; k <= 12; ++k) {
        const double beta = 1.0 - std::pow(10.0, -static_cast<double>(k) / 4.0);
        grid.values.push_back(beta);
        grid.labels.push_back(beta_label(beta));
    }
    return grid;
}

std::string beta_label(double beta) { return format_fixed(beta, 3); }
std::string beta_label5(double beta) { return format_fixed(beta, 5); }

double refresh_count(double beta, long horizon_steps) {
    if (!(beta >= 0.0 && beta < 1.0))
        throw std::domain_error("refresh_count: beta must be in [0, 1)");
    if (horizon_steps < 1)
        throw std::domain_error("refresh_count: horizon must be >= 1");
    return (1.0 - beta) * static_cast<double>(horizon_steps);
}

RefreshBeta refresh_beta(double r0, long horizon_steps) {
    if (!(r0 > 0.0))
        throw std::domain_error("refresh_beta: r0 must be > 0");
    if (horizon_steps < 1)
        throw std::domain_error("refresh_beta: horizon must be >= 1");
    const double value = 1.0 - r0 / static_cast<double>(horizon_steps);
    if (value <= 0.0) return RefreshBeta{0.0, true};
    return RefreshBeta{value, false};
}

std::size_t project_to_grid(double beta_ref, const BetaGrid& grid) {
    if (grid.values.empty())
        throw std::invalid_argument("project_to_grid: empty grid");
    if (!(beta_ref >= 0.0 && beta_ref < 1.0))
        throw std::domain_error("project_to_grid: beta_ref must be in [0, 1)");
    std::size_t best = 0;
    double best_dist = std::abs(grid.values[0] - beta_ref);
    for (std::size_t i = 1; i < grid.values.size(); ++i) {
        const double dist = std::abs(grid.values[i] - beta_ref);
        if (dist < best_dist) {  // ties keep the smaller grid value
            best = i;
            best_dist = dist;
        }
    }
    return best;
}

StabilityInterval stability_interval(std::size_t selected_index, double r0,
                                     const BetaGrid& grid) {
    if (selected_index >= grid.size())
        throw std::out_of_range("stability_interval: index outside grid");
    if (!(r0 > 0.0))
        throw std::domain_error("stability_interval: r0 must be > 0");

    const auto marker = [&](std::size_t lo, std::size_t hi) {
        const double mid = 0.5 * (round5(grid.values[lo]) + round5(grid.values[hi]));
        return static_cast<long>(std::llround(r0 / (1.0 - mid)));
    };

    StabilityInterval interval;
    if (selected_index > 0)
        interval.lower = marker(selected_index - 1, selected_index);
    if (selected_index + 1 < grid.size())
        interval.upper = marker(selected_index, selected_index + 1);
    return interval;
}

Selection select_beta(const RefreshRule& rule, long horizon_steps) {
    const RefreshBeta ref = refresh_beta(rule.r0, horizon_steps);
    Selection sel;
    sel.index = project_to_grid(ref.value, rule.grid);
    sel.beta = rule.grid.values[sel.index];
    sel.label = rule.grid.labels[sel.index];
    sel.beta_ref = ref.value;
    sel.clamped = ref.clamped;
    sel.refresh_realized = refresh_count(sel.beta, horizon_steps);
    sel.interval = stability_interval(sel.index, rule.r0, rule.grid);
    return sel;
}

} // namespace oneclock
