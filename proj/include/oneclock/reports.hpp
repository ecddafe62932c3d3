#pragma once

#include "oneclock/metrics.hpp"
#include "oneclock/perturb.hpp"
#include "oneclock/runlog.hpp"

#include <string>
#include <vector>

namespace oneclock {

/// Named gap-report rows (refresh rule, fixed-beta baseline, ...). Text and
/// CSV renderings both read this object; nothing is recomputed.
struct AnalyzeReport {
    struct Row {
        std::string method;
        GapReport report;
    };
    std::vector<Row> rows;
};

std::string render_text(const AnalyzeReport& report);
std::string render_csv(const AnalyzeReport& report);

std::string render_text(const CalibrationResult& result);
std::string render_csv(const CalibrationResult& result);

std::string render_text(const RobustnessReport& report);
std::string render_csv(const RobustnessReport& report);

/// Sweep curves on the u = -log10(1-beta) axis, one row per (experiment,
/// beta): experiment_id,beta_label,u,mean_best_val_loss,seed_spread.
std::string render_plotdata_csv(const std::vector<ExperimentRecord>& records);

std::string render_grid_text(const BetaGrid& grid);

std::string render_selection_text(const Selection& selection, long horizon_steps,
                                  double r0);

} // namespace oneclock
