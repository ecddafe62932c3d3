#include "oneclock/reports.hpp"

#include "oneclock/io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace oneclock {

namespace {

std::string fmt(const char* spec, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, value);
    return buf;
}

// Gaps are stored as fractions; tables print percent.
std::string pct(double fraction) { return fmt("%7.3f", 100.0 * fraction); }

std::string subset_cells(const std::optional<SubsetStats>& stats) {
    if (!stats) return "      -      -      - ";
    return pct(stats->mean) + pct(stats->max) + pct(stats->cvar_25) + " ";
}

std::string count_below(const SubsetStats& stats) {
    const long k = std::lround(stats.frac_below * static_cast<double>(stats.n));
    return std::to_string(k) + "/" + std::to_string(stats.n);
}

std::string subset_csv(const std::optional<SubsetStats>& stats) {
    if (!stats) return ",,,,";
    return std::to_string(stats->n) + ',' + format_full(stats->mean) + ',' +
           format_full(stats->max) + ',' + format_full(stats->cvar_25) + ',' +
           format_full(stats->frac_below);
}

const char* kSubsetCsvHeader =
    "dev_n,dev_mean,dev_max,dev_cvar25,dev_frac_below,"
    "held_n,held_mean,held_max,held_cvar25,held_frac_below,"
    "global_n,global_mean,global_max,global_cvar25,global_frac_below";

const char* kTableHeader =
    "                          |   development          |   held-out             |"
    "   global               |\n"
    "method                    |    mean    max   cvar  |    mean    max   cvar  |"
    "    mean    max   cvar  | gap<1%\n";

std::string table_line(const std::string& method,
                       const std::optional<SubsetStats>& dev,
                       const std::optional<SubsetStats>& held,
                       const SubsetStats& global, const std::string& below) {
    char name[64];
    std::snprintf(name, sizeof name, "%-25s", method.c_str());
    return std::string(name) + " | " + subset_cells(dev) + " | " + subset_cells(held) +
           " | " + subset_cells(global) + " | " + below + "\n";
}

} // namespace

std::string render_text(const AnalyzeReport& report) {
    std::ostringstream out;
    out << "relative validation-loss gaps to the per-experiment oracle (percent)\n";
    out << kTableHeader;
    for (const auto& row : report.rows)
        out << table_line(row.method, row.report.development, row.report.held_out,
                          row.report.global, count_below(row.report.global));
    return out.str();
}

std::string render_csv(const AnalyzeReport& report) {
    std::ostringstream out;
    out << "method," << kSubsetCsvHeader << "\n";
    for (const auto& row : report.rows)
        out << row.method << ',' << subset_csv(row.report.development) << ','
            << subset_csv(row.report.held_out) << ',' << subset_csv(row.report.global)
            << "\n";
    return out.str();
}

std::string render_text(const CalibrationResult& result) {
    std::ostringstream out;
    out << "refresh-count calibration sweep (development max gap decides; "
           "held-out shown for transparency)\n";
    out << kTableHeader;
    for (const auto& row : result.rows) {
        std::string method = "r0=" + fmt("%g", row.r0);
        if (row.r0 == result.selected_r0) method += " *";
        if (!row.feasible) {
            char name[64];
            std::snprintf(name, sizeof name, "%-25s", method.c_str());
            out << name << " | infeasible\n";
            continue;
        }
        out << table_line(method, row.development, row.held_out, row.global,
                          count_below(row.global));
    }
    out << "selected r0 = " << fmt("%g", result.selected_r0) << "\n";
    return out.str();
}

std::string render_csv(const CalibrationResult& result) {
    std::ostringstream out;
    out << "r0,feasible,selected," << kSubsetCsvHeader << "\n";
    for (const auto& row : result.rows) {
        out << fmt("%g", row.r0) << ',' << (row.feasible ? 1 : 0) << ','
            << (row.r0 == result.selected_r0 ? 1 : 0) << ','
            << subset_csv(row.development) << ',' << subset_csv(row.held_out) << ','
            << subset_csv(row.global) << "\n";
    }
    return out.str();
}

std::string render_text(const RobustnessReport& report) {
    std::ostringstream out;
    out << "refresh-rule robustness under multiplicative horizon noise\n";
    out << "# horizons perturbed as T' = round(T*(1+e)), e ~ N(0, sigma), "
        << report.config.draws_per_experiment << " draws per experiment and sigma\n";
    out << "# draw streams: splitmix64 keyed by (seed=" << report.config.base_seed
        << ", experiment id, sigma index, draw index); normals via Box-Muller\n";
    out << kTableHeader;
    for (const auto& row : report.rows) {
        const std::string below =
            row.is_baseline || row.sigma == 0.0
                ? count_below(row.global) + " (" + fmt("%.2f", 100.0 * row.global.frac_below) + "%)"
                : fmt("%.2f", 100.0 * row.global.frac_below) + "%";
        out << table_line(row.label, row.development, row.held_out, row.global, below);
        if (row.infeasible > 0)
            out << "  # " << row.infeasible << " draws infeasible (selected beta "
                << "missing from the record) and excluded\n";
    }
    return out.str();
}

std::string render_csv(const RobustnessReport& report) {
    std::ostringstream out;
    out << "label,sigma,evaluations,infeasible," << kSubsetCsvHeader << "\n";
    for (const auto& row : report.rows)
        out << row.label << ',' << format_full(row.sigma) << ',' << row.evaluations
            << ',' << row.infeasible << ',' << subset_csv(row.development) << ','
            << subset_csv(row.held_out) << ',' << subset_csv(row.global) << "\n";
    return out.str();
}

std::string render_plotdata_csv(const std::vector<ExperimentRecord>& records) {
    std::ostringstream out;
    out << "experiment_id,beta_label,u,mean_best_val_loss,seed_spread\n";
    for (const auto& record : records) {
        for (const auto& entry : record.entries) {
            double u = -std::log10(1.0 - entry.beta);
            if (u == 0.0) u = 0.0;  // normalize -0 at beta = 0
            double spread = 0.0;
            if (entry.seed_min_losses.size() > 1) {
                double lo = entry.seed_min_losses.front();
                double hi = lo;
                for (double v : entry.seed_min_losses) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
                spread = hi - lo;
            }
            out << record.experiment_id << ',' << beta_label(entry.beta) << ','
                << format_full(u) << ',' << format_full(entry.loss) << ','
                << format_full(spread) << "\n";
        }
    }
    return out.str();
}

std::string render_grid_text(const BetaGrid& grid) {
    std::ostringstream out;
    out << "k  label  exact\n";
    for (std::size_t k = 0; k < grid.size(); ++k) {
        char line[80];
        std::snprintf(line, sizeof line, "%-2zu %s  %s\n", k, grid.labels[k].c_str(),
                      format_full(grid.values[k]).c_str());
        out << line;
    }
    return out.str();
}

std::string render_selection_text(const Selection& selection, long horizon_steps,
                                  double r0) {
    std::ostringstream out;
    out << "horizon t_es = " << horizon_steps << ", r0 = " << fmt("%g", r0) << "\n";
    out << "selected beta = " << selection.label << " (exact "
        << format_full(selection.beta) << ")\n";
    out << "beta_ref = " << format_full(selection.beta_ref)
        << (selection.clamped ? " (clamped to the grid floor)" : "") << "\n";
    out << "realized refresh count = " << fmt("%g", selection.refresh_realized) << "\n";
    out << "stability interval = ["
        << (selection.interval.lower ? std::to_string(*selection.interval.lower) : "open")
        << ", "
        << (selection.interval.upper ? std::to_string(*selection.interval.upper) : "open")
        << "]\n";
    return out.str();
}

} // namespace oneclock
