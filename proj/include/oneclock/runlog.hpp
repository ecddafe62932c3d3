#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace oneclock {

enum class Split { train, val };

enum class SplitTag { development, held_out };

SplitTag split_tag_from_string(const std::string& name);
std::string to_string(SplitTag tag);

struct RunRecord {
    long step = 0;
    Split split = Split::val;
    double loss = 0.0;
};

/// Time-stamped loss trace of one training run.
struct RunLog {
    std::string experiment_id;
    double beta = 0.0;
    std::uint64_t seed = 0;
    long total_steps = 0;
    bool diverged = false;
    std::vector<RunRecord> records;  // sorted by step, train before val
};

/// Validation-loss curve with strictly increasing steps.
struct ValCurve {
    struct Point {
        long step = 0;
        double val_loss = 0.0;
    };
    std::vector<Point> points;
    long budget = 0;  // total training steps of the producing run
};

/// Extracts the validation curve from a run log.
ValCurve val_curve(const RunLog& log);

/// Minimum validation loss in the log; +infinity if there is none or the run
/// diverged.
double best_val_loss(const RunLog& log);

/// Per-experiment sweep outcome: one entry per swept beta.
struct ExperimentRecord {
    struct BetaEntry {
        double beta = 0.0;
        double loss = 0.0;     // mean over seeds of per-seed min val loss
        long stop_step = 0;    // early-stopping step of the first-seed curve
        int seeds_used = 0;    // 0 when every seed diverged (loss = +inf)
        ValCurve curve;        // first-seed validation curve
        std::vector<double> seed_min_losses;  // per-seed minima (finite only)
    };

    std::string experiment_id;
    SplitTag split = SplitTag::development;
    long budget = 0;
    long t_es = 0;
    std::vector<BetaEntry> entries;  // sorted by beta, ascending
};

/// Entry lookup by beta value (tolerance 1e-12); nullptr when absent.
const ExperimentRecord::BetaEntry* find_entry(const ExperimentRecord& record,
                                              double beta);

} // namespace oneclock
