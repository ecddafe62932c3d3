#pragma once

#include "oneclock/harness.hpp"
#include "oneclock/runlog.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace oneclock {

/// Full-precision decimal rendering; strtod round-trips it exactly.
std::string format_full(double x);

// Run logs persist as one CSV per run:
//   # experiment=<id> beta=<exact> seed=<n> total_steps=<n>
//   step,split,loss
void write_runlog_csv(const RunLog& log, const std::filesystem::path& path);
RunLog read_runlog_csv(const std::filesystem::path& path);

// Experiment records persist as a flat key-value file (one `key = value`
// line each). Beta values carry full precision; curves are step:loss pairs.
void write_record(const ExperimentRecord& record, const std::filesystem::path& path);
ExperimentRecord read_record(const std::filesystem::path& path);
std::vector<ExperimentRecord> read_records(const std::vector<std::string>& paths);

/// Experiment manifests are flat key-value text with dotted section keys
/// (experiment.*, task.*, optimizer.*, schedule.*, run.*). '#' starts a
/// comment line.
ExperimentManifest read_manifest(const std::filesystem::path& path);

struct ImportOptions {
    std::string experiment_id;
    SplitTag split = SplitTag::development;
    long total_steps = 0;  // 0 infers the budget from the largest step seen
    double patience_fraction = 0.1;
    double min_delta = 0.0;
};

/// Builds a record from an external curve CSV with header
/// beta,step,split,loss (or beta,step,loss; rows then count as validation).
/// Rows may arrive unsorted; every beta needs a validation entry at the final
/// step. Malformed rows raise with their line number.
ExperimentRecord import_curves(const std::filesystem::path& path,
                               const ImportOptions& options);

} // namespace oneclock
