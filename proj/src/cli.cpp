#include "oneclock/cli.hpp"

#include "oneclock/betagrid.hpp"
#include "oneclock/harness.hpp"
#include "oneclock/horizon.hpp"
#include "oneclock/io.hpp"
#include "oneclock/metrics.hpp"
#include "oneclock/perturb.hpp"
#include "oneclock/reports.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace oneclock {

namespace {

namespace fs = std::filesystem;

void write_text_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path staging = path.string() + ".tmp";
    {
        std::ofstream out(staging);
        if (!out) throw std::runtime_error("cannot write " + staging.string());
        out << content;
    }
    fs::rename(staging, path);
}

// Tables go to stdout; --csv mirrors the same report object to a file.
void emit(const std::string& text, const std::string& csv, const std::string& csv_path) {
    std::cout << text;
    if (!csv_path.empty()) write_text_file(csv_path, csv);
}

BetaGrid grid_from_flag(const std::vector<double>& betas) {
    if (betas.empty()) return build_grid();
    BetaGrid grid;
    double prev = -1.0;
    for (double b : betas) {
        if (!(b >= 0.0 && b < 1.0))
            throw std::runtime_error("--betas values must be in [0, 1)");
        if (b <= prev)
            throw std::runtime_error("--betas values must be strictly increasing");
        grid.values.push_back(b);
        grid.labels.push_back(beta_label(b));
        prev = b;
    }
    return grid;
}

// Flags like --fixed-beta 0.944 name grid values at display precision; snap
// them to the exact grid value so record lookups match. Values far from any
// grid point pass through untouched.
double resolve_beta_flag(double value) {
    if (!(value >= 0.0 && value < 1.0))
        throw std::runtime_error("beta must be in [0, 1)");
    const BetaGrid grid = build_grid();
    const std::size_t nearest = project_to_grid(value, grid);
    if (std::abs(grid.values[nearest] - value) <= 1e-3) return grid.values[nearest];
    return value;
}

std::vector<double> parse_candidates(const std::string& flag) {
    if (flag.empty()) return default_r0_candidates();
    std::vector<double> candidates;
    std::stringstream stream(flag);
    std::string part;
    while (std::getline(stream, part, ',')) {
        if (part.empty()) continue;
        candidates.push_back(std::stod(part));
    }
    if (candidates.empty()) throw std::runtime_error("--candidates is empty");
    return candidates;
}

int cmd_grid(const std::string& csv_path) {
    const BetaGrid grid = build_grid();
    std::string csv = "k,label,exact\n";
    for (std::size_t k = 0; k < grid.size(); ++k)
        csv += std::to_string(k) + ',' + grid.labels[k] + ',' +
               format_full(grid.values[k]) + "\n";
    emit(render_grid_text(grid), csv, csv_path);
    return 0;
}

int cmd_select(long t_es, const std::string& record_path, double r0) {
    if (t_es <= 0 && record_path.empty())
        throw std::runtime_error("select needs --t-es or --record");
    if (!record_path.empty()) {
        const ExperimentRecord record = read_record(record_path);
        t_es = record.t_es;
        std::cout << "t_es " << t_es << " taken from record " << record.experiment_id
                  << "\n";
    }
    const RefreshRule rule{r0, build_grid()};
    const Selection selection = select_beta(rule, t_es);
    std::cout << render_selection_text(selection, t_es, r0);
    return 0;
}

int cmd_sweep(const std::string& manifest_path, const std::string& workspace,
              const std::vector<double>& betas, int refine_top_k, int extra_seeds) {
    const ExperimentManifest manifest = read_manifest(manifest_path);
    const BetaGrid grid = grid_from_flag(betas);
    const SweepResult result = sweep(manifest, grid, refine_top_k, extra_seeds);

    const fs::path root = fs::path(workspace) / manifest.experiment_id;
    for (const auto& log : result.logs) {
        const std::string name =
            "run_beta" + beta_label(log.beta) + "_seed" + std::to_string(log.seed) + ".csv";
        write_runlog_csv(log, root / name);
    }
    const fs::path record_path = fs::path(workspace) / (manifest.experiment_id + ".record");
    write_record(result.record, record_path);
    std::cout << "wrote " << result.logs.size() << " run logs under " << root.string()
              << "\n";
    std::cout << "wrote record " << record_path.string() << " (t_es = "
              << result.record.t_es << ")\n";
    return 0;
}

int cmd_import(const std::string& input, const std::string& workspace,
               const ImportOptions& options) {
    const ExperimentRecord record = import_curves(input, options);
    const fs::path record_path = fs::path(workspace) / (record.experiment_id + ".record");
    write_record(record, record_path);
    std::cout << "imported " << record.entries.size() << " beta curves into "
              << record_path.string() << " (t_es = " << record.t_es << ")\n";
    return 0;
}

int cmd_analyze(const std::vector<std::string>& record_paths, double r0,
                double fixed_beta, double threshold, const std::string& csv_path) {
    const auto records = read_records(record_paths);
    AnalyzeReport report;
    char method[64];
    std::snprintf(method, sizeof method, "refresh r0=%g", r0);
    report.rows.push_back({method, analyze_refresh(records, RefreshRule{r0, build_grid()},
                                                   threshold)});
    if (fixed_beta >= 0.0) {
        const double resolved = resolve_beta_flag(fixed_beta);
        report.rows.push_back({"fixed beta=" + beta_label(resolved),
                               analyze_fixed(records, resolved, threshold)});
    }
    if (!report.rows.front().report.development)
        std::cerr << "warning: no development records; subset omitted\n";
    if (!report.rows.front().report.held_out)
        std::cerr << "warning: no held-out records; subset omitted\n";
    emit(render_text(report), render_csv(report), csv_path);
    return 0;
}

int cmd_calibrate(const std::vector<std::string>& record_paths,
                  const std::string& candidates_flag, double threshold,
                  const std::string& csv_path) {
    const auto records = read_records(record_paths);
    const CalibrationResult result =
        calibrate_r0(records, parse_candidates(candidates_flag), build_grid(), threshold);
    emit(render_text(result), render_csv(result), csv_path);
    return 0;
}

int cmd_perturb(const std::vector<std::string>& record_paths, PerturbConfig config,
                double threshold, const std::string& csv_path) {
    const auto records = read_records(record_paths);
    const RobustnessReport report =
        robustness_study(records, config, build_grid(), threshold);
    emit(render_text(report), render_csv(report), csv_path);
    return 0;
}

int cmd_plotdata(const std::vector<std::string>& record_paths,
                 const std::string& csv_path) {
    const auto records = read_records(record_paths);
    const std::string csv = render_plotdata_csv(records);
    if (csv_path.empty()) std::cout << csv;
    else write_text_file(csv_path, csv);
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"balanced-Adam sweep harness and refresh-rule toolkit"};
    app.require_subcommand(1);

    std::string workspace = ".";
    std::uint64_t global_seed = 1;
    app.add_option("--workspace", workspace, "directory for run logs and records");
    app.add_option("--seed", global_seed, "global seed (perturbation draws)");

    std::string csv_path;

    auto* grid_cmd = app.add_subcommand("grid", "print the candidate beta grid");
    grid_cmd->add_option("--csv", csv_path, "mirror the table to a CSV file");

    auto* select_cmd =
        app.add_subcommand("select", "select beta for a training horizon");
    long t_es = 0;
    double r0 = 1000.0;
    std::string select_record;
    select_cmd->add_option("--t-es", t_es, "effective horizon in optimizer steps");
    select_cmd->add_option("--record", select_record,
                           "record file supplying the horizon instead of --t-es");
    select_cmd->add_option("--r0", r0, "target refresh count");

    auto* sweep_cmd = app.add_subcommand("sweep", "run a beta sweep for a manifest");
    std::string manifest_path;
    std::vector<double> betas;
    int refine_top_k = 5;
    int extra_seeds = 2;
    sweep_cmd->add_option("--manifest", manifest_path, "experiment manifest file")
        ->required();
    sweep_cmd->add_option("--betas", betas,
                          "override grid (comma separated exact values)")
        ->delimiter(',');
    sweep_cmd->add_option("--refine-top-k", refine_top_k,
                          "configurations rerun with extra seeds");
    sweep_cmd->add_option("--extra-seeds", extra_seeds, "extra seeds per refined beta");

    auto* import_cmd =
        app.add_subcommand("import-curves", "build a record from external curves");
    std::string import_input, import_id, import_split = "development";
    long import_total_steps = 0;
    import_cmd->add_option("--input", import_input, "curve CSV (beta,step[,split],loss)")
        ->required();
    import_cmd->add_option("--experiment-id", import_id, "record id")->required();
    import_cmd->add_option("--split", import_split, "development or held_out");
    import_cmd->add_option("--total-steps", import_total_steps,
                           "training budget (default: largest step)");

    auto* analyze_cmd =
        app.add_subcommand("analyze", "gap report for the refresh rule");
    std::vector<std::string> record_paths;
    double analyze_r0 = 1000.0;
    double fixed_beta = -1.0;
    double threshold = 0.01;
    analyze_cmd->add_option("--records", record_paths, "record files")->required();
    analyze_cmd->add_option("--r0", analyze_r0, "target refresh count");
    analyze_cmd->add_option("--fixed-beta", fixed_beta,
                            "also report a fixed-beta baseline row");
    analyze_cmd->add_option("--threshold", threshold, "gap threshold (fraction)");
    analyze_cmd->add_option("--csv", csv_path, "mirror the table to a CSV file");

    auto* calibrate_cmd =
        app.add_subcommand("calibrate", "sweep refresh-count candidates");
    std::string candidates_flag;
    calibrate_cmd->add_option("--records", record_paths, "record files")->required();
    calibrate_cmd->add_option("--candidates", candidates_flag,
                              "comma separated r0 values (default 300..2000 step 100)");
    calibrate_cmd->add_option("--threshold", threshold, "gap threshold (fraction)");
    calibrate_cmd->add_option("--csv", csv_path, "mirror the table to a CSV file");

    auto* perturb_cmd =
        app.add_subcommand("perturb", "robustness to horizon noise");
    std::vector<double> sigmas;
    int draws = 20;
    double perturb_r0 = 1000.0;
    double perturb_fixed_beta = 0.0;
    perturb_cmd->add_option("--records", record_paths, "record files")->required();
    perturb_cmd->add_option("--sigmas", sigmas, "noise levels (comma separated)")
        ->delimiter(',');
    perturb_cmd->add_option("--draws", draws, "draws per experiment and sigma");
    perturb_cmd->add_option("--r0", perturb_r0, "target refresh count");
    perturb_cmd->add_option("--fixed-beta", perturb_fixed_beta,
                            "fixed baseline beta (default: grid k=5)");
    perturb_cmd->add_option("--threshold", threshold, "gap threshold (fraction)");
    perturb_cmd->add_option("--csv", csv_path, "mirror the table to a CSV file");

    auto* plot_cmd =
        app.add_subcommand("plot-data", "sweep curves on the u = -log10(1-beta) axis");
    plot_cmd->add_option("--records", record_paths, "record files")->required();
    plot_cmd->add_option("--csv", csv_path, "write here instead of stdout");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (grid_cmd->parsed()) return cmd_grid(csv_path);
        if (select_cmd->parsed()) return cmd_select(t_es, select_record, r0);
        if (sweep_cmd->parsed())
            return cmd_sweep(manifest_path, workspace, betas, refine_top_k, extra_seeds);
        if (import_cmd->parsed()) {
            ImportOptions options;
            options.experiment_id = import_id;
            options.split = split_tag_from_string(import_split);
            options.total_steps = import_total_steps;
            return cmd_import(import_input, workspace, options);
        }
        if (analyze_cmd->parsed())
            return cmd_analyze(record_paths, analyze_r0, fixed_beta, threshold, csv_path);
        if (calibrate_cmd->parsed())
            return cmd_calibrate(record_paths, candidates_flag, threshold, csv_path);
        if (perturb_cmd->parsed()) {
            PerturbConfig config;
            config.sigmas = sigmas.empty()
                                ? std::vector<double>{0.0, 0.03, 0.06, 0.10, 0.15, 0.20, 0.25}
                                : sigmas;
            config.draws_per_experiment = draws;
            config.base_seed = global_seed;
            config.r0 = perturb_r0;
            config.fixed_beta =
                perturb_fixed_beta > 0.0 ? resolve_beta_flag(perturb_fixed_beta) : 0.0;
            return cmd_perturb(record_paths, config, threshold, csv_path);
        }
        if (plot_cmd->parsed()) return cmd_plotdata(record_paths, csv_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "error: no subcommand\n";
    return 1;
}

} // namespace oneclock
