#include "oneclock/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace oneclock {

void validate(const PerturbConfig& config) {
    if (config.sigmas.empty())
        throw std::invalid_argument("perturb config: no sigma levels");
    double prev = -1.0;
    for (double s : config.sigmas) {
        if (!(s >= 0.0))
            throw std::invalid_argument("perturb config: sigma must be >= 0");
        if (s < prev)
            throw std::invalid_argument("perturb config: sigmas must be ascending");
        prev = s;
    }
    if (config.draws_per_experiment < 1)
        throw std::invalid_argument("perturb config: draws must be >= 1");
    if (!(config.r0 > 0.0))
        throw std::invalid_argument("perturb config: r0 must be > 0");
}

long perturb_horizon(long horizon_steps, double sigma, SplitMix64& rng) {
    if (horizon_steps < 1)
        throw std::domain_error("perturb_horizon: horizon must be >= 1");
    if (!(sigma >= 0.0))
        throw std::domain_error("perturb_horizon: sigma must be >= 0");
    const double epsilon = sigma == 0.0 ? 0.0 : sigma * rng.next_normal();
    const long perturbed =
        std::llround(static_cast<double>(horizon_steps) * (1.0 + epsilon));
    return std::max<long>(1, perturbed);
}

namespace {

std::string sigma_label(double sigma) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "sigma=%g", sigma);
    return buf;
}

std::optional<double> draw_gap(const ExperimentRecord& record, double oracle_loss,
                               const RefreshRule& rule, long horizon) {
    const Selection sel = select_beta(rule, horizon);
    const auto* entry = find_entry(record, sel.beta);
    if (!entry || !std::isfinite(entry->loss)) return std::nullopt;
    return relative_gap(entry->loss, oracle_loss);
}

RobustnessRow stats_row(std::string label, double sigma,
                        const std::vector<double>& dev,
                        const std::vector<double>& held, double threshold,
                        long infeasible) {
    RobustnessRow row;
    row.label = std::move(label);
    row.sigma = sigma;
    if (!dev.empty()) row.development = summarize(dev, threshold);
    if (!held.empty()) row.held_out = summarize(held, threshold);
    std::vector<double> all = dev;
    all.insert(all.end(), held.begin(), held.end());
    if (all.empty())
        throw std::runtime_error("robustness_study: no feasible evaluations");
    row.global = summarize(all, threshold);
    row.evaluations = static_cast<long>(all.size());
    row.infeasible = infeasible;
    return row;
}

RobustnessRow report_row(std::string label, double sigma, const GapReport& report) {
    RobustnessRow row;
    row.label = std::move(label);
    row.sigma = sigma;
    row.development = report.development;
    row.held_out = report.held_out;
    row.global = report.global;
    row.evaluations = static_cast<long>(report.per_experiment.size());
    row.infeasible = 0;
    return row;
}

} // namespace

RobustnessReport robustness_study(const std::vector<ExperimentRecord>& records,
                                  const PerturbConfig& config,
                                  const BetaGrid& grid,
                                  double threshold) {
    validate(config);
    if (records.empty())
        throw std::invalid_argument("robustness_study: no records");

    RobustnessReport report;
    report.config = config;
    report.fixed_beta_used =
        config.fixed_beta > 0.0 ? config.fixed_beta
                                : grid.values.at(5);  // strongest fixed default

    const RefreshRule rule{config.r0, grid};

    // Reference rows: the fixed-beta baseline and the unperturbed rule.
    report.rows.push_back(report_row(
        "fixed beta=" + beta_label(report.fixed_beta_used), 0.0,
        analyze_fixed(records, report.fixed_beta_used, threshold)));
    report.rows.front().is_baseline = true;

    const GapReport base = analyze_refresh(records, rule, threshold);

    std::vector<double> oracle_losses;
    for (const auto& record : records)
        oracle_losses.push_back(
            find_entry(record, oracle_beta(record))->loss);

    for (std::size_t sigma_index = 0; sigma_index < config.sigmas.size(); ++sigma_index) {
        const double sigma = config.sigmas[sigma_index];
        const std::string label = sigma_label(sigma);
        if (sigma == 0.0) {
            report.rows.push_back(report_row(label, 0.0, base));
            continue;
        }
        std::vector<double> dev, held;
        long infeasible = 0;
        for (std::size_t p = 0; p < records.size(); ++p) {
            const auto& record = records[p];
            if (record.t_es < 1)
                throw std::runtime_error("record " + record.experiment_id +
                                         ": missing horizon");
            for (int d = 0; d < config.draws_per_experiment; ++d) {
                SplitMix64 rng(mix_seed(config.base_seed,
                                        hash_str(record.experiment_id.c_str()),
                                        static_cast<std::uint64_t>(sigma_index),
                                        static_cast<std::uint64_t>(d)));
                const long horizon = perturb_horizon(record.t_es, sigma, rng);
                const auto gap = draw_gap(record, oracle_losses[p], rule, horizon);
                if (!gap) {
                    ++infeasible;
                    continue;
                }
                (record.split == SplitTag::development ? dev : held).push_back(*gap);
            }
        }
        report.rows.push_back(stats_row(label, sigma, dev, held, threshold, infeasible));
    }
    return report;
}

} // namespace oneclock
