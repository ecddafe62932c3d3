#include "oneclock/harness.hpp"

#include "oneclock/horizon.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace oneclock {

void validate(const ExperimentManifest& manifest) {
    if (manifest.experiment_id.empty())
        throw std::invalid_argument("manifest: experiment_id must be nonempty");
    validate(manifest.task);
    validate(manifest.optimizer);
    validate(schedule_of(manifest));
    if (manifest.total_steps < 1)
        throw std::invalid_argument("manifest: total_steps must be >= 1");
    if (manifest.eval_every < 1 || manifest.eval_every > manifest.total_steps)
        throw std::invalid_argument("manifest: eval_every must be in [1, total_steps]");
    if (manifest.seeds.empty())
        throw std::invalid_argument("manifest: at least one seed required");
}

LrSchedule schedule_of(const ExperimentManifest& manifest) {
    LrSchedule schedule;
    schedule.lr_max = manifest.lr_max;
    schedule.lr_min = manifest.lr_min;
    schedule.warmup_steps = manifest.warmup_steps;
    schedule.total_steps = manifest.total_steps;
    return schedule;
}

RunLog run_training(const Task& task,
                    const OptimizerConfig& config,
                    const LrSchedule& schedule,
                    long total_steps,
                    long eval_every,
                    std::uint64_t seed,
                    const std::string& experiment_id) {
    validate(config);
    validate(schedule);
    if (total_steps < 1)
        throw std::invalid_argument("run_training: total_steps must be >= 1");
    if (eval_every < 1 || eval_every > total_steps)
        throw std::invalid_argument("run_training: eval_every must be in [1, total_steps]");
    if (schedule.total_steps < total_steps)
        throw std::invalid_argument("run_training: schedule shorter than the run");

    RunLog log;
    log.experiment_id = experiment_id;
    log.beta = config.beta;
    log.seed = seed;
    log.total_steps = total_steps;

    SplitMix64 batch_rng(mix_seed(seed, 0xBA7C));
    Eigen::VectorXd params = task.initial_params();
    OptimizerState state = init_state(params.size());

    OptimizerConfig effective = config;
    if (effective.weight_decay > 0.0 && !effective.decay_mask)
        effective.decay_mask = task.default_decay_mask();

    const auto record_eval = [&](long step) {
        const double train = task.loss(params, {});
        const double val = task.val_loss(params);
        if (!std::isfinite(train) || !std::isfinite(val)) return false;
        log.records.push_back({step, Split::train, train});
        log.records.push_back({step, Split::val, val});
        return true;
    };

    if (!record_eval(0)) {
        log.diverged = true;
        return log;
    }

    for (long t = 1; t <= total_steps; ++t) {
        const std::vector<long> batch = task.sample_batch(batch_rng);
        const Eigen::VectorXd g = task.grad(params, batch);
        if (!g.allFinite()) {
            log.diverged = true;
            break;
        }
        adam_step(params, g, state, effective, lr_at(schedule, t - 1));
        if (!params.allFinite()) {
            log.diverged = true;
            break;
        }
        if (t % eval_every == 0 || t == total_steps) {
            if (!record_eval(t)) {
                log.diverged = true;
                break;
            }
        }
    }
    return log;
}

namespace {

// Runs independent (beta, seed) jobs across hardware threads. Results land
// in job order, so the merge is deterministic regardless of scheduling.
std::vector<RunLog> run_jobs(const Task& task, const ExperimentManifest& manifest,
                             const LrSchedule& schedule,
                             const std::vector<std::pair<double, std::uint64_t>>& jobs) {
    std::vector<RunLog> logs(jobs.size());
    const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers =
        std::min<unsigned>(hardware, static_cast<unsigned>(jobs.size()));
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
            OptimizerConfig config = manifest.optimizer;
            config.beta = jobs[i].first;
            logs[i] = run_training(task, config, schedule, manifest.total_steps,
                                   manifest.eval_every, jobs[i].second,
                                   manifest.experiment_id);
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return logs;
}

} // namespace

SweepResult sweep(const ExperimentManifest& manifest,
                  const BetaGrid& grid,
                  int refine_top_k,
                  int extra_seeds) {
    validate(manifest);
    if (grid.values.empty())
        throw std::invalid_argument("sweep: empty grid");
    if (refine_top_k < 0 || static_cast<std::size_t>(refine_top_k) > grid.size())
        throw std::invalid_argument("sweep: refine_top_k must be in [0, grid size]");
    if (extra_seeds < 0)
        throw std::invalid_argument("sweep: extra_seeds must be >= 0");
    if (refine_top_k > 0 && extra_seeds > 0 &&
        manifest.seeds.size() < static_cast<std::size_t>(extra_seeds) + 1)
        throw std::invalid_argument("sweep: manifest needs 1 + extra_seeds seeds");

    const auto task = make_task(manifest.task, manifest.task.data_seed);
    const LrSchedule schedule = schedule_of(manifest);

    SweepResult result;
    const std::size_t n = grid.size();

    // First pass: every grid beta with the first seed.
    std::vector<std::pair<double, std::uint64_t>> first_jobs;
    for (std::size_t i = 0; i < n; ++i)
        first_jobs.emplace_back(grid.values[i], manifest.seeds[0]);
    std::vector<RunLog> first_logs = run_jobs(*task, manifest, schedule, first_jobs);

    std::vector<double> first_seed_loss(n);
    std::vector<std::vector<double>> seed_minima(n);
    std::vector<ValCurve> curves(n);
    for (std::size_t i = 0; i < n; ++i) {
        first_seed_loss[i] = best_val_loss(first_logs[i]);
        if (std::isfinite(first_seed_loss[i]))
            seed_minima[i].push_back(first_seed_loss[i]);
        curves[i] = val_curve(first_logs[i]);
        result.logs.push_back(std::move(first_logs[i]));
    }

    // Refinement: the refine_top_k best first-seed betas rerun with the
    // remaining seeds. Ties keep the smaller beta (stable sort on index).
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return first_seed_loss[a] < first_seed_loss[b];
    });
    const std::size_t refine_count =
        std::min<std::size_t>(static_cast<std::size_t>(refine_top_k), n);
    std::vector<std::pair<double, std::uint64_t>> refine_jobs;
    std::vector<std::size_t> refine_grid_index;
    for (std::size_t r = 0; r < refine_count; ++r) {
        const std::size_t i = order[r];
        if (!std::isfinite(first_seed_loss[i])) continue;  // diverged stays out
        for (int s = 1; s <= extra_seeds; ++s) {
            refine_jobs.emplace_back(grid.values[i],
                                     manifest.seeds[static_cast<std::size_t>(s)]);
            refine_grid_index.push_back(i);
        }
    }
    std::vector<RunLog> refine_logs = run_jobs(*task, manifest, schedule, refine_jobs);
    for (std::size_t j = 0; j < refine_logs.size(); ++j) {
        const double minimum = best_val_loss(refine_logs[j]);
        if (std::isfinite(minimum)) seed_minima[refine_grid_index[j]].push_back(minimum);
        result.logs.push_back(std::move(refine_logs[j]));
    }

    ExperimentRecord& record = result.record;
    record.experiment_id = manifest.experiment_id;
    record.split = manifest.split;
    record.budget = manifest.total_steps;
    const long patience = std::max<long>(
        1, std::llround(0.1 * static_cast<double>(manifest.total_steps)));
    for (std::size_t i = 0; i < n; ++i) {
        ExperimentRecord::BetaEntry entry;
        entry.beta = grid.values[i];
        entry.seeds_used = static_cast<int>(seed_minima[i].size());
        if (seed_minima[i].empty()) {
            entry.loss = std::numeric_limits<double>::infinity();
        } else {
            double sum = 0.0;
            for (double v : seed_minima[i]) sum += v;
            entry.loss = sum / static_cast<double>(seed_minima[i].size());
        }
        entry.seed_min_losses = seed_minima[i];
        entry.curve = curves[i];
        entry.stop_step = entry.curve.points.empty()
                              ? 0
                              : early_stop_step(entry.curve, patience, 0.0);
        record.entries.push_back(std::move(entry));
    }
    record.t_es = estimate_t_es(record, 0.1, 0.0);
    return result;
}

} // namespace oneclock
