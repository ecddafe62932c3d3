#pragma once

#include "oneclock/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace oneclock {

enum class TaskKind { quadratic, noisy_quadratic, logistic_regression, mlp1 };

TaskKind task_kind_from_string(const std::string& name);
std::string to_string(TaskKind kind);

/// Desk-scale training task description. A spec plus a data seed fully
/// determines the dataset and the teacher/target, bit for bit.
struct TaskSpec {
    TaskKind kind = TaskKind::noisy_quadratic;
    long dim = 10;            // input / parameter-space dimension
    long hidden = 8;          // hidden width (mlp1 only)
    std::uint64_t data_seed = 1;
    double noise_scale = 0.0; // gradient/label/overlap noise, task dependent
    long train_samples = 1024;
    long val_samples = 256;
    long batch_size = 16;
};

void validate(const TaskSpec& spec);

/// Loss and gradient oracle over a flat parameter vector. Batches are index
/// lists into the materialized train set; data-free tasks ignore them.
class Task {
public:
    virtual ~Task() = default;

    virtual long param_dim() const = 0;
    virtual long train_size() const = 0;
    long batch_size() const { return batch_size_; }

    virtual double loss(const Eigen::VectorXd& params,
                        const std::vector<long>& batch) const = 0;
    virtual Eigen::VectorXd grad(const Eigen::VectorXd& params,
                                 const std::vector<long>& batch) const = 0;
    /// Mean loss over the full held-out validation set.
    virtual double val_loss(const Eigen::VectorXd& params) const = 0;

    /// Starting point, fixed by (spec, seed). Run seeds vary only the batch
    /// stream, so per-seed loss spread reflects gradient noise rather than
    /// initialization distance.
    const Eigen::VectorXd& initial_params() const { return initial_params_; }

    /// Coordinates weight decay should touch (1) or skip (0). Bias
    /// coordinates are skipped; parameter-free tasks decay everything.
    virtual Eigen::VectorXd default_decay_mask() const {
        return Eigen::VectorXd::Ones(param_dim());
    }

    /// Indices sampled with replacement from the train split; empty for
    /// data-free tasks.
    std::vector<long> sample_batch(SplitMix64& rng) const;

protected:
    long batch_size_ = 1;
    Eigen::VectorXd initial_params_;
};

std::unique_ptr<Task> make_task(const TaskSpec& spec, std::uint64_t seed);

struct GradCheckResult {
    bool pass = false;
    double max_rel_deviation = 0.0;
};

/// Compares the task's analytic gradient against central finite differences
/// (h = 1e-5 * (1 + |param|)) on a fixed batch. Deviations are measured
/// relative to max(1, |analytic|, |numeric|).
GradCheckResult gradient_check(const Task& task,
                               const Eigen::VectorXd& params,
                               double tol);

} // namespace oneclock
