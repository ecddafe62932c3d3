#include "oneclock/tasks.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace oneclock;

namespace {

// Test-local central-difference oracle, independent of gradient_check.
Eigen::VectorXd numeric_grad(const Task& task, const Eigen::VectorXd& params,
                             const std::vector<long>& batch) {
    Eigen::VectorXd g(params.size());
    Eigen::VectorXd probe = params;
    for (long i = 0; i < params.size(); ++i) {
        const double h = 1e-6 * (1.0 + std::abs(params(i)));
        probe(i) = params(i) + h;
        const double up = task.loss(probe, batch);
        probe(i) = params(i) - h;
        const double down = task.loss(probe, batch);
        probe(i) = params(i);
        g(i) = (up - down) / (2.0 * h);
    }
    return g;
}

TaskSpec small_spec(TaskKind kind) {
    TaskSpec spec;
    spec.kind = kind;
    spec.dim = 6;
    spec.hidden = 5;
    spec.data_seed = 42;
    spec.noise_scale = 0.3;
    spec.train_samples = 64;
    spec.val_samples = 32;
    spec.batch_size = 8;
    return spec;
}

} // namespace

TEST_CASE("quadratic task is the exact bowl") {
    TaskSpec spec = small_spec(TaskKind::quadratic);
    spec.dim = 2;
    spec.noise_scale = 0.0;
    const auto task = make_task(spec, spec.data_seed);
    CHECK(task->param_dim() == 2);
    CHECK(task->train_size() == 0);

    // loss at the optimum is zero; gradient vanishes there
    const Eigen::VectorXd p = task->initial_params();
    const Eigen::VectorXd g = task->grad(p, {});
    const Eigen::VectorXd optimum = p - g;  // grad = p - target
    CHECK(task->val_loss(optimum) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(task->grad(optimum, {}).norm() == doctest::Approx(0.0));
    CHECK(task->loss(p, {}) == doctest::Approx(0.5 * g.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("analytic gradients agree with the independent oracle") {
    for (TaskKind kind : {TaskKind::quadratic, TaskKind::noisy_quadratic,
                          TaskKind::logistic_regression, TaskKind::mlp1}) {
        const TaskSpec spec = small_spec(kind);
        const auto task = make_task(spec, spec.data_seed);
        std::vector<long> batch;
        for (long i = 0; i < std::min<long>(task->train_size(), 8); ++i)
            batch.push_back(i);

        SplitMix64 rng(0xD1CE);
        for (int point = 0; point < 5; ++point) {
            Eigen::VectorXd params = task->initial_params();
            for (long i = 0; i < params.size(); ++i) params(i) += 0.5 * rng.next_normal();
            const Eigen::VectorXd analytic = task->grad(params, batch);
            const Eigen::VectorXd numeric = numeric_grad(*task, params, batch);
            for (long i = 0; i < params.size(); ++i) {
                const double scale =
                    std::max({1.0, std::abs(analytic(i)), std::abs(numeric(i))});
                CHECK(std::abs(analytic(i) - numeric(i)) / scale < 1e-6);
            }
        }
    }
}

TEST_CASE("gradient_check passes the task menu and catches corruption") {
    for (TaskKind kind : {TaskKind::quadratic, TaskKind::noisy_quadratic,
                          TaskKind::logistic_regression, TaskKind::mlp1}) {
        const TaskSpec spec = small_spec(kind);
        const auto task = make_task(spec, spec.data_seed);
        SplitMix64 rng(7);
        Eigen::VectorXd params = task->initial_params();
        for (long i = 0; i < params.size(); ++i) params(i) += 0.3 * rng.next_normal();
        const GradCheckResult result = gradient_check(*task, params, 1e-4);
        CHECK(result.pass);
        if (kind == TaskKind::quadratic) CHECK(result.max_rel_deviation <= 1e-8);
    }
}

namespace {

// Wrapper that corrupts one analytic gradient coordinate by +0.01.
class CorruptedTask final : public Task {
public:
    explicit CorruptedTask(std::unique_ptr<Task> inner) : inner_(std::move(inner)) {
        batch_size_ = inner_->batch_size();
        initial_params_ = inner_->initial_params();
    }
    long param_dim() const override { return inner_->param_dim(); }
    long train_size() const override { return inner_->train_size(); }
    double loss(const Eigen::VectorXd& p, const std::vector<long>& b) const override {
        return inner_->loss(p, b);
    }
    Eigen::VectorXd grad(const Eigen::VectorXd& p, const std::vector<long>& b) const override {
        Eigen::VectorXd g = inner_->grad(p, b);
        g(0) += 0.01;
        return g;
    }
    double val_loss(const Eigen::VectorXd& p) const override { return inner_->val_loss(p); }

private:
    std::unique_ptr<Task> inner_;
};

} // namespace

TEST_CASE("gradient_check fails on a corrupted gradient") {
    const TaskSpec spec = small_spec(TaskKind::quadratic);
    CorruptedTask corrupted(make_task(spec, spec.data_seed));
    const Eigen::VectorXd params = corrupted.initial_params();
    const GradCheckResult result = gradient_check(corrupted, params, 1e-4);
    CHECK_FALSE(result.pass);
    CHECK(result.max_rel_deviation >= 0.001);
}

TEST_CASE("tasks are bitwise deterministic in (spec, seed)") {
    for (TaskKind kind : {TaskKind::noisy_quadratic, TaskKind::logistic_regression,
                          TaskKind::mlp1}) {
        const TaskSpec spec = small_spec(kind);
        const auto a = make_task(spec, 17);
        const auto b = make_task(spec, 17);
        const Eigen::VectorXd pa = a->initial_params();
        const Eigen::VectorXd pb = b->initial_params();
        REQUIRE(pa.cwiseEqual(pb).all());
        const std::vector<long> batch = {0, 1, 2};
        CHECK(a->loss(pa, batch) == b->loss(pb, batch));
        CHECK(a->grad(pa, batch).cwiseEqual(b->grad(pb, batch)).all());
        CHECK(a->val_loss(pa) == b->val_loss(pb));

        const auto c = make_task(spec, 18);  // different data seed
        CHECK(a->val_loss(pa) != c->val_loss(pa));
    }
}

TEST_CASE("spec validation") {
    TaskSpec spec = small_spec(TaskKind::mlp1);
    spec.dim = 0;
    CHECK_THROWS_AS(make_task(spec, 1), std::invalid_argument);
    spec = small_spec(TaskKind::mlp1);
    spec.hidden = 0;
    CHECK_THROWS_AS(make_task(spec, 1), std::invalid_argument);
    spec = small_spec(TaskKind::quadratic);
    spec.batch_size = 0;
    CHECK_THROWS_AS(make_task(spec, 1), std::invalid_argument);
    CHECK_THROWS_AS(task_kind_from_string("mlp7"), std::invalid_argument);
    CHECK(to_string(task_kind_from_string("noisy_quadratic")) == "noisy_quadratic");
}

TEST_CASE("default decay masks skip bias coordinates") {
    const auto quad = make_task(small_spec(TaskKind::quadratic), 1);
    CHECK(quad->default_decay_mask().minCoeff() == 1.0);

    const TaskSpec log_spec = small_spec(TaskKind::logistic_regression);
    const auto logistic = make_task(log_spec, 1);
    const Eigen::VectorXd log_mask = logistic->default_decay_mask();
    CHECK(log_mask(log_spec.dim) == 0.0);  // intercept
    CHECK(log_mask.head(log_spec.dim).minCoeff() == 1.0);

    const TaskSpec mlp_spec = small_spec(TaskKind::mlp1);
    const auto mlp = make_task(mlp_spec, 1);
    const Eigen::VectorXd mlp_mask = mlp->default_decay_mask();
    const long w1 = mlp_spec.hidden * mlp_spec.dim;
    CHECK(mlp_mask.head(w1).minCoeff() == 1.0);                    // W1 decays
    CHECK(mlp_mask.segment(w1, mlp_spec.hidden).maxCoeff() == 0.0);  // b1 skipped
    CHECK(mlp_mask.segment(w1 + mlp_spec.hidden, mlp_spec.hidden).minCoeff() == 1.0);
    CHECK(mlp_mask(mlp->param_dim() - 1) == 0.0);  // b2 skipped
}

TEST_CASE("batch sampling stays in range and respects batch_size") {
    const TaskSpec spec = small_spec(TaskKind::logistic_regression);
    const auto task = make_task(spec, 5);
    SplitMix64 rng(11);
    for (int i = 0; i < 50; ++i) {
        const auto batch = task->sample_batch(rng);
        CHECK(batch.size() == static_cast<std::size_t>(spec.batch_size));
        for (long idx : batch) {
            CHECK(idx >= 0);
            CHECK(idx < task->train_size());
        }
    }

    const auto data_free = make_task(small_spec(TaskKind::quadratic), 5);
    CHECK(data_free->sample_batch(rng).empty());
}
