#include "oneclock/tasks.hpp"

#include <cmath>
#include <stdexcept>

namespace oneclock {

TaskKind task_kind_from_string(const std::string& name) {
    if (name == "quadratic") return TaskKind::quadratic;
    if (name == "noisy_quadratic") return TaskKind::noisy_quadratic;
    if (name == "logistic_regression") return TaskKind::logistic_regression;
    if (name == "mlp1") return TaskKind::mlp1;
    throw std::invalid_argument("unknown task kind: " + name);
}

std::string to_string(TaskKind kind) {
    switch (kind) {
        case TaskKind::quadratic: return "quadratic";
        case TaskKind::noisy_quadratic: return "noisy_quadratic";
        case TaskKind::logistic_regression: return "logistic_regression";
        case TaskKind::mlp1: return "mlp1";
    }
    throw std::invalid_argument("unknown task kind");
}

void validate(const TaskSpec& spec) {
    if (spec.dim < 1) throw std::invalid_argument("task spec: dim must be >= 1");
    if (spec.kind == TaskKind::mlp1 && spec.hidden < 1)
        throw std::invalid_argument("task spec: hidden must be >= 1 for mlp1");
    if (!(spec.noise_scale >= 0.0))
        throw std::invalid_argument("task spec: noise_scale must be >= 0");
    if (spec.train_samples < 1 || spec.val_samples < 1)
        throw std::invalid_argument("task spec: sample counts must be >= 1");
    if (spec.batch_size < 1)
        throw std::invalid_argument("task spec: batch_size must be >= 1");
}

std::vector<long> Task::sample_batch(SplitMix64& rng) const {
    std::vector<long> batch;
    if (train_size() == 0) return batch;
    batch.reserve(static_cast<std::size_t>(batch_size_));
    for (long i = 0; i < batch_size_; ++i)
        batch.push_back(static_cast<long>(
            rng.next_below(static_cast<std::uint64_t>(train_size()))));
    return batch;
}

namespace {

Eigen::VectorXd random_normal_vector(SplitMix64& rng, long n) {
    Eigen::VectorXd v(n);
    for (long i = 0; i < n; ++i) v(i) = rng.next_normal();
    return v;
}

Eigen::MatrixXd random_normal_matrix(SplitMix64& rng, long rows, long cols) {
    // Row-major fill so the draw order is independent of Eigen's storage.
    Eigen::MatrixXd m(rows, cols);
    for (long r = 0; r < rows; ++r)
        for (long c = 0; c < cols; ++c) m(r, c) = rng.next_normal();
    return m;
}

// loss(p) = 0.5*||p - target||^2, data-free.
class QuadraticTask final : public Task {
public:
    QuadraticTask(const TaskSpec& spec, std::uint64_t seed) {
        SplitMix64 rng(mix_seed(seed, 0xADD0));
        target_ = random_normal_vector(rng, spec.dim);
        initial_params_ = random_normal_vector(rng, spec.dim);
        batch_size_ = spec.batch_size;
    }

    long param_dim() const override { return target_.size(); }
    long train_size() const override { return 0; }

    double loss(const Eigen::VectorXd& params, const std::vector<long>&) const override {
        return 0.5 * (params - target_).squaredNorm();
    }
    Eigen::VectorXd grad(const Eigen::VectorXd& params, const std::vector<long>&) const override {
        return params - target_;
    }
    double val_loss(const Eigen::VectorXd& params) const override {
        return loss(params, {});
    }

private:
    Eigen::VectorXd target_;
};

// Diagonal quadratic with a log-spaced curvature spectrum. Train/val points
// are noisy observations of the optimum; batch gradients carry sampling noise
// the optimizer has to average out.
class NoisyQuadraticTask final : public Task {
public:
    NoisyQuadraticTask(const TaskSpec& spec, std::uint64_t seed) {
        SplitMix64 rng(mix_seed(seed, 0x4011));
        const long d = spec.dim;
        curvature_.resize(d);
        for (long i = 0; i < d; ++i) {
            const double frac = d > 1 ? static_cast<double>(i) / static_cast<double>(d - 1) : 0.0;
            // Mild log-spaced anisotropy; a flatter spectrum keeps many
            // coordinates contributing so validation dips concentrate.
            curvature_(i) = std::pow(10.0, -0.5 * frac);  // 1 down to ~0.32
        }
        optimum_ = random_normal_vector(rng, d);
        initial_params_ = random_normal_vector(rng, d);
        train_ = sample_points(rng, spec.train_samples, spec.noise_scale);
        // The validation split is noiseless: validation then measures the
        // distance to the optimum instead of a constant observation floor.
        val_ = sample_points(rng, spec.val_samples, 0.0);
        batch_size_ = spec.batch_size;
    }

    long param_dim() const override { return optimum_.size(); }
    long train_size() const override { return train_.cols(); }

    double loss(const Eigen::VectorXd& params, const std::vector<long>& batch) const override {
        double total = 0.0;
        if (batch.empty()) {  // full train set
            for (long j = 0; j < train_.cols(); ++j)
                total += point_loss(params, train_.col(j));
            return total / static_cast<double>(train_.cols());
        }
        for (long idx : batch) total += point_loss(params, train_.col(check(idx)));
        return total / static_cast<double>(batch.size());
    }

    Eigen::VectorXd grad(const Eigen::VectorXd& params, const std::vector<long>& batch) const override {
        Eigen::VectorXd center = Eigen::VectorXd::Zero(params.size());
        if (batch.empty()) {
            for (long j = 0; j < train_.cols(); ++j) center += train_.col(j);
            center /= static_cast<double>(train_.cols());
        } else {
            for (long idx : batch) center += train_.col(check(idx));
            center /= static_cast<double>(batch.size());
        }
        return curvature_.cwiseProduct(params - center);
    }

    double val_loss(const Eigen::VectorXd& params) const override {
        double total = 0.0;
        for (long j = 0; j < val_.cols(); ++j) total += point_loss(params, val_.col(j));
        return total / static_cast<double>(val_.cols());
    }

private:
    long check(long idx) const {
        if (idx < 0 || idx >= train_.cols())
            throw std::out_of_range("noisy_quadratic: batch index out of range");
        return idx;
    }
    double point_loss(const Eigen::VectorXd& params, const Eigen::VectorXd& point) const {
        return 0.5 * (curvature_.array() * (params - point).array().square()).sum();
    }
    Eigen::MatrixXd sample_points(SplitMix64& rng, long count, double noise) {
        Eigen::MatrixXd pts(optimum_.size(), count);
        for (long j = 0; j < count; ++j)
            pts.col(j) = optimum_ + noise * random_normal_vector(rng, optimum_.size());
        return pts;
    }

    Eigen::VectorXd curvature_;
    Eigen::VectorXd optimum_;
    Eigen::MatrixXd train_;  // one column per sample
    Eigen::MatrixXd val_;
};

// Two Gaussian blobs at +/-mu, labels in {-1,+1}; params are [w; b].
// noise_scale is the blob spread relative to the class separation.
class LogisticTask final : public Task {
public:
    LogisticTask(const TaskSpec& spec, std::uint64_t seed) {
        SplitMix64 rng(mix_seed(seed, 0x106));
        const long d = spec.dim;
        mu_ = random_normal_vector(rng, d);
        mu_ *= 1.0 / mu_.norm();
        const double spread = spec.noise_scale > 0.0 ? spec.noise_scale : 0.25;
        initial_params_ = 0.1 * random_normal_vector(rng, d + 1);
        sample_split(rng, spec.train_samples, spread, train_x_, train_y_);
        sample_split(rng, spec.val_samples, spread, val_x_, val_y_);
        batch_size_ = spec.batch_size;
    }

    long param_dim() const override { return mu_.size() + 1; }
    long train_size() const override { return train_x_.cols(); }

    double loss(const Eigen::VectorXd& params, const std::vector<long>& batch) const override {
        return mean_loss(params, train_x_, train_y_, &batch);
    }

    Eigen::VectorXd grad(const Eigen::VectorXd& params, const std::vector<long>& batch) const override {
        const long d = mu_.size();
        const Eigen::VectorXd w = params.head(d);
        const double b = params(d);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(params.size());
        const std::vector<long>& idx = batch;
        const long n = idx.empty() ? train_x_.cols() : static_cast<long>(idx.size());
        for (long k = 0; k < n; ++k) {
            const long j = idx.empty() ? k : idx[static_cast<std::size_t>(k)];
            const auto x = train_x_.col(j);
            const double y = train_y_(j);
            const double margin = y * (w.dot(x) + b);
            const double s = sigmoid(-margin);  // d/dmargin of softplus(-margin)
            g.head(d) += (-y * s) * x;
            g(d) += -y * s;
        }
        return g / static_cast<double>(n);
    }

    double val_loss(const Eigen::VectorXd& params) const override {
        return mean_loss(params, val_x_, val_y_, nullptr);
    }

    Eigen::VectorXd default_decay_mask() const override {
        Eigen::VectorXd mask = Eigen::VectorXd::Ones(param_dim());
        mask(mu_.size()) = 0.0;  // intercept
        return mask;
    }

private:
    static double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }
    static double softplus(double z) {
        // log(1 + e^z) without overflow
        return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    }

    double mean_loss(const Eigen::VectorXd& params, const Eigen::MatrixXd& xs,
                     const Eigen::VectorXd& ys, const std::vector<long>* batch) const {
        const long d = mu_.size();
        const Eigen::VectorXd w = params.head(d);
        const double b = params(d);
        const long n = (batch && !batch->empty()) ? static_cast<long>(batch->size()) : xs.cols();
        double total = 0.0;
        for (long k = 0; k < n; ++k) {
            const long j = (batch && !batch->empty()) ? (*batch)[static_cast<std::size_t>(k)] : k;
            if (j < 0 || j >= xs.cols())
                throw std::out_of_range("logistic_regression: batch index out of range");
            total += softplus(-ys(j) * (w.dot(xs.col(j)) + b));
        }
        return total / static_cast<double>(n);
    }

    void sample_split(SplitMix64& rng, long count, double spread,
                      Eigen::MatrixXd& xs, Eigen::VectorXd& ys) {
        xs.resize(mu_.size(), count);
        ys.resize(count);
        for (long j = 0; j < count; ++j) {
            const double y = (j % 2 == 0) ? 1.0 : -1.0;
            xs.col(j) = y * mu_ + spread * random_normal_vector(rng, mu_.size());
            ys(j) = y;
        }
    }

    Eigen::VectorXd mu_;
    Eigen::MatrixXd train_x_;
    Eigen::VectorXd train_y_;
    Eigen::MatrixXd val_x_;
    Eigen::VectorXd val_y_;
};

// One-hidden-layer tanh regressor on a teacher of the same shape.
// Flat layout: [W1 (hidden x dim, row major), b1, w2, b2].
class Mlp1Task final : public Task {
public:
    Mlp1Task(const TaskSpec& spec, std::uint64_t seed)
        : dim_(spec.dim), hidden_(spec.hidden) {
        SplitMix64 rng(mix_seed(seed, 0x371));
        teacher_w1_ = random_normal_matrix(rng, hidden_, dim_) / std::sqrt(static_cast<double>(dim_));
        teacher_b1_ = 0.5 * random_normal_vector(rng, hidden_);
        teacher_w2_ = random_normal_vector(rng, hidden_) / std::sqrt(static_cast<double>(hidden_));
        teacher_b2_ = 0.1 * rng.next_normal();
        initial_params_ = random_normal_vector(rng, param_dim());
        initial_params_.head(hidden_ * dim_) /= std::sqrt(static_cast<double>(dim_));
        initial_params_.tail(hidden_ + 1) *= 0.5;
        sample_split(rng, spec.train_samples, spec.noise_scale, train_x_, train_y_);
        // Validation labels are exact teacher outputs (label noise corrupts
        // training only), so the realizable floor is zero.
        sample_split(rng, spec.val_samples, 0.0, val_x_, val_y_);
        batch_size_ = spec.batch_size;
    }

    long param_dim() const override { return hidden_ * dim_ + hidden_ + hidden_ + 1; }
    long train_size() const override { return train_x_.cols(); }

    double loss(const Eigen::VectorXd& params, const std::vector<long>& batch) const override {
        Views p = unpack(params);
        const long n = batch.empty() ? train_x_.cols() : static_cast<long>(batch.size());
        double total = 0.0;
        for (long k = 0; k < n; ++k) {
            const long j = batch.empty() ? k : batch[static_cast<std::size_t>(k)];
            const double e = forward(p, train_x_.col(index(j))) - train_y_(j);
            total += 0.5 * e * e;
        }
        return total / static_cast<double>(n);
    }

    Eigen::VectorXd grad(const Eigen::VectorXd& params, const std::vector<long>& batch) const override {
        Views p = unpack(params);
        Eigen::MatrixXd d_w1 = Eigen::MatrixXd::Zero(hidden_, dim_);
        Eigen::VectorXd d_b1 = Eigen::VectorXd::Zero(hidden_);
        Eigen::VectorXd d_w2 = Eigen::VectorXd::Zero(hidden_);
        double d_b2 = 0.0;
        const long n = batch.empty() ? train_x_.cols() : static_cast<long>(batch.size());
        for (long k = 0; k < n; ++k) {
            const long j = batch.empty() ? k : batch[static_cast<std::size_t>(k)];
            const auto x = train_x_.col(index(j));
            const Eigen::VectorXd a = (p.w1 * x + p.b1).array().tanh().matrix();
            const double e = p.w2.dot(a) + p.b2 - train_y_(j);
            const Eigen::VectorXd dz =
                (e * p.w2.array() * (1.0 - a.array().square())).matrix();
            d_w1 += dz * x.transpose();
            d_b1 += dz;
            d_w2 += e * a;
            d_b2 += e;
        }
        Eigen::VectorXd g(param_dim());
        long off = 0;
        for (long r = 0; r < hidden_; ++r, off += dim_)
            g.segment(off, dim_) = d_w1.row(r).transpose();
        g.segment(off, hidden_) = d_b1; off += hidden_;
        g.segment(off, hidden_) = d_w2; off += hidden_;
        g(off) = d_b2;
        return g / static_cast<double>(n);
    }

    double val_loss(const Eigen::VectorXd& params) const override {
        Views p = unpack(params);
        double total = 0.0;
        for (long j = 0; j < val_x_.cols(); ++j) {
            const double e = forward(p, val_x_.col(j)) - val_y_(j);
            total += 0.5 * e * e;
        }
        return total / static_cast<double>(val_x_.cols());
    }

    Eigen::VectorXd default_decay_mask() const override {
        Eigen::VectorXd mask = Eigen::VectorXd::Ones(param_dim());
        mask.segment(hidden_ * dim_, hidden_).setZero();  // b1
        mask(param_dim() - 1) = 0.0;                      // b2
        return mask;
    }

private:
    struct Views {
        Eigen::MatrixXd w1;
        Eigen::VectorXd b1;
        Eigen::VectorXd w2;
        double b2;
    };

    Views unpack(const Eigen::VectorXd& params) const {
        if (params.size() != param_dim())
            throw std::invalid_argument("mlp1: parameter vector has wrong length");
        Views p;
        p.w1.resize(hidden_, dim_);
        long off = 0;
        for (long r = 0; r < hidden_; ++r, off += dim_)
            p.w1.row(r) = params.segment(off, dim_).transpose();
        p.b1 = params.segment(off, hidden_); off += hidden_;
        p.w2 = params.segment(off, hidden_); off += hidden_;
        p.b2 = params(off);
        return p;
    }

    double forward(const Views& p, const Eigen::Ref<const Eigen::VectorXd>& x) const {
        return p.w2.dot((p.w1 * x + p.b1).array().tanh().matrix()) + p.b2;
    }

    long index(long j) const {
        if (j < 0 || j >= train_x_.cols())
            throw std::out_of_range("mlp1: batch index out of range");
        return j;
    }

    void sample_split(SplitMix64& rng, long count, double noise,
                      Eigen::MatrixXd& xs, Eigen::VectorXd& ys) {
        xs.resize(dim_, count);
        ys.resize(count);
        Views teacher{teacher_w1_, teacher_b1_, teacher_w2_, teacher_b2_};
        for (long j = 0; j < count; ++j) {
            xs.col(j) = random_normal_vector(rng, dim_);
            ys(j) = forward(teacher, xs.col(j)) + noise * rng.next_normal();
        }
    }

    long dim_;
    long hidden_;
    Eigen::MatrixXd teacher_w1_;
    Eigen::VectorXd teacher_b1_;
    Eigen::VectorXd teacher_w2_;
    double teacher_b2_ = 0.0;
    Eigen::MatrixXd train_x_;
    Eigen::VectorXd train_y_;
    Eigen::MatrixXd val_x_;
    Eigen::VectorXd val_y_;
};

} // namespace

std::unique_ptr<Task> make_task(const TaskSpec& spec, std::uint64_t seed) {
    validate(spec);
    switch (spec.kind) {
        case TaskKind::quadratic: return std::make_unique<QuadraticTask>(spec, seed);
        case TaskKind::noisy_quadratic: return std::make_unique<NoisyQuadraticTask>(spec, seed);
        case TaskKind::logistic_regression: return std::make_unique<LogisticTask>(spec, seed);
        case TaskKind::mlp1: return std::make_unique<Mlp1Task>(spec, seed);
    }
    throw std::invalid_argument("make_task: unknown task kind");
}

GradCheckResult gradient_check(const Task& task, const Eigen::VectorXd& params, double tol) {
    if (!(tol > 0.0))
        throw std::domain_error("gradient_check: tol must be > 0");

    // Fixed batch: the first batch_size train indices (all of them if fewer).
    std::vector<long> batch;
    const long n = std::min(task.train_size(), task.batch_size());
    for (long i = 0; i < n; ++i) batch.push_back(i);

    const double base = task.loss(params, batch);
    if (!std::isfinite(base))
        throw std::runtime_error("gradient_check: non-finite loss");

    const Eigen::VectorXd analytic = task.grad(params, batch);
    Eigen::VectorXd probe = params;
    double worst = 0.0;
    for (long i = 0; i < params.size(); ++i) {
        const double h = 1e-5 * (1.0 + std::abs(params(i)));
        probe(i) = params(i) + h;
        const double up = task.loss(probe, batch);
        probe(i) = params(i) - h;
        const double down = task.loss(probe, batch);
        probe(i) = params(i);
        if (!std::isfinite(up) || !std::isfinite(down))
            throw std::runtime_error("gradient_check: non-finite loss");
        const double numeric = (up - down) / (2.0 * h);
        const double scale = std::max({1.0, std::abs(analytic(i)), std::abs(numeric)});
        worst = std::max(worst, std::abs(analytic(i) - numeric) / scale);
    }
    return GradCheckResult{worst <= tol, worst};
}

} // namespace oneclock
