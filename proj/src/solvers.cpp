#include "kaczmarz/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "kaczmarz/errors.hpp"

namespace kaczmarz {

void LinearSystem::validate() const {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (n == 0 || m < n) {
        throw DomainError("system must satisfy m >= n >= 1, got " + std::to_string(m) + "x" +
                          std::to_string(n));
    }
    if (b.size() != m) throw DimensionMismatch("right-hand side length differs from row count");
    for (double v : b) {
        if (!std::isfinite(v)) throw DomainError("right-hand side must be finite");
    }
    if (x_true) {
        if (x_true->size() != n) throw DimensionMismatch("x_true length differs from column count");
        const Vector ax = a * *x_true;
        for (std::size_t i = 0; i < m; ++i) {
            if (!(std::abs(ax[i] - b[i]) <= 1e-8)) {
                throw DomainError("system is inconsistent with x_true at row " + std::to_string(i));
            }
        }
    }
}

void SolverConfig::validate() const {
    if (!(lambda > 0.0 && lambda < 2.0)) {
        throw DomainError("relaxation parameter must lie in (0, 2), got " + std::to_string(lambda));
    }
    if (sweeps < 1) throw DomainError("sweeps must be at least 1");
}

void ka_step_inplace(std::span<double> x, const LinearSystem& system, std::size_t row,
                     double lambda) {
    if (row >= system.rows()) throw IndexOutOfRange(row, system.rows());
    const auto a = system.a.row(row);
    const double nrm_sq = norm2_sq(a);
    if (!(std::sqrt(nrm_sq) >= 1e-300)) throw ZeroRow(row);
    const double scale = lambda * (system.b[row] - dot(a, x)) / nrm_sq;
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += scale * a[j];
}

Vector ka_step(std::span<const double> x, const LinearSystem& system, std::size_t row,
               double lambda) {
    if (x.size() != system.cols()) throw DimensionMismatch("iterate length differs from column count");
    Vector out(x.begin(), x.end());
    ka_step_inplace(out, system, row, lambda);
    return out;
}

namespace {

const Vector& truth_of(const LinearSystem& system) {
    if (!system.x_true) throw MissingTruth();
    return *system.x_true;
}

void check_rows(const LinearSystem& system) {
    for (std::size_t i = 0; i < system.rows(); ++i) {
        if (!(norm2(system.a.row(i)) >= 1e-300)) throw ZeroRow(i);
    }
}

// A null `truth` skips the error trace. The error theta = x - x_true is
// propagated through theta <- theta - lambda (a^T theta / ||a||^2) a on the
// same row sequence instead of being formed by subtraction, which would
// floor at about eps^2 ||x||^2.
template <typename NextRow>
ConvergenceTrace run_trace(const LinearSystem& system, const SolverConfig& config,
                           std::span<const double> x0, const Vector* truth, NextRow next_row) {
    if (x0.size() != system.cols()) throw DimensionMismatch("x0 length differs from column count");
    check_rows(system);

    ConvergenceTrace trace;
    trace.final_x.assign(x0.begin(), x0.end());
    Vector theta;
    if (truth) {
        theta = trace.final_x;
        for (std::size_t j = 0; j < theta.size(); ++j) theta[j] -= (*truth)[j];
        trace.sq_errors.reserve(config.sweeps + 1);
        trace.sq_errors.push_back(norm2_sq(theta));
    }
    const std::size_t m = system.rows();
    for (std::size_t j = 0; j < config.sweeps; ++j) {
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t row = next_row(k);
            ka_step_inplace(trace.final_x, system, row, config.lambda);
            if (truth) {
                const auto a = system.a.row(row);
                const double scale = config.lambda * dot(a, theta) / norm2_sq(a);
                for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= scale * a[i];
            }
        }
        if (truth) trace.sq_errors.push_back(norm2_sq(theta));
    }
    return trace;
}

template <typename NextRow>
ConvergenceTrace checked_run(const LinearSystem& system, const SolverConfig& config,
                             std::span<const double> x0, bool need_truth, NextRow next_row) {
    config.validate();
    system.validate();
    const Vector* truth = need_truth ? &truth_of(system) : nullptr;
    return run_trace(system, config, x0, truth, next_row);
}

ConvergenceTrace dispatch(const LinearSystem& system, const SolverConfig& config,
                          std::span<const double> x0, Ordering ordering, bool need_truth) {
    if (ordering == Ordering::cyclic) {
        return checked_run(system, config, x0, need_truth, [](std::size_t k) { return k; });
    }
    const RowSampler sampler(system.a);
    Rng rng(config.seed);
    return checked_run(system, config, x0, need_truth,
                       [&](std::size_t) { return sampler.draw(rng); });
}

}  // namespace

ConvergenceTrace ka_run(const LinearSystem& system, const SolverConfig& config,
                        std::span<const double> x0) {
    return dispatch(system, config, x0, Ordering::cyclic, true);
}

ConvergenceTrace rka_run(const LinearSystem& system, const SolverConfig& config,
                         std::span<const double> x0) {
    return dispatch(system, config, x0, Ordering::randomized, true);
}

ConvergenceTrace run(const LinearSystem& system, const SolverConfig& config,
                     std::span<const double> x0) {
    return dispatch(system, config, x0, config.ordering, true);
}

Vector solve(const LinearSystem& system, const SolverConfig& config, std::span<const double> x0) {
    return dispatch(system, config, x0, config.ordering, false).final_x;
}

std::vector<double> mean_trace(const LinearSystem& system, const SolverConfig& config,
                               std::span<const double> x0, std::size_t realizations,
                               unsigned threads) {
    if (realizations < 1) throw DomainError("realizations must be at least 1");
    // Surface configuration errors on the calling thread.
    config.validate();
    system.validate();
    truth_of(system);

    std::vector<std::vector<double>> traces(realizations);
    auto work = [&](std::size_t first, std::size_t last) {
        SolverConfig local = config;
        for (std::size_t r = first; r < last; ++r) {
            local.seed = config.seed + r;
            traces[r] = rka_run(system, local, x0).sq_errors;
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, realizations));
    if (threads <= 1) {
        work(0, realizations);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (realizations + threads - 1) / threads;
        for (std::size_t first = 0; first < realizations; first += chunk) {
            pool.emplace_back(work, first, std::min(realizations, first + chunk));
        }
    }

    std::vector<double> mean(config.sweeps + 1, 0.0);
    for (const auto& t : traces)
        for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += t[j];
    for (double& v : mean) v /= static_cast<double>(realizations);
    // Every realization starts from x0; keep that entry exact.
    mean[0] = traces.front()[0];
    return mean;
}

RowSampler::RowSampler(const DenseMatrix& a) {
    cumulative_.reserve(a.rows());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        acc += norm2_sq(a.row(i));
        cumulative_.push_back(acc);
    }
    if (!(acc > 0.0)) throw ZeroRow(0);
}

std::size_t RowSampler::draw(Rng& rng) const {
    const double target = rng.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    // Zero-weight rows have cumulative equal to their predecessor and are
    // never selected by upper_bound.
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                 cumulative_.size() - 1);
}

SweepPath sweep_path(const DenseMatrix& b, double lambda, std::span<const double> v0) {
    if (v0.size() != b.cols()) throw DimensionMismatch("v0 length differs from column count");
    SweepPath path;
    path.iterates.reserve(b.rows() + 1);
    path.projection_sq.reserve(b.rows());
    path.iterates.emplace_back(v0.begin(), v0.end());
    for (std::size_t i = 0; i < b.rows(); ++i) {
        const auto r = b.row(i);
        Vector v = path.iterates.back();
        const double c = dot(r, v);  // P_i v = c * b_i, ||P_i v||^2 = c^2
        path.projection_sq.push_back(c * c);
        for (std::size_t j = 0; j < v.size(); ++j) v[j] -= lambda * c * r[j];
        path.iterates.push_back(std::move(v));
    }
    return path;
}

}  // namespace kaczmarz
