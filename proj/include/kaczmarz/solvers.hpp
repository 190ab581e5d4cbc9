#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kaczmarz/linalg.hpp"
#include "kaczmarz/random.hpp"

namespace kaczmarz {

/// Consistent system A x = b, m >= n >= 1. Each row encodes the hyperplane
/// {x : a_i^T x = b_i}.
struct LinearSystem {
    DenseMatrix a;
    Vector b;
    std::optional<Vector> x_true;

    std::size_t rows() const noexcept { return a.rows(); }
    std::size_t cols() const noexcept { return a.cols(); }

    /// Throws DimensionMismatch / DomainError when shapes disagree, m < n,
    /// or x_true leaves a residual above 1e-8 in the max norm.
    void validate() const;
};

enum class Ordering { cyclic, randomized };

struct SolverConfig {
    double lambda = 1.0;
    std::size_t sweeps = 50;
    Ordering ordering = Ordering::cyclic;
    std::uint64_t seed = 42;

    /// The update requires the open interval 0 < lambda < 2.
    void validate() const;
};

/// Squared error ||x_{jm} - x_true||^2 at each sweep boundary j = 0..J.
/// The error vector is carried through its own recursion
/// theta_{k+1} = (I - lambda P_i) theta_k rather than recomputed from the
/// iterate, so the trace keeps its relative accuracy far below the
/// cancellation floor of x - x_true.
struct ConvergenceTrace {
    std::vector<double> sq_errors;
    Vector final_x;
};

/// One relaxed projection onto the hyperplane of `row` (0-based).
Vector ka_step(std::span<const double> x, const LinearSystem& system, std::size_t row,
               double lambda);

/// In-place variant used by the runners.
void ka_step_inplace(std::span<double> x, const LinearSystem& system, std::size_t row,
                     double lambda);

/// Cyclic Kaczmarz: J*m steps visiting rows 0, 1, ..., m-1, 0, ... The
/// seed and ordering fields of `config` are ignored.
ConvergenceTrace ka_run(const LinearSystem& system, const SolverConfig& config,
                        std::span<const double> x0);

/// Randomized Kaczmarz: each of the J*m steps draws a row with probability
/// ||a_p||^2 / ||A||_F^2 from Rng(config.seed). A "sweep" is m draws.
ConvergenceTrace rka_run(const LinearSystem& system, const SolverConfig& config,
                         std::span<const double> x0);

/// Dispatches on config.ordering.
ConvergenceTrace run(const LinearSystem& system, const SolverConfig& config,
                     std::span<const double> x0);

/// Final iterate after config.sweeps sweeps; x_true is not needed.
Vector solve(const LinearSystem& system, const SolverConfig& config, std::span<const double> x0);

/// Entrywise mean of rka_run traces over seeds config.seed + r,
/// r = 0..realizations-1. Realizations are spread over `threads` workers
/// (0 = hardware concurrency); the sum is taken in realization order so the
/// result does not depend on the thread count.
std::vector<double> mean_trace(const LinearSystem& system, const SolverConfig& config,
                               std::span<const double> x0, std::size_t realizations,
                               unsigned threads = 0);

/// Draws row indices with probability proportional to squared row norms by
/// binary search over the cumulative weights.
class RowSampler {
public:
    explicit RowSampler(const DenseMatrix& a);

    std::size_t draw(Rng& rng) const;
    std::span<const double> cumulative() const noexcept { return cumulative_; }

private:
    std::vector<double> cumulative_;
};

/// Path of a unit vector through one sweep of the error recursion
/// v_i = (I - lambda P_i) v_{i-1}, with P_i = b_i b_i^T for unit rows b_i.
struct SweepPath {
    std::vector<Vector> iterates;        // v_0 .. v_m
    std::vector<double> projection_sq;   // ||P_i v_{i-1}||^2, i = 1..m
};

SweepPath sweep_path(const DenseMatrix& b, double lambda, std::span<const double> v0);

}  // namespace kaczmarz
