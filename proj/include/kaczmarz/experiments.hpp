#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kaczmarz/csv.hpp"
#include "kaczmarz/linalg.hpp"
#include "kaczmarz/solvers.hpp"

namespace kaczmarz {

struct ExperimentConfig {
    struct Range {
        std::size_t min = 10;
        std::size_t max = 1000;
    };

    std::size_t m = 30;
    std::size_t n = 3;
    double lambda = 1.0;
    std::size_t sweeps = 60;
    std::size_t realizations = 1000;
    std::uint64_t seed = 42;
    std::optional<double> pinv_norm_fixed;
    std::optional<Range> m_range;
    unsigned threads = 0;

    void validate() const;
};

/// Row-normalized Gaussian system with a Gaussian ground truth.
///
/// Draw order from Rng(seed): the m*n entries of A row by row (a row with
/// norm below 1e-300 is redrawn once), then the n entries of x_true.
/// Matrices whose sigma_min <= min_rcond * sigma_1 are discarded and a new
/// matrix is drawn from the same stream, at most 100 times.
LinearSystem gen_problem(std::size_t m, std::size_t n, std::uint64_t seed, double min_rcond = 0.01);

/// Square row-normalized matrix whose last two singular values are of order
/// `eps`: each row is Gaussian g in the first n-2 coordinates and
/// eps * ||g|| * Gaussian in the last two. Needs n >= 3.
DenseMatrix gen_near_degenerate_square(std::size_t n, double eps, std::uint64_t seed);

/// A seeded row-normalized instance together with its relaxation parameter.
struct BoundInstance {
    DenseMatrix b;
    double lambda = 1.0;
};

/// `count` instances with m in [5, 60], n in [2, min(8, m)] and lambda
/// cycling through {0.1, 0.5, 1, 1.5, 1.9}.
std::vector<BoundInstance> soundness_instances(std::uint64_t seed, std::size_t count);

/// `count` square instances with n = m in [3, 10] and lambda = 1.
std::vector<BoundInstance> square_instances(std::uint64_t seed, std::size_t count);

/// Descending squared singular values summing to n. Roughly half of the
/// draws satisfy sigma_{n-1}^2 <= (n-2)^(n-2) / (2 n^n).
std::vector<double> sample_sigma_sq(std::size_t n, Rng& rng);

/// Cyclic trace, randomized mean trace and the three bound envelopes
/// anchored at the initial squared error, x0 = 0. Columns:
/// sweep, ka_sq_error, rka_mean_sq_error, ka_bd1, ka_bd2, rka_bd.
CsvTable run_fig1(const ExperimentConfig& config);

/// Both optimal-lambda bounds for every m in config.m_range with
/// ||B^+||_2 fixed at config.pinv_norm_fixed. Columns: m, bd_ref24_opt,
/// bd_thm1_opt.
CsvTable run_fig2(const ExperimentConfig& config);

inline const std::vector<std::string> kFig1Columns{"sweep",  "ka_sq_error", "rka_mean_sq_error",
                                                   "ka_bd1", "ka_bd2",      "rka_bd"};
inline const std::vector<std::string> kFig2Columns{"m", "bd_ref24_opt", "bd_thm1_opt"};

struct PropertyResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<PropertyResult> properties;

    std::size_t failures() const;
    bool all_passed() const { return failures() == 0; }
};

/// Hooks for exercising the suite against deliberately broken formulas.
struct VerifyOptions {
    std::function<double(double pinv_norm, std::size_t m, double lambda, bool sharp)> theorem1;
    unsigned threads = 0;
};

/// Runs every quantified property of the solvers and bounds on instances
/// derived from `seed`. Failures are reported, not thrown.
VerifyReport verify_suite(std::uint64_t seed, const VerifyOptions& options = {});

}  // namespace kaczmarz
