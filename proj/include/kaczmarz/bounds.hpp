#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "kaczmarz/linalg.hpp"

namespace kaczmarz {

/// Per-sweep contraction factors for one row-normalized matrix B. Every
/// present value is a bound on (or, for rho_sq_oracle, the exact value of)
/// ||M_m||_2^2 where M_m is the sweep matrix, except rka_step which is the
/// expected per-step factor of the randomized method.
struct BoundReport {
    double lambda = 1.0;
    std::size_t m = 0;
    std::size_t n = 0;

    double rho_sq_oracle = 0.0;
    double rho1 = 0.0;
    double rho1_sharp = 0.0;
    std::optional<double> rho2;
    std::optional<double> corollary1;
    std::optional<double> meany;
    double rka_step = 0.0;
    std::optional<double> ref24;
    std::optional<double> ref26;
};

/// Contiguous, disjoint row blocks covering 0..m-1 in order. Each block is
/// the half-open range [first, last).
struct Partition {
    struct Block {
        std::size_t first = 0;
        std::size_t last = 0;
        std::size_t size() const noexcept { return last - first; }
        friend bool operator==(const Block&, const Block&) = default;
    };

    std::vector<Block> blocks;

    /// Throws DomainError unless the blocks tile [0, m) in order.
    void validate(std::size_t m) const;
};

/// ||M_m||_2^2 computed from the explicit sweep matrix.
double true_contraction(const DenseMatrix& b, double lambda);

/// 1 - lambda(2-lambda) / ((2 + lambda^2 K) pinv_norm^2) with K = m^2, or
/// K = m(m-1) when `sharp`. Accepts 0 < lambda <= 2; at lambda = 2 the value
/// is exactly 1.
double bound_theorem1(double pinv_norm, std::size_t m, double lambda, bool sharp = false);

/// lambda = 1 specialization: 1 - 1 / (2 m^2 pinv_norm^2), requires m >= 2.
double bound_corollary1(double pinv_norm, std::size_t m);

/// ceil(m/n) blocks: all of size n except a shorter final block when n does
/// not divide m.
Partition default_partition(std::size_t m, std::size_t n);

/// Product over blocks of the sharp single-block factor, using each block's
/// own row count and pseudo-inverse norm. Throws BlockRankDeficient when a
/// block has fewer than n rows or is numerically rank deficient.
double bound_corollary2(const DenseMatrix& b, double lambda, const Partition& partition);

/// 1 - prod sigma_i^2 for square B. Throws NotSquare otherwise.
double bound_meany(const DenseMatrix& b);

struct Lemma1Result {
    bool hypothesis = false;  // sigma_{n-1}^2 <= (n-2)^(n-2) / (2 n^n)
    bool conclusion = false;  // prod_{i<n} sigma_i^2 <= 1 / (2 n^2)
};

/// Evaluates the sufficient condition and the condition it implies for
/// squared singular values `sigma_sq` (descending, length n, summing to n).
/// Throws DomainError for n < 3 or inputs violating the preconditions.
Lemma1Result lemma1_check(std::span<const double> sigma_sq, std::size_t n);

/// (1 - 1 / (frob_sq pinv_norm^2))^steps.
double bound_rka(double frob_sq, double pinv_norm, std::size_t steps);

double bound_ref24(double pinv_norm, std::size_t m, double lambda);
/// Minimizer of bound_ref24 in lambda: (sqrt(4m-3) - 1) / (2(m-1)), m >= 2.
double optimal_lambda_ref24(std::size_t m);
/// Minimizer of the non-sharp bound_theorem1 in lambda: root of
/// lambda^2 m^2 + 2 lambda - 2 = 0.
double optimal_lambda_thm1(std::size_t m);

/// 1 - 1 / (floor(log2(2m)) spec_norm_sq pinv_norm^2).
double bound_ref26(double spec_norm_sq, double pinv_norm, std::size_t m);

/// Every applicable bound for a row-normalized, full-rank B.
BoundReport full_report(const DenseMatrix& b, double lambda);

}  // namespace kaczmarz
