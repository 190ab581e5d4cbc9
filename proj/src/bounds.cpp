#include "kaczmarz/bounds.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "kaczmarz/errors.hpp"

namespace kaczmarz {

namespace {

void require_pinv(double pinv_norm) {
    if (!(pinv_norm > 0.0) || !std::isfinite(pinv_norm)) {
        throw DomainError("pseudo-inverse norm must be positive and finite");
    }
}

// Products like ||B||_F^2 ||B^+||_2^2 are >= 1 exactly; allow for rounding
// in the singular values they were computed from.
double condition_product(double a, double pinv_norm, const char* what) {
    const double c = a * pinv_norm * pinv_norm;
    if (!(c >= 1.0 - 1e-10) || !std::isfinite(c)) {
        throw DomainError(std::string(what) + " times pinv_norm^2 must be >= 1, got " +
                          std::to_string(c));
    }
    return std::max(c, 1.0);
}

}  // namespace

void Partition::validate(std::size_t m) const {
    std::size_t expected = 0;
    for (const auto& block : blocks) {
        if (block.first != expected || block.last <= block.first) {
            throw DomainError("partition blocks must be non-empty, contiguous and in order");
        }
        expected = block.last;
    }
    if (expected != m) throw DomainError("partition does not cover all " + std::to_string(m) + " rows");
}

double true_contraction(const DenseMatrix& b, double lambda) {
    const double rho = spectral_norm(sweep_matrix(b, lambda));
    return rho * rho;
}

double bound_theorem1(double pinv_norm, std::size_t m, double lambda, bool sharp) {
    require_pinv(pinv_norm);
    if (m < 1) throw DomainError("row count must be at least 1");
    if (!(lambda > 0.0 && lambda <= 2.0)) {
        throw DomainError("lambda must lie in (0, 2], got " + std::to_string(lambda));
    }
    const double md = static_cast<double>(m);
    const double k = sharp ? md * (md - 1.0) : md * md;
    return 1.0 - lambda * (2.0 - lambda) / ((2.0 + lambda * lambda * k) * pinv_norm * pinv_norm);
}

double bound_corollary1(double pinv_norm, std::size_t m) {
    require_pinv(pinv_norm);
    if (m < 2) throw DomainError("corollary bound needs m >= 2");
    const double md = static_cast<double>(m);
    return 1.0 - 1.0 / (2.0 * md * md * pinv_norm * pinv_norm);
}

Partition default_partition(std::size_t m, std::size_t n) {
    if (n < 1 || m < n) throw DomainError("partition needs m >= n >= 1");
    Partition p;
    const std::size_t count = (m + n - 1) / n;
    p.blocks.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        p.blocks.push_back({i * n, std::min(m, (i + 1) * n)});
    }
    return p;
}

double bound_corollary2(const DenseMatrix& b, double lambda, const Partition& partition) {
    partition.validate(b.rows());
    double product = 1.0;
    for (std::size_t i = 0; i < partition.blocks.size(); ++i) {
        const auto& block = partition.blocks[i];
        if (block.size() < b.cols()) throw BlockRankDeficient(i);
        const DenseMatrix sub = b.row_block(block.first, block.last);
        const SvdResult svd = svd_values(sub);
        if (!has_full_column_rank(svd, sub.rows(), sub.cols())) throw BlockRankDeficient(i);
        product *= bound_theorem1(1.0 / svd.smallest(), block.size(), lambda, /*sharp=*/true);
    }
    return product;
}

double bound_meany(const DenseMatrix& b) {
    if (b.rows() != b.cols()) throw NotSquare(b.rows(), b.cols());
    double product = 1.0;
    for (double s : svd_values(b).singular_values) product *= s * s;
    return std::clamp(1.0 - product, 0.0, 1.0);
}

Lemma1Result lemma1_check(std::span<const double> sigma_sq, std::size_t n) {
    if (n < 3) throw DomainError("sigma check needs n >= 3");
    if (sigma_sq.size() != n) throw DimensionMismatch("expected n squared singular values");
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(sigma_sq[i] >= 0.0)) throw DomainError("squared singular values must be non-negative");
        if (i > 0 && sigma_sq[i] > sigma_sq[i - 1] * (1.0 + 1e-12)) {
            throw DomainError("squared singular values must be sorted descending");
        }
        sum += sigma_sq[i];
    }
    const double nd = static_cast<double>(n);
    if (std::abs(sum - nd) > 1e-8) {
        throw DomainError("squared singular values must sum to n, got " + std::to_string(sum));
    }

    const double threshold = std::pow(nd - 2.0, nd - 2.0) / (2.0 * std::pow(nd, nd));
    double head = 1.0;
    for (std::size_t i = 0; i + 1 < n; ++i) head *= sigma_sq[i];
    return {sigma_sq[n - 2] <= threshold, head <= 1.0 / (2.0 * nd * nd)};
}

double bound_rka(double frob_sq, double pinv_norm, std::size_t steps) {
    require_pinv(pinv_norm);
    const double c = condition_product(frob_sq, pinv_norm, "frob_sq");
    return std::pow(1.0 - 1.0 / c, static_cast<double>(steps));
}

double bound_ref24(double pinv_norm, std::size_t m, double lambda) {
    require_pinv(pinv_norm);
    if (m < 1) throw DomainError("row count must be at least 1");
    if (!(lambda > 0.0 && lambda < 2.0)) {
        throw DomainError("lambda must lie in (0, 2), got " + std::to_string(lambda));
    }
    const double md = static_cast<double>(m);
    return 1.0 - lambda * (2.0 - lambda) /
                     (md * (1.0 + (md - 1.0) * lambda * lambda) * pinv_norm * pinv_norm);
}

double optimal_lambda_ref24(std::size_t m) {
    if (m < 2) throw DomainError("optimal ref24 lambda needs m >= 2");
    // (sqrt(4m-3) - 1) / (2(m-1)) with the cancellation removed.
    return 2.0 / (std::sqrt(4.0 * static_cast<double>(m) - 3.0) + 1.0);
}

double optimal_lambda_thm1(std::size_t m) {
    if (m < 1) throw DomainError("row count must be at least 1");
    const double md = static_cast<double>(m);
    // (sqrt(1 + 2m^2) - 1) / m^2 with the cancellation removed.
    return 2.0 / (std::sqrt(1.0 + 2.0 * md * md) + 1.0);
}

double bound_ref26(double spec_norm_sq, double pinv_norm, std::size_t m) {
    require_pinv(pinv_norm);
    if (m < 1) throw DomainError("row count must be at least 1");
    const double c = condition_product(spec_norm_sq, pinv_norm, "spec_norm_sq");
    const auto log_floor = static_cast<double>(std::bit_width(2 * m) - 1);  // floor(log2(2m))
    return 1.0 - 1.0 / (log_floor * c);
}

BoundReport full_report(const DenseMatrix& b, double lambda) {
    if (!(lambda > 0.0 && lambda <= 2.0)) {
        throw DomainError("lambda must lie in (0, 2], got " + std::to_string(lambda));
    }
    if (b.cols() < 1 || b.rows() < b.cols()) throw DomainError("bounds need m >= n >= 1");
    for (std::size_t i = 0; i < b.rows(); ++i) {
        if (std::abs(norm2(b.row(i)) - 1.0) > 1e-8) {
            throw DomainError("row " + std::to_string(i) + " is not unit norm");
        }
    }

    BoundReport r;
    r.lambda = lambda;
    r.m = b.rows();
    r.n = b.cols();

    const SvdResult svd = svd_values(b);
    const double pinv = pinv_norm(svd, r.m, r.n);

    r.rho_sq_oracle = true_contraction(b, lambda);
    r.rho1 = bound_theorem1(pinv, r.m, lambda, false);
    r.rho1_sharp = bound_theorem1(pinv, r.m, lambda, true);
    try {
        r.rho2 = bound_corollary2(b, lambda, default_partition(r.m, r.n));
    } catch (const BlockRankDeficient&) {
        r.rho2.reset();
    }
    // The lambda = 1 comparison bounds.
    if (lambda == 1.0) {
        if (r.m >= 2) r.corollary1 = bound_corollary1(pinv, r.m);
        if (r.m == r.n) r.meany = bound_meany(b);
    }
    r.rka_step = bound_rka(b.frobenius_sq(), pinv, 1);
    if (lambda < 2.0) r.ref24 = bound_ref24(pinv, r.m, lambda);
    r.ref26 = bound_ref26(svd.largest() * svd.largest(), pinv, r.m);
    return r;
}

}  // namespace kaczmarz
