#include "kaczmarz/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "kaczmarz/errors.hpp"
#include "kaczmarz/random.hpp"

namespace kaczmarz {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    check_finite();
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionMismatch("matrix data has " + std::to_string(data_.size()) +
                                " entries, expected " + std::to_string(rows_ * cols_));
    }
    check_finite();
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionMismatch("ragged matrix initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
    check_finite();
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
    return out;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> values) {
    DenseMatrix out(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out(i, i) = values[i];
    out.check_finite();
    return out;
}

DenseMatrix DenseMatrix::from_rows(const std::vector<Vector>& rows) {
    const std::size_t m = rows.size();
    const std::size_t n = m == 0 ? 0 : rows.front().size();
    std::vector<double> data;
    data.reserve(m * n);
    for (const auto& r : rows) {
        if (r.size() != n) throw DimensionMismatch("rows have differing lengths");
        data.insert(data.end(), r.begin(), r.end());
    }
    return DenseMatrix(m, n, std::move(data));
}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
}

DenseMatrix DenseMatrix::row_block(std::size_t first, std::size_t last) const {
    if (first > last || last > rows_) throw IndexOutOfRange(last, rows_ + 1);
    std::vector<double> data(data_.begin() + static_cast<std::ptrdiff_t>(first * cols_),
                             data_.begin() + static_cast<std::ptrdiff_t>(last * cols_));
    return DenseMatrix(last - first, cols_, std::move(data));
}

double DenseMatrix::frobenius_sq() const noexcept { return norm2_sq(data_); }

void DenseMatrix::check_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) throw DomainError("matrix entries must be finite");
    }
}

DenseMatrix operator*(const DenseMatrix& lhs, const DenseMatrix& rhs) {
    if (lhs.cols() != rhs.rows()) throw DimensionMismatch("inner dimensions differ in product");
    DenseMatrix out(lhs.rows(), rhs.cols());
    for (std::size_t i = 0; i < lhs.rows(); ++i) {
        for (std::size_t k = 0; k < lhs.cols(); ++k) {
            const double a = lhs(i, k);
            if (a == 0.0) continue;
            for (std::size_t j = 0; j < rhs.cols(); ++j) out(i, j) += a * rhs(k, j);
        }
    }
    return out;
}

Vector operator*(const DenseMatrix& lhs, std::span<const double> x) {
    if (lhs.cols() != x.size()) throw DimensionMismatch("matrix-vector length mismatch");
    Vector out(lhs.rows());
    for (std::size_t i = 0; i < lhs.rows(); ++i) out[i] = dot(lhs.row(i), x);
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2_sq(std::span<const double> v) { return dot(v, v); }

double norm2(std::span<const double> v) { return std::sqrt(norm2_sq(v)); }

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("shapes differ in comparison");
    double worst = 0.0;
    auto x = a.data();
    auto y = b.data();
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
    return worst;
}

DenseMatrix normalize_rows(const DenseMatrix& a) {
    DenseMatrix out = a;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto r = out.row(i);
        const double nrm = norm2(r);
        if (!(nrm >= 1e-300)) throw ZeroRow(i);
        for (double& v : r) v /= nrm;
    }
    return out;
}

SvdResult svd_values(const DenseMatrix& m, int max_sweeps) {
    // Columns of the tall orientation; singular values are preserved by
    // transposition.
    const DenseMatrix a = m.rows() >= m.cols() ? m : m.transpose();

    const std::size_t len = a.rows();
    const std::size_t k = a.cols();
    std::vector<Vector> cols(k, Vector(len));
    for (std::size_t i = 0; i < len; ++i)
        for (std::size_t j = 0; j < k; ++j) cols[j][i] = a(i, j);

    constexpr double kTol = 1e-15;
    bool converged = k < 2;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < k; ++p) {
            for (std::size_t q = p + 1; q < k; ++q) {
                Vector& wp = cols[p];
                Vector& wq = cols[q];
                const double alpha = norm2_sq(wp);
                const double beta = norm2_sq(wq);
                const double gamma = dot(wp, wq);
                if (gamma == 0.0 || std::abs(gamma) <= kTol * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < len; ++i) {
                    const double x = wp[i];
                    const double y = wq[i];
                    wp[i] = c * x - s * y;
                    wq[i] = s * x + c * y;
                }
            }
        }
        converged = !rotated;
    }
    if (!converged) {
        throw ConvergenceFailure("one-sided Jacobi did not converge in " +
                                 std::to_string(max_sweeps) + " sweeps");
    }

    SvdResult out;
    out.singular_values.reserve(k);
    for (const auto& c : cols) out.singular_values.push_back(norm2(c));
    std::sort(out.singular_values.begin(), out.singular_values.end(), std::greater<>());
    return out;
}

double spectral_norm(const DenseMatrix& m) { return svd_values(m).largest(); }

bool has_full_column_rank(const SvdResult& svd, std::size_t rows, std::size_t cols) {
    if (rows < cols || svd.singular_values.empty()) return false;
    const double scale = kRankTol * svd.largest() * static_cast<double>(std::max(rows, cols));
    return svd.smallest() > scale;
}

double pinv_norm(const SvdResult& svd, std::size_t rows, std::size_t cols) {
    if (rows < cols) throw DomainError("pinv_norm requires rows >= cols");
    if (!has_full_column_rank(svd, rows, cols)) {
        throw RankDeficient("smallest singular value " + std::to_string(svd.smallest()) +
                            " is below the numerical rank threshold");
    }
    return 1.0 / svd.smallest();
}

double pinv_norm(const DenseMatrix& b) { return pinv_norm(svd_values(b), b.rows(), b.cols()); }

DenseMatrix sweep_matrix(const DenseMatrix& b, double lambda, std::span<const std::size_t> row_order) {
    const std::size_t n = b.cols();
    DenseMatrix g = DenseMatrix::identity(n);
    Vector w(n);
    for (std::size_t idx : row_order) {
        if (idx >= b.rows()) throw IndexOutOfRange(idx, b.rows());
        const auto r = b.row(idx);
        // G <- G - lambda * r (r^T G)
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const auto gk = g.row(k);
            for (std::size_t j = 0; j < n; ++j) w[j] += r[k] * gk[j];
        }
        for (std::size_t k = 0; k < n; ++k) {
            auto gk = g.row(k);
            const double scale = lambda * r[k];
            for (std::size_t j = 0; j < n; ++j) gk[j] -= scale * w[j];
        }
    }
    return g;
}

DenseMatrix sweep_matrix(const DenseMatrix& b, double lambda) {
    std::vector<std::size_t> order(b.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    return sweep_matrix(b, lambda, order);
}

Vector dominant_right_singular_vector(const DenseMatrix& m, int iterations, std::uint64_t seed) {
    Rng rng(seed);
    Vector v(m.cols());
    for (double& x : v) x = rng.gaussian();
    const DenseMatrix mt = m.transpose();
    for (int it = 0; it < iterations; ++it) {
        Vector next = mt * (m * v);
        const double nrm = norm2(next);
        if (nrm == 0.0) break;
        for (double& x : next) x /= nrm;
        v = std::move(next);
    }
    const double nrm = norm2(v);
    for (double& x : v) x /= nrm;
    return v;
}

}  // namespace kaczmarz
