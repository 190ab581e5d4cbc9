#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace kaczmarz {

using Vector = std::vector<double>;

/// Dense real matrix stored row-major. Entries are always finite.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix diagonal(std::span<const double> values);
    static DenseMatrix from_rows(const std::vector<Vector>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept {
        return {data_.data() + i * cols_, cols_};
    }

    std::span<const double> data() const noexcept { return data_; }

    DenseMatrix transpose() const;
    /// Sub-matrix made of rows [first, last).
    DenseMatrix row_block(std::size_t first, std::size_t last) const;
    double frobenius_sq() const noexcept;

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    void check_finite() const;

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

DenseMatrix operator*(const DenseMatrix& lhs, const DenseMatrix& rhs);
Vector operator*(const DenseMatrix& lhs, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2_sq(std::span<const double> v);
double norm2(std::span<const double> v);
/// Largest absolute entrywise difference; matrices must share a shape.
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

/// Scales every row to unit Euclidean norm. Throws ZeroRow for a row with
/// norm below 1e-300.
DenseMatrix normalize_rows(const DenseMatrix& a);

/// Singular values sorted descending, length min(rows, cols).
struct SvdResult {
    std::vector<double> singular_values;

    double largest() const { return singular_values.empty() ? 0.0 : singular_values.front(); }
    double smallest() const { return singular_values.empty() ? 0.0 : singular_values.back(); }
};

/// One-sided (Hestenes) Jacobi applied to the columns of the thinner
/// orientation. Throws ConvergenceFailure if the rotations have not
/// converged after `max_sweeps` passes.
SvdResult svd_values(const DenseMatrix& m, int max_sweeps = 60);

double spectral_norm(const DenseMatrix& m);

/// Relative tolerance scale for numerical rank: sigma_min <= kRankTol *
/// sigma_1 * max(rows, cols) counts as rank deficient.
inline constexpr double kRankTol = 1e-10;

bool has_full_column_rank(const SvdResult& svd, std::size_t rows, std::size_t cols);

/// ||B^+||_2 = 1 / sigma_min(B) for a tall matrix of full column rank.
double pinv_norm(const DenseMatrix& b);
double pinv_norm(const SvdResult& svd, std::size_t rows, std::size_t cols);

/// Product of the factors (I - lambda * b_i b_i^T) over `row_order`
/// (0-based), the first listed row acting first (rightmost factor).
/// Rows of `b` are expected to be unit norm.
DenseMatrix sweep_matrix(const DenseMatrix& b, double lambda, std::span<const std::size_t> row_order);

/// Sweep matrix over all rows in natural order.
DenseMatrix sweep_matrix(const DenseMatrix& b, double lambda);

/// Dominant right singular vector by power iteration on M^T M, started from
/// a deterministic pseudo-random unit vector.
Vector dominant_right_singular_vector(const DenseMatrix& m, int iterations = 500,
                                      std::uint64_t seed = 1);

}  // namespace kaczmarz
