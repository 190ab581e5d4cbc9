#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kaczmarz/errors.hpp"
#include "kaczmarz/linalg.hpp"
#include "kaczmarz/random.hpp"

using namespace kaczmarz;

namespace {

DenseMatrix gaussian(std::size_t m, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    DenseMatrix a(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.gaussian();
    return a;
}

// Eigenvalues of a symmetric 2x2 matrix by a single Jacobi rotation.
std::pair<double, double> jacobi_eig2(double a, double b, double d) {
    if (b == 0.0) return {std::max(a, d), std::min(a, d)};
    const double tau = (d - a) / (2.0 * b);
    const double t = std::copysign(1.0, tau) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double e1 = a - t * b;
    const double e2 = d + t * b;
    return {std::max(e1, e2), std::min(e1, e2)};
}

// Product of explicitly formed factors (I - lambda b_i b_i^T), first row rightmost.
DenseMatrix naive_sweep(const DenseMatrix& b, double lambda, const std::vector<std::size_t>& order) {
    const std::size_t n = b.cols();
    DenseMatrix acc = DenseMatrix::identity(n);
    for (std::size_t idx : order) {
        DenseMatrix f = DenseMatrix::identity(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) f(i, j) -= lambda * b(idx, i) * b(idx, j);
        acc = f * acc;
    }
    return acc;
}

DenseMatrix rotation(double angle) {
    return {{std::cos(angle), -std::sin(angle)}, {std::sin(angle), std::cos(angle)}};
}

}  // namespace

TEST_CASE("Rng reproduces the mt19937_64 reference sequence") {
    // First outputs for seed 42; regression fixture for the stream contract.
    Rng rng(42);
    CHECK(rng.next() == 13930160852258120406ull);
    CHECK(rng.next() == 11788048577503494824ull);
    CHECK(rng.next() == 13874630024467741450ull);
    CHECK(rng.next() == 2513787319205155662ull);

    Rng uniform(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = uniform.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("Rng gaussian has unit moments") {
    Rng rng(3);
    constexpr int kDraws = 200000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < kDraws; ++i) {
        const double g = rng.gaussian();
        sum += g;
        sum_sq += g * g;
    }
    const double mean = sum / kDraws;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(sum_sq / kDraws - mean * mean - 1.0) < 0.015);
}

TEST_CASE("DenseMatrix rejects malformed data") {
    CHECK_THROWS_AS(DenseMatrix(2, 2, std::vector<double>{1.0, 2.0, 3.0}), DimensionMismatch);
    CHECK_THROWS_AS(DenseMatrix(1, 2, std::vector<double>{1.0, NAN}), DomainError);
    CHECK_THROWS_AS(DenseMatrix(1, 1, std::vector<double>{INFINITY}), DomainError);
    CHECK_THROWS_AS((DenseMatrix{{1.0, 2.0}, {3.0}}), DimensionMismatch);
}

TEST_CASE("normalize_rows") {
    SUBCASE("3-4-5 row") {
        const DenseMatrix b = normalize_rows(DenseMatrix{{3.0, 4.0}});
        CHECK(b(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
        CHECK(b(0, 1) == doctest::Approx(0.8).epsilon(1e-15));
    }
    SUBCASE("identity unchanged") {
        CHECK(normalize_rows(DenseMatrix::identity(2)) == DenseMatrix::identity(2));
    }
    SUBCASE("parallel rows normalize identically") {
        const DenseMatrix b = normalize_rows(DenseMatrix{{1.0, 1.0}, {2.0, 2.0}});
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) CHECK(b(i, j) == doctest::Approx(1.0 / std::sqrt(2.0)));
    }
    SUBCASE("zero row names its index") {
        try {
            normalize_rows(DenseMatrix{{1.0, 0.0}, {0.0, 0.0}});
            FAIL("expected ZeroRow");
        } catch (const ZeroRow& e) {
            CHECK(e.row() == 1);
            CHECK(e.name() == "ZeroRow");
        }
        CHECK_THROWS_AS(normalize_rows(DenseMatrix{{1e-301, 0.0}}), ZeroRow);
    }
}

TEST_CASE("svd_values on known matrices") {
    const double d[] = {3.0, 1.0};
    const auto s = svd_values(DenseMatrix::diagonal(d)).singular_values;
    REQUIRE(s.size() == 2);
    CHECK(s[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(s[1] == doctest::Approx(1.0).epsilon(1e-14));

    const auto z = svd_values(DenseMatrix(2, 2)).singular_values;
    CHECK(z == std::vector<double>{0.0, 0.0});

    // U diag(5, 0.002) V^T with rotations: relative accuracy on the small one.
    const double sv[] = {5.0, 0.002};
    const DenseMatrix m = rotation(0.3) * DenseMatrix::diagonal(sv) * rotation(-1.1).transpose();
    const auto r = svd_values(m).singular_values;
    CHECK(std::abs(r[0] - 5.0) <= 1e-10 * 5.0);
    CHECK(std::abs(r[1] - 0.002) <= 1e-10 * 5.0);
}

TEST_CASE("svd_values agrees with an eigendecomposition of the Gram matrix") {
    const DenseMatrix a = gaussian(4, 2, 2024);
    const DenseMatrix gram = a.transpose() * a;
    const auto [e1, e2] = jacobi_eig2(gram(0, 0), gram(0, 1), gram(1, 1));
    const auto s = svd_values(a).singular_values;
    CHECK(std::abs(s[0] - std::sqrt(e1)) <= 1e-8);
    CHECK(std::abs(s[1] - std::sqrt(e2)) <= 1e-8);

    // Wide orientation goes through the transpose.
    const auto wide = svd_values(a.transpose()).singular_values;
    REQUIRE(wide.size() == 2);
    CHECK(wide[0] == doctest::Approx(s[0]).epsilon(1e-13));
    CHECK(wide[1] == doctest::Approx(s[1]).epsilon(1e-13));
}

TEST_CASE("svd_values properties over random shapes") {
    Rng rng(99);
    for (int t = 0; t < 50; ++t) {
        const std::size_t m = 1 + rng.next() % 12;
        const std::size_t n = 1 + rng.next() % 12;
        const DenseMatrix a = gaussian(m, n, rng.next());
        const auto s = svd_values(a).singular_values;
        REQUIRE(s.size() == std::min(m, n));
        CHECK(std::is_sorted(s.begin(), s.end(), std::greater<>()));
        CHECK(s.back() >= 0.0);
        // Sum of squares equals the Frobenius norm.
        const double sum_sq = std::inner_product(s.begin(), s.end(), s.begin(), 0.0);
        CHECK(sum_sq == doctest::Approx(a.frobenius_sq()).epsilon(1e-12));
    }
}

TEST_CASE("svd_values reports non-convergence") {
    CHECK_THROWS_AS(svd_values(gaussian(6, 5, 1), 1), ConvergenceFailure);
}

TEST_CASE("spectral_norm") {
    CHECK(spectral_norm(DenseMatrix::identity(3)) == doctest::Approx(1.0).epsilon(1e-15));
    const double d[] = {3.0, 1.0};
    CHECK(spectral_norm(DenseMatrix::diagonal(d)) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(spectral_norm(sweep_matrix(DenseMatrix::identity(2), 1.0)) == 0.0);
}

TEST_CASE("spectral_norm bounds sampled gains and matches power iteration") {
    Rng rng(5);
    for (int t = 0; t < 10; ++t) {
        const DenseMatrix b = normalize_rows(gaussian(12, 3, rng.next()));
        const DenseMatrix mm = sweep_matrix(b, 0.8);
        const double s = spectral_norm(mm);
        for (int k = 0; k < 200; ++k) {
            Vector v(3);
            for (double& x : v) x = rng.gaussian();
            const double nrm = norm2(v);
            for (double& x : v) x /= nrm;
            CHECK(norm2(mm * v) <= s + 1e-12);
        }
        const Vector top = dominant_right_singular_vector(mm);
        CHECK(std::abs(norm2(mm * top) - s) <= 1e-6);
    }
}

TEST_CASE("pinv_norm") {
    CHECK(pinv_norm(DenseMatrix::identity(2)) == doctest::Approx(1.0).epsilon(1e-15));
    const double d[] = {2.0, 0.5};
    CHECK(pinv_norm(DenseMatrix::diagonal(d)) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS(pinv_norm(DenseMatrix{{1.0, 0.0}, {1.0, 0.0}}), RankDeficient);
    CHECK_THROWS_AS(pinv_norm(DenseMatrix{{1.0, 0.0, 0.0}}), DomainError);
    CHECK_THROWS_AS(pinv_norm(DenseMatrix(3, 2)), RankDeficient);
}

TEST_CASE("sweep_matrix") {
    SUBCASE("orthonormal rows annihilate") {
        const std::vector<std::size_t> order{0, 1};
        CHECK(sweep_matrix(DenseMatrix::identity(2), 1.0, order) == DenseMatrix(2, 2));
    }
    SUBCASE("vanishing relaxation gives the identity") {
        const DenseMatrix b = normalize_rows(gaussian(7, 3, 11));
        CHECK(max_abs_diff(sweep_matrix(b, 1e-12), DenseMatrix::identity(3)) <= 1e-10);
    }
    SUBCASE("matches naive factor accumulation") {
        const DenseMatrix b = normalize_rows(gaussian(4, 2, 17));
        const std::vector<std::size_t> order{0, 1, 2, 3};
        CHECK(max_abs_diff(sweep_matrix(b, 1.0, order), naive_sweep(b, 1.0, order)) <= 1e-12);
        const std::vector<std::size_t> shuffled{2, 0, 3};
        CHECK(max_abs_diff(sweep_matrix(b, 1.3, shuffled), naive_sweep(b, 1.3, shuffled)) <= 1e-12);
    }
    SUBCASE("last index is the leftmost factor") {
        const DenseMatrix b = normalize_rows(DenseMatrix{{1.0, 0.0}, {1.0, 1.0}});
        const std::vector<std::size_t> forward{0, 1};
        const std::vector<std::size_t> backward{1, 0};
        const DenseMatrix f = sweep_matrix(b, 1.0, forward);
        // (I - P_2)(I - P_1) e_2 = (I - P_2) e_2 = [-1/2, 1/2]
        CHECK(f(0, 1) == doctest::Approx(-0.5));
        CHECK(f(1, 1) == doctest::Approx(0.5));
        CHECK(max_abs_diff(f, sweep_matrix(b, 1.0, backward)) > 0.1);
    }
    SUBCASE("index out of range") {
        const std::vector<std::size_t> order{0, 2};
        CHECK_THROWS_AS(sweep_matrix(DenseMatrix::identity(2), 1.0, order), IndexOutOfRange);
    }
}

TEST_CASE("projector and factor algebra for random unit rows") {
    Rng rng(123);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 2 + rng.next() % 7;
        const DenseMatrix b = normalize_rows(gaussian(1, n, rng.next()));
        DenseMatrix p(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) p(i, j) = b(0, i) * b(0, j);
        CHECK(max_abs_diff(p * p, p) <= 1e-12);

        const double lambda = 2.0 * rng.uniform();
        DenseMatrix f = DenseMatrix::identity(n);
        DenseMatrix expect = DenseMatrix::identity(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                f(i, j) -= lambda * p(i, j);
                expect(i, j) -= lambda * (2.0 - lambda) * p(i, j);
            }
        }
        CHECK(max_abs_diff(f * f, expect) <= 1e-12);
    }
}

TEST_CASE("row-normalized matrices: Frobenius and spectral norm identities") {
    Rng rng(77);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 1 + rng.next() % 8;
        const std::size_t m = n + rng.next() % 40;
        const DenseMatrix b = normalize_rows(gaussian(m, n, rng.next()));
        CHECK(std::abs(b.frobenius_sq() - static_cast<double>(m)) <= 1e-10);
        const double s = spectral_norm(b);
        CHECK(s * s >= static_cast<double>(m) / static_cast<double>(n) - 1e-12);
    }
}
