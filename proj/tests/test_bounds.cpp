#include <doctest.h>

#include <cmath>
#include <functional>

#include "kaczmarz/bounds.hpp"
#include "kaczmarz/errors.hpp"
#include "kaczmarz/experiments.hpp"

using namespace kaczmarz;

namespace {

// Brute-force minimizer over a uniform grid of `points` values in (lo, hi).
double grid_argmin(const std::function<double(double)>& f, double lo, double hi, int points) {
    double best_x = lo;
    double best = INFINITY;
    const double h = (hi - lo) / points;
    for (int k = 1; k < points; ++k) {
        const double x = lo + k * h;
        const double v = f(x);
        if (v < best) {
            best = v;
            best_x = x;
        }
    }
    return best_x;
}

// ||M||^2 via power iteration on M^T M, independent of the SVD.
double power_norm_sq(const DenseMatrix& m, int steps) {
    Vector v(m.cols(), 1.0);
    double est = 0.0;
    const DenseMatrix mt = m.transpose();
    for (int k = 0; k < steps; ++k) {
        Vector w = mt * (m * v);
        est = norm2(w);
        if (est == 0.0) return 0.0;
        for (double& x : w) x /= est;
        v = std::move(w);
    }
    return est;
}

constexpr double kSqrt2 = 1.4142135623730951;

}  // namespace

TEST_CASE("bound_theorem1") {
    CHECK(bound_theorem1(1.0, 2, 1.0) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
    CHECK(bound_theorem1(1.0, 2, 1.0, true) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(bound_theorem1(1.0, 5, 2.0) == 1.0);
    CHECK(bound_theorem1(3.0, 5, 2.0, true) == 1.0);
    CHECK_THROWS_AS(bound_theorem1(1.0, 2, 0.0), DomainError);
    CHECK_THROWS_AS(bound_theorem1(1.0, 2, 2.5), DomainError);
    CHECK_THROWS_AS(bound_theorem1(1.0, 0, 1.0), DomainError);

    for (std::size_t m = 1; m < 50; ++m) {
        for (double lambda : {0.1, 0.5, 1.0, 1.5, 1.9}) {
            CHECK(bound_theorem1(1.7, m, lambda, true) <= bound_theorem1(1.7, m, lambda) + 1e-15);
        }
    }
}

TEST_CASE("bound_corollary1") {
    CHECK(bound_corollary1(1.0, 2) == doctest::Approx(0.875).epsilon(1e-15));
    CHECK(bound_corollary1(2.0, 30) == doctest::Approx(1.0 - 1.0 / 7200.0).epsilon(1e-15));
    CHECK_THROWS_AS(bound_corollary1(1.0, 1), DomainError);

    // The lambda = 1 closed form dominates the general bound.
    for (std::size_t m = 2; m <= 100; ++m) {
        for (double p : {1.0, 1.5, 4.0}) {
            CHECK(bound_corollary1(p, m) >= bound_theorem1(p, m, 1.0) - 1e-15);
        }
    }
}

TEST_CASE("default_partition") {
    using B = Partition::Block;
    const Partition p30 = default_partition(30, 3);
    REQUIRE(p30.blocks.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) CHECK(p30.blocks[i] == B{3 * i, 3 * i + 3});

    CHECK(default_partition(7, 3).blocks == std::vector<B>{{0, 3}, {3, 6}, {6, 7}});
    CHECK(default_partition(4, 4).blocks == std::vector<B>{{0, 4}});

    CHECK_NOTHROW(p30.validate(30));
    CHECK_THROWS_AS(p30.validate(31), DomainError);
    const Partition gap{{{0, 2}, {3, 4}}};
    CHECK_THROWS_AS(gap.validate(4), DomainError);
    CHECK_THROWS_AS(default_partition(2, 3), DomainError);
}

TEST_CASE("bound_corollary2") {
    SUBCASE("stacked identities") {
        const DenseMatrix b{{1.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {0.0, 1.0}};
        CHECK(bound_corollary2(b, 1.0, default_partition(4, 2)) == doctest::Approx(0.5625).epsilon(1e-14));
    }
    SUBCASE("one block reduces to the sharp rho1 bound") {
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const DenseMatrix b = gen_problem(12, 3, seed).a;
            const Partition whole{{{0, 12}}};
            for (double lambda : {0.3, 1.0, 1.8}) {
                CHECK(bound_corollary2(b, lambda, whole) ==
                      doctest::Approx(bound_theorem1(pinv_norm(b), 12, lambda, true)).epsilon(1e-13));
            }
        }
    }
    SUBCASE("improves on the lambda = 1 closed form for the default instance") {
        const DenseMatrix b = gen_problem(30, 3, 42).a;
        const double rho2 = bound_corollary2(b, 1.0, default_partition(30, 3));
        CHECK(rho2 < bound_corollary1(pinv_norm(b), 30));
        CHECK(true_contraction(b, 1.0) <= rho2 + 1e-10);
    }
    SUBCASE("rank-deficient block") {
        const DenseMatrix b{{1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}};
        try {
            bound_corollary2(b, 1.0, default_partition(4, 2));
            FAIL("expected BlockRankDeficient");
        } catch (const BlockRankDeficient& e) {
            CHECK(e.block() == 0);
        }
    }
    SUBCASE("blocks shorter than n are rank deficient") {
        const DenseMatrix b = gen_problem(7, 3, 5).a;
        CHECK_THROWS_AS(bound_corollary2(b, 1.0, default_partition(7, 3)), BlockRankDeficient);
    }
}

TEST_CASE("bound_meany") {
    CHECK(bound_meany(DenseMatrix::identity(2)) == doctest::Approx(0.0).epsilon(1e-15));

    const double r = 1.0 / kSqrt2;
    const DenseMatrix skew{{1.0, 0.0}, {r, r}};
    CHECK(bound_meany(skew) == doctest::Approx(0.5).epsilon(1e-12));
    // Hand product (I - P2)(I - P1) sends e2 to (-1/2, 1/2), norm^2 = 1/2.
    CHECK(true_contraction(skew, 1.0) == doctest::Approx(0.5).epsilon(1e-12));

    CHECK(bound_meany(DenseMatrix{{1.0, 0.0}, {1.0, 0.0}}) == 1.0);
    CHECK_THROWS_AS(bound_meany(gen_problem(4, 3, 1).a), NotSquare);
}

TEST_CASE("lemma1_check") {
    SUBCASE("hypothesis holds") {
        const double s2 = 1.0 / 60.0;
        const std::vector<double> sigma{2.98, s2, 3.0 - 2.98 - s2};
        const Lemma1Result r = lemma1_check(sigma, 3);
        CHECK(r.hypothesis);
        CHECK(r.conclusion);
    }
    SUBCASE("hypothesis fails, lemma is silent") {
        const std::vector<double> sigma{1.4, 1.4, 0.2};
        const Lemma1Result r = lemma1_check(sigma, 3);
        CHECK_FALSE(r.hypothesis);
        CHECK_FALSE(r.conclusion);
    }
    SUBCASE("vanishing second-smallest value") {
        for (std::size_t n = 3; n <= 8; ++n) {
            std::vector<double> sigma(n, 0.0);
            sigma[0] = static_cast<double>(n);
            const Lemma1Result r = lemma1_check(sigma, n);
            CHECK(r.hypothesis);
            CHECK(r.conclusion);
        }
    }
    SUBCASE("preconditions") {
        CHECK_THROWS_AS(lemma1_check(std::vector<double>{1.5, 0.5}, 2), DomainError);
        CHECK_THROWS_AS(lemma1_check(std::vector<double>{1.0, 1.0, 1.0}, 4), DimensionMismatch);
        CHECK_THROWS_AS(lemma1_check(std::vector<double>{1.0, 1.0, 0.5}, 3), DomainError);
        CHECK_THROWS_AS(lemma1_check(std::vector<double>{0.5, 2.0, 0.5}, 3), DomainError);
    }
}

TEST_CASE("bound_rka") {
    CHECK(bound_rka(30.0, 2.0, 30) == doctest::Approx(std::pow(1.0 - 1.0 / 120.0, 30)).epsilon(1e-14));
    CHECK(bound_rka(30.0, 2.0, 30) == doctest::Approx(0.7784).epsilon(1e-3));
    CHECK(bound_rka(30.0, 2.0, 0) == 1.0);
    CHECK(bound_rka(1.0, 1.0, 1) == 0.0);
    CHECK(bound_rka(1.0, 1.0, 17) == 0.0);
    CHECK_THROWS_AS(bound_rka(0.5, 1.0, 3), DomainError);
}

TEST_CASE("bound_ref24 and its optimal lambda") {
    CHECK(bound_ref24(1.0, 1, 1.0) == 0.0);
    CHECK(bound_ref24(1.0, 10, 1.0) == doctest::Approx(0.99).epsilon(1e-15));
    const double opt = optimal_lambda_ref24(10);
    CHECK(opt == doctest::Approx((std::sqrt(37.0) - 1.0) / 18.0).epsilon(1e-15));
    CHECK(opt == doctest::Approx(0.282376).epsilon(1e-6));
    CHECK(bound_ref24(0.5, 10, opt) == doctest::Approx(0.887050).epsilon(1e-6));
    CHECK(bound_ref24(0.5, 10, opt) ==
          doctest::Approx(1.0 - 2.0 / (10.0 * (std::sqrt(37.0) + 1.0) * 0.25)).epsilon(1e-14));
    CHECK(optimal_lambda_ref24(2) == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-15));
    CHECK_THROWS_AS(optimal_lambda_ref24(1), DomainError);
    CHECK_THROWS_AS(bound_ref24(1.0, 10, 2.0), DomainError);
}

TEST_CASE("optimal_lambda_thm1") {
    CHECK(optimal_lambda_thm1(1) == doctest::Approx(std::sqrt(3.0) - 1.0).epsilon(1e-15));
    CHECK(optimal_lambda_thm1(10) == doctest::Approx((std::sqrt(201.0) - 1.0) / 100.0).epsilon(1e-15));
    for (std::size_t m : {1u, 2u, 10u, 100u, 1000u}) {
        const double x = optimal_lambda_thm1(static_cast<double>(m));
        const double md = static_cast<double>(m);
        CHECK(std::abs(x * x * md * md + 2.0 * x - 2.0) <= 1e-13);
    }
}

TEST_CASE("optimal lambdas agree with grid minimization") {
    constexpr int kPoints = 10000;
    for (std::size_t m : {2u, 10u, 100u, 1000u}) {
        const double step = 2.0 / kPoints;
        const double grid24 =
            grid_argmin([&](double l) { return bound_ref24(0.5, m, l); }, 0.0, 2.0, kPoints);
        CHECK(std::abs(optimal_lambda_ref24(m) - grid24) <= step);
        const double grid1 =
            grid_argmin([&](double l) { return bound_theorem1(0.5, m, l); }, 0.0, 2.0, kPoints);
        CHECK(std::abs(optimal_lambda_thm1(m) - grid1) <= step);
    }
}

TEST_CASE("optimal lambda beats lambda = sqrt(2)/m") {
    for (std::size_t m = 2; m <= 1000; ++m) {
        const double at_opt = bound_theorem1(1.3, m, optimal_lambda_thm1(m));
        const double at_guess = bound_theorem1(1.3, m, kSqrt2 / static_cast<double>(m));
        CHECK(at_opt <= at_guess + 1e-15);
    }
}

TEST_CASE("bound_ref26") {
    CHECK(bound_ref26(4.0, 1.0, 30) == doctest::Approx(0.95).epsilon(1e-15));
    CHECK(bound_ref26(1.0, 2.0, 30) == doctest::Approx(0.95).epsilon(1e-15));
    CHECK(bound_ref26(2.0, 1.5, 1) == doctest::Approx(1.0 - 1.0 / 4.5).epsilon(1e-15));
    // floor(log2(32)) = 5 for m = 16; 2m - 1 = 31 gives 4.
    CHECK(bound_ref26(1.0, 1.0, 16) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(bound_ref26(1.0, 1.0, 15) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(bound_ref26(1.0, 1.0, 17) == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("true_contraction") {
    CHECK(true_contraction(DenseMatrix::identity(2), 1.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(true_contraction(DenseMatrix{{1.0}}, 1.0) == 0.0);

    const DenseMatrix b = gen_problem(30, 3, 42).a;
    const double rho_sq = true_contraction(b, 1.0);
    CHECK(rho_sq > 0.0);
    CHECK(rho_sq < 1.0);
    CHECK(rho_sq < bound_theorem1(pinv_norm(b), 30, 1.0));
    CHECK(rho_sq == doctest::Approx(power_norm_sq(sweep_matrix(b, 1.0), 500)).epsilon(1e-8));
}

TEST_CASE("full_report") {
    SUBCASE("identity") {
        const BoundReport r = full_report(DenseMatrix::identity(2), 1.0);
        CHECK(r.m == 2);
        CHECK(r.n == 2);
        CHECK(r.rho_sq_oracle == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(r.rho1 == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
        CHECK(r.rho1_sharp == doctest::Approx(0.75).epsilon(1e-15));
        REQUIRE(r.meany);
        CHECK(*r.meany == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("default instance chain") {
        const BoundReport r = full_report(gen_problem(30, 3, 42).a, 1.0);
        REQUIRE(r.rho2);
        REQUIRE(r.corollary1);
        REQUIRE(r.ref24);
        REQUIRE(r.ref26);
        CHECK_FALSE(r.meany);
        CHECK(r.rho_sq_oracle <= *r.rho2 + 1e-10);
        CHECK(*r.rho2 < *r.corollary1);
        CHECK(r.rho_sq_oracle <= r.rho1_sharp + 1e-10);
        CHECK(r.rho1_sharp <= r.rho1 + 1e-15);
        CHECK(r.rho1 <= *r.corollary1 + 1e-15);
        CHECK(r.rka_step > 0.0);
        CHECK(r.rka_step < 1.0);
    }
    SUBCASE("lambda = 2") {
        const BoundReport r = full_report(gen_problem(9, 3, 7).a, 2.0);
        CHECK(r.rho1 == 1.0);
        CHECK(std::isfinite(r.rho_sq_oracle));
        CHECK(r.rho_sq_oracle <= 1.0 + 1e-10);
        CHECK_FALSE(r.ref24);
    }
    SUBCASE("rows must be normalized") {
        CHECK_THROWS_AS(full_report(DenseMatrix{{2.0, 0.0}, {0.0, 1.0}}, 1.0), DomainError);
    }
}

TEST_CASE("soundness across seeded instances") {
    for (const BoundInstance& inst : soundness_instances(42, 100)) {
        const std::size_t m = inst.b.rows();
        const double rho_sq = true_contraction(inst.b, inst.lambda);
        const double pinv = pinv_norm(inst.b);
        const double sharp = bound_theorem1(pinv, m, inst.lambda, true);
        CHECK(rho_sq <= sharp + 1e-10);
        CHECK(sharp <= bound_theorem1(pinv, m, inst.lambda) + 1e-15);
    }
    for (const BoundInstance& inst : square_instances(42, 100)) {
        CHECK(true_contraction(inst.b, 1.0) <= bound_meany(inst.b) + 1e-10);
    }
}
