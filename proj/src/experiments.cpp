#include "kaczmarz/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "kaczmarz/bounds.hpp"
#include "kaczmarz/errors.hpp"

namespace kaczmarz {

void ExperimentConfig::validate() const {
    if (n < 1 || m < n) throw DomainError("experiment needs m >= n >= 1");
    if (sweeps < 1) throw DomainError("sweeps must be at least 1");
    if (realizations < 1) throw DomainError("realizations must be at least 1");
}

LinearSystem gen_problem(std::size_t m, std::size_t n, std::uint64_t seed, double min_rcond) {
    if (n < 1 || m < n) throw DomainError("problem needs m >= n >= 1");
    Rng rng(seed);
    constexpr int kMaxAttempts = 100;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        DenseMatrix a(m, n);
        for (std::size_t i = 0; i < m; ++i) {
            auto row = a.row(i);
            for (int tries = 0;; ++tries) {
                for (double& v : row) v = rng.gaussian();
                if (norm2(row) >= 1e-300) break;
                if (tries == 1) throw ZeroRow(i);
            }
        }
        DenseMatrix b = normalize_rows(a);
        const SvdResult svd = svd_values(b);
        if (!(svd.smallest() > min_rcond * svd.largest())) continue;

        Vector x(n);
        for (double& v : x) v = rng.gaussian();
        Vector rhs = b * x;
        return LinearSystem{std::move(b), std::move(rhs), std::move(x)};
    }
    throw RankDeficient("no well-conditioned " + std::to_string(m) + "x" + std::to_string(n) +
                        " matrix after 100 draws");
}

DenseMatrix gen_near_degenerate_square(std::size_t n, double eps, std::uint64_t seed) {
    if (n < 3) throw DomainError("near-degenerate construction needs n >= 3");
    Rng rng(seed);
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        double lead = 0.0;
        for (std::size_t j = 0; j + 2 < n; ++j) {
            a(i, j) = rng.gaussian();
            lead += a(i, j) * a(i, j);
        }
        // Tail scaled by the leading block's norm, so after normalization the
        // last two columns stay O(eps) and sigma_{n-1} <= eps ||H||_2.
        for (std::size_t j = n - 2; j < n; ++j) a(i, j) = rng.gaussian() * eps * std::sqrt(lead);
    }
    return normalize_rows(a);
}

std::vector<BoundInstance> soundness_instances(std::uint64_t seed, std::size_t count) {
    static constexpr std::array<double, 5> kLambdas{0.1, 0.5, 1.0, 1.5, 1.9};
    Rng rng(seed ^ 0x5bd1e995u);
    std::vector<BoundInstance> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t m = 5 + rng.next() % 56;
        const std::size_t n_max = std::min<std::size_t>(8, m);
        const std::size_t n = 2 + rng.next() % (n_max - 1);
        out.push_back({gen_problem(m, n, rng.next()).a, kLambdas[k % kLambdas.size()]});
    }
    return out;
}

std::vector<BoundInstance> square_instances(std::uint64_t seed, std::size_t count) {
    Rng rng(seed ^ 0x9e3779b9u);
    std::vector<BoundInstance> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t n = 3 + rng.next() % 8;
        out.push_back({gen_problem(n, n, rng.next(), 1e-6).a, 1.0});
    }
    return out;
}

std::vector<double> sample_sigma_sq(std::size_t n, Rng& rng) {
    if (n < 3) throw DomainError("sigma sampling needs n >= 3");
    const double nd = static_cast<double>(n);
    const double threshold = std::pow(nd - 2.0, nd - 2.0) / (2.0 * std::pow(nd, nd));
    const double second_last = 2.0 * threshold * rng.uniform();
    const double last = second_last * rng.uniform();
    const double rest = nd - second_last - last;

    // Top n-2 values: second_last plus a positive share of the remainder.
    // Equal shares (the extremal case for the product) one time in four.
    const bool equal = rng.uniform() < 0.25;
    std::vector<double> weights(n - 2);
    for (double& w : weights) w = equal ? 1.0 : -std::log(1.0 - rng.uniform()) + 1e-12;
    double total = 0.0;
    for (double w : weights) total += w;
    const double spread = rest - static_cast<double>(n - 2) * second_last;

    std::vector<double> out;
    out.reserve(n);
    for (double w : weights) out.push_back(second_last + w / total * spread);
    std::sort(out.begin(), out.end(), std::greater<>());
    out.push_back(second_last);
    out.push_back(last);
    return out;
}

CsvTable run_fig1(const ExperimentConfig& config) {
    config.validate();
    if (config.lambda != 1.0) throw DomainError("fig1 harness is defined for lambda = 1");
    if (config.m < 2) throw DomainError("fig1 harness needs m >= 2");

    const LinearSystem system = gen_problem(config.m, config.n, config.seed);
    const Vector x0(config.n, 0.0);
    SolverConfig solver{config.lambda, config.sweeps, Ordering::cyclic, config.seed};
    const ConvergenceTrace ka = ka_run(system, solver, x0);
    solver.ordering = Ordering::randomized;
    const std::vector<double> rka =
        mean_trace(system, solver, x0, config.realizations, config.threads);

    const double pinv = pinv_norm(system.a);
    const double bd1 = bound_corollary1(pinv, config.m);
    const double bd2 = bound_corollary2(system.a, config.lambda, default_partition(config.m, config.n));
    const double frob_sq = system.a.frobenius_sq();
    const double start = ka.sq_errors.front();

    CsvTable table(kFig1Columns);
    for (std::size_t j = 0; j <= config.sweeps; ++j) {
        const double jd = static_cast<double>(j);
        table.add_row({jd, ka.sq_errors[j], rka[j], start * std::pow(bd1, jd),
                       start * std::pow(bd2, jd), start * bound_rka(frob_sq, pinv, j * config.m)});
    }
    return table;
}

CsvTable run_fig2(const ExperimentConfig& config) {
    if (!config.pinv_norm_fixed || !config.m_range) {
        throw DomainError("fig2 harness needs a fixed pseudo-inverse norm and an m range");
    }
    const double pinv = *config.pinv_norm_fixed;
    const auto [m_min, m_max] = *config.m_range;
    if (m_min < 2 || m_max < m_min) throw DomainError("fig2 harness needs 2 <= m_min <= m_max");

    CsvTable table(kFig2Columns);
    for (std::size_t m = m_min; m <= m_max; ++m) {
        table.add_row({static_cast<double>(m), bound_ref24(pinv, m, optimal_lambda_ref24(m)),
                       bound_theorem1(pinv, m, optimal_lambda_thm1(m))});
    }
    return table;
}

std::size_t VerifyReport::failures() const {
    return static_cast<std::size_t>(
        std::count_if(properties.begin(), properties.end(), [](const auto& p) { return !p.passed; }));
}

namespace {

constexpr std::array<double, 5> kLambdaSet{0.1, 0.5, 1.0, 1.5, 1.9};

Vector random_unit(std::size_t n, Rng& rng) {
    Vector v(n);
    for (double& x : v) x = rng.gaussian();
    const double nrm = norm2(v);
    for (double& x : v) x /= nrm;
    return v;
}

DenseMatrix outer(std::span<const double> v) {
    DenseMatrix out(v.size(), v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) out(i, j) = v[i] * v[j];
    return out;
}

DenseMatrix axpby(double alpha, const DenseMatrix& x, double beta, const DenseMatrix& y) {
    DenseMatrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = alpha * x(i, j) + beta * y(i, j);
    return out;
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

// Tracks the worst violation of a family of inequalities lhs <= rhs + slack.
struct Worst {
    double margin = -INFINITY;  // max of lhs - rhs
    std::size_t checks = 0;
    std::size_t violations = 0;

    void check(double lhs, double rhs, double slack) {
        ++checks;
        margin = std::max(margin, lhs - rhs);
        if (!(lhs <= rhs + slack)) ++violations;
    }
    PropertyResult result(std::string name) const {
        return {std::move(name), violations == 0 && checks > 0,
                std::to_string(checks) + " checks, " + std::to_string(violations) +
                    " violations, worst lhs-rhs " + fmt(margin)};
    }
};

struct Context {
    std::uint64_t seed;
    VerifyOptions options;
    LinearSystem fig1;
    std::vector<BoundInstance> instances;
};

PropertyResult projector_idempotence(const Context& ctx) {
    Worst w;
    auto visit = [&](const DenseMatrix& b) {
        for (std::size_t i = 0; i < b.rows(); ++i) {
            const DenseMatrix p = outer(b.row(i));
            w.check(max_abs_diff(p * p, p), 0.0, 1e-12);
        }
    };
    visit(ctx.fig1.a);
    for (std::size_t k = 0; k < 20; ++k) visit(ctx.instances[k].b);
    return w.result("projector_idempotence");
}

PropertyResult factor_algebra(const Context& ctx) {
    Worst w;
    const DenseMatrix& b = ctx.fig1.a;
    const DenseMatrix eye = DenseMatrix::identity(b.cols());
    for (double lambda : kLambdaSet) {
        for (std::size_t i = 0; i < b.rows(); ++i) {
            const DenseMatrix p = outer(b.row(i));
            const DenseMatrix f = axpby(1.0, eye, -lambda, p);
            const DenseMatrix expect = axpby(1.0, eye, -lambda * (2.0 - lambda), p);
            w.check(max_abs_diff(f * f, expect), 0.0, 1e-12);
        }
    }
    return w.result("factor_algebra");
}

PropertyResult spectral_norm_cross_check(const Context& ctx) {
    Worst below;  // sampled ||Mv|| never exceeds the spectral norm
    Worst power;  // power iteration agrees with the spectral norm
    Rng rng(ctx.seed + 11);
    for (std::size_t k = 0; k < 20; ++k) {
        const auto& inst = ctx.instances[k];
        const DenseMatrix mm = sweep_matrix(inst.b, inst.lambda);
        const double s = spectral_norm(mm);
        for (int t = 0; t < 200; ++t) {
            const Vector v = random_unit(mm.cols(), rng);
            below.check(norm2(mm * v), s, 1e-12);
        }
        const Vector top = dominant_right_singular_vector(mm, 500, ctx.seed + k);
        power.check(std::abs(norm2(mm * top) - s), 0.0, 1e-6);
    }
    PropertyResult r = below.result("spectral_norm_cross_check");
    const PropertyResult p = power.result("");
    r.passed = r.passed && p.passed;
    r.detail += "; power iteration: " + p.detail;
    return r;
}

PropertyResult frobenius_row_count(const Context& ctx) {
    Worst w;
    for (const auto& inst : ctx.instances) {
        w.check(std::abs(inst.b.frobenius_sq() - static_cast<double>(inst.b.rows())), 0.0, 1e-10);
    }
    return w.result("frobenius_equals_row_count");
}

PropertyResult spectral_lower_bound(const Context& ctx) {
    Worst w;
    for (const auto& inst : ctx.instances) {
        const double s = spectral_norm(inst.b);
        w.check(static_cast<double>(inst.b.rows()) / static_cast<double>(inst.b.cols()), s * s, 1e-12);
    }
    return w.result("spectral_norm_sq_at_least_m_over_n");
}

PropertyResult exact_projection(const Context& ctx) {
    Worst w;
    Rng rng(ctx.seed + 13);
    const LinearSystem& sys = ctx.fig1;
    for (std::size_t i = 0; i < sys.rows(); ++i) {
        Vector x(sys.cols());
        for (double& v : x) v = 10.0 * rng.gaussian();
        const Vector next = ka_step(x, sys, i, 1.0);
        const auto a = sys.a.row(i);
        const double scale = std::max({1.0, std::abs(sys.b[i]), norm2(a) * norm2(next)});
        w.check(std::abs(dot(a, next) - sys.b[i]) / scale, 0.0, 1e-10);
    }
    return w.result("exact_projection");
}

PropertyResult step_monotonicity(const Context& ctx) {
    Worst w;
    const LinearSystem& sys = ctx.fig1;
    const Vector& truth = *sys.x_true;
    for (double lambda : kLambdaSet) {
        Vector x(sys.cols(), 0.0);
        double prev = norm2(truth);
        for (std::size_t k = 0; k < 10 * sys.rows(); ++k) {
            ka_step_inplace(x, sys, k % sys.rows(), lambda);
            Vector theta = x;
            for (std::size_t j = 0; j < theta.size(); ++j) theta[j] -= truth[j];
            const double cur = norm2(theta);
            w.check(cur, prev, 1e-12 * std::max(prev, 1e-300) + 1e-15);
            prev = cur;
        }
    }
    return w.result("per_step_monotonicity");
}

PropertyResult dynamical_equivalence(const Context& ctx) {
    Worst w;
    Rng rng(ctx.seed + 17);
    const LinearSystem& base = ctx.fig1;
    // Unnormalized rows: the update is invariant to row scaling.
    LinearSystem scaled = base;
    for (std::size_t i = 0; i < scaled.rows(); ++i) {
        const double s = 0.5 + 2.5 * rng.uniform();
        for (double& v : scaled.a.row(i)) v *= s;
        scaled.b[i] = dot(scaled.a.row(i), *scaled.x_true);
    }
    for (double lambda : kLambdaSet) {
        Vector x0(base.cols());
        for (double& v : x0) v = rng.gaussian();
        const ConvergenceTrace trace = ka_run(scaled, {lambda, 1, Ordering::cyclic, 0}, x0);
        Vector theta0 = x0;
        for (std::size_t j = 0; j < theta0.size(); ++j) theta0[j] -= (*base.x_true)[j];
        const Vector predicted = sweep_matrix(base.a, lambda) * theta0;
        for (std::size_t j = 0; j < predicted.size(); ++j) {
            w.check(std::abs(trace.final_x[j] - (*base.x_true)[j] - predicted[j]), 0.0, 1e-10);
        }
    }
    return w.result("dynamical_system_equivalence");
}

PropertyResult energy_identity(const Context& ctx) {
    Worst w;
    Rng rng(ctx.seed + 19);
    for (std::size_t k = 0; k < 20; ++k) {
        const auto& inst = ctx.instances[k];
        for (int t = 0; t < 100; ++t) {
            const Vector v0 = random_unit(inst.b.cols(), rng);
            const SweepPath path = sweep_path(inst.b, inst.lambda, v0);
            double sum = 0.0;
            for (double p : path.projection_sq) sum += p;
            const double lhs = inst.lambda * (2.0 - inst.lambda) * sum;
            const double rhs = norm2_sq(v0) - norm2_sq(path.iterates.back());
            w.check(std::abs(lhs - rhs), 0.0, 1e-10);
        }
    }
    return w.result("energy_identity");
}

PropertyResult drift_bound(const Context& ctx) {
    Worst w;
    for (std::size_t k = 0; k < ctx.instances.size(); ++k) {
        const auto& inst = ctx.instances[k];
        const Vector v0 =
            dominant_right_singular_vector(sweep_matrix(inst.b, inst.lambda), 500, ctx.seed + k);
        const SweepPath path = sweep_path(inst.b, inst.lambda, v0);
        const double loss = 1.0 - norm2_sq(path.iterates.back());
        for (std::size_t i = 1; i < path.iterates.size(); ++i) {
            Vector d = path.iterates[i];
            for (std::size_t j = 0; j < d.size(); ++j) d[j] -= v0[j];
            const double bound = inst.lambda * static_cast<double>(i) / (2.0 - inst.lambda) * loss;
            w.check(norm2_sq(d), bound, 1e-9);
        }
    }
    return w.result("drift_bound");
}

PropertyResult theorem1_soundness(const Context& ctx) {
    const auto thm1 = ctx.options.theorem1 ? ctx.options.theorem1 : bound_theorem1;
    Worst oracle;
    Worst chain;
    for (const auto& inst : ctx.instances) {
        const double pinv = pinv_norm(inst.b);
        const double rho_sq = true_contraction(inst.b, inst.lambda);
        const double sharp = thm1(pinv, inst.b.rows(), inst.lambda, true);
        const double loose = thm1(pinv, inst.b.rows(), inst.lambda, false);
        oracle.check(rho_sq, sharp, 1e-10);
        chain.check(sharp, loose, 1e-15);
    }
    // Orthonormal rows: rho^2 = (1 - lambda)^2 exactly, close to the bound
    // for large lambda, so an over-optimistic formula shows up here.
    for (std::size_t n = 2; n <= 4; ++n) {
        for (double lambda : kLambdaSet) {
            const double rho_sq = true_contraction(DenseMatrix::identity(n), lambda);
            const double sharp = thm1(1.0, n, lambda, true);
            oracle.check(rho_sq, sharp, 1e-10);
            chain.check(sharp, thm1(1.0, n, lambda, false), 1e-15);
        }
    }
    PropertyResult r = oracle.result("theorem1_soundness");
    r.passed = r.passed && chain.violations == 0;
    r.detail += "; sharp <= rho1 violations " + std::to_string(chain.violations);
    return r;
}

PropertyResult corollary2_soundness(const Context& ctx) {
    Worst oracle;
    Worst product;
    std::size_t skipped = 0;
    Rng rng(ctx.seed + 23);
    for (std::size_t k = 0; k < 100; ++k) {
        const std::size_t n = 2 + rng.next() % 7;
        const std::size_t q = 1 + rng.next() % (60 / n);
        const std::size_t m = std::max<std::size_t>(q * n, ((5 + n - 1) / n) * n);
        const double lambda = kLambdaSet[k % kLambdaSet.size()];
        const DenseMatrix b = gen_problem(m, n, rng.next()).a;
        const Partition part = default_partition(m, n);
        double rho2 = 0.0;
        try {
            rho2 = bound_corollary2(b, lambda, part);
        } catch (const BlockRankDeficient&) {
            ++skipped;
            continue;
        }
        double block_norms = 1.0;
        for (const auto& block : part.blocks) {
            std::vector<std::size_t> order(block.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = block.first + i;
            const double s = spectral_norm(sweep_matrix(b, lambda, order));
            block_norms *= s * s;
        }
        const double rho_sq = true_contraction(b, lambda);
        oracle.check(rho_sq, block_norms, 1e-10);
        product.check(block_norms, rho2, 1e-10);
    }
    PropertyResult r = oracle.result("corollary2_soundness");
    r.passed = r.passed && product.violations == 0 && product.checks >= 50;
    r.detail += "; prod ||N_i||^2 <= rho2 violations " + std::to_string(product.violations) +
                ", skipped " + std::to_string(skipped);
    return r;
}

PropertyResult meany_soundness(const Context& ctx) {
    Worst w;
    for (const auto& inst : square_instances(ctx.seed, 100)) {
        w.check(true_contraction(inst.b, 1.0), bound_meany(inst.b), 1e-10);
    }
    return w.result("meany_soundness");
}

PropertyResult rka_dominance_chain(const Context&) {
    Worst w;
    for (std::size_t m = 2; m <= 200; ++m) {
        const double md = static_cast<double>(m);
        for (double c : {1.0 / md, 0.5, 1.0, 4.0, 100.0}) {
            if (c < 1.0 / md) continue;
            const double cyclic = 1.0 - 1.0 / (2.0 * md * md * c);
            const double randomized = std::pow(1.0 - 1.0 / (md * c), md);
            w.check(randomized, cyclic, 0.0);
        }
    }
    return w.result("rka_dominance_chain");
}

PropertyResult lemma1_implication(const Context& ctx) {
    Worst w;
    std::size_t hypothesis_true = 0;
    Rng rng(ctx.seed + 29);
    for (std::size_t n = 3; n <= 10; ++n) {
        for (int t = 0; t < 10000; ++t) {
            const auto sigma_sq = sample_sigma_sq(n, rng);
            const Lemma1Result r = lemma1_check(sigma_sq, n);
            if (!r.hypothesis) continue;
            ++hypothesis_true;
            w.check(r.conclusion ? 0.0 : 1.0, 0.0, 0.0);
        }
    }
    PropertyResult r = w.result("lemma1_implication");
    r.detail += "; hypothesis held in " + std::to_string(hypothesis_true) + " samples";
    return r;
}

PropertyResult fig2_dominance(const Context&) {
    Worst w;
    for (std::size_t m = 10; m <= 1000; ++m) {
        const double ours = bound_theorem1(0.5, m, optimal_lambda_thm1(m));
        const double ref24 = bound_ref24(0.5, m, optimal_lambda_ref24(m));
        // Strict: ours < ref24.
        w.check(ours, std::nextafter(ref24, 0.0), 0.0);
    }
    return w.result("fig2_dominance");
}

PropertyResult asymptotic_rates(const Context&) {
    constexpr double kPinv = 0.5;
    constexpr std::size_t kM = 1000;
    const double md = static_cast<double>(kM);
    const double p2 = kPinv * kPinv;

    const double linear = (1.0 - bound_theorem1(kPinv, kM, std::sqrt(2.0) / md)) * md;
    const double linear_limit = std::sqrt(2.0) / (2.0 * p2);
    const double ref24 = (1.0 - bound_ref24(kPinv, kM, optimal_lambda_ref24(kM))) * std::pow(md, 1.5);
    const double ref24_limit = 1.0 / p2;

    const double err_linear = std::abs(linear / linear_limit - 1.0);
    const double err_ref24 = std::abs(ref24 / ref24_limit - 1.0);
    return {"asymptotic_rates", err_linear <= 0.05 && err_ref24 <= 0.05,
            "m(1-rho1) relative error " + fmt(err_linear) + ", m^1.5(1-ref24) relative error " +
                fmt(err_ref24)};
}

PropertyResult ka_sweep_contraction(const Context& ctx) {
    Worst w;
    const double rho_sq = true_contraction(ctx.fig1.a, 1.0);
    const ConvergenceTrace t =
        ka_run(ctx.fig1, {1.0, 30, Ordering::cyclic, 0}, Vector(ctx.fig1.cols(), 0.0));
    for (std::size_t j = 0; j + 1 < t.sq_errors.size(); ++j) {
        if (t.sq_errors[j] < 1e-250) break;
        w.check(t.sq_errors[j + 1] / t.sq_errors[j], rho_sq, 1e-10);
    }
    return w.result("ka_sweep_contraction");
}

PropertyResult ka_envelope(const Context& ctx) {
    Worst w;
    const DenseMatrix& b = ctx.fig1.a;
    const double rho2 = bound_corollary2(b, 1.0, default_partition(b.rows(), b.cols()));
    const ConvergenceTrace t = ka_run(ctx.fig1, {1.0, 60, Ordering::cyclic, 0}, Vector(b.cols(), 0.0));
    for (std::size_t j = 0; j < t.sq_errors.size(); ++j) {
        const double env = t.sq_errors[0] * std::pow(rho2, static_cast<double>(j));
        w.check(t.sq_errors[j], env * (1.0 + 1e-8), 0.0);
    }
    return w.result("ka_convergence_envelope");
}

PropertyResult fig1_bound_ordering(const Context& ctx) {
    const DenseMatrix& b = ctx.fig1.a;
    const double pinv = pinv_norm(b);
    const double bd1 = bound_corollary1(pinv, b.rows());
    const double bd2 = bound_corollary2(b, 1.0, default_partition(b.rows(), b.cols()));
    const double rka = bound_rka(b.frobenius_sq(), pinv, b.rows());
    return {"fig1_bound_ordering", rka < bd2 && bd2 < bd1,
            "rka_bd " + fmt(rka) + ", ka_bd2 " + fmt(bd2) + ", ka_bd1 " + fmt(bd1)};
}

PropertyResult rka_expected_decay(const Context& ctx) {
    constexpr std::size_t kRealizations = 1000;
    constexpr std::size_t kSweeps = 20;
    const LinearSystem& sys = ctx.fig1;
    const Vector x0(sys.cols(), 0.0);
    const auto mean = mean_trace(sys, {1.0, kSweeps, Ordering::randomized, ctx.seed}, x0,
                                 kRealizations, ctx.options.threads);
    const double pinv = pinv_norm(sys.a);
    const double slack = 1.0 + 3.0 / std::sqrt(static_cast<double>(kRealizations));
    Worst w;
    for (std::size_t j = 1; j <= kSweeps; ++j) {
        w.check(mean[j], bound_rka(sys.a.frobenius_sq(), pinv, j * sys.rows()) * mean[0] * slack, 0.0);
    }
    return w.result("rka_expected_decay");
}

PropertyResult row_sampling(const Context& ctx) {
    // Unit rows: sampling must be uniform. Chi-square, 29 degrees of
    // freedom, rejection at p < 0.001.
    constexpr double kCritical = 58.30117;
    constexpr std::size_t kDraws = 100000;
    const RowSampler sampler(ctx.fig1.a);
    Rng rng(ctx.seed + 31);
    std::vector<std::size_t> counts(ctx.fig1.rows(), 0);
    for (std::size_t t = 0; t < kDraws; ++t) ++counts[sampler.draw(rng)];
    const double expected = static_cast<double>(kDraws) / static_cast<double>(counts.size());
    double chi2 = 0.0;
    for (std::size_t c : counts) chi2 += (c - expected) * (c - expected) / expected;
    const bool applicable = counts.size() == 30;
    return {"row_sampling_uniform", applicable && chi2 < kCritical, "chi2 " + fmt(chi2)};
}

PropertyResult determinism(const Context& ctx) {
    ExperimentConfig fig2;
    fig2.pinv_norm_fixed = 0.5;
    fig2.m_range = ExperimentConfig::Range{10, 200};
    const bool fig2_same = run_fig2(fig2).to_string() == run_fig2(fig2).to_string();
    const LinearSystem again = gen_problem(ctx.fig1.rows(), ctx.fig1.cols(), ctx.seed);
    const bool gen_same = again.a == ctx.fig1.a && again.b == ctx.fig1.b && again.x_true == ctx.fig1.x_true;
    SolverConfig cfg{1.0, 5, Ordering::randomized, ctx.seed};
    const Vector x0(ctx.fig1.cols(), 0.0);
    const bool rka_same = rka_run(ctx.fig1, cfg, x0).sq_errors == rka_run(ctx.fig1, cfg, x0).sq_errors;
    return {"determinism", fig2_same && gen_same && rka_same,
            std::string("fig2 ") + (fig2_same ? "ok" : "differs") + ", gen_problem " +
                (gen_same ? "ok" : "differs") + ", rka_run " + (rka_same ? "ok" : "differs")};
}

}  // namespace

VerifyReport verify_suite(std::uint64_t seed, const VerifyOptions& options) {
    using Property = PropertyResult (*)(const Context&);
    static constexpr std::array<std::pair<const char*, Property>, 23> kProperties{{
        {"projector_idempotence", projector_idempotence},
        {"factor_algebra", factor_algebra},
        {"spectral_norm_cross_check", spectral_norm_cross_check},
        {"frobenius_equals_row_count", frobenius_row_count},
        {"spectral_norm_sq_at_least_m_over_n", spectral_lower_bound},
        {"exact_projection", exact_projection},
        {"per_step_monotonicity", step_monotonicity},
        {"dynamical_system_equivalence", dynamical_equivalence},
        {"energy_identity", energy_identity},
        {"drift_bound", drift_bound},
        {"theorem1_soundness", theorem1_soundness},
        {"corollary2_soundness", corollary2_soundness},
        {"meany_soundness", meany_soundness},
        {"rka_dominance_chain", rka_dominance_chain},
        {"lemma1_implication", lemma1_implication},
        {"fig2_dominance", fig2_dominance},
        {"asymptotic_rates", asymptotic_rates},
        {"ka_sweep_contraction", ka_sweep_contraction},
        {"ka_convergence_envelope", ka_envelope},
        {"fig1_bound_ordering", fig1_bound_ordering},
        {"rka_expected_decay", rka_expected_decay},
        {"row_sampling_uniform", row_sampling},
        {"determinism", determinism},
    }};

    VerifyReport report;
    Context ctx{seed, options, {}, {}};
    try {
        ctx.fig1 = gen_problem(30, 3, seed);
        ctx.instances = soundness_instances(seed, 100);
    } catch (const std::exception& e) {
        report.properties.push_back({"instance_generation", false, e.what()});
        return report;
    }
    for (const auto& [name, property] : kProperties) {
        try {
            report.properties.push_back(property(ctx));
        } catch (const std::exception& e) {
            report.properties.push_back({name, false, std::string("threw: ") + e.what()});
        }
    }
    return report;
}

}  // namespace kaczmarz
