#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>

#include "kaczmarz/bounds.hpp"
#include "kaczmarz/csv.hpp"
#include "kaczmarz/errors.hpp"
#include "kaczmarz/experiments.hpp"
#include "kaczmarz/solvers.hpp"

namespace kaczmarz::cli {

namespace {

void emit(const CsvTable& table, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        table.write(out);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ParseError("cannot open '" + path + "' for writing");
    table.write(file);
    if (!file) throw ParseError("failed writing '" + path + "'");
}

struct SolveArgs {
    std::string matrix;
    std::string rhs;
    std::string truth;
    std::string out;
    double lambda = 1.0;
    std::size_t sweeps = 50;
    std::string ordering = "cyclic";
    std::uint64_t seed = 42;
};

int run_solve(const SolveArgs& a, std::ostream& out) {
    LinearSystem system{read_matrix_csv_file(a.matrix), read_vector_csv_file(a.rhs), std::nullopt};
    if (!a.truth.empty()) system.x_true = read_vector_csv_file(a.truth);
    const SolverConfig config{a.lambda, a.sweeps,
                              a.ordering == "cyclic" ? Ordering::cyclic : Ordering::randomized, a.seed};
    const Vector x0(system.cols(), 0.0);

    if (system.x_true) {
        const ConvergenceTrace trace = run(system, config, x0);
        CsvTable table({"sweep", "sq_error"});
        for (std::size_t j = 0; j < trace.sq_errors.size(); ++j) {
            table.add_row({static_cast<double>(j), trace.sq_errors[j]});
        }
        emit(table, a.out, out);
    } else {
        CsvTable table({"x"});
        for (double v : solve(system, config, x0)) table.add_row({v});
        emit(table, a.out, out);
    }
    return 0;
}

int run_bounds(const std::string& matrix, double lambda, const std::string& path, std::ostream& out) {
    const DenseMatrix b = normalize_rows(read_matrix_csv_file(matrix));
    const BoundReport r = full_report(b, lambda);

    std::vector<std::pair<std::string, double>> rows;
    auto put = [&](const char* key, std::optional<double> value) {
        if (value) rows.emplace_back(key, *value);
    };
    put("lambda", r.lambda);
    put("m", static_cast<double>(r.m));
    put("n", static_cast<double>(r.n));
    put("rho_sq_oracle", r.rho_sq_oracle);
    put("rho1", r.rho1);
    put("rho1_sharp", r.rho1_sharp);
    put("rho2", r.rho2);
    put("corollary1", r.corollary1);
    put("meany", r.meany);
    put("rka_step", r.rka_step);
    put("ref24", r.ref24);
    put("ref26", r.ref26);

    std::ofstream file;
    std::ostream* sink = &out;
    if (!path.empty()) {
        file.open(path, std::ios::binary);
        if (!file) throw ParseError("cannot open '" + path + "' for writing");
        sink = &file;
    }
    *sink << "key,value\n";
    for (const auto& [key, value] : rows) *sink << key << ',' << format_number(value) << '\n';
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cyclic and randomized Kaczmarz solvers with convergence-bound tooling", "kaczmarz"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    std::function<int()> action;

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "Run the Kaczmarz iteration on a system from CSV files");
    solve->add_option("--matrix", solve_args.matrix, "Headerless CSV, one matrix row per line")
        ->required();
    solve->add_option("--rhs", solve_args.rhs, "Single-column CSV right-hand side")
        ->required();
    solve->add_option("--truth", solve_args.truth,
                      "Single-column CSV exact solution; enables the squared-error trace");
    solve->add_option("--lambda", solve_args.lambda, "Relaxation parameter in (0, 2)")
        ->capture_default_str();
    solve->add_option("--sweeps", solve_args.sweeps, "Number of sweeps of m steps")
        ->capture_default_str();
    solve->add_option("--ordering", solve_args.ordering, "Row ordering")
        ->check(CLI::IsMember({"cyclic", "randomized"}))
        ->capture_default_str();
    solve->add_option("--seed", solve_args.seed, "Seed for randomized ordering")->capture_default_str();
    solve->add_option("--out", solve_args.out, "Output CSV path (default: stdout)");
    solve->callback([&] { action = [&] { return run_solve(solve_args, out); }; });

    std::string bounds_matrix;
    std::string bounds_out;
    double bounds_lambda = 1.0;
    auto* bounds = app.add_subcommand("bounds", "Report every convergence bound for a matrix");
    bounds->add_option("--matrix", bounds_matrix, "Headerless CSV; rows are normalized first")
        ->required();
    bounds->add_option("--lambda", bounds_lambda, "Relaxation parameter in (0, 2]")
        ->capture_default_str();
    bounds->add_option("--out", bounds_out, "Output CSV path (default: stdout)");
    bounds->callback([&] {
        action = [&] { return run_bounds(bounds_matrix, bounds_lambda, bounds_out, out); };
    });

    ExperimentConfig fig1_cfg;
    std::string fig1_out;
    auto* fig1 = app.add_subcommand("fig1", "Cyclic vs randomized traces with bound envelopes");
    fig1->add_option("--m", fig1_cfg.m, "Rows")->capture_default_str();
    fig1->add_option("--n", fig1_cfg.n, "Columns")->capture_default_str();
    fig1->add_option("--sweeps", fig1_cfg.sweeps, "Sweeps")->capture_default_str();
    fig1->add_option("--realizations", fig1_cfg.realizations, "Randomized runs averaged")
        ->capture_default_str();
    fig1->add_option("--seed", fig1_cfg.seed, "Problem and sampling seed")->capture_default_str();
    fig1->add_option("--threads", fig1_cfg.threads, "Worker threads (0 = all cores)")
        ->capture_default_str();
    fig1->add_option("--out", fig1_out, "Output CSV path (default: stdout)");
    fig1->callback([&] {
        action = [&] {
            emit(run_fig1(fig1_cfg), fig1_out, out);
            return 0;
        };
    });

    double pinv = 0.5;
    ExperimentConfig::Range range;
    std::string fig2_out;
    auto* fig2 = app.add_subcommand("fig2", "Optimal-lambda bound comparison over m");
    fig2->add_option("--pinv-norm", pinv, "Fixed pseudo-inverse norm")->capture_default_str();
    fig2->add_option("--m-min", range.min, "Smallest m")->capture_default_str();
    fig2->add_option("--m-max", range.max, "Largest m")->capture_default_str();
    fig2->add_option("--out", fig2_out, "Output CSV path (default: stdout)");
    fig2->callback([&] {
        action = [&] {
            ExperimentConfig cfg;
            cfg.pinv_norm_fixed = pinv;
            cfg.m_range = range;
            emit(run_fig2(cfg), fig2_out, out);
            return 0;
        };
    });

    std::uint64_t verify_seed = 42;
    auto* verify = app.add_subcommand("verify", "Check every numerical property; exit 0 iff all pass");
    verify->add_option("--seed", verify_seed, "Instance seed")->capture_default_str();
    verify->callback([&] {
        action = [&] {
            const VerifyReport report = verify_suite(verify_seed);
            for (const auto& p : report.properties) {
                out << (p.passed ? "PASS " : "FAIL ") << p.name << ": " << p.detail << '\n';
            }
            out << report.properties.size() - report.failures() << '/' << report.properties.size()
                << " properties passed\n";
            return report.all_passed() ? 0 : 1;
        };
    });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        err << app.help();
        return 2;
    }

    try {
        return action ? action() : 2;
    } catch (const Error& e) {
        err << "error: " << e.name() << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace kaczmarz::cli
