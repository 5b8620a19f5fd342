#include "uqp/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "uqp/caf.hpp"
#include "uqp/io.hpp"
#include "uqp/local.hpp"
#include "uqp/merit.hpp"
#include "uqp/oracle.hpp"
#include "uqp/rng.hpp"
#include "uqp/scenarios.hpp"
#include "uqp/types.hpp"

namespace uqp {

namespace {

double elapsed_ms_since(std::chrono::steady_clock::time_point start) {
    const auto end = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(end - start).count();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open output file: " + path);
    out << content;
    if (!out) throw ValidationError("failed to write output file: " + path);
}

std::string format_double(double v, const char* fmt) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return std::string(buf);
}

struct GenOptions {
    std::string scenario;
    std::string out;
    int n = 0;
    int rank = 0;
    bool rank_given = false;
    double eta = 0.8;
    double eta1 = 0.8;
    double eta2 = 0.9;
    double rho = 0.2;
    double doppler = 0.25;
    bool doppler_given = false;
    std::uint64_t seed = 1;
};

struct SolveOptions {
    std::string matrix;
    std::string method;
    std::string out;
    int m = 16;
    double eps = 1e-9;
    double delta = 0.0;
    double delta0 = 0.0;
    int restarts = 1;
    int max_outer = 5000;
    std::uint64_t seed = 1;
    bool no_timing = false;
};

struct BenchOptions {
    std::string scenario;
    std::string n_list;
    std::string out;
    int trials = 20;
    int rank = 0;
    bool rank_given = false;
    int restarts = 4;
    double doppler = 0.25;
    std::uint64_t seed = 1;
    bool no_timing = false;
};

struct CafOptions {
    int n = 53;
    int tau_grid = 41;
    int f_grid = 41;
    int iters = 50;
    std::string solver = "local";
    std::string out;
    std::uint64_t seed = 1;
};

HermitianMatrix theorem2_instance(int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> sigma(static_cast<size_t>(n), 1.0);
    sigma.front() = 2.0;
    return theorem2_construct({random_phases(n, rng)}, sigma);
}

HermitianMatrix generate_matrix(const GenOptions& o) {
    if (o.scenario == "random" || o.scenario == "rankdef") {
        if (o.scenario == "rankdef" && !o.rank_given) {
            throw ValidationError("gen: scenario rankdef requires --rank");
        }
        const int d = o.rank_given ? o.rank : o.n;
        return random_hermitian(RandomSpec{o.n, d, o.seed});
    }
    if (o.scenario == "theorem2") return theorem2_instance(o.n, o.seed);
    ClutterParams params;
    params.eta = o.eta;
    params.eta1 = o.eta1;
    params.eta2 = o.eta2;
    params.rho_doppler = o.rho;
    const int which = o.scenario == "case1" ? 1 : (o.scenario == "case2" ? 2 : 3);
    const HermitianMatrix m = clutter_case(which, o.n, params);
    // The covariance itself is emitted unless a target Doppler is supplied,
    // in which case the induced design matrix M^{-1} o (p p^H)^* is written.
    if (!o.doppler_given) return m;
    return snr_matrix(m, steering(o.n, o.doppler));
}

int cmd_gen(const GenOptions& o) {
    save_matrix(generate_matrix(o), o.out);
    return 0;
}

MeritReport solve_one(const HermitianMatrix& r, const SolveOptions& o) {
    if (o.method == "merit") {
        MeritConfig cfg;
        cfg.eps0 = o.eps;
        cfg.delta = o.delta;
        cfg.delta0 = o.delta0;
        cfg.max_outer = o.max_outer;
        cfg.restarts = o.restarts;
        cfg.seed = o.seed;
        return merit_solve(r, cfg).report;
    }
    MeritReport report;
    report.n = r.size();
    report.seed = o.seed;
    if (o.method == "local") {
        Rng rng(o.seed);
        const LocalResult res = local_optimize(r, random_phases(r.size(), rng));
        report.method = "local";
        report.s = res.s;
        report.objective = res.trace.objectives.back();
        report.converged = res.trace.converged;
        report.outer_iterations = res.trace.iterations;
        return report;
    }
    const OracleResult res = brute_force(r, o.m);
    report.method = "oracle";
    report.s = res.s;
    report.objective = res.value;
    report.converged = true;
    report.outer_iterations = 0;
    return report;
}

int cmd_solve(const SolveOptions& o) {
    const HermitianMatrix r = load_matrix(o.matrix);
    const auto start = std::chrono::steady_clock::now();
    MeritReport report = solve_one(r, o);
    report.elapsed_ms = o.no_timing ? 0.0 : elapsed_ms_since(start);
    const std::string json = report_to_json(report);
    if (!o.out.empty()) write_text_file(o.out, json);
    std::cout << json;
    return 0;
}

std::vector<int> parse_n_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        size_t pos = 0;
        const int value = std::stoi(item, &pos);
        if (pos != item.size() || value < 1) throw ValidationError("bench: bad --n-list entry: " + item);
        out.push_back(value);
    }
    if (out.empty()) throw ValidationError("bench: --n-list is empty");
    return out;
}

int cmd_bench(const BenchOptions& o) {
    const std::vector<int> sizes = parse_n_list(o.n_list);

    std::string csv = "n,rank_or_case,trials,count_gamma_one,avg_gamma,min_gamma,avg_seconds\n";
    nlohmann::json archive = nlohmann::json::array();

    for (const int n : sizes) {
        // Shared design matrix for the clutter cases (trials differ only in
        // the solver initialization); fresh random matrices otherwise.
        HermitianMatrix shared(1);
        bool has_shared = false;
        if (o.scenario == "case1" || o.scenario == "case2" || o.scenario == "case3") {
            ClutterParams params;
            const int which = o.scenario == "case1" ? 1 : (o.scenario == "case2" ? 2 : 3);
            shared = snr_matrix(clutter_case(which, n, params), steering(n, o.doppler));
            has_shared = true;
        } else if (o.scenario == "rankdef" && !o.rank_given) {
            throw ValidationError("bench: scenario rankdef requires --rank");
        }
        const int d = o.rank_given ? o.rank : n;

        auto run_trial = [&, n, d](int t) {
            HermitianMatrix r = shared;
            if (!has_shared) {
                const std::uint64_t matrix_seed = mix_seed(o.seed, 0x4000u + std::uint64_t(t));
                r = o.scenario == "theorem2" ? theorem2_instance(n, matrix_seed)
                                             : random_hermitian(RandomSpec{n, d, matrix_seed});
            }
            MeritConfig cfg;
            cfg.restarts = o.restarts;
            cfg.seed = mix_seed(o.seed, std::uint64_t(t));
            const auto start = std::chrono::steady_clock::now();
            MeritReport report = merit_solve(r, cfg).report;
            report.elapsed_ms = o.no_timing ? 0.0 : elapsed_ms_since(start);
            return report;
        };

        std::vector<std::future<MeritReport>> futures;
        futures.reserve(static_cast<size_t>(o.trials));
        for (int t = 0; t < o.trials; ++t) {
            futures.push_back(std::async(std::launch::async, run_trial, t));
        }

        BenchRow row;
        row.n = n;
        row.rank_or_case = has_shared || o.scenario == "theorem2" ? o.scenario : "d=" + std::to_string(d);
        row.trials = o.trials;
        row.min_gamma = 1.0;
        double gamma_sum = 0.0;
        double seconds_sum = 0.0;
        for (int t = 0; t < o.trials; ++t) {
            const MeritReport report = futures[static_cast<size_t>(t)].get();
            if (report.gamma >= 1.0 - 1e-9) ++row.count_gamma_one;
            gamma_sum += report.gamma;
            row.min_gamma = std::min(row.min_gamma, report.gamma);
            seconds_sum += report.elapsed_ms / 1000.0;
            archive.push_back(nlohmann::json::parse(report_to_json(report)));
        }
        row.avg_gamma = o.trials > 0 ? gamma_sum / o.trials : 0.0;
        row.avg_seconds = o.trials > 0 ? seconds_sum / o.trials : 0.0;

        csv += std::to_string(row.n) + "," + row.rank_or_case + "," + std::to_string(row.trials) + "," +
               std::to_string(row.count_gamma_one) + "," + format_double(row.avg_gamma, "%.6f") + "," +
               format_double(row.min_gamma, "%.6f") + "," + format_double(row.avg_seconds, "%.6f") + "\n";
    }

    write_text_file(o.out, csv);
    write_text_file(o.out + ".reports.json", archive.dump(2) + "\n");
    std::cout << csv;
    return 0;
}

int cmd_caf(const CafOptions& o) {
    const PulseBasis basis{o.n, 1.0 / double(o.n)};
    const CafGrid grid = make_thumbtack_grid(basis, o.tau_grid, o.f_grid);
    CafConfig cfg;
    cfg.solver = o.solver == "merit" ? CafSolver::merit : CafSolver::local;
    cfg.seed = o.seed;
    const CafResult result = caf_synthesize(basis, grid, o.iters, cfg);

    double peak = 0.0;
    for (const double v : result.caf_abs) peak = std::max(peak, v);
    if (peak <= 0.0) peak = 1.0;

    std::string csv = "tau,f,abs_chi\n";
    for (int a = 0; a < grid.tau_count(); ++a) {
        for (int b = 0; b < grid.f_count(); ++b) {
            csv += format_double(grid.tau_points[static_cast<size_t>(a)], "%.12g") + "," +
                   format_double(grid.f_points[static_cast<size_t>(b)], "%.12g") + "," +
                   format_double(result.caf_abs[static_cast<size_t>(grid.index(a, b))] / peak, "%.12g") + "\n";
        }
    }
    write_text_file(o.out + ".csv", csv);

    nlohmann::json sidecar;
    sidecar["n"] = o.n;
    sidecar["t_p"] = basis.t_p;
    sidecar["iterations"] = o.iters;
    sidecar["solver"] = o.solver;
    sidecar["seed"] = o.seed;
    sidecar["g_trace"] = result.g_trace;
    sidecar["x_phases"] = result.state.x.phases();
    sidecar["sidelobe_initial"] = result.sidelobe_initial;
    sidecar["sidelobe_final"] = result.sidelobe_final;
    const bool well_defined = result.sidelobe_final > 0.0 && std::isfinite(result.sidelobe_initial);
    sidecar["sidelobe_reduction_db"] =
        well_defined ? nlohmann::json(10.0 * std::log10(result.sidelobe_initial / result.sidelobe_final))
                     : nlohmann::json(nullptr);
    write_text_file(o.out + ".json", sidecar.dump(2) + "\n");
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Unimodular quadratic programming toolkit"};
    app.name("uqp");
    app.require_subcommand(1);

    GenOptions gen_opts;
    CLI::App* gen = app.add_subcommand("gen", "Generate a matrix JSON file");
    gen->add_option("--scenario", gen_opts.scenario, "Matrix family")
        ->required()
        ->check(CLI::IsMember({"random", "rankdef", "case1", "case2", "case3", "theorem2"}));
    gen->add_option("--n", gen_opts.n, "Matrix size")->required();
    CLI::Option* gen_rank = gen->add_option("--rank", gen_opts.rank, "Number of random rank-one terms");
    gen->add_option("--eta", gen_opts.eta, "Case-1 correlation coefficient");
    gen->add_option("--eta1", gen_opts.eta1, "Case-2 sea-clutter correlation");
    gen->add_option("--eta2", gen_opts.eta2, "Case-2 land-clutter correlation");
    gen->add_option("--rho", gen_opts.rho, "Case-2 sea-clutter Doppler shift");
    CLI::Option* gen_doppler = gen->add_option(
        "--doppler", gen_opts.doppler, "Target Doppler; when given, cases emit M^{-1} o (p p^H)^*");
    gen->add_option("--seed", gen_opts.seed, "Generator seed");
    gen->add_option("--out", gen_opts.out, "Output path")->required();

    SolveOptions solve_opts;
    CLI::App* solve = app.add_subcommand("solve", "Solve the unimodular quadratic program for a matrix file");
    solve->add_option("--matrix", solve_opts.matrix, "Matrix JSON path")->required();
    solve->add_option("--method", solve_opts.method, "Solver")
        ->required()
        ->check(CLI::IsMember({"merit", "local", "oracle"}));
    solve->add_option("--m", solve_opts.m, "Oracle phase alphabet size");
    solve->add_option("--eps", solve_opts.eps, "Decomposition residual target");
    solve->add_option("--delta", solve_opts.delta, "Initial alpha0 increment (0 = auto)");
    solve->add_option("--delta0", solve_opts.delta0, "Minimal alpha0 increment (0 = auto)");
    solve->add_option("--restarts", solve_opts.restarts, "Random restarts");
    solve->add_option("--max-outer", solve_opts.max_outer, "Cycle cap per inner optimization");
    solve->add_option("--seed", solve_opts.seed, "Initialization seed");
    solve->add_option("--out", solve_opts.out, "Report output path");
    solve->add_flag("--no-timing", solve_opts.no_timing, "Zero the elapsed-time field (reproducible bytes)");

    BenchOptions bench_opts;
    CLI::App* bench = app.add_subcommand("bench", "Benchmark the solver over a scenario");
    bench->add_option("--scenario", bench_opts.scenario, "Matrix family")
        ->required()
        ->check(CLI::IsMember({"random", "rankdef", "case1", "case2", "case3", "theorem2"}));
    bench->add_option("--n-list", bench_opts.n_list, "Comma-separated sizes, e.g. 8,16")->required();
    bench->add_option("--trials", bench_opts.trials, "Trials per size")->check(CLI::PositiveNumber);
    CLI::Option* bench_rank = bench->add_option("--rank", bench_opts.rank, "Random-matrix rank");
    bench->add_option("--restarts", bench_opts.restarts, "Random restarts per trial")->check(CLI::PositiveNumber);
    bench->add_option("--doppler", bench_opts.doppler, "Target Doppler for the clutter cases");
    bench->add_option("--seed", bench_opts.seed, "Base seed");
    bench->add_option("--out", bench_opts.out, "CSV output path")->required();
    bench->add_flag("--no-timing", bench_opts.no_timing, "Zero elapsed-time fields (reproducible bytes)");

    CafOptions caf_opts;
    CLI::App* caf = app.add_subcommand("caf", "Synthesize a thumbtack cross-ambiguity function");
    caf->add_option("--n", caf_opts.n, "Code length (prime, 1 mod 4)");
    caf->add_option("--tau-grid", caf_opts.tau_grid, "Delay lattice size (odd)");
    caf->add_option("--f-grid", caf_opts.f_grid, "Doppler lattice size (odd)");
    caf->add_option("--iters", caf_opts.iters, "Synthesis cycles");
    caf->add_option("--solver", caf_opts.solver, "Code-update solver")
        ->check(CLI::IsMember({"local", "merit"}));
    caf->add_option("--seed", caf_opts.seed, "Solver seed");
    caf->add_option("--out", caf_opts.out, "Output prefix (writes <prefix>.csv and <prefix>.json)")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    gen_opts.rank_given = gen_rank->count() > 0;
    gen_opts.doppler_given = gen_doppler->count() > 0;
    bench_opts.rank_given = bench_rank->count() > 0;

    try {
        if (gen->parsed()) return cmd_gen(gen_opts);
        if (solve->parsed()) return cmd_solve(solve_opts);
        if (bench->parsed()) return cmd_bench(bench_opts);
        if (caf->parsed()) return cmd_caf(caf_opts);
        std::cerr << "error: no command selected\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace uqp
