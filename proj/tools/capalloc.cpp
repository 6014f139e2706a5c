// Command-line front end: solve single instances, locate orientability
// thresholds, evaluate CDN scenarios, and run law-of-large-numbers
// experiments. All output is CSV with a header row; the first record of every
// run echoes the fully resolved configuration so a run can be reproduced from
// its own output.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "capalloc/bp.hpp"
#include "capalloc/cdn.hpp"
#include "capalloc/cuckoo.hpp"
#include "capalloc/gen.hpp"
#include "capalloc/graph.hpp"
#include "capalloc/io.hpp"
#include "capalloc/rde.hpp"

using namespace capalloc;

namespace {

int resolve_jobs(int flag) {
    if (flag > 0) return flag;
    if (const char* env = std::getenv("CAPALLOC_JOBS")) {
        int j = std::atoi(env);
        if (j > 0) return j;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

/// Runs fn(i) for i in [0, count) on up to `jobs` threads; results are
/// collected by index, so the reduction order is deterministic.
template <typename Fn>
void parallel_for(int count, int jobs, Fn fn) {
    jobs = std::min(jobs, std::max(count, 1));
    if (jobs <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) {
        pool.emplace_back([&fn, t, count, jobs] {
            for (int i = t; i < count; i += jobs) fn(i);
        });
    }
    for (std::thread& th : pool) th.join();
}

void print_row(const std::vector<std::string>& cells) { std::cout << csv_row(cells) << "\n"; }

int cmd_solve(const std::string& file, const std::string& method, double lambda, bool check_flow, int jobs) {
    print_row({"config", "solve", "file=" + file, "method=" + method, "lambda=" + csv_real(lambda),
               "check_flow=" + std::string(check_flow ? "1" : "0"), "jobs=" + std::to_string(jobs)});
    CapGraph g = load_graph(file);
    bool ok = true;
    long long flow = -1;
    if (method == "flow" || check_flow) {
        auto [size, witness] = max_allocation_flow(g);
        flow = size;
        ok = ok && validate(g, witness);
    }
    print_row({"method", "value", "witness", "sweeps", "flow_agrees"});
    if (method == "flow") {
        print_row({"flow", csv_real(static_cast<double>(flow)), "1", "", ""});
    } else if (method == "enum") {
        long long m = max_allocation_enum(g);
        bool agrees = !check_flow || m == flow;
        ok = ok && agrees;
        print_row({"enum", csv_real(static_cast<double>(m)), "0", "", check_flow ? (agrees ? "1" : "0") : ""});
    } else if (method == "bp0") {
        ZeroTempResult z = bp_zero_temperature(g);
        double value = z.estimate / 2.0;  // half the summed vertex estimates
        bool agrees = !check_flow || value == static_cast<double>(flow);
        ok = ok && agrees;
        print_row({"bp0", csv_real(value), "0", "", check_flow ? (agrees ? "1" : "0") : ""});
    } else {  // finite-lambda bp
        BpResult r = bp_finite_lambda(g, lambda);
        double total = 0.0;
        for (int v = 0; v < g.num_vertices(); ++v) total += op_D(g, v, r.state);
        bool agrees = !check_flow || std::abs(total / 2.0 - static_cast<double>(flow)) < 0.5;
        ok = ok && agrees;
        print_row({"bp", csv_real(total / 2.0), "0", std::to_string(r.sweeps),
                   check_flow ? (agrees ? "1" : "0") : ""});
        print_row({"vertex", "d_v", "", "", ""});
        for (int v = 0; v < g.num_vertices(); ++v)
            print_row({g.vertex(v).id, csv_real(op_D(g, v, r.state)), "", "", ""});
    }
    return ok ? 0 : 1;
}

int cmd_threshold(const CuckooParams& p, double tol, const std::vector<int>& simulate, std::uint64_t seed,
                  int jobs) {
    print_row({"config", "threshold", "h=" + std::to_string(p.h), "k=" + std::to_string(p.k),
               "l=" + std::to_string(p.l), "r=" + std::to_string(p.r), "tol=" + csv_real(tol),
               "simulate=" + (simulate.empty() ? std::string("0;0")
                                               : std::to_string(simulate[0]) + ";" + std::to_string(simulate[1])),
               "seed=" + std::to_string(seed), "jobs=" + std::to_string(jobs)});
    auto t0 = std::chrono::steady_clock::now();
    double tau_star = cuckoo_threshold(p, tol);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (simulate.empty()) {
        print_row({"h", "k", "l", "r", "tol", "tau_star", "seconds"});
        print_row({std::to_string(p.h), std::to_string(p.k), std::to_string(p.l), std::to_string(p.r),
                   csv_real(tol), csv_real(tau_star), csv_real(secs)});
        return 0;
    }
    int n = simulate[0], trials = simulate[1];
    auto fraction = [&](double tau) {
        std::vector<int> oriented(static_cast<std::size_t>(trials), 0);
        parallel_for(trials, jobs, [&](int t) {
            Hypergraph hg = sample_hypergraph(n, static_cast<int>(tau * n), p.h,
                                              {seed, static_cast<std::uint64_t>(t)});
            oriented[static_cast<std::size_t>(t)] = orient_decide(hg, p) ? 1 : 0;
        });
        int hits = 0;
        for (int o : oriented) hits += o;
        return static_cast<double>(hits) / trials;
    };
    double lo = fraction(tau_star * 0.95), hi = fraction(tau_star * 1.05);
    print_row({"h", "k", "l", "r", "tol", "tau_star", "seconds", "frac_below", "frac_above"});
    print_row({std::to_string(p.h), std::to_string(p.k), std::to_string(p.l), std::to_string(p.r), csv_real(tol),
               csv_real(tau_star), csv_real(secs), csv_real(lo), csv_real(hi)});
    return 0;
}

int cmd_cdn(const std::string& file, int jobs) {
    print_row({"config", "cdn", "scenario=" + file, "jobs=" + std::to_string(jobs)});
    CdnScenario s = load_scenario(file);
    LimitResult r = cdn_capacity(s);
    print_row({"coded", "value", "value_low", "value_high", "gap", "sweeps_low", "sweeps_high"});
    print_row({s.coded ? "1" : "0", csv_real(r.value), csv_real(r.value_low), csv_real(r.value_high),
               csv_real(r.gap), std::to_string(r.sweeps_low), std::to_string(r.sweeps_high)});
    return std::isfinite(r.value) ? 0 : 1;
}

int cmd_lln(const std::string& fileA, const std::string& fileB, int nA, int trials, std::uint64_t seed, int jobs) {
    print_row({"config", "lln", "phiA=" + fileA, "phiB=" + fileB, "n=" + std::to_string(nA),
               "trials=" + std::to_string(trials), "seed=" + std::to_string(seed),
               "jobs=" + std::to_string(jobs)});
    VertexLaw phiA = load_law(fileA), phiB = load_law(fileB);
    double prediction = limit_M(phiA, phiB).value;
    std::vector<double> empirical(static_cast<std::size_t>(trials), 0.0);
    parallel_for(trials, jobs, [&](int t) {
        CapGraph g = sample_bipartite_config(phiA, phiB, nA, {seed, static_cast<std::uint64_t>(t)});
        empirical[static_cast<std::size_t>(t)] = static_cast<double>(max_allocation_flow(g).first) / nA;
    });
    print_row({"trial", "seed", "stream", "n", "empirical"});
    double mean = 0.0;
    for (int t = 0; t < trials; ++t) {
        mean += empirical[static_cast<std::size_t>(t)] / trials;
        print_row({std::to_string(t), std::to_string(seed), std::to_string(t), std::to_string(nA),
                   csv_real(empirical[static_cast<std::size_t>(t)])});
    }
    double rel = prediction != 0.0 ? std::abs(mean - prediction) / std::abs(prediction)
                                   : std::abs(mean);
    print_row({"mean", "prediction", "rel_error", "", ""});
    print_row({csv_real(mean), csv_real(prediction), csv_real(rel), "", ""});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"maximum capacitated allocations: instances, thresholds, CDN loads, LLN experiments"};
    app.require_subcommand(1);
    int jobs = 0;
    app.add_option("--jobs", jobs, "worker threads (default: CAPALLOC_JOBS or processor count)");

    auto* solve = app.add_subcommand("solve", "maximum allocation of one graph file");
    std::string graph_file, method = "flow";
    double lambda = 100.0;
    bool check_flow = false;
    solve->add_option("file", graph_file, "graph file")->required();
    solve->add_option("--method", method, "flow | bp0 | bp | enum")
        ->check(CLI::IsMember({"flow", "bp0", "bp", "enum"}));
    solve->add_option("--lambda", lambda, "activity parameter for --method bp");
    solve->add_flag("--check-flow", check_flow, "cross-check the result against the flow oracle");

    auto* threshold = app.add_subcommand("threshold", "orientability threshold for (h,k,l,r)");
    CuckooParams params;
    double tol = 0.005;
    std::vector<int> simulate;
    std::uint64_t seed = 0;
    threshold->add_option("harity", params.h, "hyperedge arity h")->required();
    threshold->add_option("kbound", params.k, "vertex bound k")->required();
    threshold->add_option("ltotal", params.l, "per-hyperedge total l")->required();
    threshold->add_option("rbound", params.r, "per-endpoint bound r")->required();
    threshold->add_option("--tol", tol, "bisection tolerance on tau");
    threshold->add_option("--simulate", simulate, "n trials: empirical orientable fractions at tau* (1 +/- 0.05)")
        ->expected(2);
    threshold->add_option("--seed", seed, "simulation seed");

    auto* cdn = app.add_subcommand("cdn", "asymptotic absorbed load of a CDN scenario");
    std::string scenario_file;
    cdn->add_option("file", scenario_file, "scenario file")->required();

    auto* lln = app.add_subcommand("lln", "finite-sample allocation density vs the asymptotic value");
    std::string lawA_file, lawB_file;
    int nA = 1000, trials = 5;
    std::uint64_t lln_seed = 0;
    lln->add_option("phiA", lawA_file, "A-side law file")->required();
    lln->add_option("phiB", lawB_file, "B-side law file")->required();
    lln->add_option("--n", nA, "A-side vertex count");
    lln->add_option("--trials", trials, "independent samples");
    lln->add_option("--seed", lln_seed, "base seed (trial index is the stream id)");

    CLI11_PARSE(app, argc, argv);
    int j = resolve_jobs(jobs);
    try {
        if (*solve) return cmd_solve(graph_file, method, lambda, check_flow, j);
        if (*threshold) return cmd_threshold(params, tol, simulate, seed, j);
        if (*cdn) return cmd_cdn(scenario_file, j);
        return cmd_lln(lawA_file, lawB_file, nA, trials, lln_seed, j);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
