// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
//
//   acceptance --cli path/to/mapforge [--only N]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include <mapforge/mapforge.hpp>

#include "oracle_cases.hpp"

namespace fs = std::filesystem;
using namespace mapforge;
using namespace mapforge::testing;

namespace {

// Pinned thresholds.
constexpr std::size_t kOracleConfigs = 300;
constexpr double kOracleSeconds = 60.0;
constexpr int kRooflineSamples = 10000;
constexpr int kLegalitySeeds = 20;
constexpr count_t kCompareBudget = 2000;
constexpr count_t kComparePopulation = 50;
constexpr double kRandomSpeedup = 1.5;
constexpr double kCompareSeconds = 600.0;
constexpr int kWinsNeeded = 2;
constexpr double kMicroAreaBudget = 4e-4;
constexpr double kMicroBudgetShare = 0.20;
constexpr int kMicroHitsNeeded = 4;

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<Model> bundled_models()
{
    const fs::path dir = fs::path(MAPFORGE_SOURCE_DIR) / "models";
    return {load_model(dir / "w1_conv.json"), load_model(dir / "w2_gemm.json"), load_model(dir / "w3_mixed.json")};
}

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

Outcome oracle_exact()
{
    const auto t0 = Clock::now();
    std::size_t bad = 0;
    std::string first;
    const auto cases = divisible_cases(kOracleConfigs, 2024);
    for (const auto& c : cases) {
        auto msg = exact_mismatch(analytical(c), oracle_simulate(c.mapping, c.layer, c.pi_l1, c.pi_l2));
        if (!msg.empty() && bad++ == 0) first = msg;
    }
    const double secs = seconds_since(t0);
    return {bad == 0 && secs < kOracleSeconds,
            std::to_string(cases.size() - bad) + "/" + std::to_string(cases.size()) + " exact in " + fmt(secs) + " s" +
                (first.empty() ? "" : "; first mismatch: " + first)};
}

Outcome oracle_bound()
{
    std::size_t bad = 0;
    std::string first;
    const auto cases = nondivisible_cases(kOracleConfigs, 2025);
    for (const auto& c : cases) {
        auto msg = bound_violation(analytical(c), oracle_simulate(c.mapping, c.layer, c.pi_l1, c.pi_l2));
        if (!msg.empty() && bad++ == 0) first = msg;
    }
    return {bad == 0, std::to_string(cases.size() - bad) + "/" + std::to_string(cases.size()) + " bounded" +
                          (first.empty() ? "" : "; first violation: " + first)};
}

Outcome roofline()
{
    const auto models = bundled_models();
    const Platform platforms[] = {edge_platform(), cloud_platform()};
    Rng rng(77);
    int bad = 0;
    for (int i = 0; i < kRooflineSamples; ++i) {
        const auto& m = models[static_cast<std::size_t>(i) % models.size()];
        const auto& p = platforms[(static_cast<std::size_t>(i) / models.size()) % 2];
        auto g = random_genome(m, p, rng);
        auto r = evaluate_genome(g, m, p, Objective::Latency);
        for (std::size_t j = 0; j < m.layers.size(); ++j) {
            const auto& c = r.layers[j];
            const bool ok = c.compute_cycles >= ceil_div(total_macs(m.layers[j]), g.num_pes()) &&
                            c.cycles >= c.compute_cycles &&
                            c.cycles >= bandwidth_cycles(c.dram.total(), p.bw_dram);
            bad += !ok;
        }
    }
    return {bad == 0, std::to_string(kRooflineSamples) + " genomes, " + std::to_string(bad) + " layer violations"};
}

Outcome legality()
{
    const auto models = bundled_models();
    int runs = 0, bad = 0;
    for (const Platform& p : {edge_platform(), cloud_platform()}) {
        for (const auto& m : models) {
            for (int seed = 1; seed <= kLegalitySeeds; ++seed) {
                ++runs;
                GaConfig cfg;
                cfg.sample_budget = kCompareBudget;
                cfg.population_size = kComparePopulation;
                cfg.rng_seed = static_cast<std::uint64_t>(seed);
                EvalContext ctx{m, p};
                try {
                    auto r = run_digamma(ctx, cfg);
                    bool ok = r.best_report.valid && r.best_report.area_mm2 <= p.area_budget &&
                              r.samples_used <= cfg.sample_budget && validate_genome(r.best_genome, m, p).empty();
                    for (std::size_t i = 1; i < r.trace.size(); ++i)
                        ok = ok && r.trace[i].best_fitness >= r.trace[i - 1].best_fitness;
                    bad += !ok;
                } catch (const NoValidDesign&) {
                    ++bad;
                }
            }
        }
    }
    return {bad == 0, std::to_string(runs - bad) + "/" + std::to_string(runs) + " runs legal and monotone"};
}

struct CompareRun {
    CompareTable table;
    double seconds = 0;
};

const CompareRun& compare_run()
{
    static const CompareRun run = [] {
        std::vector<Scheme> schemes;
        for (const char* s : {"digamma", "stdga", "random", "grid-dla", "grid-shi", "grid-eye", "fixedhw-buffer",
                              "fixedhw-medium", "fixedhw-compute"})
            schemes.push_back(parse_scheme(s));
        RunOptions base;
        base.budget = kCompareBudget;
        base.population = kComparePopulation;
        const auto t0 = Clock::now();
        CompareRun out;
        out.table = run_compare(bundled_models(), edge_platform(), schemes, {1, 2, 3, 4, 5}, base, 2);
        out.seconds = seconds_since(t0);
        return out;
    }();
    return run;
}

const SchemeSummary& summary(const CompareTable& t, const std::string& name)
{
    for (const auto& s : t.summaries)
        if (s.scheme == name) return s;
    throw std::logic_error("no scheme " + name);
}

double median_or_inf(const SchemeSummary& s, std::size_t model)
{
    const auto& v = s.median_per_model[model];
    return v ? *v : std::numeric_limits<double>::infinity();
}

/// Number of workloads where digamma's median is at most the best of `rivals`.
Outcome wins_against(const std::vector<std::string>& rivals)
{
    const auto& t = compare_run().table;
    const auto& dg = summary(t, "digamma");
    int wins = 0;
    std::string detail;
    for (std::size_t m = 0; m < t.models.size(); ++m) {
        double best = std::numeric_limits<double>::infinity();
        std::string who;
        for (const auto& r : rivals) {
            double v = median_or_inf(summary(t, r), m);
            if (v < best) {
                best = v;
                who = r;
            }
        }
        const double mine = median_or_inf(dg, m);
        wins += mine <= best;
        detail += t.models[m] + ": " + fmt(mine) + " vs " + who + " " + fmt(best) + "; ";
    }
    return {wins >= kWinsNeeded, std::to_string(wins) + "/" + std::to_string(t.models.size()) + " workloads (" +
                                     detail.substr(0, detail.size() - 2) + ")"};
}

Outcome versus_search_baselines()
{
    const auto& run = compare_run();
    const auto& t = run.table;
    const auto& dg = summary(t, "digamma");
    bool ok = run.seconds < kCompareSeconds;
    std::string detail;
    for (std::size_t m = 0; m < t.models.size(); ++m) {
        const double mine = median_or_inf(dg, m);
        const double sga = median_or_inf(summary(t, "stdga"), m);
        const double rnd = median_or_inf(summary(t, "random"), m);
        ok = ok && mine <= sga && mine <= rnd;
        detail += t.models[m] + ": " + fmt(mine) + " / " + fmt(sga) + " / " + fmt(rnd) + "; ";
    }
    const auto& rs = summary(t, "random");
    const double speedup = dg.geomean && rs.geomean ? *rs.geomean / *dg.geomean : 0.0;
    ok = ok && speedup >= kRandomSpeedup;
    return {ok, "median digamma/stdga/random " + detail + "geomean speedup over random " + fmt(speedup) + "x; " +
                    fmt(run.seconds) + " s"};
}

/// Micro layer small enough to enumerate every distinct design.
Outcome micro_optimum()
{
    const Model model{"micro", {{"m", 4, 2, 2, 1, 1, 1, 1}}};
    Platform p = edge_platform();
    p.max_pes = 16;
    p.max_pi = 4;
    p.area_budget = kMicroAreaBudget;

    // Unit dims are interchangeable as parallel dims and as loop positions, so
    // one representative per class covers the space.
    const std::vector<Dim> live{Dim::K, Dim::C, Dim::Y};
    const std::vector<Dim> par{Dim::K, Dim::C, Dim::Y, Dim::X};
    std::vector<DimOrder> orders;
    std::vector<Dim> perm = live;
    do {
        orders.push_back({perm[0], perm[1], perm[2], Dim::X, Dim::R, Dim::S});
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::vector<DimMap<count_t>> l2_tiles;
    for (count_t k = 1; k <= 4; ++k)
        for (count_t c = 1; c <= 2; ++c)
            for (count_t y = 1; y <= 2; ++y) {
                DimMap<count_t> t;
                for (Dim d : kAllDims) t[d] = 1;
                t[Dim::K] = k;
                t[Dim::C] = c;
                t[Dim::Y] = y;
                l2_tiles.push_back(t);
            }

    double best = -std::numeric_limits<double>::infinity();
    count_t space = 0;
    for (count_t a : p.allowed_pi())
        for (count_t b : p.allowed_pi()) {
            if (a * b > p.max_pes) continue;
            for (const auto& t2 : l2_tiles)
                for (const auto& t1 : l2_tiles) {
                    bool nested = true;
                    for (Dim d : kAllDims) nested = nested && t1[d] <= t2[d];
                    if (!nested) continue;
                    for (const auto& o2 : orders)
                        for (const auto& o1 : orders)
                            for (Dim p2 : par)
                                for (Dim p1 : par) {
                                    Genome g;
                                    g.pi_l1 = a;
                                    g.pi_l2 = b;
                                    MappingChromosome m;
                                    m.l2 = {b, p2, o2, t2};
                                    m.l1 = {a, p1, o1, t1};
                                    g.mappings.push_back(m);
                                    best = std::max(best, evaluate_genome(g, model, p, Objective::Latency).fitness);
                                    ++space;
                                }
                }
        }

    const auto budget = static_cast<count_t>(kMicroBudgetShare * static_cast<double>(space));
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        GaConfig cfg;
        cfg.sample_budget = budget;
        cfg.rng_seed = seed;
        EvalContext ctx{model, p};
        try {
            hits += run_digamma(ctx, cfg).best_report.fitness == best;
        } catch (const NoValidDesign&) {
        }
    }
    return {hits >= kMicroHitsNeeded, std::to_string(hits) + "/5 seeds reach the optimum " + fmt(-best) +
                                          " cycles with " + std::to_string(budget) + " of " + std::to_string(space) +
                                          " distinct designs"};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Outcome cli_determinism(const std::string& cli)
{
    if (cli.empty()) return {false, "no --cli given"};
    const fs::path work = fs::temp_directory_path() / ("mapforge_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(work);
    fs::create_directories(work);
    const std::string model = (fs::path(MAPFORGE_SOURCE_DIR) / "models" / "w3_mixed.json").string();
    auto run = [&](const std::string& tag, int threads) {
        const std::string cmd = "\"" + cli + "\" optimize --model \"" + model +
                                "\" --platform edge --budget 2000 --population 50 --seed 11 --threads " +
                                std::to_string(threads) + " --out \"" + (work / tag).string() + "\" > /dev/null";
        return std::system(cmd.c_str());
    };
    if (run("a", 1) != 0 || run("b", 1) != 0 || run("c", 4) != 0) return {false, "optimize failed"};
    std::string differs;
    for (const char* f : {"report.json", "trace.csv", "genome.json"}) {
        const auto a = slurp(work / "a" / f);
        if (a.empty() || a != slurp(work / "b" / f) || a != slurp(work / "c" / f)) differs += std::string(f) + " ";
    }
    fs::remove_all(work);
    return {differs.empty(), differs.empty() ? "artifacts byte-identical across reruns and thread counts"
                                             : "differs: " + differs};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"mapforge acceptance suite"};
    std::string cli;
    int only = 0;
    app.add_option("--cli", cli, "mapforge executable");
    app.add_option("--only", only, "run a single criterion")->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"analytical model exact on divisible configs", oracle_exact},
        {"analytical model bounds ragged configs", oracle_bound},
        {"latency respects the compute and bandwidth roofline", roofline},
        {"every search result is legal and its trace monotone", legality},
        {"co-optimization beats structure-blind search", versus_search_baselines},
        {"co-optimization vs HW-only template grid", [] { return wins_against({"grid-dla", "grid-shi", "grid-eye"}); }},
        {"co-optimization vs mapping-only fixed HW",
         [] { return wins_against({"fixedhw-buffer", "fixedhw-medium", "fixedhw-compute"}); }},
        {"finds the optimum of an enumerable micro space", micro_optimum},
        {"CLI artifacts are deterministic", [&] { return cli_determinism(cli); }},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only != 0 && static_cast<int>(i) + 1 != only) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("C%zu %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
