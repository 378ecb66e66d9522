// SPDX-License-Identifier: Apache-2.0
// mapforge: optimize / compare / inspect.
//
// Exit codes: 0 ok, 2 bad input, 3 no valid design, 4 internal error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <mapforge/mapforge.hpp>

namespace fs = std::filesystem;
using namespace mapforge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNoValid = 3;
constexpr int kExitInternal = 4;

struct CommonArgs {
    std::string platform = "edge";
    std::string objective = "latency";
    count_t budget = 40000;
    count_t population = 100;
    unsigned threads = 0;
    std::string ga_config;
};

unsigned resolve_threads(unsigned flag)
{
    if (flag > 0) return flag;
    if (const char* env = std::getenv("MAPFORGE_THREADS")) {
        try {
            long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
        throw InputError(std::string("MAPFORGE_THREADS: expected a positive integer, got '") + env + "'");
    }
    return 1;
}

RunOptions base_options(const CommonArgs& a)
{
    RunOptions o;
    o.objective = parse_objective(a.objective);
    o.budget = a.budget;
    o.population = a.population;
    o.threads = resolve_threads(a.threads);
    if (!a.ga_config.empty()) o.ga = load_ga_config(a.ga_config);
    if (o.budget < 1) throw InputError("--budget must be >= 1");
    if (o.population < 2) throw InputError("--population must be >= 2");
    return o;
}

void add_common(CLI::App* cmd, CommonArgs& a)
{
    cmd->add_option("--platform", a.platform, "edge, cloud, or a platform TOML file")->capture_default_str();
    cmd->add_option("--objective", a.objective, "latency, energy or edp")->capture_default_str();
    cmd->add_option("--budget", a.budget, "sample budget")->capture_default_str();
    cmd->add_option("--population", a.population, "population / trace chunk size")->capture_default_str();
    cmd->add_option("--threads", a.threads, "evaluation threads (env MAPFORGE_THREADS)");
    cmd->add_option("--ga-config", a.ga_config, "GA rates / elite ratio JSON");
}

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError(path.string() + ": cannot write");
    out << text;
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::pair<count_t, count_t> parse_fix_hw(const std::string& s)
{
    auto parts = split_list(s);
    if (parts.size() != 2) throw InputError("--fix-hw: expected \"ROWS,COLS\", got '" + s + "'");
    try {
        std::size_t p0 = 0, p1 = 0;
        count_t r = std::stoll(parts[0], &p0);
        count_t c = std::stoll(parts[1], &p1);
        if (p0 != parts[0].size() || p1 != parts[1].size()) throw std::invalid_argument("trailing");
        return {r, c};
    } catch (const std::exception&) {
        throw InputError("--fix-hw: expected two integers, got '" + s + "'");
    }
}

// ---------------------------------------------------------------------------

struct OptimizeArgs {
    CommonArgs common;
    std::string model;
    std::string scheme = "digamma";
    std::uint64_t seed = 0;
    std::string out = "mapforge_out";
    std::string fix_hw;
    std::string fix_mapping;
};

int cmd_optimize(const OptimizeArgs& a)
{
    const Model model = load_model(a.model);
    const Platform platform = load_platform(a.common.platform);
    RunOptions o = base_options(a.common);
    o.scheme = parse_scheme(a.scheme);
    o.seed = a.seed;
    if (!a.fix_hw.empty() && !a.fix_mapping.empty()) throw InputError("--fix-hw and --fix-mapping are exclusive");
    if ((!a.fix_hw.empty() || !a.fix_mapping.empty()) && o.scheme.kind != Scheme::Kind::Digamma)
        throw InputError("--fix-hw / --fix-mapping apply to --scheme digamma only");
    if (!a.fix_hw.empty()) {
        auto [rows, cols] = parse_fix_hw(a.fix_hw);
        o.constraint = Constraint::fixed_hw(rows, cols);
    }
    if (!a.fix_mapping.empty()) o.constraint = Constraint::fixed_mapping(parse_template(a.fix_mapping));

    int status = kExitOk;
    SearchResult result;
    try {
        result = run_scheme(model, platform, o);
    } catch (NoValidDesign& e) {
        std::cerr << "mapforge: " << e.what() << "\n";
        result = std::move(e.best);
        status = kExitNoValid;
    }

    const fs::path dir(a.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError(dir.string() + ": cannot create output directory");
    const auto art = make_artifacts(model, platform, o, result);
    write_file(dir / "report.json", art.report_json);
    write_file(dir / "trace.csv", art.trace_csv);
    write_file(dir / "genome.json", art.genome_json);

    std::cout << o.scheme.name() << " on " << model.name << ": cycles " << result.best_report.cycles << ", area "
              << format_double(result.best_report.area_mm2) << " mm^2"
              << (result.best_report.valid ? "" : " (over budget)") << ", samples " << result.samples_used << "\n"
              << "wrote " << (dir / "report.json").string() << ", trace.csv, genome.json\n";
    return status;
}

// ---------------------------------------------------------------------------

struct CompareArgs {
    CommonArgs common;
    std::string models;
    std::string schemes = "digamma,stdga,random";
    std::string seeds = "1,2,3,4,5";
    std::string baseline;
    std::string out;
};

int cmd_compare(const CompareArgs& a)
{
    std::vector<Model> models;
    for (const auto& path : split_list(a.models)) models.push_back(load_model(path));
    const Platform platform = load_platform(a.common.platform);
    std::vector<Scheme> schemes;
    for (const auto& s : split_list(a.schemes)) schemes.push_back(parse_scheme(s));
    std::vector<std::uint64_t> seeds;
    for (const auto& s : split_list(a.seeds)) {
        try {
            std::size_t pos = 0;
            seeds.push_back(std::stoull(s, &pos));
            if (pos != s.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw InputError("--seeds: bad seed '" + s + "'");
        }
    }
    std::size_t baseline = 0;
    if (!a.baseline.empty()) {
        const std::string want = parse_scheme(a.baseline).name();
        auto it = std::find_if(schemes.begin(), schemes.end(), [&](const Scheme& s) { return s.name() == want; });
        if (it == schemes.end()) throw InputError("--baseline '" + want + "' is not in --schemes");
        baseline = static_cast<std::size_t>(it - schemes.begin());
    }

    const auto table = run_compare(models, platform, schemes, seeds, base_options(a.common), baseline);
    const std::string text = render_compare_text(table);
    std::cout << text;
    if (!a.out.empty()) write_file(a.out, text);
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct InspectArgs {
    std::string model;
    std::string genome;
    std::string platform = "edge";
    std::string objective = "latency";
    bool json = false;
};

void print_level(std::ostream& os, const char* name, const LevelGene& g)
{
    os << "    " << name << ": pi " << g.pi << ", parallel " << dim_letter(g.parallel_dim) << ", order "
       << order_string(g.order) << ", tiles";
    for (Dim d : kAllDims) os << ' ' << dim_letter(d) << '=' << g.tiles[d];
    os << '\n';
}

int cmd_inspect(const InspectArgs& a)
{
    const Model model = load_model(a.model);
    const Platform platform = load_platform(a.platform);
    const Objective objective = parse_objective(a.objective);
    const Genome g = load_genome(a.genome, model);
    if (auto errs = validate_genome(g, model, platform); !errs.empty()) {
        std::string msg = a.genome + ": invalid genome";
        for (const auto& e : errs) msg += "\n  " + e;
        throw InputError(msg);
    }
    const auto report = design_report(g, model, platform, objective);
    if (a.json) {
        std::cout << report.dump(2) << "\n";
        return kExitOk;
    }

    const auto design = decode(g, model);
    const auto cost = evaluate(design, model, platform, objective);
    std::ostream& os = std::cout;
    os << "model " << model.name << "\n"
       << "PE array " << design.pe_rows << " x " << design.pe_cols << " (" << design.num_pes << " PEs)\n"
       << "buffers: L1 " << design.l1_words_per_pe << " words/PE, L2 " << design.l2_words << " words\n";
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        const auto& m = g.mappings[i];
        const auto& c = cost.layers[i];
        os << "layer " << model.layers[i].name << "  parallelism " << parallelism_label(m) << "\n";
        print_level(os, "L2", m.l2);
        print_level(os, "L1", m.l1);
        os << "    buffer L1/PE W=" << c.buffer.l1.weight << " I=" << c.buffer.l1.input << " O=" << c.buffer.l1.output
           << "  L2 W=" << c.buffer.l2.weight << " I=" << c.buffer.l2.input << " O=" << c.buffer.l2.output << "\n"
           << "    cycles " << c.cycles << " (compute " << c.compute_cycles << "), dram words " << c.dram.total()
           << ", l2 words " << c.l2.total() << "\n";
    }
    os << "total cycles " << cost.cycles << ", energy " << format_double(cost.energy_pj) << " pJ, area "
       << format_double(cost.area_mm2) << " / " << format_double(platform.area_budget) << " mm^2"
       << (cost.valid ? "" : " OVER BUDGET") << ", latency-area " << format_double(cost.latency_area_product())
       << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Joint accelerator / mapping search over a DNN model"};
    app.require_subcommand(1);

    OptimizeArgs opt;
    auto* optimize = app.add_subcommand("optimize", "search one scheme, write report.json, trace.csv, genome.json");
    optimize->add_option("--model", opt.model, "model JSON")->required();
    optimize->add_option("--scheme", opt.scheme, "digamma, stdga, random, grid-<dla|shi|eye>, fixedhw-<preset>")
        ->capture_default_str();
    optimize->add_option("--seed", opt.seed)->capture_default_str();
    optimize->add_option("--out", opt.out, "output directory")->capture_default_str();
    optimize->add_option("--fix-hw", opt.fix_hw, "fix the PE array, \"ROWS,COLS\"");
    optimize->add_option("--fix-mapping", opt.fix_mapping, "fix every layer to a template: dla, shi, eye");
    add_common(optimize, opt.common);

    CompareArgs cmp;
    auto* compare = app.add_subcommand("compare", "run every (scheme, model, seed) cell and tabulate");
    compare->add_option("--models", cmp.models, "comma-separated model JSON files")->required();
    compare->add_option("--schemes", cmp.schemes)->capture_default_str();
    compare->add_option("--seeds", cmp.seeds)->capture_default_str();
    compare->add_option("--baseline", cmp.baseline, "scheme to normalize by (default: first)");
    compare->add_option("--out", cmp.out, "also write the table to this file");
    cmp.common.budget = 2000;
    cmp.common.population = 50;
    add_common(compare, cmp.common);

    InspectArgs ins;
    auto* inspect = app.add_subcommand("inspect", "decode a genome checkpoint and print its cost breakdown");
    inspect->add_option("genome", ins.genome, "genome.json")->required();
    inspect->add_option("--model", ins.model, "model JSON")->required();
    inspect->add_option("--platform", ins.platform)->capture_default_str();
    inspect->add_option("--objective", ins.objective)->capture_default_str();
    inspect->add_flag("--json", ins.json, "print the design report JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInput;
    }

    try {
        if (optimize->parsed()) return cmd_optimize(opt);
        if (compare->parsed()) return cmd_compare(cmp);
        if (inspect->parsed()) return cmd_inspect(ins);
    } catch (const InputError& e) {
        std::cerr << "mapforge: " << e.what() << "\n";
        return kExitInput;
    } catch (const OracleCapExceeded& e) {
        std::cerr << "mapforge: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "mapforge: internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
