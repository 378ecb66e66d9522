// SPDX-License-Identifier: Apache-2.0
#pragma once

// Scheme selection, single runs with their output artifacts, and the
// scheme-by-model-by-seed comparison table.

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "baselines.hpp"
#include "digamma.hpp"
#include "report.hpp"

namespace mapforge {

struct Scheme {
    enum class Kind { Digamma, StdGa, Random, Grid, FixedHw };

    Kind kind = Kind::Digamma;
    TemplateKind mapping = TemplateKind::Dla;  // Grid
    HwPreset preset = HwPreset::ComputeFocused; // FixedHw

    std::string name() const
    {
        switch (kind) {
        case Kind::Digamma: return "digamma";
        case Kind::StdGa: return "stdga";
        case Kind::Random: return "random";
        case Kind::Grid: return "grid-" + std::string(template_name(mapping));
        case Kind::FixedHw: return "fixedhw-" + std::string(preset_name(preset));
        }
        return "?";
    }
};

/// Accepts digamma, stdga, random, grid-<dla|shi|eye>, fixedhw-<buffer|medium|compute>;
/// "grid(dla)" and "fixedhw(compute)" spellings are also accepted.
inline Scheme parse_scheme(std::string s)
{
    std::replace(s.begin(), s.end(), '(', '-');
    std::replace(s.begin(), s.end(), ':', '-');
    s.erase(std::remove(s.begin(), s.end(), ')'), s.end());
    Scheme out;
    if (s == "digamma") out.kind = Scheme::Kind::Digamma;
    else if (s == "stdga") out.kind = Scheme::Kind::StdGa;
    else if (s == "random") out.kind = Scheme::Kind::Random;
    else if (s.rfind("grid-", 0) == 0) {
        out.kind = Scheme::Kind::Grid;
        out.mapping = parse_template(s.substr(5));
    } else if (s.rfind("fixedhw-", 0) == 0) {
        out.kind = Scheme::Kind::FixedHw;
        out.preset = parse_preset(s.substr(8));
    } else {
        throw InputError("unknown scheme '" + s + "'");
    }
    return out;
}

struct RunOptions {
    Scheme scheme;
    Objective objective = Objective::Latency;
    count_t budget = 40000;
    count_t population = 100;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    Constraint constraint;       // digamma only
    GaConfig ga;                 // rates and elite ratio; budget/population/seed overwritten
};

inline GaConfig effective_ga_config(const RunOptions& o)
{
    GaConfig c = o.ga;
    c.population_size = o.population;
    c.sample_budget = o.budget;
    c.rng_seed = o.seed;
    return c;
}

inline SearchResult run_scheme(const Model& model, const Platform& platform, const RunOptions& o)
{
    EvalContext ctx{model, platform, o.objective, o.threads};
    switch (o.scheme.kind) {
    case Scheme::Kind::Digamma: return run_digamma(ctx, effective_ga_config(o), o.constraint);
    case Scheme::Kind::StdGa: return std_ga(ctx, effective_ga_config(o));
    case Scheme::Kind::Random: return random_search(ctx, o.budget, o.seed, o.population);
    case Scheme::Kind::Grid:
        return grid_search_hw(ctx, o.scheme.mapping, default_pe_grid(platform), o.budget, o.population);
    case Scheme::Kind::FixedHw:
        return mapping_opt_fixed_hw(ctx, preset_array(o.scheme.preset, platform), effective_ga_config(o));
    }
    throw std::logic_error("unhandled scheme");
}

struct OptimizeArtifacts {
    std::string report_json;
    std::string trace_csv;
    std::string genome_json;
};

inline ordered_json run_header(const Model& model, const RunOptions& o, const SearchResult& r)
{
    ordered_json h{{"scheme", o.scheme.name()},
                   {"model", model.name},
                   {"objective", std::string(objective_name(o.objective))},
                   {"seed", o.seed},
                   {"sample_budget", o.budget},
                   {"population_size", o.population},
                   {"samples_used", r.samples_used},
                   {"trace_rows", r.trace.size()}};
    if (o.scheme.kind == Scheme::Kind::Grid) h["template"] = std::string(template_name(o.scheme.mapping));
    if (o.scheme.kind == Scheme::Kind::FixedHw) h["preset"] = std::string(preset_name(o.scheme.preset));
    if (o.scheme.kind == Scheme::Kind::Digamma) {
        switch (o.constraint.kind) {
        case Constraint::Kind::None: h["constraint"] = "none"; break;
        case Constraint::Kind::FixedHw:
            h["constraint"] = "fixed_hw";
            h["fixed_hw"] = {o.constraint.pe_rows, o.constraint.pe_cols};
            break;
        case Constraint::Kind::FixedMapping:
            h["constraint"] = "fixed_mapping";
            h["template"] = std::string(template_name(o.constraint.mapping));
            break;
        }
    }
    return h;
}

inline OptimizeArtifacts make_artifacts(const Model& model, const Platform& platform, const RunOptions& o,
                                        const SearchResult& r)
{
    OptimizeArtifacts a;
    ordered_json report{{"run", run_header(model, o, r)},
                        {"design", design_report(r.best_genome, model, platform, o.objective)}};
    a.report_json = report.dump(2) + "\n";
    a.trace_csv = trace_csv(r.trace);
    a.genome_json = genome_to_json(r.best_genome, model).dump(2) + "\n";
    return a;
}

// ---------------------------------------------------------------------------
// Comparison table

struct CompareCell {
    std::string scheme;
    std::string model;
    std::uint64_t seed = 0;
    std::optional<count_t> cycles;  // empty: no valid design
    double area_mm2 = 0;
};

struct SchemeSummary {
    std::string scheme;
    std::vector<std::optional<double>> median_per_model;  // over seeds, N/A cells skipped
    std::optional<double> geomean;                         // over all valid cells
    std::optional<double> ratio_to_baseline;               // geomean / baseline geomean
    count_t missing = 0;
};

struct CompareTable {
    std::vector<std::string> schemes;
    std::vector<std::string> models;
    std::vector<std::uint64_t> seeds;
    std::string baseline;
    std::vector<CompareCell> cells;  // scheme-major, then model, then seed
    std::vector<SchemeSummary> summaries;
};

inline std::optional<double> median_of(std::vector<double> v)
{
    if (v.empty()) return std::nullopt;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline std::optional<double> geomean_of(const std::vector<double>& v)
{
    if (v.empty()) return std::nullopt;
    double acc = 0;
    for (double x : v) acc += std::log(x);
    return std::exp(acc / static_cast<double>(v.size()));
}

/// Runs every (scheme, model, seed) cell under one shared budget. Cells with
/// no valid design become N/A and the run continues.
inline CompareTable run_compare(const std::vector<Model>& models, const Platform& platform,
                                const std::vector<Scheme>& schemes, const std::vector<std::uint64_t>& seeds,
                                const RunOptions& base, std::size_t baseline_index = 0)
{
    if (schemes.size() < 2) throw InputError("compare: needs at least two schemes");
    if (models.empty()) throw InputError("compare: needs at least one model");
    if (seeds.empty()) throw InputError("compare: needs at least one seed");
    if (baseline_index >= schemes.size()) throw InputError("compare: baseline index out of range");

    CompareTable t;
    for (const auto& s : schemes) t.schemes.push_back(s.name());
    for (const auto& m : models) t.models.push_back(m.name);
    t.seeds = seeds;
    t.baseline = t.schemes[baseline_index];

    for (const auto& scheme : schemes) {
        for (const auto& model : models) {
            for (auto seed : seeds) {
                RunOptions o = base;
                o.scheme = scheme;
                o.seed = seed;
                CompareCell cell{scheme.name(), model.name, seed, std::nullopt, 0};
                try {
                    auto r = run_scheme(model, platform, o);
                    cell.cycles = r.best_report.cycles;
                    cell.area_mm2 = r.best_report.area_mm2;
                } catch (const NoValidDesign&) {
                }
                t.cells.push_back(cell);
            }
        }
    }

    for (const auto& name : t.schemes) {
        SchemeSummary s;
        s.scheme = name;
        std::vector<double> all;
        for (const auto& model : t.models) {
            std::vector<double> per_model;
            for (const auto& c : t.cells) {
                if (c.scheme != name || c.model != model) continue;
                if (c.cycles) per_model.push_back(static_cast<double>(*c.cycles));
                else ++s.missing;
            }
            all.insert(all.end(), per_model.begin(), per_model.end());
            s.median_per_model.push_back(median_of(per_model));
        }
        s.geomean = geomean_of(all);
        t.summaries.push_back(std::move(s));
    }
    const auto& base_geo = t.summaries[baseline_index].geomean;
    for (auto& s : t.summaries)
        if (s.geomean && base_geo) s.ratio_to_baseline = *s.geomean / *base_geo;
    return t;
}

inline std::string na_or(const std::optional<double>& v)
{
    if (!v) return "N/A";
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(*v >= 100 ? 0 : 3);
    os << *v;
    return os.str();
}

/// Plain-text table: one row per cell, then the per-scheme summary.
inline std::string render_compare_text(const CompareTable& t)
{
    std::ostringstream os;
    os << "scheme,model,seed,cycles,area_mm2\n";
    for (const auto& c : t.cells) {
        os << c.scheme << ',' << c.model << ',' << c.seed << ','
           << (c.cycles ? std::to_string(*c.cycles) : std::string("N/A")) << ','
           << (c.cycles ? format_double(c.area_mm2) : std::string("N/A")) << '\n';
    }
    os << "\nscheme";
    for (const auto& m : t.models) os << ",median[" << m << "]";
    os << ",geomean,ratio_to_" << t.baseline << ",na_cells\n";
    for (const auto& s : t.summaries) {
        os << s.scheme;
        for (const auto& med : s.median_per_model) os << ',' << na_or(med);
        os << ',' << na_or(s.geomean) << ',' << na_or(s.ratio_to_baseline) << ',' << s.missing << '\n';
    }
    return os.str();
}

} // namespace mapforge
