// SPDX-License-Identifier: Apache-2.0
#pragma once

// Domain-aware genetic search over HW genes (the PE array) and per-layer
// mapping genes (tiles, loop order, parallel dim). Mapping operators act on
// one knob at a time; the PE operator reshapes or resizes the array; buffers
// are never searched directly, they follow from decode.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "costmodel.hpp"
#include "design_space.hpp"
#include "search.hpp"

namespace mapforge {

struct GaConfig {
    count_t population_size = 100;
    count_t sample_budget = 40000;
    double elite_ratio = 0.05;
    double crossover_rate = 0.7;
    double tile_rate = 0.20;
    double order_rate = 0.10;
    double parallel_rate = 0.10;
    double pe_rate = 0.30;
    double gene_rate = 0.10;  // stdGA per-position resample rate
    std::uint64_t rng_seed = 0;

    count_t generations() const { return population_size > 0 ? sample_budget / population_size : 0; }
};

inline void validate_ga_config(const GaConfig& c)
{
    auto rate = [](const char* name, double v) {
        if (!(v >= 0.0 && v <= 1.0)) throw InputError(std::string("ga config: '") + name + "' must be in [0, 1]");
    };
    if (!(c.elite_ratio > 0.0 && c.elite_ratio < 1.0)) throw InputError("ga config: 'elite_ratio' must be in (0, 1)");
    rate("crossover_rate", c.crossover_rate);
    rate("tile_rate", c.tile_rate);
    rate("order_rate", c.order_rate);
    rate("parallel_rate", c.parallel_rate);
    rate("pe_rate", c.pe_rate);
    rate("gene_rate", c.gene_rate);
    if (c.population_size < 2) throw InputError("ga config: 'population_size' must be >= 2");
    if (c.population_size > c.sample_budget)
        throw InputError("ga config: 'population_size' must not exceed 'sample_budget'");
}

/// All fields optional; unknown fields are rejected.
inline GaConfig parse_ga_config(const std::string& text, const std::string& where = "ga config")
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(where + ": parse error: " + e.what());
    }
    if (!doc.is_object()) throw InputError(where + ": top level must be an object");
    GaConfig c;
    for (const auto& [key, v] : doc.items()) {
        auto integer = [&] {
            if (!v.is_number_integer()) throw InputError(where + ": '" + key + "' must be an integer");
            return v.get<count_t>();
        };
        auto real = [&] {
            if (!v.is_number()) throw InputError(where + ": '" + key + "' must be a number");
            return v.get<double>();
        };
        if (key == "population_size") c.population_size = integer();
        else if (key == "sample_budget") c.sample_budget = integer();
        else if (key == "elite_ratio") c.elite_ratio = real();
        else if (key == "crossover_rate") c.crossover_rate = real();
        else if (key == "tile_rate") c.tile_rate = real();
        else if (key == "order_rate") c.order_rate = real();
        else if (key == "parallel_rate") c.parallel_rate = real();
        else if (key == "pe_rate") c.pe_rate = real();
        else if (key == "gene_rate") c.gene_rate = real();
        else if (key == "rng_seed") c.rng_seed = static_cast<std::uint64_t>(integer());
        else throw InputError(where + ": unknown field '" + key + "'");
    }
    validate_ga_config(c);
    return c;
}

inline GaConfig load_ga_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path.string() + ": cannot open GA config");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_ga_config(buf.str(), path.string());
}

/// Optional restriction of the design space.
struct Constraint {
    enum class Kind { None, FixedHw, FixedMapping };

    Kind kind = Kind::None;
    count_t pe_rows = 1;  // pi_l1
    count_t pe_cols = 1;  // pi_l2
    TemplateKind mapping = TemplateKind::Dla;

    static Constraint none() { return {}; }
    static Constraint fixed_hw(count_t rows, count_t cols) { return {Kind::FixedHw, rows, cols, TemplateKind::Dla}; }
    static Constraint fixed_mapping(TemplateKind k) { return {Kind::FixedMapping, 1, 1, k}; }
};

// ---------------------------------------------------------------------------
// Operators

inline bool coin(double p, Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

/// Whole chromosomes per layer from either parent; the pi pair travels
/// together from one parent.
inline Genome crossover(const Genome& a, const Genome& b, Rng& rng, const Model& model, const Platform& platform)
{
    Genome child = a;
    if (coin(0.5, rng)) {
        child.pi_l1 = b.pi_l1;
        child.pi_l2 = b.pi_l2;
    }
    for (std::size_t i = 0; i < child.mappings.size() && i < b.mappings.size(); ++i)
        if (coin(0.5, rng)) child.mappings[i] = b.mappings[i];
    return repair(std::move(child), model, platform);
}

inline Genome mutate_tile(Genome g, double rate, Rng& rng, const Model& model, const Platform& platform)
{
    for (std::size_t i = 0; i < g.mappings.size(); ++i) {
        auto& m = g.mappings[i];
        if (coin(rate, rng)) {
            Dim d = random_dim(rng);
            m.l2.tiles[d] = uniform_count(1, model.layers[i].extent(d), rng);
        }
        if (coin(rate, rng)) {
            Dim d = random_dim(rng);
            m.l1.tiles[d] = uniform_count(1, std::min(m.l2.tiles[d], model.layers[i].extent(d)), rng);
        }
    }
    return repair(std::move(g), model, platform);
}

inline Genome mutate_order(Genome g, double rate, Rng& rng)
{
    for (auto& m : g.mappings) {
        for (LevelGene* level : {&m.l2, &m.l1}) {
            if (!coin(rate, rng)) continue;
            auto i = static_cast<std::size_t>(uniform_count(0, kNumDims - 1, rng));
            auto j = static_cast<std::size_t>(uniform_count(0, kNumDims - 2, rng));
            if (j >= i) ++j;
            std::swap(level->order[i], level->order[j]);
        }
    }
    return g;
}

inline Genome mutate_parallel(Genome g, double rate, Rng& rng)
{
    for (auto& m : g.mappings)
        for (LevelGene* level : {&m.l2, &m.l1})
            if (coin(rate, rng)) level->parallel_dim = random_dim(rng);
    return g;
}

/// Doubles or halves one side of the PE array, or redraws both sides.
inline Genome mutate_pe(Genome g, double rate, Rng& rng, const Model& model, const Platform& platform)
{
    if (!coin(rate, rng)) return g;
    switch (uniform_count(0, 4, rng)) {
    case 0: g.pi_l1 *= 2; break;
    case 1: g.pi_l1 = std::max<count_t>(1, g.pi_l1 / 2); break;
    case 2: g.pi_l2 *= 2; break;
    case 3: g.pi_l2 = std::max<count_t>(1, g.pi_l2 / 2); break;
    default: {
        const auto allowed = platform.allowed_pi();
        g.pi_l1 = pick(allowed, rng);
        g.pi_l2 = pick(allowed, rng);
    }
    }
    return repair(std::move(g), model, platform);
}

namespace detail {

inline void validate_constraint(const Constraint& c, const Platform& platform)
{
    if (c.kind != Constraint::Kind::FixedHw) return;
    if (c.pe_rows < 1 || c.pe_cols < 1) throw InputError("fixed HW: PE array sides must be >= 1");
    if (c.pe_rows * c.pe_cols > platform.max_pes)
        throw InputError("fixed HW: " + std::to_string(c.pe_rows) + "x" + std::to_string(c.pe_cols) +
                         " exceeds max_pes " + std::to_string(platform.max_pes));
}

/// Forces a genome back into the constrained sub-space.
inline Genome constrain(Genome g, const Constraint& c, const Model& model, const Platform& platform)
{
    switch (c.kind) {
    case Constraint::Kind::None: return g;
    case Constraint::Kind::FixedHw:
        g.pi_l1 = c.pe_rows;
        g.pi_l2 = c.pe_cols;
        for (auto& m : g.mappings) {
            m.l1.pi = c.pe_rows;
            m.l2.pi = c.pe_cols;
        }
        return g;
    case Constraint::Kind::FixedMapping:
        return repair(template_genome(c.mapping, model, g.pi_l1, g.pi_l2), model, platform);
    }
    return g;
}

} // namespace detail

/// Children identical to a parent are re-mutated up to this many times.
inline constexpr int kMaxMutationRedraws = 8;

/// Generational loop: evaluate the population, keep the elites unchanged,
/// refill the rest by crossover of two random elites followed by every
/// mutation operator. Every evaluation debits the budget.
inline SearchResult run_digamma(const EvalContext& ctx, const GaConfig& cfg, const Constraint& constraint = {})
{
    validate_ga_config(cfg);
    detail::validate_constraint(constraint, ctx.platform);
    const auto& model = ctx.model;
    const auto& platform = ctx.platform;
    const bool mapping_free = constraint.kind != Constraint::Kind::FixedMapping;
    const bool hw_free = constraint.kind != Constraint::Kind::FixedHw;

    Rng rng(cfg.rng_seed);
    SampleLedger ledger(cfg.sample_budget);
    BestTracker tracker;
    const auto pop_size = static_cast<std::size_t>(cfg.population_size);
    const std::size_t n_elite = elite_count(pop_size, cfg.elite_ratio);

    std::vector<Genome> population;
    population.reserve(pop_size);
    for (std::size_t i = 0; i < pop_size; ++i)
        population.push_back(detail::constrain(random_genome(model, platform, rng), constraint, model, platform));

    const count_t generations = cfg.generations();
    for (count_t gen = 0; gen < generations; ++gen) {
        auto reports = evaluate_population(population, ctx);
        ledger.debit(static_cast<count_t>(population.size()));
        tracker.offer_all(population, reports);
        tracker.record(gen, ledger.used(), reports);
        if (gen + 1 == generations) break;

        const auto elites = select_elites(reports, n_elite);
        std::vector<Genome> next;
        next.reserve(pop_size);
        for (std::size_t e : elites) next.push_back(population[e]);
        while (next.size() < pop_size) {
            const Genome& a = population[elites[static_cast<std::size_t>(uniform_count(0, static_cast<count_t>(elites.size()) - 1, rng))]];
            const Genome& b = population[elites[static_cast<std::size_t>(uniform_count(0, static_cast<count_t>(elites.size()) - 1, rng))]];
            const Genome base = coin(cfg.crossover_rate, rng) ? crossover(a, b, rng, model, platform) : a;
            Genome child = base;
            for (int attempt = 0; attempt < kMaxMutationRedraws; ++attempt) {
                child = base;
                if (mapping_free) {
                    child = mutate_tile(std::move(child), cfg.tile_rate, rng, model, platform);
                    child = mutate_order(std::move(child), cfg.order_rate, rng);
                    child = mutate_parallel(std::move(child), cfg.parallel_rate, rng);
                }
                if (hw_free) child = mutate_pe(std::move(child), cfg.pe_rate, rng, model, platform);
                child = detail::constrain(std::move(child), constraint, model, platform);
                if (!(child == a) && !(child == b)) break;
            }
            next.push_back(std::move(child));
        }
        population = std::move(next);
    }
    return std::move(tracker).finish(ledger.used(), "digamma");
}

} // namespace mapforge
