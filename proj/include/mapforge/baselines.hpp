// SPDX-License-Identifier: Apache-2.0
#pragma once

// Comparison schemes. All of them spend samples through the same ledger and
// evaluator as the domain-aware GA.
//
// Another black-box optimizer plugs in the same way stdGA does: propose flat
// integer vectors within gene_domains(), map them through unflatten(), score
// them with evaluate_population(), debit a SampleLedger and feed a
// BestTracker.

#include <string>
#include <utility>
#include <vector>

#include "design_space.hpp"
#include "digamma.hpp"
#include "search.hpp"

namespace mapforge {

inline constexpr count_t kDefaultTraceEvery = 100;

inline SearchResult random_search(const EvalContext& ctx, count_t sample_budget, std::uint64_t seed,
                                  count_t trace_every = kDefaultTraceEvery)
{
    if (sample_budget < 1) throw InputError("random search: sample budget must be >= 1");
    if (trace_every < 1) trace_every = kDefaultTraceEvery;
    Rng rng(seed);
    SampleLedger ledger(sample_budget);
    BestTracker tracker;
    count_t chunk_index = 0;
    while (ledger.remaining() > 0) {
        const count_t n = std::min(trace_every, ledger.remaining());
        std::vector<Genome> batch;
        batch.reserve(static_cast<std::size_t>(n));
        for (count_t i = 0; i < n; ++i) batch.push_back(random_genome(ctx.model, ctx.platform, rng));
        auto reports = evaluate_population(batch, ctx);
        ledger.debit(n);
        tracker.offer_all(batch, reports);
        tracker.record(chunk_index++, ledger.used(), reports);
    }
    return std::move(tracker).finish(ledger.used(), "random");
}

/// Structure-blind GA over the flat integer encoding: single-point crossover
/// and independent per-position resampling. Selection and refill policy
/// match run_digamma so only the operators differ.
inline SearchResult std_ga(const EvalContext& ctx, const GaConfig& cfg)
{
    validate_ga_config(cfg);
    const auto& model = ctx.model;
    const auto& platform = ctx.platform;
    const auto domains = gene_domains(model, platform);
    const std::size_t len = domains.size();

    Rng rng(cfg.rng_seed);
    SampleLedger ledger(cfg.sample_budget);
    BestTracker tracker;
    const auto pop_size = static_cast<std::size_t>(cfg.population_size);
    const std::size_t n_elite = elite_count(pop_size, cfg.elite_ratio);

    std::vector<Genome> population;
    for (std::size_t i = 0; i < pop_size; ++i) population.push_back(random_genome(model, platform, rng));

    const count_t generations = cfg.generations();
    for (count_t gen = 0; gen < generations; ++gen) {
        auto reports = evaluate_population(population, ctx);
        ledger.debit(static_cast<count_t>(population.size()));
        tracker.offer_all(population, reports);
        tracker.record(gen, ledger.used(), reports);
        if (gen + 1 == generations) break;

        const auto elites = select_elites(reports, n_elite);
        std::vector<Genome> next;
        for (std::size_t e : elites) next.push_back(population[e]);
        auto pick_elite = [&]() -> const Genome& {
            return population[elites[static_cast<std::size_t>(
                uniform_count(0, static_cast<count_t>(elites.size()) - 1, rng))]];
        };
        while (next.size() < pop_size) {
            auto a = flatten(pick_elite());
            const auto b = flatten(pick_elite());
            if (len > 1 && coin(cfg.crossover_rate, rng)) {
                auto cut = static_cast<std::size_t>(uniform_count(1, static_cast<count_t>(len) - 1, rng));
                std::copy(b.begin() + static_cast<std::ptrdiff_t>(cut), b.end(),
                          a.begin() + static_cast<std::ptrdiff_t>(cut));
            }
            for (std::size_t i = 0; i < len; ++i)
                if (coin(cfg.gene_rate, rng)) a[i] = sample_gene(domains[i], rng);
            next.push_back(unflatten(a, model, platform));
        }
        population = std::move(next);
    }
    return std::move(tracker).finish(ledger.used(), "stdga");
}

/// Default grid: power-of-two pairs whose product fits max_pes.
inline std::vector<std::pair<count_t, count_t>> default_pe_grid(const Platform& platform)
{
    std::vector<std::pair<count_t, count_t>> grid;
    for (count_t rows : platform.allowed_pi())
        for (count_t cols : platform.allowed_pi())
            if (rows * cols <= platform.max_pes) grid.emplace_back(rows, cols);
    return grid;
}

inline std::vector<std::pair<count_t, count_t>> cross_grid(const std::vector<count_t>& rows,
                                                          const std::vector<count_t>& cols)
{
    std::vector<std::pair<count_t, count_t>> grid;
    for (count_t r : rows)
        for (count_t c : cols) grid.emplace_back(r, c);
    return grid;
}

/// HW-only search: every (pi_l1, pi_l2) grid point with the template mapping
/// on every layer. Buffer sizes follow from the template tiles.
inline SearchResult grid_search_hw(const EvalContext& ctx, TemplateKind kind,
                                   const std::vector<std::pair<count_t, count_t>>& grid, count_t sample_budget,
                                   count_t trace_every = kDefaultTraceEvery)
{
    if (grid.empty()) throw InputError("grid search: empty grid");
    if (static_cast<count_t>(grid.size()) > sample_budget)
        throw InputError("grid search: " + std::to_string(grid.size()) + " grid points exceed the sample budget " +
                         std::to_string(sample_budget));
    for (const auto& [rows, cols] : grid)
        if (rows < 1 || cols < 1 || rows * cols > ctx.platform.max_pes)
            throw InputError("grid search: point " + std::to_string(rows) + "x" + std::to_string(cols) +
                             " outside [1, max_pes]");
    if (trace_every < 1) trace_every = kDefaultTraceEvery;

    std::vector<Genome> points;
    points.reserve(grid.size());
    for (const auto& [rows, cols] : grid)
        points.push_back(repair(template_genome(kind, ctx.model, rows, cols), ctx.model, ctx.platform));

    SampleLedger ledger(sample_budget);
    BestTracker tracker;
    count_t chunk_index = 0;
    for (std::size_t start = 0; start < points.size(); start += static_cast<std::size_t>(trace_every)) {
        const std::size_t end = std::min(points.size(), start + static_cast<std::size_t>(trace_every));
        std::vector<Genome> batch(points.begin() + static_cast<std::ptrdiff_t>(start),
                                  points.begin() + static_cast<std::ptrdiff_t>(end));
        auto reports = evaluate_population(batch, ctx);
        ledger.debit(static_cast<count_t>(batch.size()));
        tracker.offer_all(batch, reports);
        tracker.record(chunk_index++, ledger.used(), reports);
    }
    return std::move(tracker).finish(ledger.used(), "grid-" + std::string(template_name(kind)));
}

inline SearchResult grid_search_hw(const EvalContext& ctx, TemplateKind kind, count_t sample_budget)
{
    return grid_search_hw(ctx, kind, default_pe_grid(ctx.platform), sample_budget);
}

// ---------------------------------------------------------------------------
// Mapping-only search on hand-picked PE arrays

enum class HwPreset { BufferFocused, Medium, ComputeFocused };

inline std::string_view preset_name(HwPreset p)
{
    switch (p) {
    case HwPreset::BufferFocused: return "buffer";
    case HwPreset::Medium: return "medium";
    case HwPreset::ComputeFocused: return "compute";
    }
    return "?";
}

inline HwPreset parse_preset(std::string_view s)
{
    if (s == "buffer") return HwPreset::BufferFocused;
    if (s == "medium") return HwPreset::Medium;
    if (s == "compute") return HwPreset::ComputeFocused;
    throw InputError("unknown HW preset '" + std::string(s) + "' (expected buffer, medium or compute)");
}

/// Placeholder arrays: the edge values are small/medium/large square arrays,
/// cloud scales each side by 4. A platform counts as cloud-class above 1 mm^2.
inline std::pair<count_t, count_t> preset_array(HwPreset p, const Platform& platform)
{
    count_t side = 8;
    switch (p) {
    case HwPreset::BufferFocused: side = 8; break;
    case HwPreset::Medium: side = 16; break;
    case HwPreset::ComputeFocused: side = 32; break;
    }
    if (platform.area_budget > 1.0) side *= 4;
    return {side, side};
}

inline SearchResult mapping_opt_fixed_hw(const EvalContext& ctx, std::pair<count_t, count_t> array,
                                         const GaConfig& cfg)
{
    return run_digamma(ctx, cfg, Constraint::fixed_hw(array.first, array.second));
}

} // namespace mapforge
