// SPDX-License-Identifier: Apache-2.0
#pragma once

// Pieces shared by every optimizer: the evaluation context, sample ledger,
// best-so-far tracking, truncation selection and the search trace.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "costmodel.hpp"
#include "design_space.hpp"
#include "parallel.hpp"

namespace mapforge {

struct EvalContext {
    const Model& model;
    const Platform& platform;
    Objective objective = Objective::Latency;
    unsigned threads = 1;
    // Called once per evaluated sample, in population order.
    std::function<void(const Genome&, const CostReport&)> on_sample = {};
};

struct TracePoint {
    count_t generation = 0;
    count_t samples_used = 0;
    double best_fitness = 0;
    double median_fitness = 0;
    double best_area_mm2 = 0;
};

struct SearchResult {
    Genome best_genome;
    CostReport best_report;
    std::vector<TracePoint> trace;
    count_t samples_used = 0;
};

/// Raised when a search spends its budget without sampling a design that
/// fits the area budget. Carries the least-overshooting design seen.
class NoValidDesign : public std::runtime_error {
public:
    NoValidDesign(const std::string& what, SearchResult best_invalid)
        : std::runtime_error(what)
        , best(std::move(best_invalid))
    {
    }

    SearchResult best;
};

/// Counts evaluations against the sampling budget; one evaluation is one
/// sample whether or not the design is valid.
class SampleLedger {
public:
    explicit SampleLedger(count_t budget)
        : budget_(budget)
    {
    }

    void debit(count_t samples)
    {
        if (used_ + samples > budget_)
            throw std::logic_error("sample budget exceeded: " + std::to_string(used_ + samples) + " > " +
                                   std::to_string(budget_));
        used_ += samples;
    }

    count_t used() const { return used_; }
    count_t budget() const { return budget_; }
    count_t remaining() const { return budget_ - used_; }

private:
    count_t budget_;
    count_t used_ = 0;
};

/// Higher fitness first, then smaller area.
inline bool ranks_before(const CostReport& a, const CostReport& b)
{
    if (a.fitness != b.fitness) return a.fitness > b.fitness;
    return a.area_mm2 < b.area_mm2;
}

/// Indices of the top `count` reports; ties keep input order.
inline std::vector<std::size_t> select_elites(const std::vector<CostReport>& reports, std::size_t count)
{
    std::vector<std::size_t> idx(reports.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return ranks_before(reports[a], reports[b]); });
    idx.resize(std::min(count, idx.size()));
    return idx;
}

inline std::size_t elite_count(std::size_t population, double elite_ratio)
{
    auto n = static_cast<std::size_t>(std::ceil(elite_ratio * static_cast<double>(population) - 1e-9));
    return std::clamp<std::size_t>(n, 1, population);
}

inline std::vector<CostReport> evaluate_population(const std::vector<Genome>& pop, const EvalContext& ctx)
{
    auto reports = parallel_map(pop.size(), ctx.threads, [&](std::size_t i) {
        return evaluate_genome(pop[i], ctx.model, ctx.platform, ctx.objective);
    });
    if (ctx.on_sample)
        for (std::size_t i = 0; i < pop.size(); ++i) ctx.on_sample(pop[i], reports[i]);
    return reports;
}

inline double median_fitness(const std::vector<CostReport>& reports)
{
    std::vector<double> f;
    f.reserve(reports.size());
    for (const auto& r : reports) f.push_back(r.fitness);
    std::sort(f.begin(), f.end());
    const std::size_t n = f.size();
    if (n == 0) return 0;
    return n % 2 == 1 ? f[n / 2] : 0.5 * (f[n / 2 - 1] + f[n / 2]);
}

/// Keeps the best design sampled so far and appends trace rows.
class BestTracker {
public:
    void offer(const Genome& g, const CostReport& r)
    {
        if (!best_ || ranks_before(r, best_->best_report)) {
            if (!best_) best_.emplace();
            best_->best_genome = g;
            best_->best_report = r;
        }
    }

    void offer_all(const std::vector<Genome>& pop, const std::vector<CostReport>& reports)
    {
        for (std::size_t i = 0; i < pop.size(); ++i) offer(pop[i], reports[i]);
    }

    void record(count_t generation, count_t samples_used, const std::vector<CostReport>& batch)
    {
        trace_.push_back({generation, samples_used, best_->best_report.fitness, median_fitness(batch),
                          best_->best_report.area_mm2});
    }

    /// Final result; throws NoValidDesign if nothing valid was sampled.
    SearchResult finish(count_t samples_used, const std::string& scheme) &&
    {
        if (!best_) throw std::logic_error(scheme + ": no samples evaluated");
        SearchResult out = std::move(*best_);
        out.trace = std::move(trace_);
        out.samples_used = samples_used;
        if (!out.best_report.valid) {
            throw NoValidDesign(scheme + ": no valid design within the sampling budget (best area " +
                                    std::to_string(out.best_report.area_mm2) + " mm^2)",
                                std::move(out));
        }
        return out;
    }

private:
    std::optional<SearchResult> best_;
    std::vector<TracePoint> trace_;
};

} // namespace mapforge
