// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "common.hpp"
#include "design_space.hpp"
#include "dims.hpp"
#include "platform.hpp"
#include "workload.hpp"

namespace mapforge {

enum class Objective { Latency, Energy, Edp };

inline std::string_view objective_name(Objective o)
{
    switch (o) {
    case Objective::Latency: return "latency";
    case Objective::Energy: return "energy";
    case Objective::Edp: return "edp";
    }
    return "?";
}

inline Objective parse_objective(std::string_view s)
{
    if (s == "latency") return Objective::Latency;
    if (s == "energy") return Objective::Energy;
    if (s == "edp") return Objective::Edp;
    throw InputError("unknown objective '" + std::string(s) + "' (expected latency, energy or edp)");
}

enum class Boundary { Dram, L2 };

/// Words moved across one memory boundary. Output partial sums are fetched
/// and written back once per visit, so write-backs equal output fetches.
struct TensorTraffic {
    count_t weight = 0;
    count_t input = 0;
    count_t output = 0;
    count_t output_writeback = 0;

    count_t total() const { return weight + input + output + output_writeback; }
    count_t of(Tensor t) const
    {
        switch (t) {
        case Tensor::Weight: return weight;
        case Tensor::Input: return input;
        case Tensor::Output: return output;
        }
        return 0;
    }

    friend bool operator==(const TensorTraffic&, const TensorTraffic&) = default;
};

struct LayerCost {
    std::string name;
    count_t compute_cycles = 0;
    count_t cycles = 0;
    TensorTraffic dram;
    TensorTraffic l2;
    double energy_pj = 0;
    BufferReq buffer;
};

struct CostReport {
    count_t cycles = 0;
    count_t dram_words = 0;
    count_t l2_words = 0;
    double energy_pj = 0;
    double area_mm2 = 0;
    bool valid = false;
    double objective_value = 0;
    double fitness = 0;
    std::vector<LayerCost> layers;

    double latency_area_product() const { return static_cast<double>(cycles) * area_mm2; }
};

/// Offset that puts every constraint-violating design below any valid one.
inline constexpr double kInvalidFitnessScale = 1e30;

namespace detail {

struct Loop {
    Dim dim;
    count_t count;
};

/// Number of times a tensor's tile changes while running `nest` (outermost
/// first): everything outside the innermost run of irrelevant or unit-count
/// loops.
inline count_t fetch_events(Tensor t, const std::vector<Loop>& nest)
{
    count_t events = 1;
    std::size_t last_relevant = nest.size();
    for (std::size_t i = nest.size(); i-- > 0;) {
        if (nest[i].count > 1 && is_relevant(t, nest[i].dim)) {
            last_relevant = i;
            break;
        }
    }
    if (last_relevant == nest.size()) return 1;
    for (std::size_t i = 0; i <= last_relevant; ++i) events *= nest[i].count;
    return events;
}

inline DimMap<count_t> outer_counts(const MappingChromosome& m, const LayerShape& layer)
{
    DimMap<count_t> n;
    for (Dim d : kAllDims) n[d] = ceil_div(layer.extent(d), m.l2.tiles[d]);
    return n;
}

inline DimMap<count_t> inner_counts(const MappingChromosome& m)
{
    DimMap<count_t> n;
    for (Dim d : kAllDims) n[d] = ceil_div(m.l2.tiles[d], m.l1.tiles[d]);
    return n;
}

} // namespace detail

/// Roofline compute arm: L2 tiles run back to back; within one, the
/// sub-tiles along the L2 parallel dim are spread over pi_l2 arrays and each
/// sub-tile's L1 parallel dim over the pi_l1 PEs of an array. One MAC per
/// PE per cycle.
inline count_t compute_cycles(const MappingChromosome& m, const LayerShape& layer, count_t pi_l1, count_t pi_l2)
{
    const auto big = detail::outer_counts(m, layer);
    const auto small = detail::inner_counts(m);
    const Dim p2 = m.l2.parallel_dim;
    const Dim p1 = m.l1.parallel_dim;

    count_t cycles = 1;
    for (Dim d : kAllDims) cycles *= big[d];
    cycles *= ceil_div(small[p2], pi_l2);
    for (Dim d : kAllDims)
        if (d != p2) cycles *= small[d];
    cycles *= ceil_div(m.l1.tiles[p1], pi_l1);
    for (Dim d : kAllDims)
        if (d != p1) cycles *= m.l1.tiles[d];
    return cycles;
}

/// Tile fetches across one boundary. DRAM->L2 moves L2 tiles following the
/// l2 loop order. L2->L1 moves L1 tiles; its loop nest is the l2 order
/// followed by the l1 order, with the L2 parallel loop folded by pi_l2.
/// Tensors indexed by the L2 parallel dim need a distinct sub-tile per
/// active array; the others are multicast.
inline TensorTraffic boundary_traffic(Boundary level, const MappingChromosome& m, const LayerShape& layer,
                                      count_t pi_l2)
{
    const auto big = detail::outer_counts(m, layer);
    std::vector<detail::Loop> nest;
    for (Dim d : m.l2.order) nest.push_back({d, big[d]});

    TensorWords footprint = tile_footprint(m.l2.tiles, layer.stride);
    count_t spread = 1;
    const Dim p2 = m.l2.parallel_dim;
    if (level == Boundary::L2) {
        const auto small = detail::inner_counts(m);
        for (Dim d : m.l1.order) nest.push_back({d, d == p2 ? ceil_div(small[d], pi_l2) : small[d]});
        footprint = tile_footprint(m.l1.tiles, layer.stride);
        spread = std::min(pi_l2, small[p2]);
    }

    auto words = [&](Tensor t) {
        count_t w = footprint.of(t) * detail::fetch_events(t, nest);
        if (level == Boundary::L2 && is_relevant(t, p2)) w *= spread;
        return w;
    };
    TensorTraffic out;
    out.weight = words(Tensor::Weight);
    out.input = words(Tensor::Input);
    out.output = words(Tensor::Output);
    out.output_writeback = out.output;
    return out;
}

inline double area_of(const AcceleratorDesign& d, const Platform& p)
{
    const double buffer_bytes =
        static_cast<double>(d.num_pes * d.l1_words_per_pe + d.l2_words) * static_cast<double>(p.word_bytes);
    return static_cast<double>(d.num_pes) * p.a_pe + buffer_bytes * p.a_sram;
}

/// Valid designs score -objective; invalid ones score below every valid
/// design, graded by how far they overshoot the area budget.
inline double fitness_of(double objective_value, double area_mm2, double area_budget)
{
    if (area_mm2 <= area_budget) return -objective_value;
    const double overshoot = area_mm2 / area_budget - 1.0;
    return -kInvalidFitnessScale * (1.0 + overshoot);
}

inline count_t bandwidth_cycles(count_t words, double words_per_cycle)
{
    return static_cast<count_t>(std::ceil(static_cast<double>(words) / words_per_cycle));
}

inline LayerCost evaluate_layer(const MappingChromosome& m, const LayerShape& layer, count_t pi_l1, count_t pi_l2,
                                const Platform& p)
{
    LayerCost c;
    c.name = layer.name;
    c.buffer = min_buffer_requirement(m, layer, pi_l1);
    c.compute_cycles = compute_cycles(m, layer, pi_l1, pi_l2);
    c.dram = boundary_traffic(Boundary::Dram, m, layer, pi_l2);
    c.l2 = boundary_traffic(Boundary::L2, m, layer, pi_l2);
    c.cycles = std::max({c.compute_cycles, bandwidth_cycles(c.dram.total(), p.bw_dram),
                         bandwidth_cycles(c.l2.total(), p.bw_l2)});
    c.energy_pj = static_cast<double>(total_macs(layer)) * p.e_mac +
                  static_cast<double>(c.dram.total()) * p.e_dram + static_cast<double>(c.l2.total()) * p.e_l2;
    return c;
}

inline CostReport evaluate(const AcceleratorDesign& design, const Model& model, const Platform& platform,
                           Objective objective)
{
    CostReport r;
    r.layers.reserve(model.layers.size());
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        LayerCost c = evaluate_layer(design.mappings[i], model.layers[i], design.pe_rows, design.pe_cols, platform);
        r.cycles += c.cycles;
        r.dram_words += c.dram.total();
        r.l2_words += c.l2.total();
        r.energy_pj += c.energy_pj;
        r.layers.push_back(std::move(c));
    }
    r.area_mm2 = area_of(design, platform);
    r.valid = r.area_mm2 <= platform.area_budget;
    switch (objective) {
    case Objective::Latency: r.objective_value = static_cast<double>(r.cycles); break;
    case Objective::Energy: r.objective_value = r.energy_pj; break;
    case Objective::Edp: r.objective_value = r.energy_pj * static_cast<double>(r.cycles); break;
    }
    r.fitness = fitness_of(r.objective_value, r.area_mm2, platform.area_budget);
    return r;
}

inline CostReport evaluate_genome(const Genome& g, const Model& model, const Platform& platform, Objective objective)
{
    return evaluate(decode(g, model), model, platform, objective);
}

} // namespace mapforge
