// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <charconv>
#include <string>
#include <vector>

#include "costmodel.hpp"
#include "design_space.hpp"
#include "genome_io.hpp"
#include "platform.hpp"
#include "search.hpp"

namespace mapforge {

/// Shortest round-trip text for a double.
inline std::string format_double(double v)
{
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return ec == std::errc{} ? std::string(buf.data(), ptr) : std::string("nan");
}

inline ordered_json words_json(const TensorWords& w)
{
    return ordered_json{{"weight", w.weight}, {"input", w.input}, {"output", w.output}, {"total", w.total()}};
}

inline ordered_json traffic_json(const TensorTraffic& t)
{
    return ordered_json{{"weight", t.weight},
                        {"input", t.input},
                        {"output", t.output},
                        {"output_writeback", t.output_writeback},
                        {"total", t.total()}};
}

/// Decoded design plus its full cost breakdown. Pure function of its inputs;
/// `inspect` on a checkpoint re-derives exactly this object.
inline ordered_json design_report(const Genome& g, const Model& model, const Platform& platform, Objective objective)
{
    const AcceleratorDesign design = decode(g, model);
    const CostReport report = evaluate(design, model, platform, objective);

    ordered_json layers = ordered_json::array();
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        const auto& m = design.mappings[i];
        const auto& c = report.layers[i];
        layers.push_back(ordered_json{{"name", model.layers[i].name},
                                      {"parallelism", parallelism_label(m)},
                                      {"l2", level_to_json(m.l2)},
                                      {"l1", level_to_json(m.l1)},
                                      {"buffer", {{"l1_per_pe", words_json(c.buffer.l1)}, {"l2", words_json(c.buffer.l2)}}},
                                      {"macs", total_macs(model.layers[i])},
                                      {"compute_cycles", c.compute_cycles},
                                      {"cycles", c.cycles},
                                      {"dram_traffic", traffic_json(c.dram)},
                                      {"l2_traffic", traffic_json(c.l2)},
                                      {"energy_pj", c.energy_pj}});
    }

    return ordered_json{
        {"model", model.name},
        {"pe_array", {{"rows", design.pe_rows}, {"cols", design.pe_cols}, {"num_pes", design.num_pes}}},
        {"buffers",
         {{"l1_words_per_pe", design.l1_words_per_pe},
          {"l2_words", design.l2_words},
          {"word_bytes", platform.word_bytes},
          {"total_bytes", (design.num_pes * design.l1_words_per_pe + design.l2_words) * platform.word_bytes}}},
        {"layers", layers},
        {"totals",
         {{"cycles", report.cycles},
          {"dram_words", report.dram_words},
          {"l2_words", report.l2_words},
          {"energy_pj", report.energy_pj},
          {"area_mm2", report.area_mm2},
          {"area_budget_mm2", platform.area_budget},
          {"latency_area_product", report.latency_area_product()},
          {"valid", report.valid},
          {"objective", std::string(objective_name(objective))},
          {"objective_value", report.objective_value},
          {"fitness", report.fitness}}}};
}

inline const char* kTraceHeader = "generation,samples_used,best_fitness,median_fitness,best_area_mm2";

inline std::string trace_csv(const std::vector<TracePoint>& trace)
{
    std::string out = kTraceHeader;
    out += '\n';
    for (const auto& p : trace) {
        out += std::to_string(p.generation) + ',' + std::to_string(p.samples_used) + ',' +
               format_double(p.best_fitness) + ',' + format_double(p.median_fitness) + ',' +
               format_double(p.best_area_mm2) + '\n';
    }
    return out;
}

} // namespace mapforge
