// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "design_space.hpp"
#include "workload.hpp"

namespace mapforge {

using ordered_json = nlohmann::ordered_json;

inline std::string order_string(const DimOrder& order)
{
    std::string s;
    for (Dim d : order) s.push_back(dim_letter(d));
    return s;
}

inline ordered_json level_to_json(const LevelGene& g)
{
    ordered_json tiles = ordered_json::object();
    for (Dim d : kAllDims) tiles[std::string(1, dim_letter(d))] = g.tiles[d];
    return ordered_json{{"pi", g.pi},
                        {"parallel", std::string(1, dim_letter(g.parallel_dim))},
                        {"order", order_string(g.order)},
                        {"tiles", tiles}};
}

/// Checkpoint form of a genome. Orders are stored as dim-letter strings.
inline ordered_json genome_to_json(const Genome& g, const Model& model)
{
    ordered_json layers = ordered_json::array();
    for (std::size_t i = 0; i < g.mappings.size(); ++i) {
        layers.push_back(ordered_json{{"name", i < model.layers.size() ? model.layers[i].name : ""},
                                      {"l2", level_to_json(g.mappings[i].l2)},
                                      {"l1", level_to_json(g.mappings[i].l1)}});
    }
    return ordered_json{{"model", model.name}, {"pi_l2", g.pi_l2}, {"pi_l1", g.pi_l1}, {"layers", layers}};
}

namespace detail {

inline Dim parse_dim_field(const nlohmann::json& v, const std::string& field)
{
    if (!v.is_string() || v.get<std::string>().size() != 1) throw InputError(field + ": expected one dim letter");
    auto d = dim_from_letter(v.get<std::string>()[0]);
    if (!d) throw InputError(field + ": unknown dim '" + v.get<std::string>() + "'");
    return *d;
}

inline DimOrder parse_order_field(const nlohmann::json& v, const std::string& field)
{
    if (!v.is_string()) throw InputError(field + ": expected a dim-letter string like \"KCYXRS\"");
    const std::string s = v.get<std::string>();
    if (s.size() != kNumDims) throw InputError(field + ": needs exactly 6 dim letters, got \"" + s + "\"");
    DimOrder order{};
    std::array<bool, kNumDims> seen{};
    for (std::size_t i = 0; i < s.size(); ++i) {
        auto d = dim_from_letter(s[i]);
        if (!d) throw InputError(field + ": unknown dim '" + std::string(1, s[i]) + "'");
        if (seen[static_cast<std::size_t>(index_of(*d))])
            throw InputError(field + ": repeated dim '" + std::string(1, s[i]) + "'");
        seen[static_cast<std::size_t>(index_of(*d))] = true;
        order[i] = *d;
    }
    return order;
}

inline LevelGene parse_level(const nlohmann::json& j, const std::string& field)
{
    if (!j.is_object()) throw InputError(field + ": expected an object");
    reject_unknown(j, {"pi", "parallel", "order", "tiles"}, field);
    LevelGene g;
    g.pi = json_count(j, "pi", field);
    if (!j.contains("parallel")) throw InputError(field + ": missing field 'parallel'");
    g.parallel_dim = parse_dim_field(j["parallel"], field + ".parallel");
    if (!j.contains("order")) throw InputError(field + ": missing field 'order'");
    g.order = parse_order_field(j["order"], field + ".order");
    if (!j.contains("tiles") || !j["tiles"].is_object()) throw InputError(field + ".tiles: expected an object");
    reject_unknown(j["tiles"], {"K", "C", "Y", "X", "R", "S"}, field + ".tiles");
    for (Dim d : kAllDims) g.tiles[d] = json_count(j["tiles"], std::string(1, dim_letter(d)).c_str(), field + ".tiles");
    return g;
}

} // namespace detail

/// Parses a checkpoint against `model`. Structure and field-level errors
/// throw InputError naming the field; the result is not repaired.
inline Genome genome_from_json(const std::string& text, const Model& model, const std::string& where = "genome")
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(where + ": parse error: " + e.what());
    }
    if (!doc.is_object()) throw InputError(where + ": top level must be an object");
    detail::reject_unknown(doc, {"model", "pi_l2", "pi_l1", "layers"}, where);
    Genome g;
    g.pi_l2 = detail::json_count(doc, "pi_l2", where);
    g.pi_l1 = detail::json_count(doc, "pi_l1", where);
    if (!doc.contains("layers") || !doc["layers"].is_array()) throw InputError(where + ": 'layers' must be an array");
    if (doc["layers"].size() != model.layers.size())
        throw InputError(where + ": has " + std::to_string(doc["layers"].size()) + " layers, model '" + model.name +
                         "' has " + std::to_string(model.layers.size()));
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        const auto& entry = doc["layers"][i];
        const std::string field = where + ": layers[" + std::to_string(i) + "]";
        if (!entry.is_object()) throw InputError(field + ": expected an object");
        detail::reject_unknown(entry, {"name", "l2", "l1"}, field);
        if (entry.contains("name") && entry["name"] != model.layers[i].name)
            throw InputError(field + ".name: expected '" + model.layers[i].name + "'");
        if (!entry.contains("l2") || !entry.contains("l1")) throw InputError(field + ": needs 'l2' and 'l1'");
        MappingChromosome m;
        m.l2 = detail::parse_level(entry["l2"], field + ".l2");
        m.l1 = detail::parse_level(entry["l1"], field + ".l1");
        g.mappings.push_back(m);
    }
    return g;
}

inline Genome load_genome(const std::filesystem::path& path, const Model& model)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path.string() + ": cannot open genome file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return genome_from_json(buf.str(), model, path.string());
}

} // namespace mapforge
