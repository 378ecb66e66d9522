// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "common.hpp"
#include "dims.hpp"

namespace mapforge {

/// One DNN layer in 6-dim convolution form. Y and X are OUTPUT sizes; the
/// input footprint is derived without padding.
struct LayerShape {
    std::string name;
    count_t K = 1;
    count_t C = 1;
    count_t Y = 1;
    count_t X = 1;
    count_t R = 1;
    count_t S = 1;
    count_t stride = 1;

    count_t extent(Dim d) const
    {
        switch (d) {
        case Dim::K: return K;
        case Dim::C: return C;
        case Dim::Y: return Y;
        case Dim::X: return X;
        case Dim::R: return R;
        case Dim::S: return S;
        }
        return 1;
    }

    count_t input_rows() const { return (Y - 1) * stride + R; }
    count_t input_cols() const { return (X - 1) * stride + S; }

    friend bool operator==(const LayerShape&, const LayerShape&) = default;
};

struct Model {
    std::string name;
    std::vector<LayerShape> layers;

    friend bool operator==(const Model&, const Model&) = default;
};

/// Empty result means the layer is legal.
inline std::vector<std::string> validate_layer(const LayerShape& layer)
{
    std::vector<std::string> violations;
    auto check = [&](const char* field, count_t v) {
        if (v < 1) violations.push_back(std::string(field) + " must be >= 1 (got " + std::to_string(v) + ")");
    };
    check("K", layer.K);
    check("C", layer.C);
    check("Y", layer.Y);
    check("X", layer.X);
    check("R", layer.R);
    check("S", layer.S);
    check("stride", layer.stride);
    return violations;
}

/// Lowers an m x k by k x n matrix product: K=m (rows of the result),
/// C=k (reduction), Y=n, all spatial filter dims unit.
inline LayerShape gemm_to_conv(count_t m, count_t n, count_t k, std::string name = "gemm")
{
    return LayerShape{std::move(name), m, k, n, 1, 1, 1, 1};
}

inline count_t total_macs(const LayerShape& l) { return l.K * l.C * l.Y * l.X * l.R * l.S; }

namespace detail {

inline count_t json_count(const nlohmann::json& obj, const char* field, const std::string& where)
{
    if (!obj.contains(field)) throw InputError(where + ": missing field '" + field + "'");
    const auto& v = obj.at(field);
    if (!v.is_number_integer()) throw InputError(where + ": field '" + field + "' must be an integer");
    return v.get<count_t>();
}

inline void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& allowed, const std::string& where)
{
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) throw InputError(where + ": unknown field '" + key + "'");
}

} // namespace detail

/// Parses the model JSON schema. `source` only labels error messages.
inline Model parse_model(const std::string& text, const std::string& source = "model")
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(source + ": parse error: " + e.what());
    }
    if (!doc.is_object()) throw InputError(source + ": top level must be an object");
    detail::reject_unknown(doc, {"name", "layers"}, source);
    if (!doc.contains("name") || !doc["name"].is_string()) throw InputError(source + ": 'name' must be a string");
    if (!doc.contains("layers") || !doc["layers"].is_array()) throw InputError(source + ": 'layers' must be an array");

    Model model;
    model.name = doc["name"].get<std::string>();
    std::set<std::string> seen;
    std::size_t index = 0;
    for (const auto& entry : doc["layers"]) {
        std::string where = source + ": layer #" + std::to_string(index++);
        if (!entry.is_object()) throw InputError(where + ": must be an object");
        if (!entry.contains("name") || !entry["name"].is_string()) throw InputError(where + ": 'name' must be a string");
        std::string name = entry["name"].get<std::string>();
        where = source + ": layer '" + name + "'";
        if (!entry.contains("type") || !entry["type"].is_string()) throw InputError(where + ": 'type' must be a string");
        std::string type = entry["type"].get<std::string>();

        LayerShape layer;
        if (type == "conv") {
            detail::reject_unknown(entry, {"name", "type", "K", "C", "Y", "X", "R", "S", "stride"}, where);
            layer = LayerShape{name,
                               detail::json_count(entry, "K", where),
                               detail::json_count(entry, "C", where),
                               detail::json_count(entry, "Y", where),
                               detail::json_count(entry, "X", where),
                               detail::json_count(entry, "R", where),
                               detail::json_count(entry, "S", where),
                               detail::json_count(entry, "stride", where)};
        } else if (type == "gemm") {
            detail::reject_unknown(entry, {"name", "type", "M", "N", "K"}, where);
            count_t m = detail::json_count(entry, "M", where);
            count_t n = detail::json_count(entry, "N", where);
            count_t k = detail::json_count(entry, "K", where);
            if (m < 1) throw InputError(where + ": M must be >= 1 (got " + std::to_string(m) + ")");
            if (n < 1) throw InputError(where + ": N must be >= 1 (got " + std::to_string(n) + ")");
            if (k < 1) throw InputError(where + ": K must be >= 1 (got " + std::to_string(k) + ")");
            layer = gemm_to_conv(m, n, k, name);
        } else {
            throw InputError(where + ": unknown type '" + type + "' (expected conv or gemm)");
        }

        if (auto v = validate_layer(layer); !v.empty()) throw InputError(where + ": " + v.front());
        if (!seen.insert(name).second) throw InputError(where + ": duplicate layer name");
        model.layers.push_back(std::move(layer));
    }
    if (model.layers.empty()) throw InputError(source + ": model needs at least one layer");
    return model;
}

inline Model load_model(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path.string() + ": cannot open model file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str(), path.string());
}

} // namespace mapforge
