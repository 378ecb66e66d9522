// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "common.hpp"
#include "dims.hpp"
#include "platform.hpp"
#include "workload.hpp"

namespace mapforge {

using Rng = std::mt19937_64;

using DimOrder = std::array<Dim, kNumDims>;

inline constexpr DimOrder kCanonicalOrder = kAllDims;

/// Mapping and HW genes of one hierarchy level. `order` lists the temporal
/// loops outermost first; `pi` mirrors the genome-wide value for the level.
struct LevelGene {
    count_t pi = 1;
    Dim parallel_dim = Dim::K;
    DimOrder order = kCanonicalOrder;
    DimMap<count_t> tiles{{1, 1, 1, 1, 1, 1}};

    friend bool operator==(const LevelGene&, const LevelGene&) = default;
};

/// Per-layer mapping. l2 tiles are resident in the shared buffer; l1 tiles
/// are the per-array sub-tiles streamed into the PEs.
struct MappingChromosome {
    LevelGene l2;
    LevelGene l1;

    friend bool operator==(const MappingChromosome&, const MappingChromosome&) = default;
};

/// One design point: the shared PE-array genes and one chromosome per layer.
struct Genome {
    count_t pi_l2 = 1;
    count_t pi_l1 = 1;
    std::vector<MappingChromosome> mappings;

    count_t num_pes() const { return pi_l1 * pi_l2; }

    friend bool operator==(const Genome&, const Genome&) = default;
};

struct TensorWords {
    count_t weight = 0;
    count_t input = 0;
    count_t output = 0;

    count_t total() const { return weight + input + output; }
    count_t of(Tensor t) const
    {
        switch (t) {
        case Tensor::Weight: return weight;
        case Tensor::Input: return input;
        case Tensor::Output: return output;
        }
        return 0;
    }

    friend bool operator==(const TensorWords&, const TensorWords&) = default;
};

/// Minimum words needed to hold the live tiles: L1 per PE, L2 shared.
struct BufferReq {
    TensorWords l1;
    TensorWords l2;

    friend bool operator==(const BufferReq&, const BufferReq&) = default;
};

struct AcceleratorDesign {
    count_t pe_rows = 1;  // pi_l1
    count_t pe_cols = 1;  // pi_l2
    count_t num_pes = 1;
    count_t l1_words_per_pe = 0;
    count_t l2_words = 0;
    std::vector<MappingChromosome> mappings;
    std::vector<BufferReq> buffers;
};

enum class TemplateKind { Dla, Shi, Eye };

inline std::string_view template_name(TemplateKind k)
{
    switch (k) {
    case TemplateKind::Dla: return "dla";
    case TemplateKind::Shi: return "shi";
    case TemplateKind::Eye: return "eye";
    }
    return "?";
}

inline TemplateKind parse_template(std::string_view s)
{
    if (s == "dla") return TemplateKind::Dla;
    if (s == "shi") return TemplateKind::Shi;
    if (s == "eye") return TemplateKind::Eye;
    throw InputError("unknown mapping template '" + std::string(s) + "' (expected dla, shi or eye)");
}

// ---------------------------------------------------------------------------
// Footprints

/// Words of each tensor touched by a tile of the given extents.
inline TensorWords tile_footprint(const DimMap<count_t>& t, count_t stride)
{
    TensorWords w;
    w.weight = t[Dim::K] * t[Dim::C] * t[Dim::R] * t[Dim::S];
    w.input = t[Dim::C] * ((t[Dim::Y] - 1) * stride + t[Dim::R]) * ((t[Dim::X] - 1) * stride + t[Dim::S]);
    w.output = t[Dim::K] * t[Dim::Y] * t[Dim::X];
    return w;
}

/// Exact-fit buffer allocation for one layer. The L1 footprint is what one PE
/// holds: the parallel dim's extent is split across pi_l1 PEs.
inline BufferReq min_buffer_requirement(const MappingChromosome& m, const LayerShape& layer, count_t pi_l1)
{
    BufferReq req;
    req.l2 = tile_footprint(m.l2.tiles, layer.stride);
    DimMap<count_t> per_pe = m.l1.tiles;
    per_pe[m.l1.parallel_dim] = ceil_div(per_pe[m.l1.parallel_dim], pi_l1);
    req.l1 = tile_footprint(per_pe, layer.stride);
    return req;
}

// ---------------------------------------------------------------------------
// Validation and repair

inline bool is_permutation(const DimOrder& order)
{
    std::array<bool, kNumDims> seen{};
    for (Dim d : order) {
        int i = index_of(d);
        if (i < 0 || i >= kNumDims || seen[i]) return false;
        seen[i] = true;
    }
    return true;
}

/// Lists every violated genome invariant; empty means the genome is legal
/// for the model and platform.
inline std::vector<std::string> validate_genome(const Genome& g, const Model& model, const Platform& platform)
{
    std::vector<std::string> out;
    if (g.pi_l1 < 1) out.push_back("pi_l1 must be >= 1");
    if (g.pi_l2 < 1) out.push_back("pi_l2 must be >= 1");
    if (g.pi_l1 * g.pi_l2 > platform.max_pes)
        out.push_back("pi_l1 * pi_l2 = " + std::to_string(g.pi_l1 * g.pi_l2) + " exceeds max_pes " +
                      std::to_string(platform.max_pes));
    if (g.mappings.size() != model.layers.size()) {
        out.push_back("mapping count " + std::to_string(g.mappings.size()) + " != layer count " +
                      std::to_string(model.layers.size()));
        return out;
    }
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        const auto& layer = model.layers[i];
        const auto& m = g.mappings[i];
        std::string where = "layer '" + layer.name + "' ";
        if (m.l2.pi != g.pi_l2) out.push_back(where + "l2.pi does not mirror pi_l2");
        if (m.l1.pi != g.pi_l1) out.push_back(where + "l1.pi does not mirror pi_l1");
        if (!is_permutation(m.l2.order)) out.push_back(where + "l2.order is not a permutation");
        if (!is_permutation(m.l1.order)) out.push_back(where + "l1.order is not a permutation");
        for (Dim d : kAllDims) {
            std::string tile = std::string(1, dim_letter(d));
            if (m.l2.tiles[d] < 1 || m.l2.tiles[d] > layer.extent(d))
                out.push_back(where + "l2.tiles." + tile + " out of [1, " + std::to_string(layer.extent(d)) + "]");
            if (m.l1.tiles[d] < 1 || m.l1.tiles[d] > m.l2.tiles[d])
                out.push_back(where + "l1.tiles." + tile + " out of [1, l2 tile]");
        }
    }
    return out;
}

namespace detail {

inline DimOrder fix_order(const DimOrder& order)
{
    if (is_permutation(order)) return order;
    DimOrder out{};
    std::array<bool, kNumDims> used{};
    std::size_t n = 0;
    for (Dim d : order) {
        int i = index_of(d);
        if (i >= 0 && i < kNumDims && !used[i]) {
            used[i] = true;
            out[n++] = d;
        }
    }
    for (Dim d : kAllDims)
        if (!used[index_of(d)]) out[n++] = d;
    return out;
}

inline Dim fix_dim(Dim d)
{
    int i = index_of(d);
    return i >= 0 && i < kNumDims ? d : Dim::K;
}

} // namespace detail

/// Clamps a genome into the legal space. Idempotent.
inline Genome repair(Genome g, const Model& model, const Platform& platform)
{
    const count_t cap = platform.pi_cap();
    g.pi_l1 = std::max<count_t>(1, g.pi_l1);
    g.pi_l2 = std::max<count_t>(1, g.pi_l2);
    while (g.pi_l1 > cap) g.pi_l1 /= 2;
    while (g.pi_l2 > cap) g.pi_l2 /= 2;
    while (g.pi_l1 * g.pi_l2 > platform.max_pes) {
        if (g.pi_l1 >= g.pi_l2) g.pi_l1 = std::max<count_t>(1, g.pi_l1 / 2);
        else g.pi_l2 = std::max<count_t>(1, g.pi_l2 / 2);
    }

    g.mappings.resize(model.layers.size());
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        const auto& layer = model.layers[i];
        auto& m = g.mappings[i];
        m.l2.pi = g.pi_l2;
        m.l1.pi = g.pi_l1;
        m.l2.parallel_dim = detail::fix_dim(m.l2.parallel_dim);
        m.l1.parallel_dim = detail::fix_dim(m.l1.parallel_dim);
        m.l2.order = detail::fix_order(m.l2.order);
        m.l1.order = detail::fix_order(m.l1.order);
        for (Dim d : kAllDims) {
            m.l2.tiles[d] = std::clamp<count_t>(m.l2.tiles[d], 1, layer.extent(d));
            m.l1.tiles[d] = std::clamp<count_t>(m.l1.tiles[d], 1, m.l2.tiles[d]);
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Sampling

template <typename T>
const T& pick(const std::vector<T>& items, Rng& rng)
{
    std::uniform_int_distribution<std::size_t> dist(0, items.size() - 1);
    return items[dist(rng)];
}

inline count_t uniform_count(count_t lo, count_t hi, Rng& rng)
{
    return std::uniform_int_distribution<count_t>(lo, hi)(rng);
}

inline Dim random_dim(Rng& rng) { return kAllDims[static_cast<std::size_t>(uniform_count(0, kNumDims - 1, rng))]; }

inline DimOrder random_order(Rng& rng)
{
    DimOrder order = kCanonicalOrder;
    for (std::size_t i = order.size() - 1; i > 0; --i) {
        auto j = static_cast<std::size_t>(uniform_count(0, static_cast<count_t>(i), rng));
        std::swap(order[i], order[j]);
    }
    return order;
}

inline LevelGene random_level(const LayerShape& layer, Rng& rng)
{
    LevelGene g;
    g.parallel_dim = random_dim(rng);
    g.order = random_order(rng);
    for (Dim d : kAllDims) g.tiles[d] = uniform_count(1, layer.extent(d), rng);
    return g;
}

inline Genome random_genome(const Model& model, const Platform& platform, Rng& rng)
{
    const auto allowed = platform.allowed_pi();
    Genome g;
    g.pi_l2 = pick(allowed, rng);
    g.pi_l1 = pick(allowed, rng);
    g.mappings.reserve(model.layers.size());
    for (const auto& layer : model.layers) {
        MappingChromosome m;
        m.l2 = random_level(layer, rng);
        m.l1 = random_level(layer, rng);
        for (Dim d : kAllDims) m.l1.tiles[d] = uniform_count(1, m.l2.tiles[d], rng);
        g.mappings.push_back(m);
    }
    return repair(std::move(g), model, platform);
}

// ---------------------------------------------------------------------------
// Decoding

inline AcceleratorDesign decode(const Genome& g, const Model& model)
{
    AcceleratorDesign d;
    d.pe_rows = g.pi_l1;
    d.pe_cols = g.pi_l2;
    d.num_pes = g.pi_l1 * g.pi_l2;
    d.mappings = g.mappings;
    d.buffers.reserve(model.layers.size());
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        BufferReq req = min_buffer_requirement(g.mappings[i], model.layers[i], g.pi_l1);
        d.l1_words_per_pe = std::max(d.l1_words_per_pe, req.l1.total());
        d.l2_words = std::max(d.l2_words, req.l2.total());
        d.buffers.push_back(req);
    }
    return d;
}

/// "K-C" style label of the (L2, L1) parallel dims.
inline std::string parallelism_label(const MappingChromosome& m)
{
    return std::string{dim_letter(m.l2.parallel_dim), '-', dim_letter(m.l1.parallel_dim)};
}

// ---------------------------------------------------------------------------
// Fixed mapping templates

/// dla: K across arrays, C within an array. shi: Y-X. eye: Y-R (row stationary).
/// The L1 tile holds exactly one PE's worth of the L1 parallel dim; the L2
/// tile spans pi_l2 such sub-tiles along the L2 parallel dim.
inline MappingChromosome template_mapping(TemplateKind kind, const LayerShape& layer, count_t pi_l1, count_t pi_l2)
{
    Dim p2 = Dim::K, p1 = Dim::C;
    switch (kind) {
    case TemplateKind::Dla: p2 = Dim::K; p1 = Dim::C; break;
    case TemplateKind::Shi: p2 = Dim::Y; p1 = Dim::X; break;
    case TemplateKind::Eye: p2 = Dim::Y; p1 = Dim::R; break;
    }
    MappingChromosome m;
    m.l1.pi = pi_l1;
    m.l2.pi = pi_l2;
    m.l1.parallel_dim = p1;
    m.l2.parallel_dim = p2;
    m.l1.tiles[p1] = std::min(layer.extent(p1), pi_l1);
    m.l2.tiles = m.l1.tiles;
    m.l2.tiles[p2] = std::min(layer.extent(p2), m.l1.tiles[p2] * pi_l2);
    return m;
}

inline Genome template_genome(TemplateKind kind, const Model& model, count_t pi_l1, count_t pi_l2)
{
    Genome g;
    g.pi_l1 = pi_l1;
    g.pi_l2 = pi_l2;
    for (const auto& layer : model.layers) g.mappings.push_back(template_mapping(kind, layer, pi_l1, pi_l2));
    return g;
}

// ---------------------------------------------------------------------------
// Flat integer encoding for structure-blind optimizers

inline constexpr count_t kNumOrders = 720;

/// Lehmer code of a permutation, in [0, 720).
inline count_t order_to_code(const DimOrder& order)
{
    count_t code = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        count_t smaller = 0;
        for (std::size_t j = i + 1; j < order.size(); ++j)
            if (index_of(order[j]) < index_of(order[i])) ++smaller;
        code = code * static_cast<count_t>(order.size() - i) + smaller;
    }
    return code;
}

inline DimOrder code_to_order(count_t code)
{
    code = std::clamp<count_t>(code, 0, kNumOrders - 1);
    std::array<count_t, kNumDims> digits{};
    for (int i = kNumDims - 1; i >= 0; --i) {
        count_t base = kNumDims - i;
        digits[static_cast<std::size_t>(i)] = code % base;
        code /= base;
    }
    std::vector<Dim> pool(kAllDims.begin(), kAllDims.end());
    DimOrder out{};
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto it = pool.begin() + digits[i];
        out[i] = *it;
        pool.erase(it);
    }
    return out;
}

/// Inclusive value range of one flat position. Power-of-two positions
/// resample from the powers of two inside the range.
struct GeneDomain {
    count_t lo = 0;
    count_t hi = 0;
    bool power_of_two = false;
};

inline constexpr std::size_t kGenesPerLevel = 2 + kNumDims;
inline constexpr std::size_t kGenesPerLayer = 2 * kGenesPerLevel;

inline std::size_t gene_count(const Model& model) { return 2 + kGenesPerLayer * model.layers.size(); }

inline std::vector<GeneDomain> gene_domains(const Model& model, const Platform& platform)
{
    std::vector<GeneDomain> out;
    out.reserve(gene_count(model));
    out.push_back({1, platform.pi_cap(), true});
    out.push_back({1, platform.pi_cap(), true});
    for (const auto& layer : model.layers) {
        for (int level = 0; level < 2; ++level) {
            out.push_back({0, kNumDims - 1, false});
            out.push_back({0, kNumOrders - 1, false});
            for (Dim d : kAllDims) out.push_back({1, layer.extent(d), false});
        }
    }
    return out;
}

inline count_t sample_gene(const GeneDomain& dom, Rng& rng)
{
    if (!dom.power_of_two) return uniform_count(dom.lo, dom.hi, rng);
    std::vector<count_t> values;
    for (count_t v = 1; v <= dom.hi; v *= 2)
        if (v >= dom.lo) values.push_back(v);
    return pick(values, rng);
}

/// Layout: [pi_l2, pi_l1, then per layer (l2 then l1): parallel dim index,
/// order Lehmer code, six tile sizes in K,C,Y,X,R,S order].
inline std::vector<count_t> flatten(const Genome& g)
{
    std::vector<count_t> v;
    v.reserve(2 + kGenesPerLayer * g.mappings.size());
    v.push_back(g.pi_l2);
    v.push_back(g.pi_l1);
    for (const auto& m : g.mappings) {
        for (const LevelGene* level : {&m.l2, &m.l1}) {
            v.push_back(index_of(level->parallel_dim));
            v.push_back(order_to_code(level->order));
            for (Dim d : kAllDims) v.push_back(level->tiles[d]);
        }
    }
    return v;
}

inline Genome unflatten(const std::vector<count_t>& v, const Model& model, const Platform& platform)
{
    if (v.size() != gene_count(model))
        throw InputError("flat genome has " + std::to_string(v.size()) + " genes, model needs " +
                         std::to_string(gene_count(model)));
    Genome g;
    g.pi_l2 = v[0];
    g.pi_l1 = v[1];
    std::size_t pos = 2;
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        MappingChromosome m;
        for (LevelGene* level : {&m.l2, &m.l1}) {
            level->parallel_dim = kAllDims[static_cast<std::size_t>(std::clamp<count_t>(v[pos++], 0, kNumDims - 1))];
            level->order = code_to_order(v[pos++]);
            for (Dim d : kAllDims) level->tiles[d] = v[pos++];
        }
        g.mappings.push_back(m);
    }
    return repair(std::move(g), model, platform);
}

} // namespace mapforge
