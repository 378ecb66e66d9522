// SPDX-License-Identifier: Apache-2.0
#pragma once

// Brute-force interpreter for the two-level tiled loop nest. It executes
// every MAC, tracks which tile each buffer currently holds and measures the
// words a buffer actually touches. It shares no arithmetic with the
// closed-form model in costmodel.hpp and exists to validate it.

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "common.hpp"
#include "costmodel.hpp"
#include "design_space.hpp"
#include "dims.hpp"
#include "workload.hpp"

namespace mapforge {

inline constexpr count_t kOracleMacCap = 1'000'000;

class OracleCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExactCounts {
    count_t cycles = 0;
    count_t dram_words = 0;
    count_t l2_words = 0;
    count_t max_live_l1_words_per_pe = 0;
    count_t max_live_l2_words = 0;
    TensorTraffic dram;
    TensorTraffic l2;
    TensorWords live_l1;  // per-tensor maxima
    TensorWords live_l2;
};

namespace oracle_detail {

struct Range {
    count_t lo = 0;
    count_t hi = 0;  // exclusive
    count_t size() const { return hi - lo; }
};

using Box = DimMap<Range>;

/// Splits [lo, hi) into consecutive chunks of `tile`, the last one clipped.
inline std::vector<Range> chunks(Range r, count_t tile)
{
    std::vector<Range> out;
    for (count_t s = r.lo; s < r.hi; s += tile) out.push_back({s, std::min(r.hi, s + tile)});
    return out;
}

/// Set of tensor elements touched within one scope. Inputs are measured as
/// a window: distinct channels times the row span times the column span.
class Touched {
public:
    explicit Touched(const LayerShape& l)
        : layer_(l)
        , weight_(static_cast<std::size_t>(l.K * l.C * l.R * l.S), 0)
        , output_(static_cast<std::size_t>(l.K * l.Y * l.X), 0)
        , channel_(static_cast<std::size_t>(l.C), 0)
    {
    }

    void begin()
    {
        ++stamp_;
        words_ = {};
        channels_ = 0;
        row_lo_ = col_lo_ = std::numeric_limits<count_t>::max();
        row_hi_ = col_hi_ = -1;
        macs_ = 0;
    }

    void touch(count_t k, count_t c, count_t y, count_t x, count_t r, count_t s)
    {
        ++macs_;
        auto w = static_cast<std::size_t>(((k * layer_.C + c) * layer_.R + r) * layer_.S + s);
        if (weight_[w] != stamp_) {
            weight_[w] = stamp_;
            ++words_.weight;
        }
        auto o = static_cast<std::size_t>((k * layer_.Y + y) * layer_.X + x);
        if (output_[o] != stamp_) {
            output_[o] = stamp_;
            ++words_.output;
        }
        if (channel_[static_cast<std::size_t>(c)] != stamp_) {
            channel_[static_cast<std::size_t>(c)] = stamp_;
            ++channels_;
        }
        count_t row = y * layer_.stride + r;
        count_t col = x * layer_.stride + s;
        row_lo_ = std::min(row_lo_, row);
        row_hi_ = std::max(row_hi_, row);
        col_lo_ = std::min(col_lo_, col);
        col_hi_ = std::max(col_hi_, col);
    }

    TensorWords words() const
    {
        TensorWords w = words_;
        w.input = macs_ == 0 ? 0 : channels_ * (row_hi_ - row_lo_ + 1) * (col_hi_ - col_lo_ + 1);
        return w;
    }

    count_t macs() const { return macs_; }

private:
    const LayerShape& layer_;
    std::vector<count_t> weight_;
    std::vector<count_t> output_;
    std::vector<count_t> channel_;
    count_t stamp_ = 0;
    TensorWords words_;
    count_t channels_ = 0;
    count_t row_lo_ = 0, row_hi_ = 0, col_lo_ = 0, col_hi_ = 0;
    count_t macs_ = 0;
};

template <typename Fn>
void for_each_mac(const Box& b, Fn&& fn)
{
    for (count_t k = b[Dim::K].lo; k < b[Dim::K].hi; ++k)
        for (count_t c = b[Dim::C].lo; c < b[Dim::C].hi; ++c)
            for (count_t y = b[Dim::Y].lo; y < b[Dim::Y].hi; ++y)
                for (count_t x = b[Dim::X].lo; x < b[Dim::X].hi; ++x)
                    for (count_t r = b[Dim::R].lo; r < b[Dim::R].hi; ++r)
                        for (count_t s = b[Dim::S].lo; s < b[Dim::S].hi; ++s) fn(k, c, y, x, r, s);
}

/// Visits every index tuple of a loop nest, `order[0]` outermost.
template <typename Fn>
void for_each_iteration(const DimOrder& order, const DimMap<count_t>& trips, Fn&& fn)
{
    for (Dim d : kAllDims)
        if (trips[d] == 0) return;
    DimMap<count_t> idx{};
    while (true) {
        fn(static_cast<const DimMap<count_t>&>(idx));
        int level = kNumDims - 1;
        for (; level >= 0; --level) {
            Dim d = order[static_cast<std::size_t>(level)];
            if (++idx[d] < trips[d]) break;
            idx[d] = 0;
        }
        if (level < 0) return;
    }
}

/// Identity of the tile a tensor occupies: the loop indices of its relevant
/// dims, at one or two levels. Irrelevant dims are blanked.
using TileKey = std::array<count_t, 2 * kNumDims>;

inline TileKey make_key(Tensor t, const DimMap<count_t>& outer, const DimMap<count_t>* inner)
{
    TileKey key;
    key.fill(-1);
    for (Dim d : kAllDims) {
        if (!is_relevant(t, d)) continue;
        key[static_cast<std::size_t>(index_of(d))] = outer[d];
        if (inner) key[static_cast<std::size_t>(kNumDims + index_of(d))] = (*inner)[d];
    }
    return key;
}

inline void add_words(TensorTraffic& tr, Tensor t, count_t w)
{
    switch (t) {
    case Tensor::Weight: tr.weight += w; break;
    case Tensor::Input: tr.input += w; break;
    case Tensor::Output: tr.output += w; break;
    }
}

inline void keep_max(TensorWords& acc, const TensorWords& w)
{
    acc.weight = std::max(acc.weight, w.weight);
    acc.input = std::max(acc.input, w.input);
    acc.output = std::max(acc.output, w.output);
}

} // namespace oracle_detail

/// Executes one layer's mapping on a pi_l1 x pi_l2 array. Counts cycles as the
/// slowest PE of each step, tile fetches whenever a buffer's tile identity
/// changes (first access included), and the largest live footprint per level.
inline ExactCounts oracle_simulate(const MappingChromosome& m, const LayerShape& layer, count_t pi_l1, count_t pi_l2)
{
    using namespace oracle_detail;
    if (total_macs(layer) > kOracleMacCap)
        throw OracleCapExceeded("layer '" + layer.name + "' has " + std::to_string(total_macs(layer)) +
                                " MACs, above the interpreter cap");

    const Dim p2 = m.l2.parallel_dim;
    const Dim p1 = m.l1.parallel_dim;

    DimMap<std::vector<Range>> l2_tiles;
    DimMap<count_t> l2_trips;
    for (Dim d : kAllDims) {
        l2_tiles[d] = chunks({0, layer.extent(d)}, m.l2.tiles[d]);
        l2_trips[d] = static_cast<count_t>(l2_tiles[d].size());
    }

    ExactCounts out;
    Touched l2_scope(layer), array_scope(layer), pe_scope(layer);

    std::array<std::optional<TileKey>, 3> dram_last;
    std::vector<std::array<std::optional<TileKey>, 3>> array_last(static_cast<std::size_t>(pi_l2));

    for_each_iteration(m.l2.order, l2_trips, [&](const DimMap<count_t>& o) {
        Box box2;
        for (Dim d : kAllDims) box2[d] = l2_tiles[d][static_cast<std::size_t>(o[d])];

        l2_scope.begin();
        for_each_mac(box2, [&](auto... i) { l2_scope.touch(i...); });
        const TensorWords l2_words = l2_scope.words();
        keep_max(out.live_l2, l2_words);
        out.max_live_l2_words = std::max(out.max_live_l2_words, l2_words.total());
        for (Tensor t : kAllTensors) {
            TileKey key = make_key(t, o, nullptr);
            if (dram_last[static_cast<std::size_t>(t)] != key) {
                dram_last[static_cast<std::size_t>(t)] = key;
                add_words(out.dram, t, l2_words.of(t));
            }
        }

        DimMap<std::vector<Range>> l1_tiles;
        DimMap<count_t> trips;
        for (Dim d : kAllDims) {
            l1_tiles[d] = chunks(box2[d], m.l1.tiles[d]);
            trips[d] = static_cast<count_t>(l1_tiles[d].size());
        }
        const count_t subtiles_p2 = trips[p2];
        trips[p2] = 0;
        while (trips[p2] * pi_l2 < subtiles_p2) ++trips[p2];

        for_each_iteration(m.l1.order, trips, [&](const DimMap<count_t>& step) {
            count_t step_cycles = 0;
            std::array<std::map<TileKey, count_t>, 3> fetched;
            std::array<std::vector<std::pair<std::size_t, TileKey>>, 3> updates;

            for (count_t a = 0; a < pi_l2; ++a) {
                DimMap<count_t> sub = step;
                sub[p2] = step[p2] * pi_l2 + a;
                if (sub[p2] >= subtiles_p2) continue;

                Box box1;
                for (Dim d : kAllDims) box1[d] = l1_tiles[d][static_cast<std::size_t>(sub[d])];

                array_scope.begin();
                const count_t slice = (box1[p1].size() + pi_l1 - 1) / pi_l1;
                for (count_t pe = 0; pe < pi_l1; ++pe) {
                    Box pe_box = box1;
                    pe_box[p1].lo = std::min(box1[p1].hi, box1[p1].lo + pe * slice);
                    pe_box[p1].hi = std::min(box1[p1].hi, pe_box[p1].lo + slice);
                    pe_scope.begin();
                    for_each_mac(pe_box, [&](auto... i) {
                        pe_scope.touch(i...);
                        array_scope.touch(i...);
                    });
                    step_cycles = std::max(step_cycles, pe_scope.macs());
                    const TensorWords pw = pe_scope.words();
                    keep_max(out.live_l1, pw);
                    out.max_live_l1_words_per_pe = std::max(out.max_live_l1_words_per_pe, pw.total());
                }

                const TensorWords aw = array_scope.words();
                for (Tensor t : kAllTensors) {
                    TileKey key = make_key(t, o, &sub);
                    auto ti = static_cast<std::size_t>(t);
                    if (array_last[static_cast<std::size_t>(a)][ti] != key) {
                        fetched[ti].emplace(key, aw.of(t));
                        updates[ti].emplace_back(static_cast<std::size_t>(a), key);
                    }
                }
            }

            for (Tensor t : kAllTensors) {
                auto ti = static_cast<std::size_t>(t);
                for (const auto& [key, words] : fetched[ti]) add_words(out.l2, t, words);
                if (is_relevant(t, p2)) {
                    for (const auto& [a, key] : updates[ti]) array_last[a][ti] = key;
                } else if (!updates[ti].empty()) {
                    // multicast fills every array's buffer
                    for (auto& last : array_last) last[ti] = updates[ti].front().second;
                }
            }
            out.cycles += step_cycles;
        });
    });

    out.dram.output_writeback = out.dram.output;
    out.l2.output_writeback = out.l2.output;
    out.dram_words = out.dram.total();
    out.l2_words = out.l2.total();
    return out;
}

inline ExactCounts oracle_simulate(const AcceleratorDesign& design, const Model& model, std::size_t layer_index)
{
    return oracle_simulate(design.mappings.at(layer_index), model.layers.at(layer_index), design.pe_rows,
                           design.pe_cols);
}

} // namespace mapforge
