#pragma once

// Small single-layer configurations for checking the analytical model
// against the loop-nest interpreter.

#include <string>
#include <vector>

#include <mapforge/costmodel.hpp>
#include <mapforge/oracle.hpp>

namespace mapforge::testing {

struct OracleCase {
    LayerShape layer;
    MappingChromosome mapping;
    count_t pi_l1 = 1;
    count_t pi_l2 = 1;
};

inline std::vector<count_t> divisors(count_t n)
{
    std::vector<count_t> out;
    for (count_t d = 1; d <= n; ++d)
        if (n % d == 0) out.push_back(d);
    return out;
}

/// Every tile divides its parent and the L2 parallel loop splits evenly over
/// the arrays (or fits in one pass).
inline bool is_divisible(const OracleCase& c)
{
    const auto& m = c.mapping;
    for (Dim d : kAllDims) {
        if (c.layer.extent(d) % m.l2.tiles[d] != 0) return false;
        if (m.l2.tiles[d] % m.l1.tiles[d] != 0) return false;
    }
    const count_t n_p2 = m.l2.tiles[m.l2.parallel_dim] / m.l1.tiles[m.l2.parallel_dim];
    return n_p2 % c.pi_l2 == 0 || c.pi_l2 >= n_p2;
}

inline OracleCase random_case(Rng& rng, bool divisible_tiles)
{
    OracleCase c;
    c.layer = LayerShape{"t",
                         uniform_count(1, 6, rng),
                         uniform_count(1, 6, rng),
                         uniform_count(1, 6, rng),
                         uniform_count(1, 6, rng),
                         uniform_count(1, 3, rng),
                         uniform_count(1, 3, rng),
                         uniform_count(1, 2, rng)};
    const std::vector<count_t> pis{1, 2, 4};
    c.pi_l1 = pick(pis, rng);
    c.pi_l2 = pick(pis, rng);
    auto& m = c.mapping;
    m.l1.pi = c.pi_l1;
    m.l2.pi = c.pi_l2;
    m.l1.parallel_dim = random_dim(rng);
    m.l2.parallel_dim = random_dim(rng);
    m.l1.order = random_order(rng);
    m.l2.order = random_order(rng);
    for (Dim d : kAllDims) {
        const count_t n = c.layer.extent(d);
        if (divisible_tiles) {
            m.l2.tiles[d] = pick(divisors(n), rng);
            m.l1.tiles[d] = pick(divisors(m.l2.tiles[d]), rng);
        } else {
            m.l2.tiles[d] = uniform_count(1, n, rng);
            m.l1.tiles[d] = uniform_count(1, m.l2.tiles[d], rng);
        }
    }
    return c;
}

inline std::vector<OracleCase> divisible_cases(std::size_t n, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<OracleCase> out;
    while (out.size() < n) {
        auto c = random_case(rng, true);
        if (is_divisible(c)) out.push_back(c);
    }
    return out;
}

/// Cases where at least one tile leaves a clipped edge tile.
inline std::vector<OracleCase> nondivisible_cases(std::size_t n, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<OracleCase> out;
    while (out.size() < n) {
        auto c = random_case(rng, false);
        bool ragged = false;
        for (Dim d : kAllDims)
            ragged = ragged || c.layer.extent(d) % c.mapping.l2.tiles[d] != 0 ||
                     c.mapping.l2.tiles[d] % c.mapping.l1.tiles[d] != 0;
        if (ragged) out.push_back(c);
    }
    return out;
}

struct ModelCounts {
    count_t cycles;
    TensorTraffic dram;
    TensorTraffic l2;
    BufferReq buffer;
};

inline ModelCounts analytical(const OracleCase& c)
{
    return {compute_cycles(c.mapping, c.layer, c.pi_l1, c.pi_l2),
            boundary_traffic(Boundary::Dram, c.mapping, c.layer, c.pi_l2),
            boundary_traffic(Boundary::L2, c.mapping, c.layer, c.pi_l2),
            min_buffer_requirement(c.mapping, c.layer, c.pi_l1)};
}

/// Empty when the model matches the interpreter exactly.
inline std::string exact_mismatch(const ModelCounts& a, const ExactCounts& e)
{
    std::string out;
    auto check = [&](const char* what, count_t model, count_t oracle) {
        if (model != oracle)
            out += std::string(what) + " model " + std::to_string(model) + " oracle " + std::to_string(oracle) + "; ";
    };
    check("cycles", a.cycles, e.cycles);
    check("dram_words", a.dram.total(), e.dram_words);
    check("l2_words", a.l2.total(), e.l2_words);
    for (Tensor t : kAllTensors) {
        check("dram tensor", a.dram.of(t), e.dram.of(t));
        check("l2 tensor", a.l2.of(t), e.l2.of(t));
    }
    check("l1 buffer", a.buffer.l1.total(), e.max_live_l1_words_per_pe);
    check("l2 buffer", a.buffer.l2.total(), e.max_live_l2_words);
    return out;
}

/// Empty when every analytical count is at least the interpreter's.
inline std::string bound_violation(const ModelCounts& a, const ExactCounts& e)
{
    std::string out;
    auto check = [&](const char* what, count_t model, count_t oracle) {
        if (model < oracle)
            out += std::string(what) + " model " + std::to_string(model) + " < oracle " + std::to_string(oracle) + "; ";
    };
    check("cycles", a.cycles, e.cycles);
    check("dram_words", a.dram.total(), e.dram_words);
    check("l2_words", a.l2.total(), e.l2_words);
    check("l1 buffer", a.buffer.l1.total(), e.max_live_l1_words_per_pe);
    check("l2 buffer", a.buffer.l2.total(), e.max_live_l2_words);
    return out;
}

} // namespace mapforge::testing
