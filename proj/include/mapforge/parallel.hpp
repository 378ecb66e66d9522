// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace mapforge {

/// out[i] = fn(i) for i in [0, n), split into contiguous blocks over up to
/// `threads` workers. Results land by index, so they do not depend on the
/// thread count.
template <typename Fn>
auto parallel_map(std::size_t n, unsigned threads, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))>
{
    using R = decltype(fn(std::size_t{}));
    std::vector<R> out(n);
    const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        const std::size_t block = (n + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w * block; i < std::min(n, (w + 1) * block); ++i) out[i] = fn(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

} // namespace mapforge
