// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mapforge {

using count_t = std::int64_t;

/// Malformed or semantically invalid input (model, platform, genome, config).
/// Maps to CLI exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

constexpr count_t ceil_div(count_t a, count_t b) { return (a + b - 1) / b; }

} // namespace mapforge
