// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace mapforge {

/// The six loop dimensions of a convolution: output channels, input channels,
/// output rows, output cols, filter rows, filter cols.
enum class Dim : int { K = 0, C, Y, X, R, S };

inline constexpr int kNumDims = 6;
inline constexpr std::array<Dim, kNumDims> kAllDims{Dim::K, Dim::C, Dim::Y, Dim::X, Dim::R, Dim::S};

constexpr int index_of(Dim d) { return static_cast<int>(d); }

constexpr char dim_letter(Dim d) { return "KCYXRS"[index_of(d)]; }

constexpr std::optional<Dim> dim_from_letter(char c)
{
    for (Dim d : kAllDims)
        if (dim_letter(d) == c) return d;
    return std::nullopt;
}

/// Fixed-size map indexed by Dim.
template <typename T>
struct DimMap {
    std::array<T, kNumDims> values{};

    constexpr T& operator[](Dim d) { return values[index_of(d)]; }
    constexpr const T& operator[](Dim d) const { return values[index_of(d)]; }

    friend constexpr bool operator==(const DimMap&, const DimMap&) = default;
};

enum class Tensor : int { Weight = 0, Input, Output };

inline constexpr std::array<Tensor, 3> kAllTensors{Tensor::Weight, Tensor::Input, Tensor::Output};

constexpr std::string_view tensor_name(Tensor t)
{
    switch (t) {
    case Tensor::Weight: return "weight";
    case Tensor::Input: return "input";
    case Tensor::Output: return "output";
    }
    return "?";
}

/// W:{K,C,R,S}  I:{C,Y,X,R,S}  O:{K,Y,X}
constexpr bool is_relevant(Tensor t, Dim d)
{
    switch (t) {
    case Tensor::Weight: return d == Dim::K || d == Dim::C || d == Dim::R || d == Dim::S;
    case Tensor::Input: return d != Dim::K;
    case Tensor::Output: return d == Dim::K || d == Dim::Y || d == Dim::X;
    }
    return false;
}

} // namespace mapforge
