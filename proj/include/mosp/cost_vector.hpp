#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>

namespace mosp {

/// Attribute positions in the default three-attribute cost model.
enum Attribute : std::size_t { kLoss = 0, kLatency = 1, kJitter = 2 };

inline constexpr std::size_t kDefaultAttributes = 3;

/// Fixed-length vector of non-negative additive costs, one per attribute.
///
/// Used both for single edges and for whole routes. Comparison operators
/// are lexicographic; Pareto dominance lives in pareto.hpp.
template <std::size_t J>
struct BasicCostVector {
    static_assert(J >= 1, "at least one cost attribute is required");

    std::array<double, J> values{};

    static constexpr std::size_t size() noexcept { return J; }

    static constexpr BasicCostVector zero() noexcept { return {}; }

    static constexpr BasicCostVector infinity() noexcept {
        BasicCostVector c;
        c.values.fill(std::numeric_limits<double>::infinity());
        return c;
    }

    constexpr double& operator[](std::size_t j) noexcept { return values[j]; }
    constexpr const double& operator[](std::size_t j) const noexcept { return values[j]; }

    auto begin() noexcept { return values.begin(); }
    auto end() noexcept { return values.end(); }
    auto begin() const noexcept { return values.begin(); }
    auto end() const noexcept { return values.end(); }

    bool is_finite() const noexcept {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }

    /// Finite and non-negative in every component.
    bool is_valid() const noexcept {
        for (double v : values)
            if (!std::isfinite(v) || v < 0.0) return false;
        return true;
    }

    BasicCostVector& operator+=(const BasicCostVector& rhs) noexcept {
        for (std::size_t j = 0; j < J; ++j) values[j] += rhs.values[j];
        return *this;
    }

    friend BasicCostVector operator+(BasicCostVector lhs, const BasicCostVector& rhs) noexcept {
        lhs += rhs;
        return lhs;
    }

    friend bool operator==(const BasicCostVector&, const BasicCostVector&) = default;
    friend auto operator<=>(const BasicCostVector&, const BasicCostVector&) = default;
};

using CostVector = BasicCostVector<kDefaultAttributes>;

}  // namespace mosp
