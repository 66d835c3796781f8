#pragma once

#include "fracflood/dual.hpp"

#include <algorithm>
#include <cstddef>
#include <span>
#include <type_traits>

namespace fracflood {

/// Bracketing segment for a clamped piecewise-linear lookup.
struct Bracket {
    std::size_t lo = 0;   // left node
    double weight = 0.0;  // fraction toward lo + 1
    double inv_width = 0; // 1/(x[lo+1]-x[lo]); zero when clamped
};

/// Locates x in strictly increasing nodes. Outside the range the lookup clamps
/// to the end node and the returned slope factor is zero.
inline Bracket locate(std::span<const double> nodes, double x)
{
    Bracket b;
    const std::size_t n = nodes.size();
    if (n < 2 || x <= nodes.front()) {
        b.lo = 0;
        b.weight = 0.0;
        b.inv_width = (n >= 2 && x == nodes.front()) ? 1.0 / (nodes[1] - nodes[0]) : 0.0;
        return b;
    }
    if (x >= nodes.back()) {
        b.lo = n - 2;
        b.weight = 1.0;
        b.inv_width = 0.0;
        return b;
    }
    auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    b.lo = static_cast<std::size_t>(it - nodes.begin()) - 1;
    b.inv_width = 1.0 / (nodes[b.lo + 1] - nodes[b.lo]);
    b.weight = (x - nodes[b.lo]) * b.inv_width;
    return b;
}

/// Clamped linear interpolation of `values` over `nodes` evaluated at x (plain or dual).
template <class T>
T interpolate(std::span<const double> nodes, std::span<const double> values, const T& x)
{
    const Bracket b = locate(nodes, value_of(x));
    if (values.size() < 2) return T(values.empty() ? 0.0 : values.front());
    const double y0 = values[b.lo];
    const double y1 = values[b.lo + 1];
    const double y = y0 + b.weight * (y1 - y0);
    if constexpr (std::is_same_v<T, double>) {
        return y;
    } else {
        const double slope = (y1 - y0) * b.inv_width;
        T r = x * slope;
        r.v = y;
        return r;
    }
}

} // namespace fracflood
