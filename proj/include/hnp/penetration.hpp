#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hnp/env.hpp"
#include "hnp/error.hpp"
#include "hnp/grid.hpp"

namespace hnp {

enum class WeightMode {
    center_multilinear,
    corner_box,
};

inline const char* to_string(WeightMode m) {
    return m == WeightMode::center_multilinear ? "center-multilinear" : "corner-box";
}

/// Penetration weights of a displaced tile over its neighbours.
///
/// In corner-box mode `attribution[i]` is the index of the corner outcome
/// whose reward is charged to `entries[i]`; it is empty in
/// center-multilinear mode.
struct PenetrationWeights {
    std::vector<TileWeight> entries;
    WeightMode mode = WeightMode::center_multilinear;
    std::vector<std::size_t> attribution;

    double total() const {
        double s = 0.0;
        for (const auto& e : entries) s += e.weight;
        return s;
    }

    double weight_of(std::size_t tile) const {
        for (const auto& e : entries)
            if (e.tile == tile) return e.weight;
        return 0.0;
    }
};

/// A vertex of a source tile pushed through one transition.
struct CornerOutcome {
    Vec corner;
    Vec image;
    double reward = 0.0;
    bool terminal = false;
};

namespace detail {

struct AxisSplit {
    std::size_t lower;
    double delta; // share of the upper neighbour, in [0, 1)
};

/// Position of x between the two nearest tile centers on one axis. Positions
/// beyond the first or last center fold onto that boundary tile.
inline AxisSplit axis_split(const Grid& grid, std::size_t axis, double x) {
    const std::size_t n = grid.count(axis);
    const double w = grid.width(axis);
    if (n == 1 || x <= grid.axis_center(axis, 0)) return {0, 0.0};
    if (x >= grid.axis_center(axis, n - 1)) return {n - 1, 0.0};

    const double u = (x - grid.origin(axis)) / w - 0.5;
    auto i = static_cast<std::size_t>(std::clamp(std::floor(u), 0.0, static_cast<double>(n - 2)));
    double delta = (x - grid.axis_center(axis, i)) / w;
    if (delta < 0.0 && i > 0) delta = (x - grid.axis_center(axis, --i)) / w;
    if (delta >= 1.0 && i + 1 < n) delta = (x - grid.axis_center(axis, ++i)) / w;

    // Rounding noise around an exact center must not split the mass.
    const double tol = 16.0 * DBL_EPSILON * std::max(1.0, (std::abs(x) + std::abs(grid.origin(axis))) / w);
    if (delta <= tol) return {i, 0.0};
    if (1.0 - delta <= tol) return {i + 1, 0.0};
    return {i, delta};
}

} // namespace detail

/// Multilinear weights for a tile displaced so that its center sits at
/// `displaced_center`: along each axis the mass splits (1 - d, d) between
/// the two nearest tile centers, and the n-D weights are the tensor product.
inline PenetrationWeights center_weights(const Grid& grid, std::span<const double> displaced_center) {
    const std::size_t n = grid.dims();
    if (displaced_center.size() != n) detail::fail_validation("center_weights: point has wrong dimension");
    std::vector<detail::AxisSplit> splits(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (!std::isfinite(displaced_center[k])) detail::fail_validation("center_weights: non-finite input");
        splits[k] = detail::axis_split(grid, k, displaced_center[k]);
    }

    PenetrationWeights out;
    out.mode = WeightMode::center_multilinear;
    std::size_t base = 0;
    std::vector<std::size_t> active;
    for (std::size_t k = 0; k < n; ++k) {
        base += splits[k].lower * grid.stride(k);
        if (splits[k].delta > 0.0) active.push_back(k);
    }
    const std::size_t combos = std::size_t{1} << active.size();
    out.entries.reserve(combos);
    for (std::size_t m = 0; m < combos; ++m) {
        double w = 1.0;
        std::size_t f = base;
        for (std::size_t b = 0; b < active.size(); ++b) {
            const std::size_t k = active[b];
            if (m & (std::size_t{1} << b)) {
                w *= splits[k].delta;
                f += grid.stride(k);
            } else {
                w *= 1.0 - splits[k].delta;
            }
        }
        if (w > 0.0) out.entries.push_back({f, w});
    }
    return out;
}

/// Pushes all 2^n vertices of `src` through `action`. Vertex m takes the
/// upper bound on axis k when bit k of m is set.
inline std::vector<CornerOutcome> corner_outcomes(const Grid& grid, const TileIndex& src, const EnvModel& env,
                                                  ActionId action) {
    const Box bounds = tile_bounds(grid, src);
    const std::size_t n = grid.dims();
    const std::size_t corners = std::size_t{1} << n;
    std::vector<CornerOutcome> out;
    out.reserve(corners);
    for (std::size_t m = 0; m < corners; ++m) {
        CornerOutcome c;
        c.corner.resize(n);
        for (std::size_t k = 0; k < n; ++k) c.corner[k] = (m >> k) & 1U ? bounds.hi[k] : bounds.lo[k];
        Outcome o = step(env, c.corner, action);
        c.image = std::move(o.next_state);
        c.reward = o.reward;
        c.terminal = o.terminal;
        out.push_back(std::move(c));
    }
    return out;
}

/// Overlap weights of the box spanned by the corner images. Each overlap
/// tile is attributed to the corner whose image lies nearest to the center
/// of that overlap piece.
inline PenetrationWeights corner_box_weights(const Grid& grid, const std::vector<CornerOutcome>& outcomes) {
    const std::size_t n = grid.dims();
    if (outcomes.empty()) detail::fail_validation("corner_box_weights: no corner outcomes");

    Box region{Vec(n, std::numeric_limits<double>::infinity()), Vec(n, -std::numeric_limits<double>::infinity())};
    for (const auto& o : outcomes) {
        if (o.image.size() != n) detail::fail_validation("corner_box_weights: image has wrong dimension");
        for (std::size_t k = 0; k < n; ++k) {
            if (!std::isfinite(o.image[k])) detail::fail_validation("corner_box_weights: non-finite image");
            region.lo[k] = std::min(region.lo[k], o.image[k]);
            region.hi[k] = std::max(region.hi[k], o.image[k]);
        }
    }
    for (std::size_t k = 0; k < n; ++k)
        if (!(region.hi[k] > region.lo[k]))
            detail::fail_compute("corner_box_weights: corner images collapse on axis " + std::to_string(k) +
                                 "; the transition is not locally linear over this tile");

    std::vector<std::vector<detail::AxisOverlap>> axes(n);
    for (std::size_t k = 0; k < n; ++k) axes[k] = detail::axis_overlaps(grid, k, region.lo[k], region.hi[k]);

    PenetrationWeights out;
    out.mode = WeightMode::corner_box;
    Vec piece_center(n);
    detail::for_each_product(axes, [&](const std::vector<std::size_t>& pick) {
        double w = 1.0;
        std::size_t f = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const auto& ax = axes[k][pick[k]];
            w *= ax.fraction;
            f += ax.coord * grid.stride(k);
            piece_center[k] = 0.5 * (ax.lo + ax.hi);
        }
        if (!(w > 0.0)) return;
        std::size_t nearest = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < outcomes.size(); ++c) {
            double d = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double t = outcomes[c].image[k] - piece_center[k];
                d += t * t;
            }
            if (d < best) {
                best = d;
                nearest = c;
            }
        }
        out.entries.push_back({f, w});
        out.attribution.push_back(nearest);
    });
    return out;
}

} // namespace hnp
