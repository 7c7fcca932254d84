#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hnp/error.hpp"

namespace hnp {

using Vec = std::vector<double>;

/// Per-axis tile coordinates. Axis 0 varies fastest in the flat layout.
struct TileIndex {
    std::vector<std::size_t> coords;

    friend bool operator==(const TileIndex&, const TileIndex&) = default;
    friend auto operator<=>(const TileIndex&, const TileIndex&) = default;
};

/// Axis-aligned box. Zero-width axes are allowed.
struct Box {
    Vec lo;
    Vec hi;

    std::size_t dims() const { return lo.size(); }

    double volume() const {
        double v = 1.0;
        for (std::size_t k = 0; k < lo.size(); ++k) v *= hi[k] - lo[k];
        return v;
    }

    /// Closed containment test.
    bool contains(std::span<const double> p) const {
        for (std::size_t k = 0; k < lo.size(); ++k)
            if (p[k] < lo[k] || p[k] > hi[k]) return false;
        return true;
    }
};

struct TerminalTile {
    TileIndex index;
    double value = 0.0;
};

struct GridSpec {
    std::size_t dims = 0;
    Vec origin;
    Vec widths;
    std::vector<std::size_t> counts;
    std::vector<TerminalTile> terminal_tiles;
};

/// Flat tile id paired with a mixing weight.
struct TileWeight {
    std::size_t tile = 0;
    double weight = 0.0;

    friend bool operator==(const TileWeight&, const TileWeight&) = default;
};

struct Located {
    TileIndex index;
    std::size_t flat = 0;
    bool clamped = false;
};

/// Upper bound on the number of tiles a grid may hold.
inline constexpr std::size_t max_tiles = std::size_t{1} << 32;

/// Validated, immutable discretization of an n-D box into hyperrectangular
/// tiles. Tile j on axis k covers [edge(k, j), edge(k, j + 1)).
class Grid {
public:
    explicit Grid(GridSpec spec) : spec_(std::move(spec)) {
        const std::size_t n = spec_.dims;
        if (n == 0) detail::fail_validation("grid: dims must be positive");
        if (spec_.origin.size() != n) detail::fail_validation("grid: origin has wrong length");
        if (spec_.widths.size() != n) detail::fail_validation("grid: widths has wrong length");
        if (spec_.counts.size() != n) detail::fail_validation("grid: counts has wrong length");

        strides_.resize(n);
        edges_.resize(n);
        size_ = 1;
        for (std::size_t k = 0; k < n; ++k) {
            const double w = spec_.widths[k];
            if (!std::isfinite(spec_.origin[k]))
                detail::fail_validation("grid: origin[" + std::to_string(k) + "] is not finite");
            if (!(w > 0.0) || !std::isfinite(w))
                detail::fail_validation("grid: widths[" + std::to_string(k) + "] must be positive and finite");
            if (spec_.counts[k] == 0)
                detail::fail_validation("grid: counts[" + std::to_string(k) + "] must be at least 1");
            strides_[k] = size_;
            std::size_t next = 0;
            if (__builtin_mul_overflow(size_, spec_.counts[k], &next) || next > max_tiles)
                detail::fail_validation("grid: total tile count overflows the tile limit");
            size_ = next;

            auto& e = edges_[k];
            e.resize(spec_.counts[k] + 1);
            for (std::size_t j = 0; j <= spec_.counts[k]; ++j)
                e[j] = spec_.origin[k] + static_cast<double>(j) * w;
        }

        frozen_.assign(size_, 0);
        frozen_values_.assign(size_, 0.0);
        for (const auto& t : spec_.terminal_tiles) {
            if (!valid(t.index)) detail::fail_validation("grid: terminal tile index out of range");
            if (!std::isfinite(t.value)) detail::fail_validation("grid: terminal tile value is not finite");
            const std::size_t f = flat(t.index);
            if (frozen_[f]) detail::fail_validation("grid: terminal tile listed twice");
            frozen_[f] = 1;
            frozen_values_[f] = t.value;
            ++terminal_count_;
        }
    }

    const GridSpec& spec() const { return spec_; }
    std::size_t dims() const { return spec_.dims; }
    std::size_t size() const { return size_; }
    std::size_t count(std::size_t axis) const { return spec_.counts[axis]; }
    double width(std::size_t axis) const { return spec_.widths[axis]; }
    double origin(std::size_t axis) const { return spec_.origin[axis]; }
    double edge(std::size_t axis, std::size_t j) const { return edges_[axis][j]; }
    std::span<const double> edges(std::size_t axis) const { return edges_[axis]; }

    std::size_t terminal_count() const { return terminal_count_; }
    std::size_t nonterminal_count() const { return size_ - terminal_count_; }
    bool is_terminal(std::size_t flat_index) const { return frozen_[flat_index] != 0; }
    double terminal_value(std::size_t flat_index) const { return frozen_values_[flat_index]; }

    bool valid(const TileIndex& idx) const {
        if (idx.coords.size() != dims()) return false;
        for (std::size_t k = 0; k < dims(); ++k)
            if (idx.coords[k] >= spec_.counts[k]) return false;
        return true;
    }

    std::size_t flat(const TileIndex& idx) const {
        if (!valid(idx)) throw std::out_of_range("grid: tile index out of range");
        std::size_t f = 0;
        for (std::size_t k = 0; k < dims(); ++k) f += idx.coords[k] * strides_[k];
        return f;
    }

    TileIndex unflat(std::size_t f) const {
        if (f >= size_) throw std::out_of_range("grid: flat tile index out of range");
        TileIndex idx;
        idx.coords.resize(dims());
        for (std::size_t k = 0; k < dims(); ++k) {
            idx.coords[k] = f % spec_.counts[k];
            f /= spec_.counts[k];
        }
        return idx;
    }

    std::size_t stride(std::size_t axis) const { return strides_[axis]; }

    /// Tile coordinate along one axis under the half-open convention; values
    /// outside the gridded range are clamped.
    std::size_t axis_locate(std::size_t axis, double x, bool& clamped) const {
        const auto& e = edges_[axis];
        const std::size_t n = spec_.counts[axis];
        if (x < e.front()) {
            clamped = true;
            return 0;
        }
        if (x >= e.back()) {
            clamped = true;
            return n - 1;
        }
        const double u = std::floor((x - spec_.origin[axis]) / spec_.widths[axis]);
        auto j = static_cast<std::size_t>(std::clamp(u, 0.0, static_cast<double>(n - 1)));
        // the edge table is authoritative at exact boundaries
        while (j > 0 && x < e[j]) --j;
        while (j + 1 < n && x >= e[j + 1]) ++j;
        return j;
    }

    double axis_center(std::size_t axis, std::size_t j) const {
        return spec_.origin[axis] + (static_cast<double>(j) + 0.5) * spec_.widths[axis];
    }

private:
    GridSpec spec_;
    std::vector<Vec> edges_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 0;
    std::vector<char> frozen_;
    Vec frozen_values_;
    std::size_t terminal_count_ = 0;
};

inline Grid build_grid(GridSpec spec) { return Grid(std::move(spec)); }

inline Located locate(const Grid& grid, std::span<const double> point) {
    if (point.size() != grid.dims()) detail::fail_validation("locate: point has wrong dimension");
    Located out;
    out.index.coords.resize(grid.dims());
    for (std::size_t k = 0; k < grid.dims(); ++k) {
        if (!std::isfinite(point[k])) detail::fail_validation("locate: non-finite coordinate");
        out.index.coords[k] = grid.axis_locate(k, point[k], out.clamped);
        out.flat += out.index.coords[k] * grid.stride(k);
    }
    return out;
}

inline Vec tile_center(const Grid& grid, const TileIndex& idx) {
    if (!grid.valid(idx)) throw std::out_of_range("tile_center: tile index out of range");
    Vec c(grid.dims());
    for (std::size_t k = 0; k < grid.dims(); ++k) c[k] = grid.axis_center(k, idx.coords[k]);
    return c;
}

inline Box tile_bounds(const Grid& grid, const TileIndex& idx) {
    if (!grid.valid(idx)) throw std::out_of_range("tile_bounds: tile index out of range");
    Box b;
    b.lo.resize(grid.dims());
    b.hi.resize(grid.dims());
    for (std::size_t k = 0; k < grid.dims(); ++k) {
        b.lo[k] = grid.edge(k, idx.coords[k]);
        b.hi[k] = grid.edge(k, idx.coords[k] + 1);
    }
    return b;
}

namespace detail {

/// One axis of a region's overlap with the tiles: tile coordinate, overlap
/// fraction and the overlapping sub-interval.
struct AxisOverlap {
    std::size_t coord;
    double fraction;
    double lo;
    double hi;
};

/// Boundary tiles extend to infinity, so the fractions always sum to 1.
inline std::vector<AxisOverlap> axis_overlaps(const Grid& grid, std::size_t axis, double lo, double hi) {
    std::vector<AxisOverlap> out;
    const double len = hi - lo;
    bool ignored = false;
    const std::size_t first = grid.axis_locate(axis, lo, ignored);
    const std::size_t last = grid.axis_locate(axis, hi, ignored);
    const std::size_t n = grid.count(axis);
    for (std::size_t j = first; j <= last; ++j) {
        const double tlo = j == 0 ? -std::numeric_limits<double>::infinity() : grid.edge(axis, j);
        const double thi = j + 1 == n ? std::numeric_limits<double>::infinity() : grid.edge(axis, j + 1);
        const double a = std::max(lo, tlo);
        const double b = std::min(hi, thi);
        if (b > a) out.push_back({j, (b - a) / len, a, b});
    }
    return out;
}

template <typename Fn>
void for_each_product(const std::vector<std::vector<AxisOverlap>>& axes, Fn&& fn) {
    const std::size_t n = axes.size();
    std::vector<std::size_t> pick(n, 0);
    while (true) {
        fn(pick);
        std::size_t k = 0;
        while (k < n && ++pick[k] == axes[k].size()) pick[k++] = 0;
        if (k == n) return;
    }
}

} // namespace detail

/// Fraction of `region` falling in each tile, as a product of per-axis
/// interval overlaps. Volume outside the grid is charged to the nearest
/// boundary tile.
inline std::vector<TileWeight> overlap_fractions(const Grid& grid, const Box& region) {
    const std::size_t n = grid.dims();
    if (region.lo.size() != n || region.hi.size() != n)
        detail::fail_validation("overlap_fractions: region has wrong dimension");
    std::vector<std::vector<detail::AxisOverlap>> axes(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (!std::isfinite(region.lo[k]) || !std::isfinite(region.hi[k]))
            detail::fail_validation("overlap_fractions: non-finite region bound");
        if (!(region.hi[k] > region.lo[k])) detail::fail_validation("overlap_fractions: zero-volume region");
        axes[k] = detail::axis_overlaps(grid, k, region.lo[k], region.hi[k]);
    }
    std::vector<TileWeight> out;
    detail::for_each_product(axes, [&](const std::vector<std::size_t>& pick) {
        double w = 1.0;
        std::size_t f = 0;
        for (std::size_t k = 0; k < n; ++k) {
            w *= axes[k][pick[k]].fraction;
            f += axes[k][pick[k]].coord * grid.stride(k);
        }
        if (w > 0.0) out.push_back({f, w});
    });
    return out;
}

} // namespace hnp
