#include <gtest/gtest.h>

#include <random>

#include "hnp/env.hpp"
#include "hnp/penetration.hpp"

using namespace hnp;

namespace {

Grid unit_grid(std::size_t dims, std::size_t count) {
    return Grid(GridSpec{dims, Vec(dims, 0.0), Vec(dims, 1.0), std::vector<std::size_t>(dims, count), {}});
}

// Affine map s -> diag(signs) * s + shift.
EnvModel reflect_shift_env(std::size_t dims, Vec signs, Vec shift) {
    EnvModel env;
    env.name = "affine";
    env.state_dims = dims;
    env.actions = {"go"};
    env.transition = [signs, shift](std::span<const double> s, ActionId) {
        Vec n(s.size());
        for (std::size_t k = 0; k < s.size(); ++k) n[k] = signs[k] * s[k] + shift[k];
        return n;
    };
    env.reward = [](std::span<const double>, ActionId, std::span<const double>) { return 0.0; };
    env.terminal = [](std::span<const double>) { return false; };
    return env;
}

} // namespace

TEST(CenterWeights, ZeroDisplacementHitsTheSourceTile) {
    const Grid g(GridSpec{2, {-1.0, 0.0}, {0.2, 0.5}, {10, 4}, {}});
    for (std::size_t f = 0; f < g.size(); ++f) {
        const auto w = center_weights(g, tile_center(g, g.unflat(f)));
        ASSERT_EQ(w.entries.size(), 1u) << "tile " << f;
        EXPECT_EQ(w.entries[0].tile, f);
        EXPECT_EQ(w.entries[0].weight, 1.0);
    }
}

TEST(CenterWeights, OneDimensionalClosedForm) {
    const Grid g(GridSpec{1, {0.0}, {0.5}, {8}, {}});
    const double delta = 0.1;
    const Vec x{tile_center(g, TileIndex{{3}})[0] + delta};
    const auto w = center_weights(g, x);
    EXPECT_NEAR(w.weight_of(3), (0.5 - delta) / 0.5, 1e-12);
    EXPECT_NEAR(w.weight_of(4), delta / 0.5, 1e-12);
}

TEST(CenterWeights, TwoDimensionalExample) {
    const Grid g = unit_grid(2, 4);
    const Vec p{1.5 + 0.3, 1.5 + 0.4};
    const auto w = center_weights(g, p);
    EXPECT_NEAR(w.weight_of(g.flat(TileIndex{{1, 1}})), 0.42, 1e-12);
    EXPECT_NEAR(w.weight_of(g.flat(TileIndex{{2, 1}})), 0.18, 1e-12);
    EXPECT_NEAR(w.weight_of(g.flat(TileIndex{{1, 2}})), 0.28, 1e-12);
    EXPECT_NEAR(w.weight_of(g.flat(TileIndex{{2, 2}})), 0.12, 1e-12);

    // same numbers from the overlap of the displaced tile box
    const auto o = overlap_fractions(g, Box{{1.3, 1.4}, {2.3, 2.4}});
    for (const auto& e : o) EXPECT_NEAR(w.weight_of(e.tile), e.weight, 1e-12);
}

TEST(CenterWeights, NegativeDisplacementUsesLowerNeighbour) {
    const Grid g = unit_grid(1, 5);
    const Vec p{2.5 - 0.25};
    const auto w = center_weights(g, p);
    EXPECT_NEAR(w.weight_of(1), 0.25, 1e-12);
    EXPECT_NEAR(w.weight_of(2), 0.75, 1e-12);
}

TEST(CenterWeights, PositionsBeyondOuterCentersFold) {
    const Grid g = unit_grid(1, 3);
    const Vec right{2.9}, far_right{50.0}, left{-4.0};
    EXPECT_DOUBLE_EQ(center_weights(g, right).weight_of(2), 1.0);
    EXPECT_DOUBLE_EQ(center_weights(g, far_right).weight_of(2), 1.0);
    EXPECT_DOUBLE_EQ(center_weights(g, left).weight_of(0), 1.0);
}

TEST(CenterWeights, TensorProductOfAxisWeights) {
    const Grid g(GridSpec{3, {0.0, -1.0, 2.0}, {0.3, 0.7, 1.1}, {6, 5, 4}, {}});
    std::mt19937_64 rng(3);
    for (int t = 0; t < 500; ++t) {
        Vec p(3);
        for (std::size_t k = 0; k < 3; ++k) {
            std::uniform_real_distribution<double> d(g.axis_center(k, 0), g.axis_center(k, g.count(k) - 1));
            p[k] = d(rng);
        }
        const auto w = center_weights(g, p);
        // marginal on each axis from a 1-D grid with the same geometry
        std::array<PenetrationWeights, 3> axis;
        for (std::size_t k = 0; k < 3; ++k) {
            const Grid g1(GridSpec{1, {g.origin(k)}, {g.width(k)}, {g.count(k)}, {}});
            const Vec x{p[k]};
            axis[k] = center_weights(g1, x);
        }
        double total = 0.0;
        for (const auto& e : w.entries) {
            const TileIndex idx = g.unflat(e.tile);
            double expect = 1.0;
            for (std::size_t k = 0; k < 3; ++k) expect *= axis[k].weight_of(idx.coords[k]);
            EXPECT_NEAR(e.weight, expect, 1e-12);
            total += e.weight;
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
}

TEST(CenterWeights, RejectsBadInput) {
    const Grid g = unit_grid(2, 3);
    const Vec short_point{1.0};
    EXPECT_THROW(center_weights(g, short_point), ValidationError);
    const Vec nan_point{1.0, std::nan("")};
    EXPECT_THROW(center_weights(g, nan_point), ValidationError);
}

TEST(CornerBox, CornerOrderFollowsBits) {
    const Grid g = unit_grid(2, 4);
    const auto env = reflect_shift_env(2, {1.0, 1.0}, {0.0, 0.0});
    const auto c = corner_outcomes(g, TileIndex{{1, 2}}, env, 0);
    ASSERT_EQ(c.size(), 4u);
    EXPECT_EQ(c[0].corner, (Vec{1.0, 2.0}));
    EXPECT_EQ(c[1].corner, (Vec{2.0, 2.0}));
    EXPECT_EQ(c[2].corner, (Vec{1.0, 3.0}));
    EXPECT_EQ(c[3].corner, (Vec{2.0, 3.0}));
}

TEST(CornerBox, TranslationMatchesCenterWeights) {
    const Grid g = unit_grid(2, 6);
    const auto env = reflect_shift_env(2, {1.0, 1.0}, {0.3, -0.45});
    const TileIndex src{{2, 3}};
    const auto box = corner_box_weights(g, corner_outcomes(g, src, env, 0));
    Vec moved = tile_center(g, src);
    moved[0] += 0.3;
    moved[1] -= 0.45;
    const auto ctr = center_weights(g, moved);
    EXPECT_EQ(box.mode, WeightMode::corner_box);
    EXPECT_NEAR(box.total(), 1.0, 1e-12);
    for (const auto& e : ctr.entries) EXPECT_NEAR(box.weight_of(e.tile), e.weight, 1e-12);
    for (const auto& e : box.entries) EXPECT_NEAR(ctr.weight_of(e.tile), e.weight, 1e-12);
}

TEST(CornerBox, AttributionPicksNearestCorner) {
    const Grid g = unit_grid(1, 6);
    const auto env = reflect_shift_env(1, {1.0}, {0.25});
    const auto out = corner_outcomes(g, TileIndex{{2}}, env, 0);
    const auto w = corner_box_weights(g, out);
    ASSERT_EQ(w.entries.size(), 2u);
    ASSERT_EQ(w.attribution.size(), 2u);
    // image [2.25, 3.25): piece in tile 2 is nearer the lower corner image
    for (std::size_t i = 0; i < w.entries.size(); ++i)
        EXPECT_EQ(w.attribution[i], w.entries[i].tile == 2 ? 0u : 1u);
}

TEST(CornerBox, CollapsedImageIsAComputeError) {
    const Grid g = unit_grid(2, 4);
    EnvModel env = reflect_shift_env(2, {1.0, 1.0}, {0.0, 0.0});
    env.transition = [](std::span<const double> s, ActionId) { return Vec{s[0], 1.5}; };
    EXPECT_THROW(corner_box_weights(g, corner_outcomes(g, TileIndex{{1, 1}}, env, 0)), ComputeError);
}
