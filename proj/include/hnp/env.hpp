#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hnp/error.hpp"
#include "hnp/grid.hpp"

namespace hnp {

using ActionId = std::size_t;

/// Deterministic MDP over a continuous state space with a finite action set.
/// All callables must be pure.
struct EnvModel {
    std::string name;
    std::size_t state_dims = 0;
    std::vector<std::string> actions;

    std::function<Vec(std::span<const double> state, ActionId action)> transition;
    std::function<double(std::span<const double> state, ActionId action, std::span<const double> next)> reward;
    std::function<bool(std::span<const double> state)> terminal;
    // Value of resting in an absorbing state; used to seed frozen tiles.
    std::function<double(std::span<const double> state)> terminal_value;

    std::size_t action_count() const { return actions.size(); }

    ActionId action_id(std::string_view label) const {
        for (std::size_t a = 0; a < actions.size(); ++a)
            if (actions[a] == label) return a;
        detail::fail_validation("unknown action '" + std::string(label) + "' for environment " + name);
    }
};

struct Outcome {
    Vec next_state;
    double reward = 0.0;
    bool terminal = false;
};

inline Outcome step(const EnvModel& env, std::span<const double> state, ActionId action) {
    if (action >= env.actions.size())
        detail::fail_validation("step: unknown action id " + std::to_string(action) + " for " + env.name);
    if (state.size() != env.state_dims) detail::fail_validation("step: state has wrong dimension");
    Outcome out;
    out.next_state = env.transition(state, action);
    for (double v : out.next_state)
        if (!std::isfinite(v)) detail::fail_compute("step: environment " + env.name + " produced a non-finite state");
    out.reward = env.reward(state, action, out.next_state);
    out.terminal = env.terminal(out.next_state);
    return out;
}

inline Outcome step(const EnvModel& env, std::span<const double> state, std::string_view action) {
    return step(env, state, env.action_id(action));
}

// ---------------------------------------------------------------------------
// LeftRight1D: one variable X starting at 0. a_L jumps left by a large step,
// a_R creeps right by a small one. X <= -1 ends the episode with reward 1,
// X >= 1 ends it with reward 10.

struct LeftRightParams {
    double right_step = 0.02;
    double left_step = 2.0;
    double step_penalty = 0.0;
    double low_reward = 1.0;
    double high_reward = 10.0;
};

inline constexpr ActionId left_action = 0;
inline constexpr ActionId right_action = 1;

inline EnvModel left_right_env(const LeftRightParams& p) {
    if (!(p.right_step > 0.0) || !std::isfinite(p.right_step))
        detail::fail_validation("left_right: right_step must be positive");
    if (!(p.left_step > 0.0) || !std::isfinite(p.left_step))
        detail::fail_validation("left_right: left_step must be positive");
    if (!(p.step_penalty <= 0.0) || !std::isfinite(p.step_penalty))
        detail::fail_validation("left_right: step_penalty must be <= 0");
    if (!std::isfinite(p.low_reward) || !std::isfinite(p.high_reward))
        detail::fail_validation("left_right: terminal rewards must be finite");

    EnvModel env;
    env.name = "left_right";
    env.state_dims = 1;
    env.actions = {"a_L", "a_R"};
    env.transition = [p](std::span<const double> s, ActionId a) {
        return Vec{a == left_action ? s[0] - p.left_step : s[0] + p.right_step};
    };
    env.reward = [p](std::span<const double>, ActionId, std::span<const double> next) {
        double r = p.step_penalty;
        if (next[0] <= -1.0)
            r += p.low_reward;
        else if (next[0] >= 1.0)
            r += p.high_reward;
        return r;
    };
    env.terminal = [](std::span<const double> s) { return s[0] <= -1.0 || s[0] >= 1.0; };
    env.terminal_value = [p](std::span<const double> s) {
        if (s[0] <= -1.0) return p.low_reward;
        if (s[0] >= 1.0) return p.high_reward;
        return 0.0;
    };
    return env;
}

inline EnvModel left_right_env(double right_step = 0.02, double left_step = 2.0, double step_penalty = 0.0) {
    return left_right_env(LeftRightParams{right_step, left_step, step_penalty});
}

// ---------------------------------------------------------------------------
// Drift2D: next = M * state + offset[action]. Entering the goal box pays
// goal_reward + goal_reward_slope . next, entering the penalty box pays
// penalty_reward; every step also pays step_reward. The goal box wins when
// the boxes overlap.

struct Drift2DParams {
    std::array<double, 4> matrix{1.0, 0.0, 0.0, 1.0}; // row-major 2x2
    std::vector<std::string> action_names;
    std::vector<std::array<double, 2>> offsets;
    Box goal_box{{1.0, -100.0}, {100.0, 100.0}};
    Box penalty_box{{-100.0, -100.0}, {-1.0, 100.0}};
    double goal_reward = 10.0;
    std::array<double, 2> goal_reward_slope{0.0, 0.0};
    double penalty_reward = 1.0;
    double step_reward = 0.0;
};

inline EnvModel drift2d_env(Drift2DParams p) {
    auto finite = [](double v) { return std::isfinite(v); };
    for (double m : p.matrix)
        if (!finite(m)) detail::fail_validation("drift2d: matrix entries must be finite");
    const double det = p.matrix[0] * p.matrix[3] - p.matrix[1] * p.matrix[2];
    if (det == 0.0) detail::fail_validation("drift2d: drift matrix is singular");
    if (p.offsets.empty()) detail::fail_validation("drift2d: at least one action is required");
    if (p.action_names.empty())
        for (std::size_t a = 0; a < p.offsets.size(); ++a) p.action_names.push_back("a" + std::to_string(a));
    if (p.action_names.size() != p.offsets.size())
        detail::fail_validation("drift2d: action names and offsets differ in length");
    for (const auto& c : p.offsets)
        if (!finite(c[0]) || !finite(c[1])) detail::fail_validation("drift2d: action offsets must be finite");
    for (const Box* b : {&p.goal_box, &p.penalty_box}) {
        if (b->lo.size() != 2 || b->hi.size() != 2) detail::fail_validation("drift2d: boxes must be 2-D");
        for (std::size_t k = 0; k < 2; ++k)
            if (!finite(b->lo[k]) || !finite(b->hi[k]) || b->lo[k] > b->hi[k])
                detail::fail_validation("drift2d: box bounds must be finite and ordered");
    }
    if (!finite(p.goal_reward) || !finite(p.penalty_reward) || !finite(p.step_reward) ||
        !finite(p.goal_reward_slope[0]) || !finite(p.goal_reward_slope[1]))
        detail::fail_validation("drift2d: rewards must be finite");

    EnvModel env;
    env.name = "drift2d";
    env.state_dims = 2;
    env.actions = p.action_names;
    env.transition = [p](std::span<const double> s, ActionId a) {
        const auto& m = p.matrix;
        return Vec{m[0] * s[0] + m[1] * s[1] + p.offsets[a][0], m[2] * s[0] + m[3] * s[1] + p.offsets[a][1]};
    };
    auto terminal_value = [p](std::span<const double> s) {
        if (p.goal_box.contains(s)) return p.goal_reward + p.goal_reward_slope[0] * s[0] + p.goal_reward_slope[1] * s[1];
        if (p.penalty_box.contains(s)) return p.penalty_reward;
        return 0.0;
    };
    env.reward = [p, terminal_value](std::span<const double>, ActionId, std::span<const double> next) {
        return p.step_reward + terminal_value(next);
    };
    env.terminal = [p](std::span<const double> s) { return p.goal_box.contains(s) || p.penalty_box.contains(s); };
    env.terminal_value = terminal_value;
    return env;
}

// ---------------------------------------------------------------------------

/// Freezes every tile whose center is terminal under `env`, valued by
/// env.terminal_value at that center.
inline std::vector<TerminalTile> terminal_tiles_from_env(const GridSpec& spec, const EnvModel& env) {
    if (env.state_dims != spec.dims) detail::fail_validation("grid and environment dimensions differ");
    // validate the geometry first so the enumeration below is safe
    GridSpec bare = spec;
    bare.terminal_tiles.clear();
    const Grid probe(bare);
    std::vector<TerminalTile> out;
    for (std::size_t f = 0; f < probe.size(); ++f) {
        TileIndex idx = probe.unflat(f);
        const Vec c = tile_center(probe, idx);
        if (env.terminal(c)) {
            const double v = env.terminal_value ? env.terminal_value(c) : 0.0;
            out.push_back({std::move(idx), v});
        }
    }
    return out;
}

/// The coarse LeftRight grid: `interior_tiles` equal tiles on [-1, 1) with
/// one terminal tile of the same width on each side. interior_tiles = 1
/// yields the three tiles L, M, R with M = [-1, 1).
inline GridSpec left_right_grid_spec(const EnvModel& env, std::size_t interior_tiles) {
    if (interior_tiles == 0) detail::fail_validation("left_right grid: interior_tiles must be at least 1");
    GridSpec spec;
    spec.dims = 1;
    const double w = 2.0 / static_cast<double>(interior_tiles);
    spec.widths = {w};
    spec.origin = {-1.0 - w};
    spec.counts = {interior_tiles + 2};
    spec.terminal_tiles = terminal_tiles_from_env(spec, env);
    return spec;
}

} // namespace hnp
