#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "hnp/env.hpp"
#include "hnp/error.hpp"
#include "hnp/grid.hpp"
#include "hnp/penetration.hpp"
#include "hnp/solver.hpp"

namespace hnp {

struct TrajectoryStep {
    Vec state;
    ActionId action = 0;
    double reward = 0.0;
    Vec next_state;
};

struct Trajectory {
    std::vector<TrajectoryStep> steps;
    double total_reward = 0.0;
    bool terminated = false;
    std::size_t steps_taken = 0;
};

/// Value estimate at a continuous state: the containing tile's value for the
/// classical method, center-multilinear interpolation for HNP.
inline double value_at(const Grid& grid, const ValueTable& values, std::span<const double> state, Method method) {
    if (method == Method::classical) return values[locate(grid, state).flat];
    double s = 0.0;
    for (const auto& e : center_weights(grid, state).entries) s += e.weight * values[e.tile];
    return s;
}

/// q-values of every action taken from the continuous `state`.
inline Vec state_action_values(const EnvModel& env, const Grid& grid, const ValueTable& values,
                               const SolverConfig& config, std::span<const double> state) {
    Vec q(env.action_count());
    for (ActionId a = 0; a < env.action_count(); ++a) {
        const Outcome o = step(env, state, a);
        q[a] = o.terminal ? o.reward : o.reward + config.gamma * value_at(grid, values, o.next_state, config.method);
    }
    return q;
}

/// Greedy action at a continuous state; ties go to the lowest index.
inline ActionId greedy_action(const EnvModel& env, const Grid& grid, const ValueTable& values,
                              const SolverConfig& config, std::span<const double> state) {
    const Vec q = state_action_values(env, grid, values, config, state);
    ActionId best = 0;
    for (ActionId a = 1; a < q.size(); ++a)
        if (q[a] > q[best]) best = a;
    return best;
}

inline Trajectory rollout(const EnvModel& env, const Grid& grid, const ValueTable& values, const SolverConfig& config,
                          std::span<const double> start, std::size_t max_steps) {
    if (max_steps == 0) detail::fail_validation("rollout: max_steps must be positive");
    if (start.size() != env.state_dims) detail::fail_validation("rollout: start state has wrong dimension");
    for (double v : start)
        if (!std::isfinite(v)) detail::fail_validation("rollout: start state is not finite");
    if (env.terminal(start)) detail::fail_validation("rollout: start state is terminal");
    if (values.size() != grid.size()) detail::fail_validation("rollout: value table size does not match the grid");

    Trajectory traj;
    Vec state(start.begin(), start.end());
    while (traj.steps_taken < max_steps) {
        const ActionId a = greedy_action(env, grid, values, config, state);
        Outcome o = step(env, state, a);
        traj.total_reward += o.reward;
        traj.steps.push_back({state, a, o.reward, o.next_state});
        ++traj.steps_taken;
        state = std::move(o.next_state);
        if (o.terminal) {
            traj.terminated = true;
            break;
        }
    }
    return traj;
}

} // namespace hnp
