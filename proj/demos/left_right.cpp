// Solves the LeftRight problem on the 3-tile grid with both backup rules and
// prints the value of the middle tile and the greedy rollout from X = 0.

#include <cstdio>

#include "hnp/env.hpp"
#include "hnp/rollout.hpp"
#include "hnp/solver.hpp"

int main() {
    using namespace hnp;

    const EnvModel env = left_right_env(0.02, 2.0, -0.01);
    const Grid grid(left_right_grid_spec(env, 1));
    const Vec start{0.0};

    for (Method method : {Method::classical, Method::hnp}) {
        SolverConfig config;
        config.method = method;
        const SolveReport report = solve(grid, env, config);
        const PolicyTable policy = greedy_policy(grid, env, report.final_values, config);
        const Trajectory t = rollout(env, grid, report.final_values, config, start, 1000);

        std::printf("%-9s  v_M = %.6f  action = %s  sweeps = %zu\n", to_string(method), report.final_values[1],
                    env.actions[policy[1].action].c_str(), report.sweeps_run);
        std::printf("           rollout: %zu steps, reward %.4f, final X = %.4f\n", t.steps_taken, t.total_reward,
                    t.steps.back().next_state[0]);
    }
}
