#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "hnp/env.hpp"
#include "hnp/error.hpp"
#include "hnp/grid.hpp"
#include "hnp/parallel.hpp"
#include "hnp/penetration.hpp"

namespace hnp {

enum class Method {
    classical,
    hnp,
};

inline const char* to_string(Method m) { return m == Method::classical ? "classical" : "hnp"; }

/// One scalar per tile plus the mask of frozen (terminal) tiles.
struct ValueTable {
    Vec values;
    std::vector<char> frozen;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t tile) const { return values[tile]; }
    bool is_frozen(std::size_t tile) const { return frozen[tile] != 0; }
};

/// Terminal tiles start at their fixed value, every other tile at `init_value`.
inline ValueTable initial_values(const Grid& grid, double init_value = 0.0) {
    ValueTable t;
    t.values.assign(grid.size(), init_value);
    t.frozen.assign(grid.size(), 0);
    for (std::size_t f = 0; f < grid.size(); ++f) {
        if (grid.is_terminal(f)) {
            t.frozen[f] = 1;
            t.values[f] = grid.terminal_value(f);
        }
    }
    return t;
}

struct SolverConfig {
    double gamma = 1.0;
    double epsilon = 1e-9;
    std::size_t max_sweeps = 10'000;
    Method method = Method::hnp;
    WeightMode weight_mode = WeightMode::center_multilinear;
    double init_value = 0.0;
    std::size_t workers = 1;

    void validate() const {
        if (!(gamma > 0.0 && gamma <= 1.0)) detail::fail_validation("solver: gamma must lie in (0, 1]");
        if (!(epsilon > 0.0) || !std::isfinite(epsilon)) detail::fail_validation("solver: epsilon must be positive");
        if (max_sweeps == 0) detail::fail_validation("solver: max_sweeps must be positive");
        if (!std::isfinite(init_value)) detail::fail_validation("solver: init_value must be finite");
        if (workers == 0) detail::fail_validation("solver: workers must be positive");
    }
};

struct SolveReport {
    ValueTable final_values;
    std::size_t sweeps_run = 0;
    Vec delta_history;
    bool converged = false;
    std::size_t tiles_total = 0;
    std::size_t tiles_nonterminal = 0;
    std::chrono::duration<double> wall_time{0.0};
};

struct PolicyEntry {
    static constexpr ActionId none = std::numeric_limits<ActionId>::max();
    ActionId action = none;
    double q = 0.0;
};

/// Greedy action and its q-value per tile; frozen tiles carry `none`.
struct PolicyTable {
    std::vector<PolicyEntry> entries;

    const PolicyEntry& operator[](std::size_t tile) const { return entries[tile]; }
};

// ---------------------------------------------------------------------------
// Backups
//
// A backup is the precompiled right-hand side of one (tile, action) pair.
// Transitions are deterministic, so it only depends on the grid, the
// environment and the method; sweeps reduce to sparse dot products.
//
// Assembly rules:
//   * a terminal outcome ends the episode: q = reward, no successor value;
//   * otherwise q = reward + gamma * sum_i w_i v_i (classical: one term);
//   * corner-box: q = sum_i w_i (r_c(i) + gamma v_i), where c(i) is the
//     attributed corner and the gamma term is dropped for terminal corners.

struct BackupTerm {
    std::size_t tile = 0;
    double weight = 0.0;
    double reward = 0.0;  // corner-box only
    bool bootstrap = true; // corner-box only
};

struct ActionBackup {
    enum class Kind { terminal, expected, per_corner };
    Kind kind = Kind::terminal;
    double reward = 0.0;
    std::vector<BackupTerm> terms;
};

inline double evaluate(const ActionBackup& b, std::span<const double> values, double gamma) {
    switch (b.kind) {
    case ActionBackup::Kind::terminal:
        return b.reward;
    case ActionBackup::Kind::expected: {
        double s = 0.0;
        for (const auto& t : b.terms) s += t.weight * values[t.tile];
        return b.reward + gamma * s;
    }
    case ActionBackup::Kind::per_corner: {
        double q = 0.0;
        for (const auto& t : b.terms) q += t.weight * (t.bootstrap ? t.reward + gamma * values[t.tile] : t.reward);
        return q;
    }
    }
    return 0.0;
}

inline ActionBackup plan_backup(const Grid& grid, const EnvModel& env, std::size_t tile, ActionId action,
                                const SolverConfig& config) {
    ActionBackup b;
    const TileIndex idx = grid.unflat(tile);

    if (config.method == Method::hnp && config.weight_mode == WeightMode::corner_box) {
        const auto corners = corner_outcomes(grid, idx, env, action);
        bool all_terminal = true;
        for (const auto& c : corners) all_terminal = all_terminal && c.terminal;
        if (all_terminal) {
            // every starting point ends the episode; average the corner rewards
            b.kind = ActionBackup::Kind::terminal;
            double s = 0.0;
            for (const auto& c : corners) s += c.reward;
            b.reward = s / static_cast<double>(corners.size());
            return b;
        }
        const PenetrationWeights w = corner_box_weights(grid, corners);
        b.kind = ActionBackup::Kind::per_corner;
        b.terms.reserve(w.entries.size());
        for (std::size_t i = 0; i < w.entries.size(); ++i) {
            const auto& c = corners[w.attribution[i]];
            b.terms.push_back({w.entries[i].tile, w.entries[i].weight, c.reward, !c.terminal});
        }
        return b;
    }

    const Vec center = tile_center(grid, idx);
    Outcome o = step(env, center, action);
    b.reward = o.reward;
    if (o.terminal) {
        b.kind = ActionBackup::Kind::terminal;
        return b;
    }
    b.kind = ActionBackup::Kind::expected;
    if (config.method == Method::classical) {
        b.terms.push_back({locate(grid, o.next_state).flat, 1.0});
    } else {
        for (const auto& e : center_weights(grid, o.next_state).entries) b.terms.push_back({e.tile, e.weight});
    }
    return b;
}

/// Backups of every non-terminal tile for every action.
class BackupPlan {
public:
    BackupPlan(const Grid& grid, const EnvModel& env, const SolverConfig& config)
        : actions_(env.action_count()), backups_(grid.size() * actions_) {
        if (env.state_dims != grid.dims()) detail::fail_validation("solver: grid and environment dimensions differ");
        if (actions_ == 0) detail::fail_validation("solver: environment has no actions");
        detail::parallel_chunks(grid.size(), config.workers, [&](std::size_t begin, std::size_t end, std::size_t) {
            for (std::size_t t = begin; t < end; ++t) {
                if (grid.is_terminal(t)) continue;
                for (ActionId a = 0; a < actions_; ++a) backups_[t * actions_ + a] = plan_backup(grid, env, t, a, config);
            }
        });
    }

    std::size_t actions() const { return actions_; }
    const ActionBackup& at(std::size_t tile, ActionId a) const { return backups_[tile * actions_ + a]; }

private:
    std::size_t actions_;
    std::vector<ActionBackup> backups_;
};

namespace detail {

inline void check_table(const Grid& grid, const ValueTable& values) {
    if (values.values.size() != grid.size() || values.frozen.size() != grid.size())
        fail_validation("value table size does not match the grid");
}

/// Best action with lowest-index tie-breaking.
inline PolicyEntry best_action(const BackupPlan& plan, std::size_t tile, std::span<const double> values, double gamma) {
    PolicyEntry best;
    for (ActionId a = 0; a < plan.actions(); ++a) {
        const double q = evaluate(plan.at(tile, a), values, gamma);
        if (!std::isfinite(q))
            fail_compute("non-finite q-value at tile " + std::to_string(tile) + ", action " + std::to_string(a));
        if (best.action == PolicyEntry::none || q > best.q) best = {a, q};
    }
    return best;
}

/// One synchronous sweep: reads `in`, writes `out`, returns the max change.
inline double sweep_into(const Grid& grid, const BackupPlan& plan, const ValueTable& in, ValueTable& out,
                         const SolverConfig& config) {
    const std::size_t workers = std::max<std::size_t>(1, std::min(config.workers, grid.size()));
    Vec local_delta(workers, 0.0);
    parallel_chunks(grid.size(), workers, [&](std::size_t begin, std::size_t end, std::size_t w) {
        double d = 0.0;
        for (std::size_t t = begin; t < end; ++t) {
            if (in.is_frozen(t)) {
                out.values[t] = in.values[t];
                continue;
            }
            const double v = best_action(plan, t, in.values, config.gamma).q;
            d = std::max(d, std::abs(v - in.values[t]));
            out.values[t] = v;
        }
        local_delta[w] = d;
    });
    return *std::max_element(local_delta.begin(), local_delta.end());
}

} // namespace detail

inline double q_value(const Grid& grid, const EnvModel& env, const ValueTable& values, const TileIndex& tile,
                      ActionId action, const SolverConfig& config) {
    detail::check_table(grid, values);
    const std::size_t f = grid.flat(tile);
    if (values.is_frozen(f)) detail::fail_validation("q_value: tile is terminal");
    if (action >= env.action_count()) detail::fail_validation("q_value: unknown action");
    return evaluate(plan_backup(grid, env, f, action, config), values.values, config.gamma);
}

/// Single synchronous sweep. Returns the new table and the max absolute
/// change over non-terminal tiles.
inline std::pair<ValueTable, double> sweep(const Grid& grid, const EnvModel& env, const ValueTable& values,
                                           const SolverConfig& config) {
    config.validate();
    detail::check_table(grid, values);
    const BackupPlan plan(grid, env, config);
    ValueTable next = values;
    const double delta = detail::sweep_into(grid, plan, values, next, config);
    return {std::move(next), delta};
}

inline SolveReport solve(const Grid& grid, const EnvModel& env, const SolverConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    SolveReport report;
    report.tiles_total = grid.size();
    report.tiles_nonterminal = grid.nonterminal_count();

    const BackupPlan plan(grid, env, config);
    ValueTable current = initial_values(grid, config.init_value);
    ValueTable next = current;
    while (report.sweeps_run < config.max_sweeps) {
        const double delta = detail::sweep_into(grid, plan, current, next, config);
        std::swap(current, next);
        ++report.sweeps_run;
        report.delta_history.push_back(delta);
        if (delta < config.epsilon) {
            report.converged = true;
            break;
        }
    }
    report.final_values = std::move(current);
    report.wall_time = std::chrono::steady_clock::now() - start;
    return report;
}

inline PolicyTable greedy_policy(const Grid& grid, const EnvModel& env, const ValueTable& values,
                                 const SolverConfig& config) {
    config.validate();
    detail::check_table(grid, values);
    for (double v : values.values)
        if (!std::isfinite(v)) detail::fail_validation("greedy_policy: value table contains non-finite entries");
    const BackupPlan plan(grid, env, config);
    PolicyTable policy;
    policy.entries.resize(grid.size());
    detail::parallel_chunks(grid.size(), config.workers, [&](std::size_t begin, std::size_t end, std::size_t) {
        for (std::size_t t = begin; t < end; ++t)
            if (!values.is_frozen(t)) policy.entries[t] = detail::best_action(plan, t, values.values, config.gamma);
    });
    return policy;
}

} // namespace hnp
