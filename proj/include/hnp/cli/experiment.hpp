#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hnp/cli/config.hpp"
#include "hnp/cli/format.hpp"
#include "hnp/cli/presets.hpp"
#include "hnp/env.hpp"
#include "hnp/error.hpp"
#include "hnp/grid.hpp"
#include "hnp/rollout.hpp"
#include "hnp/solver.hpp"

namespace hnp::cli {

namespace fs = std::filesystem;

struct RunOptions {
    std::optional<std::size_t> workers; // overrides solver.workers
    bool rollouts = true;
    std::ostream* log = nullptr; // progress messages when set
};

struct RunResult {
    ExperimentConfig config;
    EnvModel env;
    Grid grid;
    SolveReport report;
    PolicyTable policy;
    std::vector<Trajectory> trajectories;
    std::size_t probe_tile = 0;

    double probe_value() const { return report.final_values[probe_tile]; }

    std::string probe_action() const {
        const auto& e = policy[probe_tile];
        return e.action == PolicyEntry::none ? "-" : env.actions[e.action];
    }

    std::string probe_q() const {
        const auto& e = policy[probe_tile];
        return e.action == PolicyEntry::none ? "-" : format_number(e.q);
    }
};

/// Resolves a CLI argument to a config: an existing file wins, then a preset.
inline ExperimentConfig resolve_config(const std::string& arg) {
    if (fs::exists(arg)) return load_config(arg);
    if (auto p = find_preset(arg)) return parse_config(p->text, "preset:" + std::string(p->name));
    hnp::detail::fail_validation("config " + arg + ": file not found and no preset has that name");
}

inline RunResult execute(const ExperimentConfig& config, const RunOptions& options = {}) {
    EnvModel env = make_env(config.environment);
    Grid grid(config.grid);
    SolverConfig solver = config.solver;
    if (options.workers) solver.workers = *options.workers;

    if (options.log)
        *options.log << "[" << config.name << "] solving " << grid.nonterminal_count() << " tiles with "
                     << to_string(solver.method) << "\n";
    SolveReport report = solve(grid, env, solver);
    if (options.log)
        *options.log << "[" << config.name << "] " << (report.converged ? "converged" : "stopped") << " after "
                     << report.sweeps_run << " sweeps\n";
    PolicyTable policy = greedy_policy(grid, env, report.final_values, solver);

    RunResult out{config, std::move(env), std::move(grid), std::move(report), std::move(policy), {}, 0};
    out.config.solver = solver;
    out.probe_tile = locate(out.grid, config.probe).flat;
    if (options.rollouts) {
        for (const auto& start : config.rollout.starts) {
            out.trajectories.push_back(
                rollout(out.env, out.grid, out.report.final_values, solver, start, config.rollout.max_steps));
            if (options.log) {
                const auto& t = out.trajectories.back();
                *options.log << "[" << config.name << "] rollout from " << format_vector(start) << ": "
                             << t.steps_taken << " steps, reward " << format_number(t.total_reward) << "\n";
            }
        }
    }
    return out;
}

namespace detail {

inline void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

inline std::string axis_columns(const std::string& prefix, std::size_t n) {
    std::string s;
    for (std::size_t k = 0; k < n; ++k) s += "," + prefix + std::to_string(k);
    return s;
}

inline std::string policy_counts(const RunResult& r) {
    std::vector<std::size_t> counts(r.env.action_count(), 0);
    for (const auto& e : r.policy.entries)
        if (e.action != PolicyEntry::none) ++counts[e.action];
    std::string s;
    for (std::size_t a = 0; a < counts.size(); ++a) {
        if (a) s += ";";
        s += r.env.actions[a] + "=" + std::to_string(counts[a]);
    }
    return s;
}

} // namespace detail

// --- CSV payloads ----------------------------------------------------------

inline std::string values_csv(const RunResult& r) {
    const std::size_t n = r.grid.dims();
    std::ostringstream os;
    os << "tile" << detail::axis_columns("i", n) << detail::axis_columns("x", n) << ",value,frozen\n";
    for (std::size_t f = 0; f < r.grid.size(); ++f) {
        const TileIndex idx = r.grid.unflat(f);
        const Vec c = tile_center(r.grid, idx);
        os << f;
        for (auto i : idx.coords) os << ',' << i;
        for (double x : c) os << ',' << format_number(x);
        os << ',' << format_number(r.report.final_values[f]) << ',' << (r.grid.is_terminal(f) ? 1 : 0) << '\n';
    }
    return os.str();
}

inline std::string convergence_csv(const SolveReport& report) {
    std::ostringstream os;
    os << "sweep,delta\n";
    for (std::size_t s = 0; s < report.delta_history.size(); ++s)
        os << s + 1 << ',' << format_number(report.delta_history[s]) << '\n';
    return os.str();
}

inline std::string policy_csv(const RunResult& r) {
    std::ostringstream os;
    os << "tile,action,q\n";
    for (std::size_t f = 0; f < r.grid.size(); ++f) {
        const auto& e = r.policy[f];
        if (e.action == PolicyEntry::none) continue;
        os << f << ',' << r.env.actions[e.action] << ',' << format_number(e.q) << '\n';
    }
    return os.str();
}

inline std::string trajectory_csv(const RunResult& r, const Trajectory& t) {
    const std::size_t n = r.grid.dims();
    std::ostringstream os;
    os << "step" << detail::axis_columns("s", n) << ",action,reward" << detail::axis_columns("n", n) << ",terminal\n";
    for (std::size_t k = 0; k < t.steps.size(); ++k) {
        const auto& s = t.steps[k];
        os << k;
        for (double v : s.state) os << ',' << format_number(v);
        os << ',' << r.env.actions[s.action] << ',' << format_number(s.reward);
        for (double v : s.next_state) os << ',' << format_number(v);
        os << ',' << (t.terminated && k + 1 == t.steps.size() ? 1 : 0) << '\n';
    }
    return os.str();
}

inline std::string solve_summary(const RunResult& r) {
    const auto& rep = r.report;
    std::ostringstream os;
    os << "hnp run summary\n"
       << "schema: " << schema_id << "\n"
       << "experiment: " << r.config.name << "\n"
       << "environment: " << r.config.environment.kind << "\n"
       << "method: " << to_string(r.config.solver.method) << "\n"
       << "weight_mode: " << (r.config.solver.method == Method::hnp ? to_string(r.config.solver.weight_mode) : "-")
       << "\n"
       << "gamma: " << format_number(r.config.solver.gamma) << "\n"
       << "epsilon: " << format_number(r.config.solver.epsilon) << "\n"
       << "tiles_total: " << rep.tiles_total << "\n"
       << "tiles_nonterminal: " << rep.tiles_nonterminal << "\n"
       << "sweeps_run: " << rep.sweeps_run << "\n"
       << "converged: " << format_bool(rep.converged) << "\n"
       << "final_delta: " << (rep.delta_history.empty() ? "-" : format_number(rep.delta_history.back())) << "\n"
       << "policy_counts: " << detail::policy_counts(r) << "\n"
       << "probe_state: " << format_vector(r.config.probe) << "\n"
       << "probe_tile: " << r.probe_tile << "\n"
       << "probe_value: " << format_number(r.probe_value()) << "\n"
       << "probe_action: " << r.probe_action() << "\n"
       << "probe_q: " << r.probe_q() << "\n"
       << "rollouts: " << r.trajectories.size() << "\n";
    for (std::size_t k = 0; k < r.trajectories.size(); ++k) {
        const auto& t = r.trajectories[k];
        os << "rollout " << k << ": start=" << format_vector(r.config.rollout.starts[k])
           << " steps=" << t.steps_taken << " total_reward=" << format_number(t.total_reward)
           << " terminated=" << format_bool(t.terminated)
           << " final_state=" << format_vector(t.steps.empty() ? r.config.rollout.starts[k] : t.steps.back().next_state)
           << "\n";
    }
    return os.str();
}

/// Writes every artifact of a run into `dir`. Wall time goes to timing.csv
/// only, so the remaining files are byte-stable.
inline void write_run(const RunResult& r, const fs::path& dir) {
    fs::create_directories(dir);
    detail::write_file(dir / "values.csv", values_csv(r));
    detail::write_file(dir / "convergence.csv", convergence_csv(r.report));
    detail::write_file(dir / "policy.csv", policy_csv(r));
    for (std::size_t k = 0; k < r.trajectories.size(); ++k)
        detail::write_file(dir / ("trajectory_" + std::to_string(k) + ".csv"), trajectory_csv(r, r.trajectories[k]));
    detail::write_file(dir / "summary.txt", solve_summary(r));
    detail::write_file(dir / "timing.csv", "phase,wall_time_s\nsolve," + format_number(r.report.wall_time.count()) + "\n");
}

/// Runs the experiment and writes its outputs to `out_root/<name>`.
inline RunResult run_experiment(const ExperimentConfig& config, const fs::path& out_root, const RunOptions& options = {}) {
    RunResult r = execute(config, options);
    write_run(r, out_root / config.name);
    return r;
}

// --- comparison ------------------------------------------------------------

struct ComparisonRow {
    std::string run;
    std::string method;
    std::string weight_mode;
    std::size_t tiles_total = 0;
    std::size_t tiles_nonterminal = 0;
    std::size_t sweeps_run = 0;
    bool converged = false;
    std::string probe_value;
    std::string probe_action;
    std::string policy_counts;
    std::string rollout_reward;
    std::string rollout_steps;
    std::string rollout_terminated;
    double wall_time = 0.0;
};

struct ComparisonReport {
    std::string environment;
    std::vector<ComparisonRow> rows;
    std::size_t baseline = 0;  // row index
    std::size_t candidate = 0; // row index
    std::string efficiency_ratio;
};

inline ComparisonRow comparison_row(const RunResult& r) {
    ComparisonRow row;
    row.run = r.config.name;
    row.method = to_string(r.config.solver.method);
    row.weight_mode = r.config.solver.method == Method::hnp ? to_string(r.config.solver.weight_mode) : "-";
    row.tiles_total = r.report.tiles_total;
    row.tiles_nonterminal = r.report.tiles_nonterminal;
    row.sweeps_run = r.report.sweeps_run;
    row.converged = r.report.converged;
    row.probe_value = format_number(r.probe_value());
    row.probe_action = r.probe_action();
    row.policy_counts = detail::policy_counts(r);
    if (r.trajectories.empty()) {
        row.rollout_reward = row.rollout_steps = row.rollout_terminated = "-";
    } else {
        const auto& t = r.trajectories.front();
        row.rollout_reward = format_number(t.total_reward);
        row.rollout_steps = std::to_string(t.steps_taken);
        row.rollout_terminated = format_bool(t.terminated);
    }
    row.wall_time = r.report.wall_time.count();
    return row;
}

/// Runs each config and assembles the report. The efficiency ratio is
/// classical ÷ HNP non-terminal tile counts when both methods are present,
/// otherwise first row ÷ second row.
inline ComparisonReport compare(const std::vector<ExperimentConfig>& configs, const RunOptions& options = {}) {
    if (configs.empty()) hnp::detail::fail_validation("compare: no runs given");
    for (const auto& c : configs)
        if (c.environment.canonical != configs.front().environment.canonical)
            hnp::detail::fail_validation("compare: run '" + c.name + "' targets a different environment than '" +
                                         configs.front().name + "'");
    ComparisonReport rep;
    rep.environment = configs.front().environment.kind;
    for (const auto& c : configs) rep.rows.push_back(comparison_row(execute(c, options)));

    std::optional<std::size_t> classical, hnp_row;
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        if (rep.rows[i].method == "classical" && !classical) classical = i;
        if (rep.rows[i].method == "hnp" && !hnp_row) hnp_row = i;
    }
    if (classical && hnp_row) {
        rep.baseline = *classical;
        rep.candidate = *hnp_row;
    } else {
        rep.baseline = 0;
        rep.candidate = rep.rows.size() > 1 ? 1 : 0;
    }
    rep.efficiency_ratio =
        format_ratio(rep.rows[rep.baseline].tiles_nonterminal, rep.rows[rep.candidate].tiles_nonterminal);
    return rep;
}

inline std::string comparison_csv(const ComparisonReport& rep) {
    std::ostringstream os;
    os << "run,method,weight_mode,tiles_total,tiles_nonterminal,sweeps_run,converged,probe_value,probe_action,"
          "policy_counts,rollout_reward,rollout_steps,rollout_terminated,efficiency_ratio\n";
    for (const auto& r : rep.rows) {
        os << r.run << ',' << r.method << ',' << r.weight_mode << ',' << r.tiles_total << ',' << r.tiles_nonterminal
           << ',' << r.sweeps_run << ',' << format_bool(r.converged) << ',' << r.probe_value << ',' << r.probe_action
           << ',' << r.policy_counts << ',' << r.rollout_reward << ',' << r.rollout_steps << ','
           << r.rollout_terminated << ','
           << format_ratio(rep.rows[rep.baseline].tiles_nonterminal, r.tiles_nonterminal) << '\n';
    }
    return os.str();
}

inline std::string comparison_summary(const ComparisonReport& rep) {
    std::ostringstream os;
    os << "hnp comparison summary\n"
       << "environment: " << rep.environment << "\n"
       << "baseline: " << rep.rows[rep.baseline].run << "\n"
       << "candidate: " << rep.rows[rep.candidate].run << "\n"
       << "efficiency_ratio: " << rep.efficiency_ratio << "\n\n";

    const std::vector<std::string> head{"run",          "method",        "tiles_nonterminal", "sweeps_run",
                                        "converged",    "probe_value",   "probe_action",      "rollout_reward",
                                        "rollout_steps"};
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rep.rows)
        cells.push_back({r.run, r.method, std::to_string(r.tiles_nonterminal), std::to_string(r.sweeps_run),
                         format_bool(r.converged), r.probe_value, r.probe_action, r.rollout_reward, r.rollout_steps});
    std::vector<std::size_t> width(head.size());
    for (std::size_t c = 0; c < head.size(); ++c) {
        width[c] = head[c].size();
        for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
    }
    auto line = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            os << row[c];
            if (c + 1 < row.size()) os << std::string(width[c] - row[c].size() + 2, ' ');
        }
        os << '\n';
    };
    line(head);
    for (const auto& row : cells) line(row);
    return os.str();
}

inline void write_comparison(const ComparisonReport& rep, const fs::path& dir) {
    fs::create_directories(dir);
    detail::write_file(dir / "comparison.csv", comparison_csv(rep));
    detail::write_file(dir / "comparison_summary.txt", comparison_summary(rep));
    std::ostringstream t;
    t << "run,wall_time_s\n";
    for (const auto& r : rep.rows) t << r.run << ',' << format_number(r.wall_time) << '\n';
    detail::write_file(dir / "comparison_timing.csv", t.str());
}

/// Expands `compare` arguments: a single compare-preset name, or a list of
/// config files / single-run preset names. Returns the configs and an output
/// label.
inline std::pair<std::vector<ExperimentConfig>, std::string> resolve_compare(const std::vector<std::string>& args) {
    if (args.empty()) hnp::detail::fail_validation("compare: expected a preset name or config files");
    if (args.size() == 1 && !fs::exists(args.front())) {
        if (auto p = find_compare_preset(args.front())) {
            std::vector<ExperimentConfig> out;
            for (auto run : p->runs) out.push_back(resolve_config(std::string(run)));
            return {std::move(out), std::string(p->name)};
        }
    }
    std::vector<ExperimentConfig> out;
    for (const auto& a : args) out.push_back(resolve_config(a));
    return {std::move(out), "compare"};
}

} // namespace hnp::cli
