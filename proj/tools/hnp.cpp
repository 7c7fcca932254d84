// hnp: experiment driver for the HNP value-iteration library.

#include <CLI11.hpp>

#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hnp/cli/config.hpp"
#include "hnp/cli/experiment.hpp"
#include "hnp/cli/presets.hpp"
#include "hnp/error.hpp"

namespace {

enum ExitCode { ok = 0, validation = 1, runtime = 2 };

struct Common {
    std::string out = "hnp-out";
    int verbose = 0;
    bool quiet = false;
    std::size_t workers = 0; // 0 keeps the config value
};

hnp::cli::RunOptions options_from(const Common& c) {
    hnp::cli::RunOptions o;
    if (c.workers) o.workers = c.workers;
    if (c.verbose > 0 && !c.quiet) o.log = &std::cerr;
    return o;
}

hnp::Vec parse_state(const std::string& text) {
    hnp::Vec v;
    for (const auto& part : hnp::cli::detail::split(text, ',')) {
        std::istringstream is(part);
        double x;
        if (!(is >> x) || !(is >> std::ws).eof()) hnp::detail::fail_validation("--start: not a number: " + part);
        v.push_back(x);
    }
    return v;
}

void print_run(const hnp::cli::RunResult& r, const Common& c) {
    if (c.quiet) return;
    std::cout << hnp::cli::solve_summary(r);
    std::cout << "outputs: " << (std::filesystem::path(c.out) / r.config.name).string() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Value iteration on tiled continuous state spaces with HNP backups"};
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-o,--out", common.out, "output directory")->capture_default_str();
        sub->add_flag("-v,--verbose", common.verbose, "print progress to stderr");
        sub->add_flag("-q,--quiet", common.quiet, "print nothing on success");
        sub->add_option("-j,--workers", common.workers, "worker threads (overrides the config)")
            ->check(CLI::PositiveNumber);
    };

    std::string solve_arg;
    auto* solve_cmd = app.add_subcommand("solve", "solve a config or preset, then run its configured rollouts");
    solve_cmd->add_option("config", solve_arg, "config file or preset name")->required();
    add_common(solve_cmd);

    std::string rollout_arg;
    std::vector<std::string> rollout_starts;
    std::size_t rollout_steps = 0;
    auto* rollout_cmd = app.add_subcommand("rollout", "solve, then roll out the greedy policy");
    rollout_cmd->add_option("config", rollout_arg, "config file or preset name")->required();
    rollout_cmd->add_option("-s,--start", rollout_starts, "start state, comma separated (repeatable)");
    rollout_cmd->add_option("-n,--max-steps", rollout_steps, "step limit per rollout")->check(CLI::PositiveNumber);
    add_common(rollout_cmd);

    std::vector<std::string> compare_args;
    auto* compare_cmd = app.add_subcommand("compare", "run several configs on one environment and compare them");
    compare_cmd->add_option("runs", compare_args, "compare-preset name, or config files / preset names")->required();
    add_common(compare_cmd);

    auto* list_cmd = app.add_subcommand("list-presets", "list bundled presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : validation;
    }

    try {
        if (*list_cmd) {
            std::cout << "single runs:\n";
            for (const auto& p : hnp::cli::presets()) std::cout << "  " << p.name << "  " << p.summary << "\n";
            std::cout << "comparisons:\n";
            for (const auto& p : hnp::cli::compare_presets()) std::cout << "  " << p.name << "  " << p.summary << "\n";
            return ok;
        }
        if (*solve_cmd) {
            const auto cfg = hnp::cli::resolve_config(solve_arg);
            print_run(hnp::cli::run_experiment(cfg, common.out, options_from(common)), common);
            return ok;
        }
        if (*rollout_cmd) {
            auto cfg = hnp::cli::resolve_config(rollout_arg);
            if (!rollout_starts.empty()) {
                cfg.rollout.starts.clear();
                for (const auto& s : rollout_starts) cfg.rollout.starts.push_back(parse_state(s));
            }
            if (rollout_steps) cfg.rollout.max_steps = rollout_steps;
            if (cfg.rollout.starts.empty())
                hnp::detail::fail_validation("rollout: no start states (set [rollout] starts or pass --start)");
            print_run(hnp::cli::run_experiment(cfg, common.out, options_from(common)), common);
            return ok;
        }
        if (*compare_cmd) {
            auto [configs, label] = hnp::cli::resolve_compare(compare_args);
            const auto report = hnp::cli::compare(configs, options_from(common));
            const auto dir = std::filesystem::path(common.out) / label;
            hnp::cli::write_comparison(report, dir);
            if (!common.quiet) {
                std::cout << hnp::cli::comparison_summary(report);
                std::cout << "outputs: " << dir.string() << "\n";
            }
            return ok;
        }
    } catch (const hnp::ValidationError& e) {
        std::cerr << "hnp: error: " << e.what() << "\n";
        return validation;
    } catch (const std::exception& e) {
        std::cerr << "hnp: runtime error: " << e.what() << "\n";
        return runtime;
    }
    return ok;
}
