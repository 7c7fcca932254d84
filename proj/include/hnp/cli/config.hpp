#pragma once

// Experiment config: INI text with a versioned schema. Grammar and keys are
// documented in docs/config-format.md.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hnp/cli/format.hpp"
#include "hnp/env.hpp"
#include "hnp/error.hpp"
#include "hnp/grid.hpp"
#include "hnp/solver.hpp"

namespace hnp::cli {

inline constexpr std::string_view schema_id = "hnp-experiment/1";

struct EnvironmentConfig {
    std::string kind;
    LeftRightParams left_right;
    Drift2DParams drift2d;
    std::string canonical; // normalized description, used to match environments across runs
};

struct RolloutSpec {
    std::vector<Vec> starts;
    std::size_t max_steps = 1000;
};

struct ExperimentConfig {
    std::string source;
    std::string name;
    std::string description;
    EnvironmentConfig environment;
    GridSpec grid; // terminal tiles resolved
    SolverConfig solver;
    RolloutSpec rollout;
    Vec probe;
};

namespace detail {

using boost::property_tree::ptree;

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        out.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

class Reader {
public:
    Reader(const ptree& root, std::string source) : root_(root), source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& field, const std::string& what) const {
        hnp::detail::fail_validation("config " + source_ + ": field '" + field + "': " + what);
    }

    const ptree* section(const std::string& name, bool required) const {
        const auto it = root_.find(name);
        if (it == root_.not_found() || it->second.empty()) {
            if (required) hnp::detail::fail_validation("config " + source_ + ": missing section [" + name + "]");
            return nullptr;
        }
        return &it->second;
    }

    void expect_keys(const std::string& name, const ptree& sec, const std::set<std::string>& allowed) const {
        for (const auto& [key, child] : sec) {
            if (!child.empty()) fail(name + "." + key, "nested keys are not supported");
            if (!allowed.contains(key)) fail(name + "." + key, "unknown key");
        }
    }

    std::optional<std::string> raw(const ptree& sec, const std::string& /*sec_name*/, const std::string& key) const {
        const auto it = sec.find(key);
        if (it == sec.not_found()) return std::nullopt;
        return trim(it->second.data());
    }

    std::string text(const ptree& sec, const std::string& sec_name, const std::string& key) const {
        auto v = raw(sec, sec_name, key);
        if (!v) fail(sec_name + "." + key, "missing required field");
        return *v;
    }

    double number(const std::string& field, const std::string& token) const {
        double v = 0.0;
        const char* first = token.data();
        const char* last = token.data() + token.size();
        const auto res = std::from_chars(first, last, v);
        if (token.empty() || res.ec != std::errc{} || res.ptr != last) fail(field, "expected a number, got '" + token + "'");
        if (!std::isfinite(v)) fail(field, "value must be finite");
        return v;
    }

    std::size_t count(const std::string& field, const std::string& token) const {
        std::size_t v = 0;
        const char* last = token.data() + token.size();
        const auto res = std::from_chars(token.data(), last, v);
        if (token.empty() || res.ec != std::errc{} || res.ptr != last)
            fail(field, "expected a non-negative integer, got '" + token + "'");
        return v;
    }

    Vec vector(const std::string& field, const std::string& value) const {
        Vec out;
        for (const auto& tok : split(value, ',')) out.push_back(number(field, tok));
        return out;
    }

    double number_or(const ptree& sec, const std::string& sec_name, const std::string& key, double fallback) const {
        auto v = raw(sec, sec_name, key);
        return v ? number(sec_name + "." + key, *v) : fallback;
    }

    const std::string& source() const { return source_; }

private:
    const ptree& root_;
    std::string source_;
};

inline Box read_box(const Reader& r, const ptree& sec, const std::string& prefix, const Box& fallback) {
    const std::string sec_name = "environment";
    Box b = fallback;
    if (auto lo = r.raw(sec, sec_name, prefix + "_lo")) b.lo = r.vector(sec_name + "." + prefix + "_lo", *lo);
    if (auto hi = r.raw(sec, sec_name, prefix + "_hi")) b.hi = r.vector(sec_name + "." + prefix + "_hi", *hi);
    if (b.lo.size() != 2) r.fail(sec_name + "." + prefix + "_lo", "expected 2 components");
    if (b.hi.size() != 2) r.fail(sec_name + "." + prefix + "_hi", "expected 2 components");
    return b;
}

inline EnvironmentConfig read_environment(const Reader& r, const ptree& root) {
    EnvironmentConfig env;
    const ptree& sec = *r.section("environment", true);
    env.kind = r.text(sec, "environment", "kind");
    std::ostringstream canon;
    canon << "kind=" << env.kind;

    if (env.kind == "left_right") {
        r.expect_keys("environment", sec, {"kind", "right_step", "left_step", "step_penalty", "low_reward", "high_reward"});
        auto& p = env.left_right;
        p.right_step = r.number_or(sec, "environment", "right_step", p.right_step);
        p.left_step = r.number_or(sec, "environment", "left_step", p.left_step);
        p.step_penalty = r.number_or(sec, "environment", "step_penalty", p.step_penalty);
        p.low_reward = r.number_or(sec, "environment", "low_reward", p.low_reward);
        p.high_reward = r.number_or(sec, "environment", "high_reward", p.high_reward);
        canon << ";right_step=" << format_number(p.right_step) << ";left_step=" << format_number(p.left_step)
              << ";step_penalty=" << format_number(p.step_penalty) << ";low_reward=" << format_number(p.low_reward)
              << ";high_reward=" << format_number(p.high_reward);
        if (root.find("actions") != root.not_found()) r.fail("actions", "left_right has a fixed action set");
    } else if (env.kind == "drift2d") {
        r.expect_keys("environment", sec,
                      {"kind", "matrix", "goal_lo", "goal_hi", "penalty_lo", "penalty_hi", "goal_reward",
                       "goal_reward_slope", "penalty_reward", "step_reward"});
        auto& p = env.drift2d;
        if (auto m = r.raw(sec, "environment", "matrix")) {
            const Vec v = r.vector("environment.matrix", *m);
            if (v.size() != 4) r.fail("environment.matrix", "expected 4 components (row-major 2x2)");
            std::copy(v.begin(), v.end(), p.matrix.begin());
        }
        p.goal_box = read_box(r, sec, "goal", p.goal_box);
        p.penalty_box = read_box(r, sec, "penalty", p.penalty_box);
        p.goal_reward = r.number_or(sec, "environment", "goal_reward", p.goal_reward);
        p.penalty_reward = r.number_or(sec, "environment", "penalty_reward", p.penalty_reward);
        p.step_reward = r.number_or(sec, "environment", "step_reward", p.step_reward);
        if (auto s = r.raw(sec, "environment", "goal_reward_slope")) {
            const Vec v = r.vector("environment.goal_reward_slope", *s);
            if (v.size() != 2) r.fail("environment.goal_reward_slope", "expected 2 components");
            p.goal_reward_slope = {v[0], v[1]};
        }
        const ptree* acts = r.section("actions", true);
        for (const auto& [name, child] : *acts) {
            if (!child.empty()) r.fail("actions." + name, "nested keys are not supported");
            const Vec c = r.vector("actions." + name, trim(child.data()));
            if (c.size() != 2) r.fail("actions." + name, "expected 2 components");
            p.action_names.push_back(name);
            p.offsets.push_back({c[0], c[1]});
        }
        canon << ";matrix=" << format_vector(p.matrix, ",") << ";goal=" << format_vector(p.goal_box.lo, ",") << ":"
              << format_vector(p.goal_box.hi, ",") << ";penalty=" << format_vector(p.penalty_box.lo, ",") << ":"
              << format_vector(p.penalty_box.hi, ",") << ";goal_reward=" << format_number(p.goal_reward)
              << ";goal_reward_slope=" << format_vector(p.goal_reward_slope, ",")
              << ";penalty_reward=" << format_number(p.penalty_reward)
              << ";step_reward=" << format_number(p.step_reward);
        for (std::size_t a = 0; a < p.offsets.size(); ++a)
            canon << ";action." << p.action_names[a] << "=" << format_vector(p.offsets[a], ",");
    } else {
        r.fail("environment.kind", "unknown environment '" + env.kind + "' (known: left_right, drift2d)");
    }
    env.canonical = canon.str();
    return env;
}

inline GridSpec read_grid(const Reader& r, const EnvModel& model) {
    const ptree& sec = *r.section("grid", true);
    r.expect_keys("grid", sec, {"origin", "widths", "counts", "terminals"});
    GridSpec spec;
    spec.origin = r.vector("grid.origin", r.text(sec, "grid", "origin"));
    spec.widths = r.vector("grid.widths", r.text(sec, "grid", "widths"));
    for (const auto& tok : split(r.text(sec, "grid", "counts"), ','))
        spec.counts.push_back(r.count("grid.counts", tok));
    spec.dims = spec.origin.size();
    if (spec.dims != model.state_dims)
        r.fail("grid.origin", "grid has " + std::to_string(spec.dims) + " axes but the environment has " +
                                  std::to_string(model.state_dims));
    if (spec.widths.size() != spec.dims) r.fail("grid.widths", "expected " + std::to_string(spec.dims) + " components");
    if (spec.counts.size() != spec.dims) r.fail("grid.counts", "expected " + std::to_string(spec.dims) + " components");
    for (std::size_t k = 0; k < spec.dims; ++k) {
        if (!(spec.widths[k] > 0.0)) r.fail("grid.widths", "every width must be positive");
        if (spec.counts[k] == 0) r.fail("grid.counts", "every count must be at least 1");
    }

    const std::string terminals = r.raw(sec, "grid", "terminals").value_or("auto");
    try {
        if (terminals == "auto") {
            spec.terminal_tiles = terminal_tiles_from_env(spec, model);
        } else if (terminals != "none") {
            const Grid bare(GridSpec{spec.dims, spec.origin, spec.widths, spec.counts, {}});
            for (const auto& item : split(terminals, ',')) {
                const auto parts = split(item, ':');
                if (parts.size() != 2) r.fail("grid.terminals", "expected 'auto', 'none' or a list of tile:value");
                const std::size_t f = r.count("grid.terminals", parts[0]);
                if (f >= bare.size()) r.fail("grid.terminals", "tile " + parts[0] + " is out of range");
                spec.terminal_tiles.push_back({bare.unflat(f), r.number("grid.terminals", parts[1])});
            }
        }
        (void)Grid(spec);
    } catch (const ValidationError& e) {
        r.fail("grid", e.what());
    }
    return spec;
}

inline SolverConfig read_solver(const Reader& r) {
    const ptree& sec = *r.section("solver", true);
    r.expect_keys("solver", sec, {"method", "weight_mode", "gamma", "epsilon", "max_sweeps", "init_value", "workers"});
    SolverConfig c;
    const std::string method = r.text(sec, "solver", "method");
    if (method == "classical")
        c.method = Method::classical;
    else if (method == "hnp")
        c.method = Method::hnp;
    else
        r.fail("solver.method", "expected 'classical' or 'hnp', got '" + method + "'");
    const std::string mode = r.raw(sec, "solver", "weight_mode").value_or("center-multilinear");
    if (mode == "center-multilinear")
        c.weight_mode = WeightMode::center_multilinear;
    else if (mode == "corner-box")
        c.weight_mode = WeightMode::corner_box;
    else
        r.fail("solver.weight_mode", "expected 'center-multilinear' or 'corner-box', got '" + mode + "'");
    c.gamma = r.number_or(sec, "solver", "gamma", c.gamma);
    c.epsilon = r.number_or(sec, "solver", "epsilon", c.epsilon);
    c.init_value = r.number_or(sec, "solver", "init_value", c.init_value);
    if (auto v = r.raw(sec, "solver", "max_sweeps")) c.max_sweeps = r.count("solver.max_sweeps", *v);
    if (auto v = r.raw(sec, "solver", "workers")) c.workers = r.count("solver.workers", *v);
    if (!(c.gamma > 0.0 && c.gamma <= 1.0)) r.fail("solver.gamma", "must lie in (0, 1]");
    if (!(c.epsilon > 0.0)) r.fail("solver.epsilon", "must be positive");
    if (c.max_sweeps == 0) r.fail("solver.max_sweeps", "must be positive");
    if (c.workers == 0) r.fail("solver.workers", "must be positive");
    return c;
}

} // namespace detail

/// Instantiates the configured environment.
inline EnvModel make_env(const EnvironmentConfig& cfg) {
    if (cfg.kind == "left_right") return left_right_env(cfg.left_right);
    if (cfg.kind == "drift2d") return drift2d_env(cfg.drift2d);
    hnp::detail::fail_validation("unknown environment '" + cfg.kind + "'");
}

inline ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    namespace pt = boost::property_tree;
    pt::ptree root;
    try {
        std::istringstream in(text);
        pt::read_ini(in, root);
    } catch (const pt::ini_parser_error& e) {
        hnp::detail::fail_validation("config " + source + ": line " + std::to_string(e.line()) + ": " + e.message());
    }

    const detail::Reader r(root, source);
    ExperimentConfig cfg;
    cfg.source = source;

    std::set<std::string> sections{"experiment", "environment", "grid", "solver", "rollout", "report", "actions"};
    for (const auto& [key, child] : root) {
        if (child.empty()) {
            if (key != "schema") r.fail(key, "unknown top-level key");
        } else if (!sections.contains(key)) {
            hnp::detail::fail_validation("config " + source + ": unknown section [" + key + "]");
        }
    }
    const auto schema = root.find("schema");
    if (schema == root.not_found()) r.fail("schema", "missing required field (expected '" + std::string(schema_id) + "')");
    if (detail::trim(schema->second.data()) != schema_id)
        r.fail("schema", "unsupported schema '" + schema->second.data() + "' (expected '" + std::string(schema_id) + "')");

    const auto& exp = *r.section("experiment", true);
    r.expect_keys("experiment", exp, {"name", "description"});
    cfg.name = r.text(exp, "experiment", "name");
    if (cfg.name.empty() || cfg.name.find_first_of("/\\") != std::string::npos || cfg.name == "." || cfg.name == "..")
        r.fail("experiment.name", "must be a non-empty plain file name");
    cfg.description = r.raw(exp, "experiment", "description").value_or("");

    cfg.environment = detail::read_environment(r, root);
    EnvModel model;
    try {
        model = make_env(cfg.environment);
    } catch (const ValidationError& e) {
        r.fail("environment", e.what());
    }
    cfg.grid = detail::read_grid(r, model);
    cfg.solver = detail::read_solver(r);

    if (const auto* ro = r.section("rollout", false)) {
        r.expect_keys("rollout", *ro, {"starts", "max_steps"});
        if (auto s = r.raw(*ro, "rollout", "starts")) {
            for (const auto& item : detail::split(*s, ';')) {
                if (item.empty()) continue;
                Vec v = r.vector("rollout.starts", item);
                if (v.size() != model.state_dims) r.fail("rollout.starts", "start '" + item + "' has wrong dimension");
                if (model.terminal(v)) r.fail("rollout.starts", "start '" + item + "' is terminal");
                cfg.rollout.starts.push_back(std::move(v));
            }
        }
        if (auto m = r.raw(*ro, "rollout", "max_steps")) cfg.rollout.max_steps = r.count("rollout.max_steps", *m);
        if (cfg.rollout.max_steps == 0) r.fail("rollout.max_steps", "must be positive");
    }

    if (const auto* rep = r.section("report", false)) {
        r.expect_keys("report", *rep, {"probe"});
        if (auto p = r.raw(*rep, "report", "probe")) cfg.probe = r.vector("report.probe", *p);
    }
    if (cfg.probe.empty()) {
        if (!cfg.rollout.starts.empty()) {
            cfg.probe = cfg.rollout.starts.front();
        } else {
            const Grid g(cfg.grid);
            for (std::size_t f = 0; f < g.size() && cfg.probe.empty(); ++f)
                if (!g.is_terminal(f)) cfg.probe = tile_center(g, g.unflat(f));
            if (cfg.probe.empty()) cfg.probe = tile_center(g, g.unflat(0));
        }
    }
    if (cfg.probe.size() != model.state_dims) r.fail("report.probe", "wrong dimension");
    return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) hnp::detail::fail_validation("config " + path.string() + ": file not found or unreadable");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

} // namespace hnp::cli
