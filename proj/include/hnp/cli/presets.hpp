#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hnp::cli {

/// A bundled experiment config.
struct Preset {
    std::string_view name;
    std::string_view summary;
    std::string text;
};

/// A bundled comparison: the first run is the baseline.
struct ComparePreset {
    std::string_view name;
    std::string_view summary;
    std::vector<std::string_view> runs;
};

namespace presets_detail {

inline constexpr std::string_view paper_3tile_hnp = R"ini(schema = hnp-experiment/1

[experiment]
name = paper-3tile-hnp
description = Three tiles L | M | R, HNP backups, no step penalty

[environment]
kind = left_right
right_step = 0.02
left_step = 2
step_penalty = 0

[grid]
origin = -3
widths = 2
counts = 3
terminals = auto

[solver]
method = hnp
weight_mode = center-multilinear
gamma = 1
epsilon = 1e-9
max_sweeps = 10000
init_value = 0

[rollout]
starts = 0
max_steps = 1000

[report]
probe = 0
)ini";

inline constexpr std::string_view paper_3tile_classical = R"ini(schema = hnp-experiment/1

[experiment]
name = paper-3tile-classical
description = Three tiles L | M | R, tile-center backups, step penalty -0.01

[environment]
kind = left_right
right_step = 0.02
left_step = 2
step_penalty = -0.01

[grid]
origin = -3
widths = 2
counts = 3
terminals = auto

[solver]
method = classical
gamma = 1
epsilon = 1e-9
max_sweeps = 10000
init_value = 0

[rollout]
starts = 0
max_steps = 1000

[report]
probe = 0
)ini";

inline constexpr std::string_view paper_efficiency_classical = R"ini(schema = hnp-experiment/1

[experiment]
name = paper-efficiency-classical
description = 100 interior tiles of width 0.02, tile-center backups

[environment]
kind = left_right
right_step = 0.02
left_step = 2
step_penalty = 0

[grid]
origin = -1.02
widths = 0.02
counts = 102
terminals = auto

[solver]
method = classical
gamma = 1
epsilon = 1e-9
max_sweeps = 10000
init_value = 0

[rollout]
starts = 0
max_steps = 1000

[report]
probe = 0
)ini";

inline constexpr std::string_view paper_efficiency_hnp = R"ini(schema = hnp-experiment/1

[experiment]
name = paper-efficiency-hnp
description = One interior tile, HNP backups

[environment]
kind = left_right
right_step = 0.02
left_step = 2
step_penalty = 0

[grid]
origin = -3
widths = 2
counts = 3
terminals = auto

[solver]
method = hnp
weight_mode = center-multilinear
gamma = 1
epsilon = 1e-9
max_sweeps = 10000
init_value = 0

[rollout]
starts = 0
max_steps = 1000

[report]
probe = 0
)ini";

inline constexpr std::string_view paper_efficiency_slow_classical = R"ini(schema = hnp-experiment/1

[experiment]
name = paper-efficiency-slow-classical
description = Right step 0.002, 1000 interior tiles of width 0.002, tile-center backups

[environment]
kind = left_right
right_step = 0.002
left_step = 2
step_penalty = 0

[grid]
origin = -1.002
widths = 0.002
counts = 1002
terminals = auto

[solver]
method = classical
gamma = 1
epsilon = 1e-9
max_sweeps = 10000
init_value = 0

[rollout]
starts = 0
max_steps = 10000

[report]
probe = 0
)ini";

inline constexpr std::string_view paper_efficiency_slow_hnp = R"ini(schema = hnp-experiment/1

[experiment]
name = paper-efficiency-slow-hnp
description = Right step 0.002, one interior tile, HNP backups

[environment]
kind = left_right
right_step = 0.002
left_step = 2
step_penalty = 0

[grid]
origin = -3
widths = 2
counts = 3
terminals = auto

[solver]
method = hnp
weight_mode = center-multilinear
gamma = 1
epsilon = 1e-9
max_sweeps = 100000
init_value = 0

[rollout]
starts = 0
max_steps = 10000

[report]
probe = 0
)ini";

// Shared by the two drift2d presets; only [experiment], [grid] and [solver]
// differ.
inline constexpr std::string_view drift2d_common = R"ini(
[environment]
kind = drift2d
matrix = 1, 0, 0, 1
goal_lo = 1, -100
goal_hi = 100, 100
penalty_lo = -100, -100
penalty_hi = -1, 100
goal_reward = 10
goal_reward_slope = 0, 4
penalty_reward = 8
step_reward = -0.05

[actions]
advance = 0.02, 0.01
quit = -3, 0

[rollout]
starts = 0, 0; -0.9, -0.9; -0.9, 0.9
max_steps = 1000

[report]
probe = 0, 0
)ini";

inline constexpr std::string_view drift2d_hnp = R"ini(schema = hnp-experiment/1

[experiment]
name = drift2d-hnp
description = 2-D drift, 10 x 15 interior tiles of width 0.2, HNP

[grid]
origin = -1.2, -1
widths = 0.2, 0.2
counts = 12, 15
terminals = auto

[solver]
method = hnp
weight_mode = center-multilinear
gamma = 1
epsilon = 1e-9
max_sweeps = 10000
)ini";

inline constexpr std::string_view drift2d_classical_fine = R"ini(schema = hnp-experiment/1

[experiment]
name = drift2d-classical-fine
description = 2-D drift, 200 x 300 interior tiles of width 0.01, tile-center backups

[grid]
origin = -1.01, -1
widths = 0.01, 0.01
counts = 202, 300
terminals = auto

[solver]
method = classical
gamma = 1
epsilon = 1e-9
max_sweeps = 10000
)ini";

} // namespace presets_detail

inline const std::vector<Preset>& presets() {
    using namespace presets_detail;
    static const std::vector<Preset> all{
        {"paper-3tile-hnp", "3-tile LeftRight grid solved with HNP; v_M converges to 10", std::string(paper_3tile_hnp)},
        {"paper-3tile-classical", "3-tile LeftRight grid solved classically; the agent quits left",
         std::string(paper_3tile_classical)},
        {"paper-efficiency-classical", "LeftRight with 100 interior tiles, classical",
         std::string(paper_efficiency_classical)},
        {"paper-efficiency-hnp", "LeftRight with 1 interior tile, HNP", std::string(paper_efficiency_hnp)},
        {"paper-efficiency-slow-classical", "slow LeftRight (step 0.002) with 1000 interior tiles, classical",
         std::string(paper_efficiency_slow_classical)},
        {"paper-efficiency-slow-hnp", "slow LeftRight (step 0.002) with 1 interior tile, HNP",
         std::string(paper_efficiency_slow_hnp)},
        {"drift2d-hnp", "2-D drift problem on a coarse grid, HNP", std::string(drift2d_hnp) + std::string(drift2d_common)},
        {"drift2d-classical-fine", "2-D drift problem on a 20x finer grid, classical",
         std::string(drift2d_classical_fine) + std::string(drift2d_common)},
    };
    return all;
}

inline const std::vector<ComparePreset>& compare_presets() {
    static const std::vector<ComparePreset> all{
        {"paper-efficiency", "classical 100 tiles vs HNP 1 tile", {"paper-efficiency-classical", "paper-efficiency-hnp"}},
        {"paper-efficiency-slow",
         "classical 1000 tiles vs HNP 1 tile, right step 0.002",
         {"paper-efficiency-slow-classical", "paper-efficiency-slow-hnp"}},
        {"drift2d", "classical fine grid vs HNP coarse grid in 2-D", {"drift2d-classical-fine", "drift2d-hnp"}},
    };
    return all;
}

inline std::optional<Preset> find_preset(std::string_view name) {
    for (const auto& p : presets())
        if (p.name == name) return p;
    return std::nullopt;
}

inline std::optional<ComparePreset> find_compare_preset(std::string_view name) {
    for (const auto& p : compare_presets())
        if (p.name == name) return p;
    return std::nullopt;
}

} // namespace hnp::cli
