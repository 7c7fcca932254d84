#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "hnp/cli/experiment.hpp"

using namespace hnp;
using namespace hnp::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("hnp_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_tool(const std::string& args, std::string* err = nullptr) {
    const auto log = fs::temp_directory_path() / "hnp_cli_test_stderr.txt";
    const std::string cmd = std::string(HNP_TOOL_PATH) + " " + args + " >/dev/null 2>" + log.string();
    const int status = std::system(cmd.c_str());
    if (err) *err = slurp(log);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Every file in `dir` except timing files, keyed by name.
std::map<std::string, std::string> payload(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (name.find("timing") != std::string::npos) continue;
        out[name] = slurp(e.path());
    }
    return out;
}

std::map<std::string, std::string> summary_fields(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto colon = line.find(": ");
        if (colon != std::string::npos) out[line.substr(0, colon)] = line.substr(colon + 2);
    }
    return out;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

void expect_matches_golden(const fs::path& produced, const std::string& golden_name) {
    const fs::path golden = fs::path(HNP_GOLDEN_DIR) / golden_name;
    ASSERT_TRUE(fs::exists(golden)) << golden;
    const auto want = payload(golden);
    const auto got = payload(produced);
    ASSERT_EQ(want.size(), got.size()) << golden_name;
    for (const auto& [name, text] : want) {
        ASSERT_TRUE(got.count(name)) << name;
        EXPECT_EQ(got.at(name), text) << golden_name << "/" << name;
    }
}

} // namespace

TEST(Format, Numbers) {
    EXPECT_EQ(format_number(0.0), "0");
    EXPECT_EQ(format_number(-0.0), "0");
    EXPECT_EQ(format_number(0.99), "0.99");
    EXPECT_EQ(format_number(10.0), "10");
    EXPECT_EQ(format_number(1e-9), "1e-09");
    EXPECT_EQ(format_number(1.0000000000000004), "1.0000000000000004");
    EXPECT_EQ(format_ratio(100, 1), "100");
    EXPECT_EQ(format_ratio(60000, 150), "400");
    EXPECT_EQ(format_ratio(3, 2), "3/2");
    EXPECT_EQ(format_ratio(4, 6), "2/3");
    EXPECT_EQ(format_ratio(1, 0), "undefined");
}

TEST(Golden, ThreeTileHnpSolve) {
    const auto out = scratch("golden_hnp");
    ASSERT_EQ(run_tool("solve paper-3tile-hnp -o " + out.string()), 0);
    expect_matches_golden(out / "paper-3tile-hnp", "paper-3tile-hnp");
}

TEST(Golden, ThreeTileClassicalSolve) {
    const auto out = scratch("golden_classical");
    ASSERT_EQ(run_tool("solve paper-3tile-classical -o " + out.string()), 0);
    expect_matches_golden(out / "paper-3tile-classical", "paper-3tile-classical");
}

TEST(Golden, EfficiencyCompare) {
    const auto out = scratch("golden_compare");
    ASSERT_EQ(run_tool("compare paper-efficiency -o " + out.string()), 0);
    expect_matches_golden(out / "paper-efficiency", "paper-efficiency");
}

TEST(Tool, ExitCodes) {
    const auto out = scratch("exit");
    std::string err;
    EXPECT_EQ(run_tool("list-presets"), 0);
    EXPECT_EQ(run_tool("solve no-such-config -o " + out.string(), &err), 1);
    EXPECT_NE(err.find("not found"), std::string::npos) << err;
    EXPECT_EQ(run_tool("frobnicate"), 1);
    EXPECT_EQ(run_tool("solve"), 1);
    EXPECT_EQ(run_tool("compare paper-3tile-hnp drift2d-hnp -o " + out.string(), &err), 1);
    EXPECT_NE(err.find("different environment"), std::string::npos) << err;

    const auto bad = out / "bad.ini";
    std::ofstream(bad) << "schema = hnp-experiment/1\n[experiment]\nname = b\n[environment]\nkind = left_right\n"
                          "[grid]\norigin = -3\ncounts = 3\n[solver]\nmethod = hnp\n";
    EXPECT_EQ(run_tool("solve " + bad.string() + " -o " + out.string(), &err), 1);
    EXPECT_NE(err.find("grid.widths"), std::string::npos) << err;

    // rewards that overflow to infinity fail at runtime
    const auto overflow = out / "overflow.ini";
    std::ofstream(overflow) << "schema = hnp-experiment/1\n[experiment]\nname = o\n[environment]\nkind = drift2d\n"
                               "goal_reward = 1e308\nstep_reward = 1e308\n[actions]\ngo = 0.5, 0\n[grid]\n"
                               "origin = -1, -1\nwidths = 0.5, 0.5\ncounts = 4, 4\n[solver]\nmethod = hnp\n";
    EXPECT_EQ(run_tool("solve " + overflow.string() + " -o " + out.string(), &err), 2);
    EXPECT_NE(err.find("non-finite"), std::string::npos) << err;
}

TEST(Tool, RolloutOverrides) {
    const auto out = scratch("rollout");
    ASSERT_EQ(run_tool("rollout paper-3tile-hnp --start 0.5 --start -0.5 -n 10 -o " + out.string()), 0);
    const auto dir = out / "paper-3tile-hnp";
    const auto f = summary_fields(slurp(dir / "summary.txt"));
    EXPECT_EQ(f.at("rollouts"), "2");
    EXPECT_EQ(f.at("rollout 0"), "start=0.5 steps=10 total_reward=0 terminated=false final_state=0.7000000000000002");
    EXPECT_TRUE(fs::exists(dir / "trajectory_1.csv"));
    EXPECT_EQ(run_tool("rollout paper-3tile-hnp --start abc -o " + out.string()), 1);
    EXPECT_EQ(run_tool("rollout paper-3tile-hnp --start 5 -o " + out.string()), 1);
}

TEST(Determinism, SolveIsByteStableAcrossWorkers) {
    const auto a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
    ASSERT_EQ(run_tool("solve drift2d-hnp -j 1 -o " + a.string()), 0);
    ASSERT_EQ(run_tool("solve drift2d-hnp -j 4 -o " + b.string()), 0);
    ASSERT_EQ(run_tool("solve drift2d-hnp -j 1 -o " + c.string()), 0);
    const auto pa = payload(a / "drift2d-hnp");
    EXPECT_EQ(pa, payload(b / "drift2d-hnp"));
    EXPECT_EQ(pa, payload(c / "drift2d-hnp"));
    EXPECT_TRUE(fs::exists(a / "drift2d-hnp" / "timing.csv"));
}

TEST(Report, SummaryAgreesWithCsv) {
    const auto cfg = resolve_config("paper-3tile-hnp");
    const auto r = execute(cfg);
    const auto f = summary_fields(solve_summary(r));
    const auto values = csv_rows(values_csv(r));
    const auto policy = csv_rows(policy_csv(r));
    const auto conv = csv_rows(convergence_csv(r.report));

    EXPECT_EQ(values[0], (std::vector<std::string>{"tile", "i0", "x0", "value", "frozen"}));
    EXPECT_EQ(values[1 + r.probe_tile][3], f.at("probe_value"));
    EXPECT_EQ(policy[1][1], f.at("probe_action"));
    EXPECT_EQ(policy[1][2], f.at("probe_q"));
    EXPECT_EQ(conv.back()[0], f.at("sweeps_run"));
    EXPECT_EQ(conv.back()[1], f.at("final_delta"));
    EXPECT_EQ(std::to_string(conv.size() - 1), f.at("sweeps_run"));

    const auto traj = csv_rows(trajectory_csv(r, r.trajectories[0]));
    EXPECT_EQ(traj[0], (std::vector<std::string>{"step", "s0", "action", "reward", "n0", "terminal"}));
    EXPECT_EQ(traj.size(), 51u);
    EXPECT_EQ(traj.back()[5], "1");
    EXPECT_EQ(traj[1][5], "0");
}

TEST(Report, ComparisonSummaryAgreesWithCsv) {
    auto [configs, label] = resolve_compare({"paper-efficiency"});
    EXPECT_EQ(label, "paper-efficiency");
    const auto rep = compare(configs);
    const auto rows = csv_rows(comparison_csv(rep));
    const auto text = comparison_summary(rep);
    const auto f = summary_fields(text);
    EXPECT_EQ(f.at("efficiency_ratio"), "100");
    ASSERT_EQ(rows.size(), 3u);

    // table rows: run method tiles_nonterminal sweeps_run converged probe_value probe_action reward steps
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<std::string>> table;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<std::string> cells;
        std::string cell;
        while (ls >> cell) cells.push_back(cell);
        if (cells.size() == 9) table.push_back(cells);
    }
    ASSERT_EQ(table.size(), 3u);
    for (std::size_t i = 1; i < 3; ++i) {
        const auto& csv = rows[i];
        const auto& t = table[i];
        EXPECT_EQ(t[0], csv[0]);
        EXPECT_EQ(t[1], csv[1]);
        EXPECT_EQ(t[2], csv[4]);
        EXPECT_EQ(t[3], csv[5]);
        EXPECT_EQ(t[4], csv[6]);
        EXPECT_EQ(t[5], csv[7]);
        EXPECT_EQ(t[6], csv[8]);
        EXPECT_EQ(t[7], csv[10]);
        EXPECT_EQ(t[8], csv[11]);
    }
}

TEST(Report, SelfComparisonHasRatioOne) {
    const auto cfg = resolve_config("paper-3tile-hnp");
    const auto rep = compare({cfg, cfg});
    EXPECT_EQ(rep.efficiency_ratio, "1");
    const auto rows = csv_rows(comparison_csv(rep));
    EXPECT_EQ(rows[1], rows[2]);
}

TEST(Report, ConfigFileWinsOverPresetName) {
    const auto dir = scratch("resolve");
    const auto path = dir / "paper-3tile-hnp";
    std::string text = find_preset("paper-3tile-classical")->text;
    std::ofstream(path) << text;
    EXPECT_EQ(resolve_config(path.string()).name, "paper-3tile-classical");
    EXPECT_THROW(resolve_config("definitely-not-a-preset"), ValidationError);
    EXPECT_THROW(resolve_compare({}), ValidationError);
}
