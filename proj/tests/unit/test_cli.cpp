// Drives the flowmem executable end to end.
#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "flowmem/csv_io.hpp"
#include "flowmem/dfa.hpp"
#include "flowmem/serialize.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;  ///< stdout and stderr interleaved
};

Result run(const std::string& args, const fs::path& cwd, const std::string& env = "") {
    const std::string cmd = "cd '" + cwd.string() + "' && " + env + " '" + FLOWMEM_CLI + "' " + args + " 2>&1";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return r;
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file()) out[e.path().filename().string()] = slurp(e.path());
    }
    return out;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("flowmem_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    void make_flows(std::size_t n = 400) {
        const auto r = run("synth --group retail=fgn:0.8 --group foreign=pareto:2.5 --n " + std::to_string(n) +
                               " --seed 3 --out flows.csv --prices-out prices.csv",
                           dir_);
        ASSERT_EQ(r.code, 0) << r.out;
    }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, Version) {
    const auto r = run("--version", dir_);
    EXPECT_EQ(r.code, 0);
    EXPECT_FALSE(r.out.empty());
}

TEST_F(CliTest, DfaMatchesLibraryByteForByte) {
    ASSERT_EQ(run("synth --kind fgn --H 0.7 --n 4096 --seed 5 --out x.csv", dir_).code, 0);
    const auto r = run("dfa --input x.csv --curve-out curve.csv", dir_);
    ASSERT_EQ(r.code, 0) << r.out;

    const auto series = flowmem::read_dated_series(dir_ / "x.csv");
    const auto lib = flowmem::dfa_analyze(series.values);
    EXPECT_EQ(r.out, flowmem::dump_json(nlohmann::json(lib.fit)));
    std::ostringstream curve;
    flowmem::write_curve_csv(curve, lib.curve);
    EXPECT_EQ(slurp(dir_ / "curve.csv"), curve.str());
    EXPECT_NEAR(lib.fit.hurst, 0.7, 0.05);
}

TEST_F(CliTest, SingleSeriesSubcommands) {
    ASSERT_EQ(run("synth --kind pareto --alpha 2.5 --n 5000 --seed 2 --out p.csv", dir_).code, 0);
    auto r = run("tails --input p.csv --method hill --tail-fraction 0.02 --ccdf-out ccdf.csv", dir_);
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NEAR(nlohmann::json::parse(r.out).at("exponent").get<double>(), 2.5, 0.5);
    EXPECT_EQ(slurp(dir_ / "ccdf.csv").rfind("x,p_empirical,p_gaussian\n", 0), 0u);

    ASSERT_EQ(run("synth --kind iid --n 600 --seed 2 --out g.csv", dir_).code, 0);
    r = run("surrogate --input g.csv --kind shuffle --count 4 --seed 9", dir_);
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(nlohmann::json::parse(r.out).at("H_values").size(), 4u);

    r = run("roll --input g.csv --window 250 --step 50", dir_);
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(r.out.rfind("end_date,H,stderr,r2\n", 0), 0u);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1 + 8);
}

TEST_F(CliTest, StagesComposeToRun) {
    make_flows();
    const std::string in = "--flows flows.csv --prices prices.csv ";
    ASSERT_EQ(run("run " + in + "--out whole", dir_).code, 0);
    for (const char* stage : {"ingest-check", "tails", "dfa", "surrogate", "roll", "regress", "report"}) {
        const auto r = run(std::string(stage) + " " + in + "--out staged", dir_);
        ASSERT_EQ(r.code, 0) << stage << ": " << r.out;
    }
    EXPECT_EQ(snapshot(dir_ / "staged"), snapshot(dir_ / "whole"));
}

TEST_F(CliTest, ReportOnIncompleteArtifacts) {
    make_flows();
    ASSERT_EQ(run("ingest-check --flows flows.csv --out partial", dir_).code, 0);
    ASSERT_EQ(run("dfa --flows flows.csv --out partial", dir_).code, 0);
    const auto r = run("report --flows flows.csv --out partial", dir_);
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.out.find("missing artifact"), std::string::npos) << r.out;
}

TEST_F(CliTest, WindowTooLongNamesRollingStage) {
    make_flows(300);
    std::ofstream(dir_ / "config.json") << R"({"inputs": {"flows": "flows.csv"}, "rolling": {"window": 500, "step": 5}})";
    const auto r = run("run --config config.json --out o", dir_);
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("stage 'rolling'"), std::string::npos) << r.out;
    EXPECT_TRUE(fs::exists(dir_ / "o" / "quarantine"));
}

TEST_F(CliTest, OutputDirectoryPrecedence) {
    make_flows(300);
    std::ofstream(dir_ / "config.json")
        << R"({"inputs": {"flows": "flows.csv"}, "output_dir": "from_config", "surrogates": {"count": 2}})";
    ASSERT_EQ(run("ingest-check --config config.json", dir_).code, 0);
    EXPECT_TRUE(fs::exists(dir_ / "from_config" / "ingest.json"));
    ASSERT_EQ(run("ingest-check --config config.json", dir_, "FLOWMEM_OUTPUT_DIR=from_env").code, 0);
    EXPECT_TRUE(fs::exists(dir_ / "from_env" / "ingest.json"));
    ASSERT_EQ(run("ingest-check --config config.json --out from_flag", dir_, "FLOWMEM_OUTPUT_DIR=from_env").code, 0);
    EXPECT_TRUE(fs::exists(dir_ / "from_flag" / "ingest.json"));
}

TEST_F(CliTest, SeedFlagChangesSurrogatesOnly) {
    make_flows(300);
    const std::string in = "run --flows flows.csv ";
    ASSERT_EQ(run(in + "--out a --seed 1", dir_).code, 0);
    ASSERT_EQ(run(in + "--out b --seed 2", dir_).code, 0);
    EXPECT_EQ(slurp(dir_ / "a" / "dfa.json").size() > 0, true);
    EXPECT_NE(slurp(dir_ / "a" / "surrogates.json"), slurp(dir_ / "b" / "surrogates.json"));
    EXPECT_EQ(slurp(dir_ / "a" / "fig3_dfa_retail_BUY.csv"), slurp(dir_ / "b" / "fig3_dfa_retail_BUY.csv"));
}

TEST_F(CliTest, MalformedFlowsReportLine) {
    std::ofstream(dir_ / "bad.csv") << "date,group,buy,sell\n2020-01-02,retail,1,2\n2020-01-03,pension,1,2\n";
    const auto r = run("ingest-check --flows bad.csv --out o", dir_);
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("bad.csv:3"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("pension"), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_NE(run("", dir_).code, 0);
    EXPECT_NE(run("dfa --order", dir_).code, 0);
    EXPECT_NE(run("synth --kind nonsense --out x.csv", dir_).code, 0);
}
