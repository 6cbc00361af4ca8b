#include "dualaoi/cli.hpp"
#include "dualaoi/sweep.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace dualaoi;

namespace {

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    Outcome o;
    o.code = cli::run(args, out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);) out.push_back(line);
    return out;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("dualaoi_test_" + name);
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override { unsetenv(cli::kSeedEnv); }
    void TearDown() override { unsetenv(cli::kSeedEnv); }
};

}  // namespace

TEST_F(CliTest, AnalyticMm) {
    const auto o = run({"analytic", "--system", "mm", "--mu-a", "1", "--mu-b", "1"});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(o.out,
              "system,metric,value\nmm,avg_aoi,1.25\nmm,avg_paoi,1.33333333333\nmm,effective_rate,1.5\n"
              "mm,obsolete_ratio,0.25\n");
}

TEST_F(CliTest, AnalyticMd) {
    const auto o = run({"analytic", "--system", "md", "--mu", "1", "--period", "1", "--metrics", "avg_aoi,avg_paoi"});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(o.out, "system,metric,value\nmd,avg_aoi,1.2051586515\nmd,avg_paoi,1.44587573318\n");
}

TEST_F(CliTest, AnalyticBaselines) {
    auto o = run({"analytic", "--system", "single", "--mu", "2", "--metrics", "avg_aoi"});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(o.out, "system,metric,value\nsingle,avg_aoi,1\n");
    o = run({"analytic", "--system", "mm11", "--lambda", "4", "--mu", "1", "--metrics", "avg_aoi"});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(o.out, "system,metric,value\nmm11,avg_aoi,1.25\n");
}

TEST_F(CliTest, AnalyticWithoutClosedFormFails) {
    for (const char* sys : {"dd", "mm2"}) {
        const auto o = run({"analytic", "--system", sys, "--period", "1", "--lambda", "1", "--mu", "1"});
        EXPECT_NE(o.code, 0);
        EXPECT_NE(o.err.find("no closed form; use simulate"), std::string::npos) << o.err;
        EXPECT_TRUE(o.out.empty());
    }
}

TEST_F(CliTest, ErrorsNameTheFlag) {
    auto o = run({"analytic", "--system", "mm", "--mu-a", "1"});
    EXPECT_NE(o.code, 0);
    EXPECT_NE(o.err.find("--mu-b"), std::string::npos) << o.err;
    o = run({"analytic", "--system", "md", "--mu", "-1", "--period", "1"});
    EXPECT_NE(o.code, 0);
    EXPECT_NE(o.err.find("--mu"), std::string::npos) << o.err;
    o = run({"simulate", "--system", "dd", "--period", "1", "--offset", "1.5", "--seed", "1"});
    EXPECT_NE(o.code, 0);
    EXPECT_NE(o.err.find("dd_offset"), std::string::npos) << o.err;
    o = run({"analytic", "--system", "xyz", "--mu", "1"});
    EXPECT_NE(o.code, 0);
}

TEST_F(CliTest, SimulateJson) {
    const auto o = run({"simulate", "--system", "mm", "--mu", "1", "--seed", "7"});
    ASSERT_EQ(o.code, 0) << o.err;
    const auto j = nlohmann::json::parse(o.out);
    EXPECT_EQ(j["config"]["system"], "mm");
    EXPECT_EQ(j["config"]["seed"], 7);
    EXPECT_EQ(j["config"]["accepted"], 100000);
    EXPECT_EQ(j["config"]["warmup"], 1000);
    EXPECT_EQ(j["config"]["batches"], 32);
    for (const char* key : {"avg_aoi", "avg_paoi", "effective_rate", "obsolete_ratio", "n_accepted", "n_obsolete",
                            "sim_time", "half_width_aoi", "half_width_paoi"})
        EXPECT_TRUE(j["stats"].contains(key)) << key;
    EXPECT_EQ(j["reference"]["avg_aoi"]["analytic"], 1.25);
    EXPECT_LT(j["reference"]["avg_aoi"]["rel_error"].get<double>(), 0.02);
}

TEST_F(CliTest, SimulateMdWithinTwoPercent) {
    const auto o = run({"simulate", "--system", "md", "--mu", "1", "--period", "1", "--seed", "7"});
    ASSERT_EQ(o.code, 0) << o.err;
    const auto j = nlohmann::json::parse(o.out);
    EXPECT_NEAR(j["reference"]["avg_paoi"]["analytic"].get<double>(), 1.4459, 1e-4);
    EXPECT_LT(j["reference"]["avg_paoi"]["rel_error"].get<double>(), 0.02);
}

TEST_F(CliTest, SimulateIsByteIdenticalOnRepeat) {
    const std::vector<std::string> args{"simulate", "--system", "md", "--mu", "2", "--period", "0.5", "--seed", "11",
                                        "--accepted", "20000"};
    const auto a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, SimulateWithoutReferenceReportsNull) {
    const auto o = run({"simulate", "--system", "dd", "--period", "1", "--offset", "0.5", "--seed", "1", "--accepted",
                        "5000"});
    ASSERT_EQ(o.code, 0) << o.err;
    const auto j = nlohmann::json::parse(o.out);
    EXPECT_TRUE(j["reference"].is_null());
    EXPECT_EQ(j["config"]["dd_offset"], 0.5);
    EXPECT_NEAR(j["stats"]["avg_aoi"].get<double>(), 1.25, 1e-9);
}

TEST_F(CliTest, SeedComesFromFlagThenEnvironment) {
    auto o = run({"simulate", "--system", "mm", "--mu", "1", "--accepted", "5000"});
    EXPECT_NE(o.code, 0);
    EXPECT_NE(o.err.find("DUALAOI_SEED"), std::string::npos) << o.err;

    setenv(cli::kSeedEnv, "42", 1);
    o = run({"simulate", "--system", "mm", "--mu", "1", "--accepted", "5000"});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(nlohmann::json::parse(o.out)["config"]["seed"], 42);

    o = run({"simulate", "--system", "mm", "--mu", "1", "--accepted", "5000", "--seed", "3"});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(nlohmann::json::parse(o.out)["config"]["seed"], 3);
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
    const auto path = temp_path("config.toml");
    {
        std::ofstream f(path);
        f << "[simulate]\nsystem = \"md\"\nmu = 1\nperiod = 1\nseed = 5\naccepted = 5000\n";
    }
    auto o = run({"--config", path.string(), "simulate"});
    ASSERT_EQ(o.code, 0) << o.err;
    auto j = nlohmann::json::parse(o.out);
    EXPECT_EQ(j["config"]["system"], "md");
    EXPECT_EQ(j["config"]["seed"], 5);
    EXPECT_EQ(j["config"]["accepted"], 5000);

    o = run({"--config", path.string(), "simulate", "--seed", "6"});
    ASSERT_EQ(o.code, 0) << o.err;
    j = nlohmann::json::parse(o.out);
    EXPECT_EQ(j["config"]["seed"], 6);
    std::filesystem::remove(path);
}

TEST_F(CliTest, SimulateWritesTrace) {
    const auto path = temp_path("trace.csv");
    const auto o = run({"simulate", "--system", "mm", "--mu", "1", "--seed", "2", "--accepted", "2000", "--trace",
                        path.string()});
    ASSERT_EQ(o.code, 0) << o.err;
    std::ifstream f(path);
    std::string header;
    std::getline(f, header);
    EXPECT_EQ(header, "t,gen_time,sensor,prev_state,new_state,path_l,Y,T_service");
    std::size_t rows = 0;
    for (std::string line; std::getline(f, line);) ++rows;
    EXPECT_EQ(rows, 1000u);
    std::filesystem::remove(path);
}

TEST_F(CliTest, SweepAnalyticSchemaAndOrder) {
    const auto o = run({"sweep", "--systems", "mm,md,single", "--variable", "service_rate", "--start", "2", "--stop",
                        "5", "--steps", "4", "--metrics", "avg_aoi,avg_paoi"});
    ASSERT_EQ(o.code, 0) << o.err;
    const auto ls = lines(o.out);
    ASSERT_EQ(ls.size(), 1u + 4 * 3 * 2);
    EXPECT_EQ(ls[0], "system,param,metric,analytic,simulated,ci_half_width,seed");
    EXPECT_EQ(ls[1], "mm,2,avg_aoi,0.625,,,");
    EXPECT_EQ(ls[5], "single,2,avg_aoi,1,,,");
    double prev_param = 0.0;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto cells = split(ls[i]);
        ASSERT_EQ(cells.size(), 7u) << ls[i];
        const double p = std::stod(cells[1]);
        EXPECT_GE(p, prev_param);
        prev_param = p;
    }
}

TEST_F(CliTest, SweepBothModeWithinConfidence) {
    const auto o = run({"sweep", "--systems", "mm,md,mm11,dd,mm2", "--start", "2", "--stop", "5", "--steps", "4",
                        "--mode", "both", "--seed", "3", "--metrics", "avg_aoi,avg_paoi,effective_rate"});
    ASSERT_EQ(o.code, 0) << o.err;
    const auto ls = lines(o.out);
    ASSERT_EQ(ls.size(), 1u + 4 * 5 * 3);
    int compared = 0;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto c = split(ls[i]);
        ASSERT_FALSE(c[4].empty()) << ls[i];
        ASSERT_FALSE(c[6].empty()) << ls[i];
        if (c[3].empty()) continue;
        const double analytic = std::stod(c[3]), simulated = std::stod(c[4]), hw = std::stod(c[5]);
        EXPECT_LE(std::abs(simulated - analytic), std::max(3 * hw, 0.02 * analytic)) << ls[i];
        ++compared;
    }
    EXPECT_EQ(compared, 4 * 3 * 3);
}

TEST_F(CliTest, SweepIsIndependentOfWorkerCount) {
    const std::vector<std::string> base{"sweep", "--systems", "mm,md", "--variable", "rate_ratio", "--start", "0.2",
                                        "--stop", "1", "--steps", "3", "--mode", "simulate", "--seed", "4",
                                        "--accepted", "10000", "--replications", "2"};
    auto one = base, three = base;
    one.insert(one.end(), {"--workers", "1"});
    three.insert(three.end(), {"--workers", "3"});
    const auto a = run(one), b = run(three);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, SweepValidation) {
    auto o = run({"sweep", "--systems", "mm2", "--variable", "period", "--start", "0.5", "--stop", "2"});
    EXPECT_NE(o.code, 0);
    EXPECT_NE(o.err.find("mm2"), std::string::npos) << o.err;
    o = run({"sweep", "--start", "3", "--stop", "2"});
    EXPECT_NE(o.code, 0);
    o = run({"sweep", "--steps", "1"});
    EXPECT_NE(o.code, 0);
    o = run({"sweep", "--mode", "simulate"});
    EXPECT_NE(o.code, 0);
    EXPECT_NE(o.err.find("seed"), std::string::npos) << o.err;
}

TEST_F(CliTest, SweepReportsOutputPathOnFailure) {
    const auto o = run({"sweep", "--output", "/nonexistent-dir/out.csv"});
    EXPECT_NE(o.code, 0);
    EXPECT_NE(o.err.find("/nonexistent-dir/out.csv"), std::string::npos) << o.err;
}

TEST_F(CliTest, SweepWritesFile) {
    const auto path = temp_path("sweep.csv");
    const auto o = run({"sweep", "--output", path.string(), "--metrics", "avg_aoi"});
    ASSERT_EQ(o.code, 0) << o.err;
    std::ifstream f(path);
    std::string header;
    std::getline(f, header);
    EXPECT_EQ(header, sweep::csv_header());
    std::filesystem::remove(path);
}

TEST_F(CliTest, ValidateReportsPass) {
    const auto o = run({"validate", "--accepted", "100000", "--refreshes", "200000", "--samples", "10000"});
    EXPECT_EQ(o.code, 0) << o.out << o.err;
    EXPECT_EQ(o.out.find("FAIL"), std::string::npos) << o.out;
    EXPECT_NE(o.out.find("6/6 checks passed"), std::string::npos) << o.out;
}

TEST_F(CliTest, HelpAndMissingSubcommand) {
    EXPECT_EQ(run({"--help"}).code, 0);
    EXPECT_NE(run({}).code, 0);
}

#ifdef DUALAOI_CLI_PATH
TEST_F(CliTest, ExecutableExitCodes) {
    const std::string exe = DUALAOI_CLI_PATH;
    EXPECT_EQ(std::system((exe + " analytic --system mm --mu 1 > /dev/null").c_str()), 0);
    EXPECT_NE(std::system((exe + " analytic --system dd --period 1 2> /dev/null").c_str()), 0);
}
#endif
