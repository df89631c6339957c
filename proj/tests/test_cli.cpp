// Copyright 2026 The lht Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Drives the built command-line tool end to end.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <random>

#include "lht/cli.hpp"

#ifndef LHT_CLI_PATH
#error "LHT_CLI_PATH must point at the lht executable"
#endif

namespace lht {
namespace {

namespace fs = std::filesystem;

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + "'" + LHT_CLI_PATH + "' " + args + " 2>/dev/null";
    FILE* f = popen(cmd.c_str(), "r");
    if (!f) throw std::runtime_error("popen failed");
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t k;
    while ((k = fread(buf.data(), 1, buf.size(), f)) > 0) out.append(buf.data(), k);
    const int st = pclose(f);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

class Cli : public ::testing::Test {
   protected:
    void SetUp() override {
        static std::mt19937_64 rng(std::random_device{}());
        dir_ = fs::temp_directory_path() / ("lht_cli_" + std::to_string(rng()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string out(const std::string& sub = "") const { return " --output-dir '" + (dir_ / sub).string() + "'"; }
    json load(const std::string& name) const { return json::parse(read_text((dir_ / name).string())); }

    fs::path dir_;
};

TEST_F(Cli, FigureOneSidecar) {
    const auto r = run("figure --d 2 --lambda 0.1" + out());
    ASSERT_EQ(r.code, 0) << r.out;
    const auto s = load("figure_summary.json");
    EXPECT_EQ(s.at("version"), "v1");
    EXPECT_NEAR(s.at("r_one_way").get<double>(), 0.511, 2e-3);
    EXPECT_NEAR(s.at("r_two_way").get<double>(), 0.092, 2e-3);
    EXPECT_NEAR(s.at("plateau_one_way").get<double>(), 0.693, 2e-3);
    EXPECT_NEAR(s.at("plateau_two_way").get<double>(), 0.916, 2e-3);
    EXPECT_NEAR(s.at("zero_rate_value").get<double>(), 1.061, 2e-3);
    EXPECT_TRUE(s.at("warnings").empty());
    // Stdout carries the same summary plus the written paths.
    const auto so = json::parse(r.out);
    EXPECT_EQ(so.at("files").size(), 2u);
}

TEST_F(Cli, FigureTwoSidecar) {
    ASSERT_EQ(run("figure --d 4 --lambda 0.05" + out()).code, 0);
    const auto s = load("figure_summary.json");
    EXPECT_NEAR(s.at("r_two_way").get<double>(), 0.212, 2e-3);
    EXPECT_NEAR(s.at("plateau_one_way").get<double>(), 1.386, 2e-3);
    EXPECT_NEAR(s.at("plateau_two_way").get<double>(), 1.841, 2e-3);
    EXPECT_NEAR(s.at("zero_rate_value").get<double>(), 2.185, 2e-3);
}

TEST_F(Cli, FigureCsvIsDeterministic) {
    ASSERT_EQ(run("figure --d 2 --lambda 0.1 --r-points 50" + out("a")).code, 0);
    ASSERT_EQ(run("figure --d 2 --lambda 0.1 --r-points 50" + out("b")).code, 0);
    const auto a = read_text((dir_ / "a" / "figure.csv").string());
    EXPECT_EQ(a, read_text((dir_ / "b" / "figure.csv").string()));
    EXPECT_EQ(a.substr(0, a.find('\n')), "r,one_way_exponent,two_way_exponent");
    EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 51);
    EXPECT_EQ(a.find('\r'), std::string::npos);
}

TEST_F(Cli, MaximallyEntangledCurvesCoincide) {
    ASSERT_EQ(run("figure --d 2 --lambda 0.5 --format json --r-points 20" + out()).code, 0);
    const auto doc = load("figure.json");
    EXPECT_EQ(doc.at("version"), "v1");
    for (const auto& row : doc.at("rows")) {
        EXPECT_NEAR(row.at("one_way_exponent").get<double>(), std::log(2.0), 1e-6);
        EXPECT_NEAR(row.at("two_way_exponent").get<double>(), std::log(2.0), 1e-6);
    }
}

TEST_F(Cli, LambdaAboveOneOverDWarns) {
    ASSERT_EQ(run("figure --d 2 --lambda 0.6 --r-points 10" + out()).code, 0);
    const auto w = load("figure_summary.json").at("warnings");
    ASSERT_EQ(w.size(), 1u);
    EXPECT_NE(w[0].get<std::string>().find("lambda above 1/d"), std::string::npos);
}

TEST_F(Cli, ConfigRoundTripAndFlagOverride) {
    RunConfig c;
    c.d = 2;
    c.lambda = 0.2;
    c.r_points = 30;
    c.n_grid = {10, 20};
    EXPECT_EQ(config_from_json(json::parse(to_json(c).dump())), c);
    EXPECT_THROW(config_from_json(json{{"bogus", 1}}), std::invalid_argument);
    EXPECT_THROW(config_from_json(json{{"format", "xml"}}), std::invalid_argument);

    const auto cfg = (dir_ / "cfg.json").string();
    write_text(cfg, to_json(c).dump());
    ASSERT_EQ(run("figure --config '" + cfg + "' --lambda 0.1" + out()).code, 0);
    EXPECT_NEAR(load("figure_summary.json").at("r_one_way").get<double>(), 0.511, 2e-3);
    ASSERT_EQ(run("figure --config '" + cfg + "'" + out()).code, 0);
    EXPECT_GT(std::abs(load("figure_summary.json").at("r_one_way").get<double>() - 0.511), 0.05);
}

TEST_F(Cli, OutputDirectoryFromEnvironment) {
    const auto env = "LHT_OUTPUT_DIR='" + (dir_ / "env").string() + "'";
    ASSERT_EQ(run("global --d 2 --lambda 0.1 --n 1 --eps 0" + out("flag"), env).code, 0);
    EXPECT_TRUE(fs::exists(dir_ / "env" / "global_summary.json"));
    EXPECT_FALSE(fs::exists(dir_ / "flag" / "global_summary.json"));
}

TEST_F(Cli, GlobalClosedForms) {
    ASSERT_EQ(run("global --d 2 --lambda 0.1 --n 1 --eps 0 --r 1.0" + out()).code, 0);
    const auto s = load("global_summary.json");
    EXPECT_EQ(s.at("version"), "v1");
    EXPECT_NEAR(s.at("log_beta_stein").get<double>(), -std::log(4.0), 1e-12);
    EXPECT_EQ(s.at("beta_reversed_hoeffding").get<double>(), 0.0);
    ASSERT_EQ(run("global --d 2 --lambda 0.1 --r 2.0" + out()).code, 0);
    EXPECT_EQ(load("global_summary.json").at("beta_reversed_hoeffding").get<double>(), 1.0);
}

TEST_F(Cli, VerifyExitCodes) {
    EXPECT_EQ(run("verify --suite stein-oneway" + out()).code, 0);
    EXPECT_TRUE(load("verify_summary.json").at("pass").get<bool>());
    EXPECT_EQ(run("verify --suite hoeffding-protocol --n 10 --r 0.3" + out()).code, 0);
    EXPECT_EQ(run("verify --suite sep-sandwich --seed 3 --samples 5" + out()).code, 0);
    EXPECT_EQ(run("verify --suite bahadur-rao --threshold 0.75" + out()).code, 0);
    // Too few samples for the tail approximation to settle.
    EXPECT_EQ(run("verify --suite bahadur-rao --threshold 0.95 --n-grid 5,10" + out()).code, 1);
    EXPECT_FALSE(load("verify_summary.json").at("pass").get<bool>());
    EXPECT_EQ(run("verify --suite nope" + out()).code, 2);
    EXPECT_EQ(run("figure --format xml" + out()).code, 2);
}

TEST_F(Cli, ProtocolRoundTrip) {
    ASSERT_EQ(run("protocol --d 2 --lambda 0.1 --kind hoeffding --n 12 --r 0.1" + out("a")).code, 0);
    const auto first = load("a/protocol_summary.json");
    const auto coll = (dir_ / "a" / "protocol_collection.json").string();
    EXPECT_EQ(json::parse(read_text(coll)).at("version"), "v1");
    ASSERT_EQ(run("protocol --d 2 --lambda 0.1 --input '" + coll + "'" + out("b")).code, 0);
    const auto second = load("b/protocol_summary.json");
    EXPECT_EQ(second.at("kind"), "input");
    EXPECT_EQ(first.at("outcome").at("alpha"), second.at("outcome").at("alpha"));
    EXPECT_EQ(first.at("outcome").at("log_beta"), second.at("outcome").at("log_beta"));
    EXPECT_LE(first.at("outcome").at("alpha").get<double>(), first.at("alpha_bound").get<double>());
}

TEST_F(Cli, ProtocolZeroErrorAndFailures) {
    ASSERT_EQ(run("protocol --d 2 --lambda 0.1 --kind zero-error --n 10" + out()).code, 0);
    EXPECT_EQ(load("protocol_summary.json").at("outcome").at("alpha").get<double>(), 0.0);
    EXPECT_EQ(run("protocol --d 2 --lambda 0.1 --kind hoeffding --n 8 --r 0.1" + out()).code, 2);
    EXPECT_EQ(run("protocol --d 2 --lambda 0.1 --kind nope" + out()).code, 2);
}

TEST_F(Cli, SepAndTailTables) {
    ASSERT_EQ(run("sep --d 2 --lambda 0.1 --n-grid 4,6" + out()).code, 0);
    const auto csv = read_text((dir_ / "sep.csv").string());
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,R_prime,log_beta,alpha_lower,alpha_upper,R_min,R_tilde,monotone");
    ASSERT_EQ(run("tail --weights 0.5,0.5 --values 0,1 --threshold 0.75 --n-grid 20 --format json" + out()).code, 0);
    const auto rows = load("tail.json").at("rows");
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_NEAR(rows[0].at("exact_log_tail").get<double>(), -3.8779, 1e-4);
    EXPECT_EQ(run("tail --weights 0.5 --values 0,1" + out()).code, 2);
}

}  // namespace
}  // namespace lht
