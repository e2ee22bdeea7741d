#include <shrinklab/cli.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace shrinklab;
using namespace shrinklab::cli;

namespace {
std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

RunConfig config(std::string command, const std::string& dir) {
    RunConfig c;
    c.command = std::move(command);
    c.out_dir = (std::filesystem::path(::testing::TempDir()) / "shrinklab_cli" / dir).string();
    std::filesystem::remove_all(c.out_dir);
    return c;
}
} // namespace

TEST(RSquared, Parsing) {
    EXPECT_DOUBLE_EQ(parse_r_squared("4n", 2), 8.0);
    EXPECT_DOUBLE_EQ(parse_r_squared("2.5n", 2), 5.0);
    EXPECT_DOUBLE_EQ(parse_r_squared("n", 3), 3.0);
    EXPECT_DOUBLE_EQ(parse_r_squared("7", 3), 7.0);
    for (const char* bad : {"", "x", "-1", "4m", "0n"}) EXPECT_THROW(parse_r_squared(bad, 2), UsageError) << bad;
}

TEST(Validate, RejectsBadConfigs) {
    RunConfig c;
    c.command = "verify";
    EXPECT_THROW(validate(c), UsageError);
    c.verify_set = {"bochner", "nope"};
    EXPECT_THROW(validate(c), UsageError);
    c.verify_set = {"bochner"};
    EXPECT_NO_THROW(validate(c));
    c.kappa = 2;
    EXPECT_THROW(validate(c), UsageError);

    RunConfig s;
    s.command = "sweep";
    s.f0_grid = {0.01, 0.1};
    EXPECT_THROW(validate(s), UsageError);
    s.f0_grid = {};
    EXPECT_THROW(validate(s), UsageError);

    RunConfig n;
    n.command = "shoot";
    n.n = 0;
    EXPECT_THROW(validate(n), UsageError);
    n.n = 2;
    n.r0 = 0.5;
    EXPECT_THROW(validate(n), UsageError);
}

TEST(Run, UnknownCommand) {
    RunConfig c;
    c.command = "dance";
    std::ostringstream log;
    EXPECT_THROW(run(c, log), UsageError);
}

TEST(Run, ShootWritesProfileAndSummary) {
    RunConfig c = config("shoot", "shoot");
    c.f0 = 2.0;
    std::ostringstream log;
    EXPECT_EQ(run(c, log), exit_ok);
    const auto summary = nlohmann::json::parse(slurp(std::filesystem::path(c.out_dir) / "summary.json"));
    EXPECT_EQ(summary["status"], "found");
    EXPECT_NEAR(summary["r_alpha"].get<double>(), 2.0, 1e-8);
    EXPECT_EQ(summary["config"]["n"], 2);
    EXPECT_EQ(slurp(std::filesystem::path(c.out_dir) / "profile.csv").rfind("r,f,fprime\n", 0), 0u);
}

TEST(Run, ShootWithoutCrossingIsNotAnError) {
    RunConfig c = config("shoot", "flat");
    c.f0 = 0.0;
    std::ostringstream log;
    EXPECT_EQ(run(c, log), exit_ok);
    const auto summary = nlohmann::json::parse(log.str());
    EXPECT_TRUE(summary["r_alpha"].is_null());
    EXPECT_EQ(summary["status"], "no-crossing");
}

TEST(Run, SweepWritesTrend) {
    RunConfig c = config("sweep", "sweep");
    c.f0_grid = {1e-1, 1e-2, 1e-3};
    std::ostringstream log;
    EXPECT_EQ(run(c, log), exit_ok);
    const auto trend = nlohmann::json::parse(slurp(std::filesystem::path(c.out_dir) / "trend.json"));
    EXPECT_TRUE(trend["increasing"].get<bool>());
    EXPECT_EQ(trend["rows"].size(), 3u);
    EXPECT_FALSE(trend["extrapolated_limit"].is_null());
    EXPECT_NEAR(trend["two_sqrt_n"].get<double>(), 2.0 * std::sqrt(2.0), 1e-15);
    const std::string csv = slurp(std::filesystem::path(c.out_dir) / "sweep.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(Run, VerifyDocumentShape) {
    RunConfig c = config("verify", "verify");
    c.verify_set = {"lemma6_1"};
    c.kappa = 0;
    std::ostringstream log;
    EXPECT_EQ(run(c, log), exit_ok);
    const auto doc = nlohmann::json::parse(slurp(std::filesystem::path(c.out_dir) / "verify.json"));
    EXPECT_TRUE(doc["pass"].get<bool>());
    EXPECT_EQ(doc["version"], version);
    EXPECT_EQ(doc["reports"].size(), 4u);
    for (const auto& r : doc["reports"]) EXPECT_TRUE(r["pass"].get<bool>()) << r["name"];
}

TEST(Run, NegativeControlCountsAsExpected) {
    RunConfig c = config("verify", "negative");
    c.verify_set = {"gaussian6_2"};
    c.r_squared = "3n";
    std::ostringstream log;
    EXPECT_EQ(run(c, log), exit_ok);
    const auto doc = nlohmann::json::parse(slurp(std::filesystem::path(c.out_dir) / "verify.json"));
    bool saw_control = false;
    for (const auto& r : doc["reports"])
        if (r["negative_control"].get<bool>()) {
            saw_control = true;
            EXPECT_FALSE(r["pass"].get<bool>());
        }
    EXPECT_TRUE(saw_control);
}

TEST(Run, RadialIdentityMember) {
    RunConfig c = config("verify", "radial");
    c.verify_set = {"radial5_1"};
    std::ostringstream log;
    EXPECT_EQ(run(c, log), exit_ok);
}

TEST(Run, OutputsAreDeterministic) {
    std::string first;
    for (int i = 0; i < 2; ++i) {
        RunConfig c = config("verify", "det" + std::to_string(i));
        c.verify_set = {"bochner", "gaussian5_3"};
        std::ostringstream log;
        run(c, log);
        const std::string doc = slurp(std::filesystem::path(c.out_dir) / "verify.json");
        if (i == 0) first = doc;
        else EXPECT_EQ(doc, first);
    }
}
