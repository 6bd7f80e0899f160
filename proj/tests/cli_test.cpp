#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "trunclap/grid.hpp"

// End-to-end checks of the command-line tool: worked examples, report
// format, exit-code contract, and determinism.  The binary path comes in
// through a compile definition.

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(TRUNCLAP_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    CliResult res;
    char buf[4096];
    std::size_t got = 0;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) res.output.append(buf, got);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

// pull the number following "key": out of a flat JSON report
double json_number(const std::string& text, const std::string& key) {
    const std::string needle = "\"" + key + "\": ";
    const auto pos = text.find(needle);
    if (pos == std::string::npos) throw std::runtime_error("missing key " + key);
    return std::stod(text.substr(pos + needle.size()));
}

bool json_flag(const std::string& text, const std::string& key) {
    return text.find("\"" + key + "\": true") != std::string::npos;
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST(CliClosedFormTest, CubeExampleGivesOneHalf) {
    const auto res = run_cli("eigen-closed --cube -n 2 --side pi --samples 200");
    ASSERT_EQ(res.exit_code, 0) << res.output;
    EXPECT_DOUBLE_EQ(json_number(res.output, "mu"), 0.5);
    EXPECT_LE(json_number(res.output, "residual_max"), 1e-10);
    EXPECT_TRUE(json_flag(res.output, "identity_holds"));
}

TEST(CliClosedFormTest, RectExampleGivesFourFifthsAndExponents) {
    const auto res = run_cli("eigen-closed --rect 1,2 --side pi --samples 200");
    ASSERT_EQ(res.exit_code, 0) << res.output;
    EXPECT_NEAR(json_number(res.output, "mu"), 0.8, 1e-15);
    EXPECT_NE(res.output.find("\"exponents\": [0.25, 4]"), std::string::npos) << res.output;
}

TEST(CliClosedFormTest, BallExampleGivesOne) {
    const auto res = run_cli("eigen-closed --ball --rho 1.5707963 -n 2 -k 1 --samples 200");
    ASSERT_EQ(res.exit_code, 0) << res.output;
    EXPECT_NEAR(json_number(res.output, "mu"), 1.0, 1e-6);
}

TEST(CliClosedFormTest, CsvModeEmitsTheResidualAuditTable) {
    const auto res = run_cli("eigen-closed --cube -n 2 --side pi --samples 50 --format csv");
    ASSERT_EQ(res.exit_code, 0);
    EXPECT_EQ(count_lines(res.output), 51);  // header + one row per sample
    EXPECT_EQ(res.output.rfind("x0,x1,residual\n", 0), 0u) << res.output.substr(0, 40);
}

TEST(CliComparisonTest, LiebReversalExample) {
    const auto res = run_cli("lieb --alpha 1,2");
    ASSERT_EQ(res.exit_code, 0) << res.output;
    EXPECT_TRUE(json_flag(res.output, "reversed"));
    EXPECT_DOUBLE_EQ(json_number(res.output, "mu_intersection_inf"), 2.0);
    EXPECT_NEAR(json_number(res.output, "mu_sum"), 1.6, 1e-15);
}

TEST(CliComparisonTest, LiebBoundaryCaseIsNotReversedAndFailsTheRun) {
    // alpha2^2 = 3 alpha1^2 exactly: the strict inequality just misses
    const auto res = run_cli("lieb --alpha 1,1.7320508075688772");
    EXPECT_EQ(res.exit_code, 2);
    EXPECT_NE(res.output.find("\"reversed\": false"), std::string::npos);
}

TEST(CliComparisonTest, FkFlagsTheAllOnesEquality) {
    const auto res = run_cli("fk --alpha 1,1,1");
    ASSERT_EQ(res.exit_code, 0) << res.output;
    EXPECT_TRUE(json_flag(res.output, "is_equality"));
    EXPECT_TRUE(json_flag(res.output, "cube_maximal"));
}

TEST(CliComparisonTest, FkNormalisesTheStretchFactors) {
    const auto res = run_cli("fk --alpha 2,2,2");
    ASSERT_EQ(res.exit_code, 0) << res.output;
    // unit-product normalisation maps (2,2,2) back to the cube
    EXPECT_TRUE(json_flag(res.output, "is_equality"));
}

TEST(CliComparisonTest, Fk2RatioMatchesTheTwoDimensionalValue) {
    const auto res = run_cli("fk2 -n 2");
    ASSERT_EQ(res.exit_code, 0) << res.output;
    EXPECT_NEAR(json_number(res.output, "ratio"), 1.5708, 1e-4);
    EXPECT_TRUE(json_flag(res.output, "ball_larger"));
}

TEST(CliCounterexampleTest, BoundCoefficientIsOneHalfForTheSmallestCase) {
    const auto res = run_cli("counterexample -n 3 -k 2");
    ASSERT_EQ(res.exit_code, 0) << res.output;
    EXPECT_NEAR(json_number(res.output, "lower_bound_coefficient"), 0.5, 1e-12);
    EXPECT_GT(json_number(res.output, "frame_lower_bound"), 0.0);
    EXPECT_TRUE(json_flag(res.output, "verified"));
}

TEST(CliCounterexampleTest, RandomFrameSearchNeverBeatsTheSpectralSum) {
    const auto res = run_cli("counterexample -n 4 -k 2 --random-frames 2000");
    ASSERT_EQ(res.exit_code, 0) << res.output;
    EXPECT_TRUE(json_flag(res.output, "sandwich_holds"));
}

TEST(CliHolderTest, HexagonCoverPassesAllChecks) {
    const auto res = run_cli("holder --domain hexagon --alpha 2 --beta 0.5");
    ASSERT_EQ(res.exit_code, 0) << res.output;
    EXPECT_EQ(json_number(res.output, "cubes"), 6.0);
    EXPECT_TRUE(json_flag(res.output, "supersolution_holds"));
    EXPECT_TRUE(json_flag(res.output, "quotient_bounded"));
    EXPECT_NEAR(json_number(res.output, "exponent_fit"), 0.5, 0.025);
}

TEST(CliRemarkTest, DefaultShiftPassesAndSmallShiftFails) {
    const auto pass = run_cli("remark -n 2");
    ASSERT_EQ(pass.exit_code, 0) << pass.output;
    EXPECT_TRUE(json_flag(pass.output, "concave"));
    EXPECT_TRUE(json_flag(pass.output, "quotients_grow"));

    const auto fail = run_cli("remark -n 2 --sigma 1");
    EXPECT_EQ(fail.exit_code, 2);
    EXPECT_NE(fail.output.find("\"concave\": false"), std::string::npos);
}

TEST(CliEigenNumericTest, CoarseSquareConvergesNearOneHalf) {
    const auto res = run_cli("eigen-numeric --domain square --spacing pi/16 -r 2");
    ASSERT_EQ(res.exit_code, 0) << res.output;
    EXPECT_TRUE(json_flag(res.output, "converged"));
    EXPECT_NEAR(json_number(res.output, "mu_h"), 0.5, 0.025);
    EXPECT_DOUBLE_EQ(json_number(res.output, "mu_exact"), 0.5);
}

TEST(CliEigenNumericTest, RefinementSweepEmitsAtLeastThreeRows) {
    const auto res =
        run_cli("eigen-numeric --refine --spacing-list pi/8,pi/16,pi/24 -r 2 --format csv");
    ASSERT_EQ(res.exit_code, 0) << res.output;
    EXPECT_EQ(res.output.rfind("h,mu_h,abs_error\n", 0), 0u);
    EXPECT_EQ(count_lines(res.output), 4);  // header + three rungs
}

TEST(CliEigenNumericTest, NonConvergenceDumpsHistoryAndExitsThree) {
    const auto res = run_cli("eigen-numeric --domain square --spacing pi/16 -r 2 --max-outer 2");
    EXPECT_EQ(res.exit_code, 3);
    EXPECT_NE(res.output.find("\"converged\": false"), std::string::npos);
    EXPECT_NE(res.output.find("mu_history"), std::string::npos);
}

TEST(CliEigenNumericTest, FieldSnapshotRoundTrips) {
    const auto path =
        (std::filesystem::temp_directory_path() / "trunclap_cli_field.bin").string();
    const auto res = run_cli("eigen-numeric --domain square --spacing pi/16 -r 2 --field-out " +
                             path);
    ASSERT_EQ(res.exit_code, 0) << res.output;
    std::ifstream in(path, std::ios::binary);
    ASSERT_TRUE(in.good());
    const auto raw = trunclap::io::read_field(in);
    EXPECT_EQ(raw.dim, 2);
    double sup = 0.0;
    for (double v : raw.values) sup = std::max(sup, std::abs(v));
    EXPECT_DOUBLE_EQ(sup, 1.0);  // eigenfield is sup-normalised
    std::filesystem::remove(path);
}

TEST(CliContractTest, ReportsCarrySchemaVersionAndResolvedConfig) {
    const auto res = run_cli("fk --alpha 1,2,0.5 --seed 7 --threads 2");
    ASSERT_EQ(res.exit_code, 0) << res.output;
    EXPECT_DOUBLE_EQ(json_number(res.output, "schema_version"), 1.0);
    EXPECT_DOUBLE_EQ(json_number(res.output, "seed"), 7.0);
    EXPECT_DOUBLE_EQ(json_number(res.output, "threads"), 2.0);
    EXPECT_NE(res.output.find("\"alpha\":"), std::string::npos);
    EXPECT_NE(res.output.find("\"side\":"), std::string::npos);
}

TEST(CliContractTest, CsvReportsHaveAHeaderRow) {
    const auto res = run_cli("fk2 -n 3 --format csv");
    ASSERT_EQ(res.exit_code, 0);
    EXPECT_EQ(count_lines(res.output), 2);
    EXPECT_NE(res.output.find("mu_ball"), std::string::npos);
    EXPECT_NE(res.output.find("ratio"), std::string::npos);
}

TEST(CliContractTest, RunsAreDeterministicGivenTheFlags) {
    const std::string cmd = "eigen-closed --cube -n 3 --side pi --samples 300 --seed 11";
    const auto a = run_cli(cmd);
    const auto b = run_cli(cmd);
    ASSERT_EQ(a.exit_code, 0);
    EXPECT_EQ(a.output, b.output);

    const auto c = run_cli("remark -n 1");
    const auto d = run_cli("remark -n 1");
    EXPECT_EQ(c.output, d.output);
}

TEST(CliContractTest, UsageErrorsExitOne) {
    EXPECT_EQ(run_cli("").exit_code, 1);
    EXPECT_EQ(run_cli("eigen-closed --cube --ball").exit_code, 1);
    EXPECT_EQ(run_cli("eigen-closed --no-such-flag").exit_code, 1);
    EXPECT_EQ(run_cli("eigen-numeric --domain dodecahedron").exit_code, 1);
    EXPECT_EQ(run_cli("holder --beta 2").exit_code, 1);
}

TEST(CliContractTest, PiExpressionsParseEverywhere) {
    const auto res = run_cli("eigen-closed --cube -n 2 --side 2*pi --samples 100");
    ASSERT_EQ(res.exit_code, 0);
    // side 2 pi doubles R, so mu drops by four
    EXPECT_DOUBLE_EQ(json_number(res.output, "mu"), 0.125);
}
