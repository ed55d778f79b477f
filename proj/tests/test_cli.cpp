#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gridident/cli.hpp"
#include "gridident/measurement_io.hpp"
#include "gridident/report_io.hpp"

using namespace gridident;

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run(std::vector<std::string> args) {
    args.insert(args.begin(), "gridident");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string tmp(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("gridident_cli_" + name)).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), {}};
}

const std::string kData = GRIDIDENT_DATA_DIR;

}  // namespace

TEST(Cli, RankTableMinusOne) {
    const CliRun r = run({"ranktable", "--n", "14", "--prior", "minus-one", "--tau", "11,12", "--seed", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "tau,rank,unknowns,unique\n11,88,90,no\n12,90,90,yes\n");
    EXPECT_NE(r.err.find("[ranktable]"), std::string::npos);
}

TEST(Cli, RankTableTree) {
    const CliRun r = run({"ranktable", "--n", "123", "--prior", "tree", "--tau", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "tau,rank,unknowns,unique\n1,122,122,yes\n");
}

TEST(Cli, SynthIdentifyFiveCycle) {
    const std::string meas = tmp("cycle.csv");
    const std::string report = tmp("cycle.json");
    ASSERT_EQ(run({"synth", "--network", kData + "/five_cycle.json", "--tau", "4", "--seed", "5", "--out", meas}).code,
              0);
    CliRun r = run({"identify", "--measurements", meas, "--prior", "complete", "--truth", kData + "/five_cycle.json",
                 "--out", report});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string first = slurp(report);
    const TopologyReport rep = parse_report(first);
    EXPECT_EQ(rep.edges.size(), 5u);
    ASSERT_TRUE(rep.score.has_value());
    EXPECT_EQ(rep.score->f1, 1.0);
    // rerun is byte-identical
    ASSERT_EQ(run({"identify", "--measurements", meas, "--prior", "complete", "--truth",
                   kData + "/five_cycle.json", "--out", report})
                  .code,
              0);
    EXPECT_EQ(slurp(report), first);
    std::filesystem::remove(meas);
    std::filesystem::remove(report);
}

TEST(Cli, ExitCodes) {
    const std::string meas = tmp("short.csv");
    ASSERT_EQ(run({"synth", "--network", kData + "/five_cycle.json", "--tau", "3", "--out", meas}).code, 0);
    CliRun r = run({"identify", "--measurements", meas, "--prior", "complete"});
    EXPECT_EQ(r.code, kExitPrecondition);
    EXPECT_NE(r.err.find("tau >= n-1"), std::string::npos) << r.err;

    const std::string bad = tmp("bad.csv");
    std::ofstream(bad) << "not a measurement file\n";
    EXPECT_EQ(run({"identify", "--measurements", bad}).code, kExitFormat);
    EXPECT_EQ(run({"identify", "--measurements", tmp("missing.csv")}).code, kExitPrecondition);
    EXPECT_EQ(run({"bogus"}).code, kExitPrecondition);
    EXPECT_EQ(run({}).code, kExitPrecondition);
    EXPECT_EQ(run({"ranktable", "--n", "5", "--tau", "3,2"}).code, kExitPrecondition);
    EXPECT_EQ(run({"ranktable", "--n", "5", "--tau", "2", "--prior", "weird"}).code, kExitPrecondition);
    EXPECT_EQ(run({"--help"}).code, kExitOk);
    std::filesystem::remove(meas);
    std::filesystem::remove(bad);
}

TEST(Cli, NoiseCommand) {
    const std::string clean = tmp("clean.csv");
    const std::string noisy = tmp("noisy.csv");
    ASSERT_EQ(run({"synth", "--n", "6", "--tau", "5", "--seed", "2", "--out", clean}).code, 0);
    ASSERT_EQ(run({"noise", "--measurements", clean, "--sigma", "0.001", "--seed", "3", "--out", noisy}).code, 0);
    const MeasurementSet ms = load_measurements(noisy);
    EXPECT_TRUE(ms.noisy);
    EXPECT_EQ(ms.tau(), 5);
    // noise on an already noisy file is refused
    EXPECT_EQ(run({"noise", "--measurements", noisy, "--sigma", "0.001"}).code, kExitPrecondition);
    std::filesystem::remove(clean);
    std::filesystem::remove(noisy);
}

TEST(Cli, SweepIsDeterministicApartFromTiming) {
    const std::vector<std::string> args = {"sweep",   "--n",     "8", "--prior", "minus-one", "--tau", "5:7",
                                           "--sigma", "0.001", "--seeds", "3", "--seed", "11"};
    const CliRun a = run(args);
    const CliRun b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    const SweepResult ra = parse_sweep_csv(a.out);
    const SweepResult rb = parse_sweep_csv(b.out);
    EXPECT_EQ(ra.min_measurements, 6);
    ASSERT_EQ(ra.rows.size(), 9u);
    for (std::size_t k = 0; k < ra.rows.size(); ++k) {
        EXPECT_EQ(ra.rows[k].tau, rb.rows[k].tau);
        EXPECT_EQ(ra.rows[k].seed, rb.rows[k].seed);
        EXPECT_EQ(ra.rows[k].total_abs_error_conductance, rb.rows[k].total_abs_error_conductance);
        EXPECT_EQ(ra.rows[k].f1, rb.rows[k].f1);
    }
    EXPECT_EQ(ra.rows[0].seed, 11u);
    EXPECT_EQ(ra.rows[2].tau, 7);
}

TEST(Cli, SweepZeroNoiseErrorVanishesAboveThreshold) {
    const CliRun r = run({"sweep", "--n", "7", "--prior", "complete", "--tau", "6:8", "--sigma", "0", "--seeds", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const auto& row : parse_sweep_csv(r.out).rows) {
        EXPECT_LE(row.total_abs_error_conductance + row.total_abs_error_susceptance, 1e-8);
        EXPECT_EQ(row.f1, 1.0);
    }
}

TEST(Cli, Phases) {
    const CliRun r = run({"phases", "--spec", kData + "/lateral_bc.json", "--bus", "645", "--sigma", "0.001", "--seed",
                       "4"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("\"connected\": \"bc\""), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("\"disconnected\": \"a\""), std::string::npos);
}
