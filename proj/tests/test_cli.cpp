#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "vortexred/io.hpp"

namespace fs = std::filesystem;
using namespace vortexred;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("vortexred_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    Result run(const std::string& args) const {
        const std::string out = path("stdout.txt");
        const std::string err = path("stderr.txt");
        const std::string cmd = std::string(VORTEXRED_CLI) + " " + args + " >" + out + " 2>" + err;
        const int status = std::system(cmd.c_str());
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, io::read_file(out), io::read_file(err)};
    }

    void write(const std::string& name, const std::string& content) const {
        std::ofstream(path(name)) << content;
    }

    fs::path dir_;
};

std::vector<std::vector<double>> read_rows(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> r;
        for (const auto& f : io::split_csv_line(line)) r.push_back(io::parse_real(f));
        rows.push_back(r);
    }
    return rows;
}

}  // namespace

TEST_F(Cli, SimulateCanonicalReturnsAfterOnePeriod) {
    const double period = 2 * std::numbers::pi * std::numbers::pi;
    char t[64];
    std::snprintf(t, sizeof t, "%.17g", period);
    const Result r = run("simulate --init canonical --t-end " + std::string(t) + " --out " + path("c.csv"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("status completed"), std::string::npos);
    const auto rows = read_rows(io::read_file(path("c.csv")));
    ASSERT_GT(rows.size(), 2u);
    for (std::size_t i = 1; i <= 8; ++i) EXPECT_NEAR(rows.back()[i], rows.front()[i], 1e-6);
}

TEST_F(Cli, SampledStartIsReproducible) {
    ASSERT_EQ(run("simulate --init sample:42 --t-end 2 --out " + path("a.csv")).code, 0);
    ASSERT_EQ(run("simulate --init sample:42 --t-end 2 --out " + path("b.csv")).code, 0);
    EXPECT_EQ(io::read_file(path("a.csv")), io::read_file(path("b.csv")));
    const Result s = run("simulate --init sample:42 --t-end 0.5");
    EXPECT_EQ(s.code, 0);
    EXPECT_EQ(s.out.rfind("t,x1,y1", 0), 0u);
    EXPECT_NE(s.err.find("status completed"), std::string::npos);
}

TEST_F(Cli, OffLevelSetStartWarnsAndProjectRefuses) {
    write("bad.json", R"({"gamma": 3, "alpha": 1, "positions": [[2,0],[-1,1],[-1,-1],[0,0]]})");
    const Result s = run("simulate --init file:" + path("bad.json") + " --t-end 0.5 --out " + path("bad.csv"));
    EXPECT_EQ(s.code, 0) << s.err;
    EXPECT_NE(s.out.find("warning"), std::string::npos);
    const Result p = run("project --in " + path("bad.csv"));
    EXPECT_EQ(p.code, 1);
    EXPECT_NE(p.err.find("off the momentum level set"), std::string::npos);
}

TEST_F(Cli, ProjectCanonicalIsTheSouthPole) {
    ASSERT_EQ(run("simulate --init canonical --t-end 3 --sample-interval 0.5 --out " + path("c.csv")).code, 0);
    const Result p = run("project --in " + path("c.csv") + " --coords w --out " + path("w.csv"));
    ASSERT_EQ(p.code, 0) << p.err;
    const std::string csv = io::read_file(path("w.csv"));
    EXPECT_EQ(csv.rfind("t,w1,w2,w3,Hred\n", 0), 0u);
    for (const auto& row : read_rows(csv)) {
        EXPECT_NEAR(row[1], 0.0, 1e-9);
        EXPECT_NEAR(row[2], 0.0, 1e-9);
        EXPECT_NEAR(row[3], -1.0, 1e-9);
        EXPECT_NEAR(row[1] * row[1] + row[2] * row[2] + row[3] * row[3], 1.0, 1e-10);
    }
}

TEST_F(Cli, EquilibriaJson) {
    const Result r = run("equilibria --out " + path("eq.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = io::json::parse(io::read_file(path("eq.json")));
    EXPECT_EQ(j.size(), 8u);
    EXPECT_NE(r.out.find("8 equilibria: 2 centers, 6 saddles"), std::string::npos);
}

TEST_F(Cli, PortraitSummary) {
    const Result r = run("portrait --orbits 6 --out " + path("p.csv"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("6 orbits, 6 periodic"), std::string::npos) << r.out;
    EXPECT_EQ(io::read_file(path("p.csv")).rfind("orbit_id,t,h,theta,H,family\n", 0), 0u);
}

TEST_F(Cli, VerifyPasses) {
    const Result r = run("verify --seed 7");
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

TEST_F(Cli, CollisionExitsWithTwo) {
    write("close.json", R"({"positions": [[1,0],[1.0000001,0],[-2,0],[0,0]]})");
    const Result r = run("simulate --init file:" + path("close.json") + " --out " + path("x.csv"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("collision of vortices 1 and 2"), std::string::npos) << r.out;
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("simulate --init nowhere").code, 1);
    EXPECT_EQ(run("simulate --gamma 0").code, 1);
    EXPECT_EQ(run("project").code, 1);
}
