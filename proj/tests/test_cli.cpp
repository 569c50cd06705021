// Runs the rlshrink binary as a subprocess.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifndef RLSHRINK_CLI
#error "RLSHRINK_CLI must name the CLI binary"
#endif

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
};

Outcome run(const std::string& args) {
    const std::string cmd = std::string(RLSHRINK_CLI) + " " + args + " 2>&1";
    Outcome r;
    std::FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& path) {
    std::vector<std::vector<double>> rows;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() /
              (std::string("rls_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    fs::path write_matrix(const std::string& name, int p, int n, double scale, unsigned seed) {
        std::mt19937_64 gen(seed);
        std::normal_distribution<double> z;
        const fs::path path = dir / name;
        std::ofstream out(path);
        out.precision(17);
        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < n; ++j) out << (j ? "," : "") << (i + scale * z(gen));
            out << "\n";
        }
        return path;
    }

    fs::path dir;
};

}  // namespace

TEST_F(Cli, HelpAndUsageErrors) {
    const Outcome help = run("--help");
    EXPECT_EQ(help.code, 0);
    EXPECT_NE(help.out.find("minimax-check"), std::string::npos);
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("frobnicate").code, 1);
    EXPECT_EQ(run("minimax-check --n 10").code, 1);
}

TEST_F(Cli, EstimateErrors) {
    const fs::path m = write_matrix("x.csv", 3, 8, 1.0, 1);
    const Outcome bad = run("estimate " + m.string() + " --estimator nope --out " + (dir / "e").string());
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.out.find("nope"), std::string::npos);
    EXPECT_EQ(run("estimate " + (dir / "missing.csv").string()).code, 2);
    std::ofstream(dir / "ragged.csv") << "1,2,3\n4,5\n";
    EXPECT_EQ(run("estimate " + (dir / "ragged.csv").string() + " --out " + (dir / "e").string()).code, 2);
}

TEST_F(Cli, EstimateWritesCsvAndSidecar) {
    const fs::path m = write_matrix("x.csv", 4, 15, 1.0, 2);
    const Outcome r = run("estimate " + m.string() + " --out " + (dir / "est").string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("sure_delta"), std::string::npos);
    const auto rows = read_csv(dir / "est.csv");
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].size(), 15u);
    const std::string side = slurp(dir / "est.json");
    EXPECT_NE(side.find("\"S2plus\""), std::string::npos);
    EXPECT_NE(side.find("\"transposed\""), std::string::npos);
}

// js+ with tr W below (n-1)p - 2 clamps every multiplier to zero: the
// estimate is the row-mean matrix.
TEST_F(Cli, JamesSteinClampGivesRowMeans) {
    const fs::path m = write_matrix("x.csv", 3, 10, 0.1, 3);
    ASSERT_EQ(run("estimate " + m.string() + " --estimator jsplus --out " + (dir / "js").string()).code, 0);
    const auto x = read_csv(m);
    const auto est = read_csv(dir / "js.csv");
    ASSERT_EQ(est.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        double mean = 0;
        for (double v : x[i]) mean += v;
        mean /= double(x[i].size());
        for (double v : est[i]) EXPECT_NEAR(v, mean, 1e-12);
    }
}

TEST_F(Cli, EfronMorrisWarnsAtUnitGap) {
    const fs::path m = write_matrix("x.csv", 100, 101, 1.0, 4);
    const Outcome r = run("estimate " + m.string() + " --estimator emplus --out " + (dir / "em").string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("warning:"), std::string::npos);
    EXPECT_NE(slurp(dir / "em.json").find("warnings"), std::string::npos);
}

TEST_F(Cli, SureDefaultsAndGivenWeights) {
    const fs::path m = write_matrix("x.csv", 5, 12, 1.0, 5);
    const Outcome r = run("sure " + m.string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("\"c\": 0.2"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("\"weights_source\": \"sure\""), std::string::npos);
    EXPECT_NE(r.out.find("\"b\": 0"), std::string::npos);

    const Outcome zero = run("sure " + m.string() + " --a 0 --b 0 --ridge-mode const --out " + (dir / "s").string());
    ASSERT_EQ(zero.code, 0) << zero.out;
    EXPECT_NE(zero.out.find("\"sure_delta\": 0,"), std::string::npos) << zero.out;
    EXPECT_NE(slurp(dir / "s.json").find("\"given\""), std::string::npos);
}

TEST_F(Cli, MinimaxCheck) {
    Outcome r = run("minimax-check --n 40 --p 22");
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("clause thm:min(iii)"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find(": minimax"), std::string::npos);

    r = run("minimax-check --n 12 --p 4 --ridge-mode const --c 1 --a 14");
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("margin -2: violates-known-bound"), std::string::npos) << r.out;

    r = run("minimax-check --n 30 --p 4 --ridge-mode const --double");
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("not-covered"), std::string::npos) << r.out;

    EXPECT_EQ(run("minimax-check --n 10 --p 4 --ridge-mode sideways").code, 1);
}

TEST_F(Cli, SimulateIsReproducible) {
    const fs::path cfg = dir / "cfg.json";
    std::ofstream(cfg) << R"({"sizes": [[20, 10], [10, 15]], "reps": 20, "seed": 4})";
    const std::string a = (dir / "a").string(), b = (dir / "b").string(), c = (dir / "c").string();
    ASSERT_EQ(run("simulate " + cfg.string() + " --out " + a).code, 0);
    ASSERT_EQ(run("simulate " + cfg.string() + " --workers 2 --out " + b).code, 0);
    ASSERT_EQ(run("simulate " + cfg.string() + " --seed 5 --out " + c).code, 0);
    EXPECT_EQ(slurp(a + ".csv"), slurp(b + ".csv"));
    EXPECT_NE(slurp(a + ".csv"), slurp(c + ".csv"));
    EXPECT_NE(slurp(a + ".txt").find("S2+"), std::string::npos);

    std::ofstream(dir / "bad.json") << R"({"sizes": [[20, 10]], "noise": "cauchy"})";
    EXPECT_EQ(run("simulate " + (dir / "bad.json").string()).code, 1);
}

TEST_F(Cli, RmtSweep) {
    const std::string out = (dir / "rmt").string();
    const Outcome r = run("rmt-sweep --sizes 60x20,120x40 --seeds 3 --out " + out);
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("median gap_a"), std::string::npos);
    const std::string csv = slurp(out + ".csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
    EXPECT_NE(run("rmt-sweep --sizes 20x20 --seeds 2 --out " + out).code, 0);
}
