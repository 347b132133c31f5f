// Runs the built fraccond binary end to end.

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct RunResult {
    int code = -1;
    std::string log;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("fraccond_cli_") + info->name() + "_" + std::to_string(::getpid()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write_config(const std::string& name, const Json& j) const {
        const fs::path p = dir_ / name;
        std::ofstream(p) << j.dump(2);
        return p;
    }

    RunResult run(const std::string& args) const {
        const fs::path log = dir_ / "log.txt";
        const std::string cmd = std::string(FRACCOND_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
        const int status = std::system(cmd.c_str());
        RunResult r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.log = slurp(log);
        return r;
    }

    RunResult run(const std::string& command, const fs::path& config, const fs::path& out, const std::string& extra = "") const {
        return run(command + " --config " + config.string() + " --out " + out.string() + " " + extra);
    }

    static Json base(double L, int N, double a, double b) {
        return Json{{"schema_version", 1},
                    {"grid", {{"L", L}, {"N", N}, {"omega", {a, b}}}},
                    {"frac", {{"s", 0.5}}},
                    {"gamma", {{"profile", "bump"}, {"amplitude", 0.3}, {"center", 0.0}, {"width", 0.45}}}};
    }

    fs::path dir_;
};

TEST_F(CliTest, OmegaOutsideWindowIsConfigError) {
    const auto cfg = write_config("bad.json", base(1.0, 32, -0.5, 1.5));
    const auto r = run("forward", cfg, dir_ / "out");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.log.find("omega bounds"), std::string::npos) << r.log;
}

TEST_F(CliTest, UnknownKeyIsConfigError) {
    Json j = base(3.0, 32, -0.5, 0.5);
    j["grid"]["spacing"] = 0.1;
    const auto r = run("forward", write_config("bad.json", j), dir_ / "out");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.log.find("grid.spacing"), std::string::npos) << r.log;
}

TEST_F(CliTest, UnknownTaskKeyIsConfigError) {
    Json j = base(3.0, 32, -0.5, 0.5);
    j["task"] = {{"particles", 10}};
    EXPECT_EQ(run("dn", write_config("bad.json", j), dir_ / "out").code, 2);
}

TEST_F(CliTest, OutOfRangeOrderIsConfigError) {
    Json j = base(3.0, 32, -0.5, 0.5);
    j["frac"]["s"] = 1.0;
    EXPECT_EQ(run("forward", write_config("bad.json", j), dir_ / "out").code, 2);
}

TEST_F(CliTest, MalformedJsonIsConfigError) {
    const fs::path p = dir_ / "broken.json";
    std::ofstream(p) << "{\"grid\": ";
    EXPECT_EQ(run("forward", p, dir_ / "out").code, 2);
}

TEST_F(CliTest, MissingConfigIsIoError) {
    const auto r = run("forward", dir_ / "does_not_exist.json", dir_ / "out");
    EXPECT_EQ(r.code, 3);
}

TEST_F(CliTest, MissingObservedFileIsIoError) {
    Json j = base(3.0, 32, -0.5, 0.5);
    j["task"] = {{"observed", (dir_ / "nope.csv").string()}};
    EXPECT_EQ(run("invert", write_config("inv.json", j), dir_ / "out").code, 3);
}

TEST_F(CliTest, UnknownSubcommandIsRejected) {
    EXPECT_NE(run("transmogrify --config x.json").code, 0);
}

TEST_F(CliTest, ZeroDatumGivesZeroSolution) {
    Json j = base(3.0, 64, -0.5, 0.5);
    j["task"] = {{"datum", "zero"}};
    const fs::path out = dir_ / "fwd";
    const auto r = run("forward", write_config("fwd.json", j), out);
    ASSERT_EQ(r.code, 0) << r.log;
    const auto rows = csv_rows(out / "solution.csv");
    ASSERT_EQ(rows.size(), 65u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"x", "u"}));
    for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_EQ(std::stod(rows[k][1]), 0.0);
}

TEST_F(CliTest, ForwardManifestIsComplete) {
    Json j = base(3.0, 64, -0.5, 0.5);
    j["seed"] = 17;
    const fs::path out = dir_ / "fwd";
    const auto r = run("forward", write_config("fwd.json", j), out);
    ASSERT_EQ(r.code, 0) << r.log;
    EXPECT_NE(r.log.find("PASS interior_residual_relative"), std::string::npos) << r.log;
    const Json m = Json::parse(slurp(out / "manifest.json"));
    EXPECT_EQ(m.at("schema_version"), 1);
    EXPECT_EQ(m.at("command"), "forward");
    EXPECT_EQ(m.at("seed"), 17);
    EXPECT_EQ(m.at("config"), j);
    EXPECT_TRUE(m.at("all_passed").get<bool>());
    EXPECT_EQ(m.at("files"), Json::array({"solution.csv"}));
    EXPECT_GE(m.at("wall_clock_seconds").get<double>(), 0.0);
    EXPECT_TRUE(fs::exists(out / "solution.csv"));
    EXPECT_FALSE(fs::exists(out / "solution.csv.tmp"));
}

TEST_F(CliTest, SeedOverrideIsRecorded) {
    const fs::path out = dir_ / "fwd";
    const auto r = run("forward", write_config("fwd.json", base(3.0, 32, -0.5, 0.5)), out, "--seed 99");
    ASSERT_EQ(r.code, 0) << r.log;
    EXPECT_EQ(Json::parse(slurp(out / "manifest.json")).at("seed"), 99);
}

TEST_F(CliTest, DnThenInvertRoundTrip) {
    const Json j = base(3.0, 64, -0.5, 0.5);
    const fs::path dn_out = dir_ / "dn";
    const auto r1 = run("dn", write_config("dn.json", j), dn_out);
    ASSERT_EQ(r1.code, 0) << r1.log;
    EXPECT_NE(r1.log.find("PASS symmetry"), std::string::npos) << r1.log;

    Json inv = j;
    inv["gamma"] = {{"profile", "bump"}, {"amplitude", 0.3}, {"center", 0.0}, {"width", 0.45}};
    inv["task"] = {{"mode", "full"}, {"observed", (dn_out / "dn.csv").string()}, {"lambda", 1e-12}};
    const fs::path inv_out = dir_ / "inv";
    const auto r2 = run("invert", write_config("inv.json", inv), inv_out);
    ASSERT_EQ(r2.code, 0) << r2.log;
    const Json m = Json::parse(slurp(inv_out / "manifest.json"));
    EXPECT_LE(m.at("values").at("recovery_error").get<double>(), 0.01);
    EXPECT_TRUE(m.at("all_passed").get<bool>()) << r2.log;
}

TEST_F(CliTest, ObservedFileOnWrongGridIsConfigError) {
    const fs::path dn_out = dir_ / "dn";
    ASSERT_EQ(run("dn", write_config("dn.json", base(3.0, 32, -0.5, 0.5)), dn_out).code, 0);
    Json inv = base(3.0, 40, -0.5, 0.5);
    inv["task"] = {{"observed", (dn_out / "dn.csv").string()}};
    EXPECT_EQ(run("invert", write_config("inv.json", inv), dir_ / "inv").code, 2);
}

TEST_F(CliTest, ReduceResidualAndGap) {
    Json j = base(3.0, 128, -1.0, 1.0);
    j["gamma"] = {{"profile", "double-bump"}, {"amplitude", 0.25}, {"center", 0.0}, {"width", 0.3}, {"separation", 0.9}};
    const fs::path out = dir_ / "red";
    const auto r = run("reduce", write_config("red.json", j), out);
    ASSERT_EQ(r.code, 0) << r.log;
    const Json m = Json::parse(slurp(out / "manifest.json"));
    for (const auto& c : m.at("checks")) EXPECT_TRUE(c.at("pass").get<bool>()) << c.dump();
    const auto rows = csv_rows(out / "summary.csv");
    ASSERT_GE(rows.size(), 2u);
    EXPECT_EQ(rows[1][0], "reduction_residual");
    EXPECT_LE(std::stod(rows[1][1]), 1e-10);
}

TEST_F(CliTest, WalkIsBitReproducible) {
    Json j = base(5.0, 41, -1.0, 1.0);
    j["task"] = {{"K", 40}, {"steps", 3}, {"checkpoints", {0, 3}}, {"particles", 20000}};
    j["seed"] = 5;
    const auto cfg = write_config("walk.json", j);
    const auto a = run("walk", cfg, dir_ / "a", "--threads 1");
    const auto b = run("walk", cfg, dir_ / "b", "--threads 3");
    ASSERT_EQ(a.code, 0) << a.log;
    ASSERT_EQ(b.code, 0) << b.log;
    for (const char* f : {"walk.csv", "mass_drift.csv", "escaped.csv"}) {
        ASSERT_TRUE(fs::exists(dir_ / "a" / f)) << f;
        EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
    }
    const auto c = run("walk", cfg, dir_ / "c", "--seed 6");
    ASSERT_EQ(c.code, 0) << c.log;
    EXPECT_NE(slurp(dir_ / "a" / "walk.csv"), slurp(dir_ / "c" / "walk.csv"));
}

TEST_F(CliTest, LimitsSingleStudy) {
    Json j = base(3.0, 32, -0.5, 0.5);
    j["task"] = {{"study", "grad"}, {"s_list", {0.6, 0.9}}, {"intervals_start", 256}, {"intervals_max", 2048}};
    const fs::path out = dir_ / "lim";
    const auto r = run("limits", write_config("lim.json", j), out);
    ASSERT_EQ(r.code, 0) << r.log;
    EXPECT_TRUE(fs::exists(out / "limits_grad.csv"));
    EXPECT_FALSE(fs::exists(out / "limits_bilinear.csv"));
    EXPECT_NE(r.log.find("PASS grad_gap_s0.9"), std::string::npos) << r.log;
}

} // namespace
