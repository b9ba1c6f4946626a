#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cavityspec/cli.hpp"

using namespace cavityspec;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "cavityspec");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("cavityspec_cli_" + name);
    fs::remove_all(d);
    return d;
}

// rows of a CSV written by write_csv, header first, manifest skipped
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) == 0) continue;
        std::vector<std::string> cells;
        std::string c;
        std::istringstream ls(line);
        while (std::getline(ls, c, ',')) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw std::runtime_error("no column " + name);
}

}  // namespace

TEST(Cli, DeriveWritesManifestAndValues) {
    const auto r = invoke({"derive", "--set", "params.nU=0.2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("# params.nU = 0.2\n"), std::string::npos);
    EXPECT_NE(r.out.find("# tool.command = derive\n"), std::string::npos);
    EXPECT_NE(r.out.find("# tool.version = 1.0.0\n"), std::string::npos);
    EXPECT_NE(r.out.find("quantity,value\n"), std::string::npos);
    EXPECT_NE(r.out.find("W_edge,0.5\n"), std::string::npos);
}

TEST(Cli, ValidationErrorsExitWithTwo) {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"derive", "--set", "params.nu=0.2"},
             {"derive", "--set", "params.omega_bar_P=2"},
             {"derive", "--set", "params.nU=abc"},
             {"observe"},  // beta = inf
             {"figures", "fig9"},
             {"frobnicate"},
             {"derive", "--format", "xml"},
             {"derive", "--config", "/nonexistent/file.conf"}}) {
        const auto r = invoke(args);
        EXPECT_EQ(r.code, 2) << args.front();
        const auto j = nlohmann::json::parse(r.err);
        EXPECT_EQ(j["exit_code"], 2);
        EXPECT_FALSE(j["message"].get<std::string>().empty());
    }
}

TEST(Cli, NumericalFailureExitsWithThree) {
    const auto r = invoke({"kernels", "--set", "numerics.bath_tol=1e-18"});
    EXPECT_EQ(r.code, 3);
    EXPECT_EQ(nlohmann::json::parse(r.err)["error"], "numerical");
}

TEST(Cli, ConfigFileAndOverridesLayer) {
    const auto dir = fresh_dir("conf");
    fs::create_directories(dir);
    std::ofstream(dir / "a.conf") << "[params]\nnU = 0.05\nN_C = 1e4\n";
    const auto r = invoke({"derive", "--config", (dir / "a.conf").string(), "--set", "params.N_C=2e4"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("# params.nU = 0.05\n"), std::string::npos);
    EXPECT_NE(r.out.find("# params.N_C = 2e4\n"), std::string::npos);
    std::ofstream(dir / "b.conf") << "[params]\nbogus = 1\n";
    EXPECT_EQ(invoke({"derive", "--config", (dir / "b.conf").string()}).code, 2);
    fs::remove_all(dir);
}

TEST(Cli, SpectralShortcutsAndGrid) {
    const auto r = invoke({"spectral", "--channel", "C", "--branch", "B", "--points", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = csv_rows(r.out);
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"branch", "omega", "W", "G_C"}));
    EXPECT_EQ(rows[1][2], "0");
    EXPECT_EQ(rows[5][2], "0.5");
}

TEST(Cli, ObserveEmptyCavityHasZeroCavityDifference) {
    const auto r = invoke({"observe", "--set", "params.beta=1710", "--set", "params.nU=0.016", "--set",
                           "observe.values=0,0.5", "--jobs", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = csv_rows(r.out);
    ASSERT_EQ(rows.size(), 3u);
    const auto c = column(rows[0], "rel_C"), s = column(rows[0], "status");
    EXPECT_EQ(rows[1][c], "0");
    EXPECT_EQ(rows[1][s], "ok");
    EXPECT_NE(rows[2][c], "0");
}

TEST(Cli, OutputIsIndependentOfThreadCount) {
    const std::vector<std::string> base{"critical", "--set", "params.beta=1710", "--set",
                                        "critical.values=0.01,0.03,0.02"};
    auto a = base, b = base;
    a.insert(a.end(), {"--jobs", "1"});
    b.insert(b.end(), {"--jobs", "3"});
    const auto ra = invoke(a), rb = invoke(b);
    ASSERT_EQ(ra.code, 0) << ra.err;
    EXPECT_EQ(ra.out, rb.out);
    const auto rows = csv_rows(ra.out);
    EXPECT_EQ(rows[1][0], "0.01");
    EXPECT_EQ(rows[2][0], "0.029999999999999999");
}

TEST(Cli, FiguresWriteOneFilePerSeriesAndReplayIsByteIdentical) {
    const auto dir = fresh_dir("fig");
    const auto r = invoke({"figures", "fig1", "--out-dir", dir.string(), "--jobs", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* c : {"C", "AC", "A", "Adot"}) {
        const auto f = dir / (std::string("fig1_") + c + ".csv");
        ASSERT_TRUE(fs::exists(f)) << f;
        const auto text = slurp(f);
        EXPECT_NE(text.find("# tool.figure = fig1\n"), std::string::npos);
        EXPECT_NE(text.find("# params.beta = inf\n"), std::string::npos);
    }
    EXPECT_EQ(invoke({"figures", "fig1", "--set", "params.nU=1"}).code, 2);

    const auto again = dir / "replay";
    const auto rr = invoke({"replay", (dir / "fig1_AC.csv").string(), "--out-dir", again.string()});
    ASSERT_EQ(rr.code, 0) << rr.err;
    EXPECT_EQ(slurp(again / "fig1_AC.csv"), slurp(dir / "fig1_AC.csv"));
    fs::remove_all(dir);
}

TEST(Cli, JsonFormatAndReplayOfJson) {
    const auto dir = fresh_dir("json");
    const auto r = invoke({"critical", "--format", "json", "--out-dir", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(slurp(dir / "critical.json"));
    EXPECT_EQ(j["manifest"]["tool.command"], "critical");
    EXPECT_EQ(j["columns"][3], "rel_shift");
    EXPECT_TRUE(fs::exists(dir / "critical_fit.json"));
    const auto rr = invoke({"replay", (dir / "critical.json").string(), "--format", "json", "--out-dir",
                            (dir / "again").string()});
    ASSERT_EQ(rr.code, 0) << rr.err;
    EXPECT_EQ(slurp(dir / "again" / "critical.json"), slurp(dir / "critical.json"));
    fs::remove_all(dir);
}

TEST(Cli, ReplayRejectsForeignManifests) {
    const auto dir = fresh_dir("foreign");
    fs::create_directories(dir);
    std::ofstream(dir / "x.csv") << "# params.nU = 0.1\na,b\n";
    EXPECT_EQ(invoke({"replay", (dir / "x.csv").string()}).code, 2);
    fs::remove_all(dir);
}

TEST(Cli, BinaryExitCodes) {
    const std::string bin = CAVITYSPEC_CLI_PATH;
    auto status = [&](const std::string& args) {
        const int s = std::system((bin + " " + args + " > /dev/null 2>&1").c_str());
        return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
    };
    EXPECT_EQ(status("derive"), 0);
    EXPECT_EQ(status("derive --set params.kappa=-1"), 2);
    EXPECT_EQ(status("kernels --set numerics.bath_tol=1e-18"), 3);
    EXPECT_EQ(status("--help"), 0);
}
