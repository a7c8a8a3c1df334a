#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Result {
    int status = -1;
    std::string out;
};

// Runs the CLI with the given arguments, stderr discarded.
Result cli(const std::string& args)
{
    const std::string cmd = std::string("\"") + GLAB_CLI_PATH + "\" " + args + " 2>/dev/null";
    Result r;
    FILE* p = ::popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) {
        r.out.append(buf, n);
    }
    const int raw = ::pclose(p);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name)
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("lorentz: the counterexample drift is not in L^{3,1}")
{
    const Result r = cli("lorentz --radial counterexample --p 3 --q 1");
    CHECK(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["norm"]["divergent"] == true);

    const Result two = cli("lorentz --radial counterexample --p 3 --q 2");
    CHECK(two.status == 0);
    CHECK(nlohmann::json::parse(two.out)["norm"]["value"].get<double>() == doctest::Approx(2.7920519657).epsilon(1e-4));
}

TEST_CASE("validation failures exit 1")
{
    TempDir dir("glab_cli_empty");
    const auto cfg = dir.path / "empty.json";
    std::ofstream(cfg) << "{}\n";
    CHECK(cli("run " + cfg.string()).status == 1);
    CHECK(cli("green --grid 16 --m 16").status == 1);
    CHECK(cli("lorentz --p").status == 1);
    CHECK(cli("nonsense").status == 1);
}

TEST_CASE("verdict failures exit 2")
{
    CHECK(cli("principles --grid 6 8 --expect growing").status == 2);
    CHECK(cli("principles --grid 6 8 --expect stable").status == 0);
}

TEST_CASE("identical runs give bitwise-identical artifacts")
{
    TempDir a("glab_cli_a");
    TempDir b("glab_cli_b");
    const std::string args = " solve --preset random --op-seed 4 --grid 8 --export-matrix --out ";
    REQUIRE(cli(args + a.path.string()).status == 0);
    REQUIRE(cli(args + b.path.string() + " --threads 1").status == 0);
    for (const char* name : {"solution.csv", "solution.bin", "matrix.mtx", "report.json"}) {
        INFO(name);
        REQUIRE(fs::exists(a.path / name));
        CHECK(slurp(a.path / name) == slurp(b.path / name));
    }
    const std::string csv = slurp(a.path / "solution.csv");
    CHECK(csv.rfind("x,y,z,value\n", 0) == 0);
}

TEST_CASE("config files and flags agree")
{
    TempDir dir("glab_cli_cfg");
    const auto cfg = dir.path / "c.json";
    std::ofstream(cfg) << R"({"subcommand": "counterexample", "counterexample": {"delta": 1.0}})";
    const Result file = cli("run " + cfg.string());
    const Result flags = cli("counterexample --delta 1.0");
    CHECK(file.status == 0);
    CHECK(file.out == flags.out);
}
