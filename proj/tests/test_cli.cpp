#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "tunnelion/cli.hpp"
#include "tunnelion/errors.hpp"

using namespace tunnelion;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("tunnelion_cli_" + std::to_string(::getpid()))) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(TUNNELION_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("exception classes map to exit codes") {
    CHECK(cli::exit_code_for(ConfigError("x")) == 2);
    CHECK(cli::exit_code_for(DomainError("x")) == 2);
    CHECK(cli::exit_code_for(ConvergenceError("x")) == 3);
    CHECK(cli::exit_code_for(RangeError("x")) == 3);
    CHECK(cli::exit_code_for(UnsupportedError("x")) == 4);
    CHECK(cli::exit_code_for(NoBarrierError("x")) == 4);
    CHECK(cli::exit_code_for(std::runtime_error("x")) == 1);
}

TEST_CASE("configuration errors exit 2 without writing output") {
    TempDir tmp;
    const fs::path out = tmp.path / "bad";
    CHECK(run_cli("params --set nokey=1 --out " + out.string()) == 2);
    CHECK_FALSE(fs::exists(out));
    CHECK(run_cli("params --set kappa=abc --out " + out.string()) == 2);
    CHECK(run_cli("params --set kappa --out " + out.string()) == 2);
    CHECK(run_cli("params --set kappa=200 --set ip_mode=relativistic --out " + out.string()) == 2);
    CHECK(run_cli("no-such-command") == 2);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("unsupported combinations exit 4") {
    TempDir tmp;
    const fs::path out = tmp.path / "exit_nonrel";
    CHECK(run_cli("sfa map --where exit --set sfa.tier=nonrel --out " + out.string()) == 4);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("a manifest reproduces its run") {
    TempDir tmp;
    const fs::path first = tmp.path / "first", second = tmp.path / "second";
    REQUIRE(run_cli("wkb scan --set wkb.points=21 --set kappa=80 --out " + first.string()) == 0);
    const std::string manifest = slurp(first / "manifest.txt");
    CHECK(manifest.find("# command: wkb-scan") != std::string::npos);
    CHECK(manifest.find("kappa=80") != std::string::npos);
    CHECK(manifest.find("wkb.points=21") != std::string::npos);
    REQUIRE(run_cli("wkb-scan --config " + (first / "manifest.txt").string() + " --out " + second.string()) == 0);
    CHECK(slurp(first / "wkb_scan.csv") == slurp(second / "wkb_scan.csv"));
    CHECK(slurp(first / "summary.csv") == slurp(second / "summary.csv"));
    CHECK(slurp(first / "manifest.txt") == slurp(second / "manifest.txt"));
}

TEST_CASE("params reports derived quantities") {
    TempDir tmp;
    const fs::path out = tmp.path / "params";
    REQUIRE(run_cli("params --set kappa=2 --set E0_over_Ea=1/20 --out " + out.string()) == 0);
    const std::string summary = slurp(out / "summary.csv");
    CHECK(summary.rfind("quantity,value", 0) == 0);
    CHECK(summary.find("Ip,2\n") != std::string::npos);
    CHECK(summary.find("tau_K,") != std::string::npos);
}

TEST_CASE("help exits 0") { CHECK(run_cli("--help") == 0); }
