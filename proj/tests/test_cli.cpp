#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const fs::path kTmp = fs::temp_directory_path() / ("simqd_cli_" + std::to_string(::getpid()));

int run(const std::string& args) {
    const std::string cmd = std::string(SIMQD_CLI) + " " + args + " > " + (kTmp / "log.txt").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string cfg(const char* name) { return std::string(SIMQD_CONFIG_DIR "/") + name + ".json"; }

void write(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

struct Setup {
    Setup() { fs::create_directories(kTmp); }
    ~Setup() { fs::remove_all(kTmp); }
};

}  // namespace

TEST_CASE("exit codes") {
    Setup s;

    SUBCASE("oracle") {
        CHECK(run("oracle --report " + (kTmp / "r.json").string() + " --seed 7") == 0);
        CHECK(fs::exists(kTmp / "r.json"));
    }
    SUBCASE("kernel") {
        CHECK(run("kernel --config " + cfg("minimal") + " --out " + (kTmp / "k").string()) == 0);
        CHECK(fs::exists(kTmp / "k" / "kernel_summary.json"));
    }
    SUBCASE("usage errors") {
        CHECK(run("") == 2);
        CHECK(run("frobnicate") == 2);
        CHECK(run("kernel --out x") == 2);
        CHECK(run("sweep --config " + cfg("minimal") + " --axis sideways --out " + kTmp.string()) == 2);
    }
    SUBCASE("config errors") {
        CHECK(run("dynamics --config " + (kTmp / "missing.json").string() + " --out " + kTmp.string()) == 2);
        write(kTmp / "bad.json", "{\"temperatures\": [\"4 parsecs\"]}");
        CHECK(run("dynamics --config " + (kTmp / "bad.json").string() + " --out " + kTmp.string()) == 2);
        write(kTmp / "typo.json", "{\"temperaturs\": [\"4 K\"]}");
        CHECK(run("kernel --config " + (kTmp / "typo.json").string() + " --out " + kTmp.string()) == 2);
        // no --out and no output.dir
        CHECK(run("kernel --config " + cfg("minimal")) == 2);
    }
    SUBCASE("numeric failure") {
        write(kTmp / "stiff.json", R"({
  "temperatures": ["4 K"],
  "durations": ["1 ps"],
  "rates": {"gamma_f1": "1 GHz", "gamma_f2": "1 GHz"},
  "quadrature": {"max_depth": 0, "panels_per_period": 1e-3, "rel_tol": 1e-12},
  "kernel": {"t_max": "50 ps", "step": "10 ps"}
})");
        CHECK(run("kernel --config " + (kTmp / "stiff.json").string() + " --out " + kTmp.string()) == 3);
    }
}
