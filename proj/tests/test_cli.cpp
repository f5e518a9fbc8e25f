#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "dynlab/cloud.hpp"
#include "helpers.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path work_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("dynlab_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p);
    f << text;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(DYNLAB_CLI_PATH) + " " + args + " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

std::string sample_config(const std::string& extra_params = "") {
    return std::string("{ \"experiment\": \"sample\", \"map\": \"") +
           helpers::config_path("doubling") +
           "\", \"seed\": 3, \"params\": { \"walkers\": 20, \"per_walker\": 10" +
           extra_params + " } }";
}

}  // namespace

TEST_CASE("sample experiment writes csv, manifest and cloud") {
    fs::path cfg = work_dir() / "sample.json";
    write_file(cfg, sample_config());
    fs::path out = work_dir() / "smp";
    int rc = run_cli("--config " + cfg.string() + " --out " + out.string());
    CHECK(rc == 0);
    REQUIRE(fs::exists(out.string() + ".csv"));
    REQUIRE(fs::exists(out.string() + ".manifest"));
    REQUIRE(fs::exists(out.string() + ".cloud"));

    json manifest = json::parse(std::ifstream(out.string() + ".manifest"));
    CHECK(manifest["experiment"] == "sample");
    CHECK(manifest["seed"] == 3);
    CHECK(manifest["version"].is_string());
    CHECK(manifest["map"]["family"] == "Poly1D");

    std::ifstream csv(out.string() + ".csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "name,re,im,se_re,se_im");

    dynlab::WeightedCloud c = dynlab::load_cloud_file(out.string() + ".cloud");
    CHECK(c.size() == 200);
    CHECK(c.k == 1);
}

TEST_CASE("the seed flag overrides the config seed") {
    fs::path cfg = work_dir() / "seed.json";
    write_file(cfg, sample_config());
    fs::path out = work_dir() / "seeded";
    CHECK(run_cli("--config " + cfg.string() + " --out " + out.string() + " --seed 11") == 0);
    json manifest = json::parse(std::ifstream(out.string() + ".manifest"));
    CHECK(manifest["seed"] == 11);
}

TEST_CASE("unknown config keys exit 2 and leave no partial outputs") {
    fs::path cfg = work_dir() / "bad.json";
    write_file(cfg, sample_config(", \"bogus_key\": 1"));
    fs::path out = work_dir() / "bad";
    CHECK(run_cli("--config " + cfg.string() + " --out " + out.string()) == 2);
    CHECK_FALSE(fs::exists(out.string() + ".csv"));
    CHECK_FALSE(fs::exists(out.string() + ".manifest"));
    CHECK_FALSE(fs::exists(out.string() + ".cloud"));
}

TEST_CASE("a missing config file exits 2") {
    CHECK(run_cli("--config " + (work_dir() / "absent.json").string()) == 2);
}

TEST_CASE("numerical starvation exits 3 without outputs") {
    // min_acceptance above the level-0 acceptance rate of z^2 on its disc
    fs::path cfg = work_dir() / "starved.json";
    write_file(cfg, "{ \"experiment\": \"degrees\", \"map\": \"" +
                        helpers::config_path("doubling") +
                        "\", \"seed\": 3, \"params\": { \"l\": 0, \"n_max\": 4, "
                        "\"samples\": 5000, \"min_acceptance\": 0.5 } }");
    fs::path out = work_dir() / "starved";
    CHECK(run_cli("--config " + cfg.string() + " --out " + out.string()) == 3);
    CHECK_FALSE(fs::exists(out.string() + ".csv"));
    CHECK_FALSE(fs::exists(out.string() + ".manifest"));
}

TEST_CASE("csv bytes are identical across worker counts") {
    fs::path cfg = work_dir() / "det.json";
    write_file(cfg, sample_config());
    fs::path o1 = work_dir() / "det1";
    fs::path o4 = work_dir() / "det4";
    CHECK(run_cli("--config " + cfg.string() + " --out " + o1.string() + " --workers 1") == 0);
    CHECK(run_cli("--config " + cfg.string() + " --out " + o4.string() + " --workers 4") == 0);
    CHECK(helpers::read_file(o1.string() + ".csv") == helpers::read_file(o4.string() + ".csv"));
    CHECK(helpers::read_file(o1.string() + ".cloud") ==
          helpers::read_file(o4.string() + ".cloud"));
}

TEST_CASE("workers accepts auto") {
    fs::path cfg = work_dir() / "auto.json";
    write_file(cfg, sample_config());
    fs::path out = work_dir() / "auto";
    CHECK(run_cli("--config " + cfg.string() + " --out " + out.string() +
                  " --workers auto") == 0);
}

TEST_CASE("unknown command-line flags are rejected") {
    CHECK(run_cli("--config x.json --frobnicate") != 0);
}
