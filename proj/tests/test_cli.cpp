#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gqed/commands.hpp"

using namespace gqed;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string s; std::getline(in, s);) out.push_back(s);
    return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("poles command writes six rows and a sidecar") {
    const fs::path dir = "cli_test_poles";
    fs::remove_all(dir);
    CommandLine cl;
    cl.command = "poles";
    cl.out = dir.string();
    cl.overrides = {"model.R=5", "model.k0R_over_pi=0.25"};
    std::ostringstream out, err;
    CHECK(run_command(cl, out, err) == 0);
    const auto rows = lines(dir / "poles.csv");
    REQUIRE(rows.size() == 8);
    CHECK(rows[0][0] == '#');
    CHECK(rows[1] == "branch,family,re,im,residual");
    std::ifstream meta(dir / "poles.meta.json");
    const auto j = nlohmann::json::parse(meta);
    CHECK(j["residuals"]["max_pole_residual"].get<double>() < 1e-8);
    CHECK(j["config"]["model"]["R"] == 5.0);
    fs::remove_all(dir);
}

TEST_CASE("errors map to exit codes with JSON on stderr") {
    std::ostringstream out, err;
    CommandLine cl;
    cl.command = "poles";
    cl.out = "cli_test_err";
    cl.overrides = {"model.gamma=-1"};
    CHECK(run_command(cl, out, err) == 2);
    const auto j = nlohmann::json::parse(err.str());
    CHECK(j["error"] == "ValidationError");

    std::ostringstream err2;
    cl.overrides = {"model.R=5", "model.k0R_over_pi=0"};
    cl.command = "g2";
    cl.overrides.push_back("numerics.n_points=201");
    CHECK(run_command(cl, out, err2) == 3);
    CHECK(nlohmann::json::parse(err2.str())["error"] == "DegenerateNormalization");
    fs::remove_all("cli_test_err");
}

TEST_CASE("second run reuses the vertex cache with identical output") {
    const fs::path dir = "cli_test_cache";
    fs::remove_all(dir);
    CommandLine cl;
    cl.command = "spectrum";
    cl.out = dir.string();
    cl.overrides = {"model.R=1", "model.k0R_over_pi=0.25", "numerics.n_points=801", "numerics.refine=2"};
    std::ostringstream out, err;
    REQUIRE(run_command(cl, out, err) == 0);
    const auto cold = lines(dir / "spectrum.csv");
    REQUIRE(run_command(cl, out, err) == 0);
    CHECK(lines(dir / "spectrum.csv") == cold);
    std::ifstream meta(dir / "spectrum.meta.json");
    CHECK(nlohmann::json::parse(meta)["cache"][0]["hit"] == true);
    fs::remove_all(dir);
}

}
