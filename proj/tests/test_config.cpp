#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "gqed/config.hpp"
#include "gqed/errors.hpp"

using namespace gqed;
using nlohmann::json;

TEST_SUITE("config") {

TEST_CASE("minimal config takes defaults") {
    const auto c = parse_config_json(json::parse(R"({"model":{"gamma":1,"R":5,"k0R_over_pi":0.25}})"));
    CHECK(c.mode == Mode::exact);
    CHECK(c.R == 5.0);
    CHECK(c.k_max == 40.0);
    CHECK(c.n_points == 1601);
    CHECK(c.params().carrier_phase == doctest::Approx(pi / 4));
    CHECK(c.echo["numerics"]["k_max"] == 40.0);
}

TEST_CASE("carrier phase is reduced mod two") {
    const auto c = parse_config_json(json::parse(R"({"model":{"k0R_over_pi":2.25}})"));
    CHECK(c.k0R_over_pi == doctest::Approx(0.25));
}

TEST_CASE("invalid values are all named") {
    try {
        parse_config_json(json::parse(R"({"model":{"gamma":-1,"gamma1_fraction":2},"numerics":{"n_points":100}})"));
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        const std::string m = e.what();
        CHECK(m.find("model.gamma") != std::string::npos);
        CHECK(m.find("gamma1_fraction") != std::string::npos);
        CHECK(m.find("n_points") != std::string::npos);
    }
}

TEST_CASE("unknown keys are rejected") {
    CHECK_THROWS_AS(parse_config_json(json::parse(R"({"model":{"gama":1}})")), ValidationError);
    CHECK_THROWS_AS(parse_config_json(json::parse(R"({"extra":1})")), ValidationError);
}

TEST_CASE("overrides win over file keys") {
    const auto c = parse_config_json(json::parse(R"({"model":{"R":5}})"),
                                     {"model.R=3", "run.mode=weak_correlation", "run.tau={\"start\":0,\"stop\":2,\"points\":5}"});
    CHECK(c.R == 3.0);
    CHECK(c.mode == Mode::weak_correlation);
    CHECK(c.tau.values().back() == 2.0);
}

TEST_CASE("bad mode and bad override") {
    CHECK_THROWS_AS(parse_config_json(json::object(), {"run.mode=fast"}), ValidationError);
    CHECK_THROWS_AS(parse_config_json(json::object(), {"model.R"}), ParseError);
}

TEST_CASE("parse errors carry the line") {
    const std::string path = "config_test_broken.json";
    {
        std::ofstream f(path);
        f << "{\n  \"model\": {\n    \"gamma\": 1,\n  }\n}\n";
    }
    try {
        parse_config(path);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find(path + ":4") != std::string::npos);
    }
    std::remove(path.c_str());
    CHECK_THROWS_AS(parse_config("does_not_exist.json"), ParseError);
}

}
