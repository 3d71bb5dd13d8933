#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string_view>

#include "tunnelion/config.hpp"
#include "tunnelion/csv.hpp"
#include "tunnelion/errors.hpp"

using namespace tunnelion;

TEST_CASE("parse key=value with comments and ratios") {
    const Config c = Config::parse("# header\nkappa = 90\n\nE0_over_Ea=1/30\nip_mode=relativistic\n");
    CHECK(c.get_double("kappa", 0.0) == 90.0);
    CHECK(c.get_double("E0_over_Ea", 0.0) == doctest::Approx(1.0 / 30.0).epsilon(1e-16));
    CHECK(c.get_string("ip_mode", "") == "relativistic");
    CHECK(c.get_double("omega", 0.25) == 0.25);
    CHECK_FALSE(c.has("omega"));
}

TEST_CASE("malformed input is a config error") {
    CHECK_THROWS_AS(Config::parse("kappa"), ConfigError);
    CHECK_THROWS_AS(Config::parse("=3"), ConfigError);
    CHECK_THROWS_AS(Config::parse("kappa=").get_double("kappa", 1.0), ConfigError);
    CHECK_THROWS_AS(Config::parse("kappa=abc").get_double("kappa", 1.0), ConfigError);
    CHECK_THROWS_AS(Config::parse("kappa=1/0").get_double("kappa", 1.0), ConfigError);
    CHECK_THROWS_AS(Config::parse("n=2.5").get_int("n", 1), ConfigError);
    CHECK_THROWS_AS(Config::load_file("/nonexistent/params.cfg"), ConfigError);
}

TEST_CASE("unknown keys are rejected") {
    const Config c = Config::parse("kappa=1\nkapa=2\n");
    CHECK_THROWS_AS(c.require_known(param_keys()), ConfigError);
    CHECK_NOTHROW(Config::parse("kappa=1\ntier=NonRel").require_known(param_keys()));
}

TEST_CASE("lists") {
    const Config c = Config::parse("r = 1/17, 1/10 ,0.5");
    const auto v = c.get_list("r", {});
    REQUIRE(v.size() == 3);
    CHECK(v[0] == doctest::Approx(1.0 / 17.0));
    CHECK(v[2] == 0.5);
    CHECK(c.get_list("missing", {1.0}).size() == 1);
}

TEST_CASE("params from config") {
    const Config c = Config::parse("kappa=90\nE0_over_Ea=1/17\nomega=10\nip_mode=relativistic\ntier=KleinGordon");
    const PhysParams p = params_from_config(c);
    CHECK(p.kappa == 90.0);
    CHECK(p.E0 == doctest::Approx(std::pow(90.0, 3) / 17.0));
    CHECK(p.omega == 10.0);
    CHECK(p.ip_mode == IpMode::relativistic);
    CHECK(p.tier == Tier::KleinGordon);
    CHECK_THROWS_AS(params_from_config(Config::parse("kappa=-2")), ConfigError);
}

TEST_CASE("format_double round trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 4050.0, 137.035999})
        CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("csv writer checks the column count") {
    const auto path = std::filesystem::temp_directory_path() / "tunnelion_csv_test.csv";
    {
        CsvWriter w(path, {"a", "b"});
        w.row({1.0, std::string_view("x")});
        CHECK_THROWS(w.row({1.0}));
    }
    std::ifstream in(path);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "a,b");
    CHECK(row == "1,x");
    std::filesystem::remove(path);
}
