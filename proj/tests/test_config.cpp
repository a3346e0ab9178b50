#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "casimir/config.hpp"
#include "casimir/constants.hpp"
#include "casimir/errors.hpp"

using namespace casimir;

TEST_CASE("quantities carry their units") {
    CHECK(parse_quantity("98nm", Quantity::Length) == doctest::Approx(98e-9).epsilon(1e-15));
    CHECK(parse_quantity("50 um", Quantity::Length) == doctest::Approx(50e-6).epsilon(1e-15));
    CHECK(parse_quantity("50µm", Quantity::Length) == doctest::Approx(50e-6).epsilon(1e-15));
    CHECK(parse_quantity("0.2mm", Quantity::Length) == doctest::Approx(2e-4).epsilon(1e-15));
    CHECK(parse_quantity("94.6deg", Quantity::Angle) == doctest::Approx(94.6).epsilon(1e-15));
    CHECK(parse_quantity("1rad", Quantity::Angle) == doctest::Approx(180.0 / pi).epsilon(1e-15));
    CHECK(parse_quantity("35meV", Quantity::AngularFrequency) == doctest::Approx(ev_to_rad_per_s(0.035)).epsilon(1e-15));
    CHECK(parse_quantity("9eV", Quantity::AngularFrequency) == doctest::Approx(ev_to_rad_per_s(9.0)).epsilon(1e-15));
    CHECK(parse_quantity("1e13rad/s", Quantity::AngularFrequency) == doctest::Approx(1e13));
    CHECK(parse_quantity("2kHz", Quantity::Frequency) == doctest::Approx(2e3));
    CHECK(parse_quantity("-0.499V", Quantity::Voltage) == doctest::Approx(-0.499));
    CHECK(parse_quantity("300mV", Quantity::Voltage) == doctest::Approx(0.3));
    CHECK(parse_quantity("+12", Quantity::Dimensionless) == 12.0);
}

TEST_CASE("missing, wrong or stray units are rejected") {
    CHECK_THROWS_AS(parse_quantity("98", Quantity::Length), ParseError);
    CHECK_THROWS_AS(parse_quantity("98nm", Quantity::Angle), ParseError);
    CHECK_THROWS_AS(parse_quantity("98 parsec", Quantity::Length), ParseError);
    CHECK_THROWS_AS(parse_quantity("3nm", Quantity::Dimensionless), ParseError);
    CHECK_THROWS_AS(parse_quantity("nm", Quantity::Length), ParseError);
    CHECK_THROWS_AS(parse_quantity("", Quantity::Voltage), ParseError);
}

TEST_CASE("ranges are inclusive and lists keep their order") {
    const auto r = parse_quantity_list("100:600:25nm", Quantity::Length);
    REQUIRE(r.size() == 21);
    CHECK(r.front() == doctest::Approx(100e-9));
    CHECK(r.back() == doctest::Approx(600e-9));
    const auto mixed = parse_quantity_list("0.5um:1um:100nm", Quantity::Length);
    CHECK(mixed.size() == 6);
    const auto list = parse_quantity_list("200nm, 100nm, 1um", Quantity::Length);
    REQUIRE(list.size() == 3);
    CHECK(list[0] == doctest::Approx(200e-9));
    CHECK(list[2] == doctest::Approx(1e-6));
    const auto orders = parse_quantity_list("4:14:2", Quantity::Dimensionless);
    CHECK(orders.size() == 6);
    CHECK_THROWS_AS(parse_quantity_list("1:2nm", Quantity::Length), ParseError);
    CHECK_THROWS_AS(parse_quantity_list("600:100:25nm", Quantity::Length), ParseError);
    CHECK_THROWS_AS(parse_quantity_list("100:600:0nm", Quantity::Length), ParseError);
}

TEST_CASE("sections, comments and typed reads") {
    const auto cfg = Config::parse(
        "# leading comment\n"
        "[grating]\n"
        "depth = 98nm   # trailing comment\n"
        "orders = 10 ; other comment style\n"
        "[variant]\n"
        "perfect_conductor = yes\n",
        "test.cfg");
    CHECK(cfg.has("grating.depth"));
    CHECK_FALSE(cfg.has("depth"));
    CHECK(cfg.quantity("grating.depth", Quantity::Length) == doctest::Approx(98e-9));
    CHECK(cfg.integer("grating.orders") == 10);
    CHECK(cfg.flag("variant.perfect_conductor", false));
    CHECK(cfg.integer("grating.missing", 7) == 7);
    CHECK(cfg.text("grating.missing", "x") == "x");
    CHECK_THROWS_AS(cfg.text("grating.missing"), ParseError);
    CHECK_THROWS_AS(cfg.integer("grating.depth"), ParseError);
    CHECK_THROWS_AS(cfg.flag("grating.depth", false), ParseError);
}

TEST_CASE("unread keys are reported") {
    const auto cfg = Config::parse("[grating]\ndepth = 98nm\ndeapth = 90nm\n", "typo.cfg");
    cfg.quantity("grating.depth", Quantity::Length);
    const auto unused = cfg.unused_keys();
    REQUIRE(unused.size() == 1);
    CHECK(unused[0] == "grating.deapth");
    try {
        cfg.reject_unused();
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("grating.deapth") != std::string::npos);
        CHECK(std::string(e.what()).find("typo.cfg") != std::string::npos);
    }
}

TEST_CASE("errors name the key and the file") {
    const auto cfg = Config::parse("[sphere]\nradius = 50\n", "bad.cfg");
    try {
        cfg.quantity("sphere.radius", Quantity::Length);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("sphere.radius") != std::string::npos);
        CHECK(msg.find("bad.cfg") != std::string::npos);
    }
    CHECK_THROWS_AS(Config::parse("[broken\nx = 1\n"), ParseError);
    CHECK_THROWS_AS(Config::load("does/not/exist.cfg"), ParseError);
}

TEST_CASE("hash depends on content only") {
    const auto a = Config::parse("[a]\nx = 1nm\ny = 2nm\n", "one.cfg");
    const auto b = Config::parse("# comment\n[a]\ny = 2nm\nx =   1nm\n", "two.cfg");
    CHECK(a.canonical() == b.canonical());
    CHECK(a.hash() == b.hash());
    CHECK(a.hash().size() == 16);
    auto c = a;
    c.set("a.x", "1.5nm");
    CHECK(c.hash() != a.hash());
    CHECK(c.without({"a.x"}).hash() == a.without({"a.x"}).hash());
    CHECK(a.without({"a.x"}).has("a.y"));
    CHECK_FALSE(a.without({"a.x"}).has("a.x"));
}

TEST_CASE("fnv1a64 reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}
