#include <doctest.h>

#include <cmath>

#include "smhd/config.hpp"

using namespace smhd;

TEST_SUITE("config") {

TEST_CASE("defaults echo every section and reload to a fixed point") {
    ExperimentConfig cfg;
    const std::string echoed = cfg.echo_string();
    for (const char* section :
         {"[physical]", "[discretization]", "[wiener]", "[sigma]", "[jump]",
          "[x0]", "[experiment]", "[ou]", "[run]"})
        CHECK(echoed.find(section) != std::string::npos);
    const ExperimentConfig back = ExperimentConfig::parse(echoed);
    CHECK(back.echo_string() == echoed);
}

TEST_CASE("ini parsing with comments, blanks and whitespace") {
    const std::string text =
        "# experiment setup\n"
        "[physical]\n"
        "re = 2.0   # viscous\n"
        "rm=4.0\n"
        "\n"
        "[discretization]\n"
        "  n = 8\n"
        "  dt = 0.005\n"
        "[experiment]\n"
        "cutoffs = 4, 8, 16\n";
    const ExperimentConfig cfg = ExperimentConfig::parse(text);
    CHECK(cfg.re == 2.0);
    CHECK(cfg.rm == 4.0);
    CHECK(cfg.n == 8);
    CHECK(cfg.dt == 0.005);
    REQUIRE(cfg.cutoffs.size() == 3);
    CHECK(cfg.cutoffs[2] == 16);
    CHECK(cfg.s == 1.0);  // untouched default
}

TEST_CASE("json input is interchangeable with ini") {
    const std::string ini =
        "[physical]\nre = 2\n[jump]\nintensity = 1.5\nmc_compensator = true\n"
        "[ou]\ndts = 0.5,0.25\n";
    const std::string json =
        R"({"physical": {"re": 2}, "jump": {"intensity": 1.5,)"
        R"( "mc_compensator": true}, "ou": {"dts": [0.5, 0.25]}})";
    const ExperimentConfig a = ExperimentConfig::parse(ini);
    const ExperimentConfig b = ExperimentConfig::parse(json);
    CHECK(a.echo_string() == b.echo_string());
    CHECK(b.mc_compensator);
    REQUIRE(b.ou_dts.size() == 2);
    CHECK(b.ou_dts[1] == 0.25);
}

TEST_CASE("parse errors carry location and reason") {
    CHECK_THROWS_AS(ExperimentConfig::parse("[physical]\nre\n"),
                    ConfigParseError);
    CHECK_THROWS_AS(ExperimentConfig::parse("re = 1\n"), ConfigParseError);
    CHECK_THROWS_AS(ExperimentConfig::parse("[physical]\nbogus = 1\n"),
                    ConfigParseError);
    CHECK_THROWS_AS(ExperimentConfig::parse("[physical]\nre = abc\n"),
                    ConfigParseError);
    CHECK_THROWS_AS(ExperimentConfig::parse("{ not json"), ConfigParseError);
    ExperimentConfig cfg;
    CHECK_THROWS_AS(cfg.set("discretization.n", "eight"), ConfigParseError);
    CHECK_THROWS_AS(cfg.set("nope.nope", "1"), ConfigParseError);
    cfg.set("discretization.n", "12");
    CHECK(cfg.n == 12);
}

TEST_CASE("model builders honour the configuration") {
    ExperimentConfig cfg;
    cfg.set("physical.re", "2");
    cfg.set("physical.rm", "4");
    cfg.set("physical.s", "1.5");
    cfg.set("discretization.n", "6");
    cfg.set("wiener.trace_target", "0.05");
    cfg.set("jump.intensity", "1");
    cfg.set("jump.mark_amp", "0.2");
    BasisPtr basis = cfg.build_basis();
    CHECK(basis->cutoff() == 6);
    CHECK(basis->lambda1() == doctest::Approx(0.25));
    CHECK(basis->s() == 1.5);
    const NoiseModel nm = cfg.build_noise(basis);
    CHECK(nm.wiener().trace_q == doctest::Approx(0.05));
    CHECK(nm.constants().m3 == doctest::Approx(1.0 * 0.04));
    const IntegratorConfig ic = cfg.build_integrator();
    CHECK(ic.dt == cfg.dt);
    CHECK(ic.t_end == cfg.t_end);

    CHECK_THROWS_AS([&] {
        ExperimentConfig bad = cfg;
        bad.set("sigma.kind", "weird");
        bad.build_noise(basis);
    }(), ConfigParseError);
}

TEST_CASE("initial state builders") {
    ExperimentConfig cfg;
    cfg.set("discretization.n", "5");
    BasisPtr basis = cfg.build_basis();

    cfg.set("x0.kind", "zero");
    CHECK(norm_h2(cfg.build_x0(basis)) == 0.0);

    cfg.set("x0.kind", "mode");
    cfg.set("x0.mode", "3");
    cfg.set("x0.amplitude", "2");
    const MhdState m = cfg.build_x0(basis);
    CHECK(real_coordinate(m, 6) == doctest::Approx(2.0));
    CHECK(norm_h2(m) == doctest::Approx(4.0));

    cfg.set("x0.kind", "random");
    cfg.set("x0.norm", "1.0");
    const MhdState r = cfg.build_x0(basis);
    CHECK(norm_h(r) == doctest::Approx(1.0).epsilon(1e-12));
    // Same seed, same state.
    const MhdState r2 = cfg.build_x0(basis);
    CHECK(r.u.coeffs == r2.u.coeffs);

    cfg.set("x0.kind", "unknown");
    CHECK_THROWS_AS(cfg.build_x0(basis), ConfigParseError);
}

TEST_CASE("scalar surrogate parameters map through") {
    ExperimentConfig cfg;
    cfg.set("ou.lambda", "2.5");
    cfg.set("ou.rho", "0.4");
    const OuParams p = cfg.build_ou();
    CHECK(p.lambda == 2.5);
    CHECK(p.rho == 0.4);
    CHECK(p.sigma0 == cfg.ou_sigma0);
}

}  // TEST_SUITE
