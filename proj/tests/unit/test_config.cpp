#include <doctest.h>

#include <string>

#include "chainrisk/config.hpp"
#include "chainrisk/error.hpp"

using namespace chainrisk;

namespace {

const char* kMinimal = R"(# minimal exponential model
[model]
m = 1
hacker = exponential rate=1
detect = exponential rate=1
reset = exponential rate=1
)";

// Returns the ParseError message, or "" if parsing succeeded.
std::string parse_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
    const auto c = parse_config(kMinimal);
    CHECK(c.engine.reps == 30000);
    CHECK(c.engine.seed == 0);
    CHECK(c.engine.common_random_numbers);
    CHECK(c.m == 1);
    CHECK_FALSE(c.n.has_value());
    CHECK(c.hackers.size() == 1);
    CHECK(c.spec().m() == 1);
    CHECK(c.sweep.t_grid.size() == 21);
    CHECK(c.sweep.t_grid.back() == 10.0);
    CHECK_FALSE(c.econ.has_value());
    CHECK(c.source_hash == fnv1a64(kMinimal));
}

TEST_CASE("full config") {
    const auto c = parse_config(R"(
[model]
n = 7
mode = ransom
hacker = gamma shape=2 rate=1.5
hackers = 4
detect = weibull(scale=2, shape=1.5)
reset = exponential rate=0.5   # trailing comment
[engine]
reps = 1000
seed = 18446744073709551615
threads = 3
tol = 1e-10
cells = 2048
horizon = 40
crn = false
[econ]
revenue = 0.3, 1, 4
reset_cost = 2.5, 2
run_cost = 2, 0.3, 0
[sweep]
m = 2..9
k = 1..3
t = 0, 0.5, 4
)");
    CHECK(c.n == 7);
    CHECK(c.spec().m() == 7);
    CHECK(c.spec().k() == 4);
    CHECK(c.hackers[3] == Distribution::gamma(2.0, 1.5));
    CHECK(*c.detect == Distribution::weibull(2.0, 1.5));
    CHECK(c.engine.seed == 18446744073709551615ULL);
    CHECK(c.engine.threads == 3);
    CHECK(c.engine.quad.abs_tol == 1e-10);
    CHECK(c.engine.grid.cells == 2048);
    CHECK(c.engine.grid.horizon == 40.0);
    CHECK_FALSE(c.engine.common_random_numbers);
    REQUIRE(c.econ.has_value());
    CHECK(c.econ->revenue(1) == doctest::Approx(4.3));
    CHECK(c.econ->reset_cost.c == 0.0);
    CHECK(c.sweep.m_lo == 2);
    CHECK(c.sweep.m_hi == 9);
    CHECK(c.sweep.t_grid == std::vector<double>{0.0, 0.5, 4.0});
}

TEST_CASE("parse errors name the key and line") {
    const std::string neg = parse_error("[model]\nm = 1\nhacker = exponential rate=-2\ndetect = exponential rate=1\n"
                                        "reset = exponential rate=1\n");
    CHECK(neg.find("line 3") != std::string::npos);
    CHECK(neg.find("rate") != std::string::npos);

    const std::string both = parse_error("[model]\nn = 5\nm = 2\nhacker = exponential rate=1\n"
                                         "detect = exponential rate=1\nreset = exponential rate=1\n");
    CHECK(both.find("both n and m") != std::string::npos);

    const std::string unknown = parse_error(std::string(kMinimal) + "[engine]\nspeed = 3\n");
    CHECK(unknown.find("unknown key 'speed'") != std::string::npos);
    CHECK(unknown.find("line 8") != std::string::npos);

    CHECK(parse_error("[engine]\nreps = 10\n").find("missing [model]") != std::string::npos);
    CHECK(parse_error("[model]\nm = 1\nhacker = exponential rate=1\nreset = exponential rate=1\n").find("detect") !=
          std::string::npos);
    CHECK(parse_error("[model]\nm = 1\nhacker = weibull scale=1 shape=2\ndetect = exponential rate=1\n"
                      "reset = exponential rate=1\n")
              .find("Weibull") != std::string::npos);
    CHECK(parse_error(std::string(kMinimal) + "[sweep]\nm = 5..2\n").find("range") != std::string::npos);
    CHECK(parse_error(std::string(kMinimal) + "[sweep]\nt = 3, 1\n").find("ascending") != std::string::npos);
    CHECK(parse_error(std::string(kMinimal) + "[engine]\nreps = 1\n").find("reps") != std::string::npos);
    CHECK(parse_error(std::string(kMinimal) + "[mystery]\n").find("unknown section") != std::string::npos);
    CHECK(parse_error(std::string(kMinimal) + "[econ]\nrevenue = 1\n").find("reset_cost") != std::string::npos);
    CHECK(parse_error("[model]\nn = 4\nmode = sideways\n").find("mode") != std::string::npos);
    CHECK(parse_error("[model]\nm = x\n").find("integer") != std::string::npos);
    CHECK(parse_error("m = 1\n").find("before any section") != std::string::npos);
}

TEST_CASE("parse_distribution round-trips describe()") {
    for (const auto& d : {Distribution::exponential(0.25), Distribution::gamma(2.5, 1.0 / 3.0),
                          Distribution::weibull(1.7, 0.6)}) {
        CHECK(parse_distribution(d.describe()) == d);
    }
    CHECK_THROWS_AS(parse_distribution("lognormal mu=1"), ParseError);
    CHECK_THROWS_AS(parse_distribution("gamma shape=1"), ParseError);
    CHECK_THROWS_AS(parse_distribution("exponential rate=1 shape=2"), ParseError);
    CHECK_THROWS_AS(parse_distribution("exponential rate=0"), ParseError);
}

TEST_CASE("fnv1a64 reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}
