#include "ksd/config.hpp"

#include "ksd/runner.hpp"

#include <doctest.h>

#include <string>

using namespace ksd;

TEST_CASE("minimal config takes documented defaults") {
    const RunConfig c = parse_config_text(
        "model = \"constant\"\npayoff = \"expm\"\nx0 = 0.5\nT = 1.0\n");
    CHECK(c.n == 256);
    CHECK(c.paths == 100000);
    CHECK(c.seed == 0);
    CHECK(c.estimator == "all");
    CHECK(c.survival == "conditional");
    CHECK_NOTHROW(validate_config(c));
}

TEST_CASE("unknown keys are rejected by name") {
    try {
        parse_config_text("sigma_typo = 1.0\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("sigma_typo") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config_text("[mystery]\nx = 1\n"), ConfigError);
}

TEST_CASE("domain constraint: x0 below the boundary") {
    RunConfig c = parse_config_text("x0 = -0.5\nL = 0.0\n");
    try {
        validate_config(c);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("x0") != std::string::npos);
    }
}

TEST_CASE("validation catches inconsistent selections") {
    RunConfig c;
    c.estimator = "mixed";
    c.engine = 2;
    CHECK_THROWS_AS(validate_config(c), ConfigError);

    RunConfig c2;
    c2.model = "tanh-drift";
    c2.oracle = "analytic";
    CHECK_THROWS_AS(validate_config(c2), ConfigError);

    RunConfig c3;
    c3.sweep_n = {64, 64, 128};
    CHECK_THROWS_AS(validate_config(c3), ConfigError);

    RunConfig c4;
    c4.model_params["vol"] = 0.3;  // unknown model parameter
    CHECK_THROWS_AS(validate_config(c4), ConfigError);
}

TEST_CASE("parse -> serialize -> parse is a fixpoint") {
    const std::string text =
        "model = \"tanh-drift\"\npayoff = \"smoothstep\"\nx0 = 0.75\nT = 0.5\n"
        "n = 128\npaths = 5000\nseed = 99\nestimator = \"bel\"\nengine = 2\n"
        "oracle = \"pde\"\nstrict = true\nsweep_n = [32, 64, 128]\n"
        "[model.params]\nbeta = 0.25\ns0 = 1.5\n[payoff.params]\nwidth = 2.0\n";
    const RunConfig c1 = parse_config_text(text);
    const std::string canon = serialize_config(c1);
    const RunConfig c2 = parse_config_text(canon);
    CHECK(serialize_config(c2) == canon);
    CHECK(config_hash(c1) == config_hash(c2));
    CHECK(c2.model == "tanh-drift");
    CHECK(c2.model_params.at("beta") == 0.25);
    CHECK(c2.payoff_params.at("width") == 2.0);
    CHECK(c2.sweep_n == std::vector<int>{32, 64, 128});
    CHECK(c2.strict);
}

TEST_CASE("comments and whitespace are tolerated") {
    const RunConfig c = parse_config_text(
        "# run setup\n  model = \"constant\"   # family\n\n  x0 = 1.0\n");
    CHECK(c.model == "constant");
    CHECK(c.x0 == 1.0);
}

TEST_CASE("run_command smoke: value row with oracle and strict rerun") {
    RunConfig c;
    c.model = "constant";
    c.model_params = {{"beta", 0.0}, {"sigma", 1.0}};
    c.payoff = "expm";
    c.x0 = 0.5;
    c.n = 16;
    c.paths = 2000;
    c.strict = true;
    c.estimator = "value";
    const CommandResult r1 = run_command("value", c, false);
    const CommandResult r2 = run_command("value", c, false);
    CHECK(r1.csv == r2.csv);  // strict reruns are textually identical
    CHECK(r1.csv.find("value,killed,16,2000,") != std::string::npos);
    CHECK(r1.exit_code == 0);

    // re-parse the embedded manifest config and reproduce bitwise
    const auto pos = r1.manifest.find("config_toml");
    CHECK(pos != std::string::npos);
}

TEST_CASE("run_command rejects unusable setups") {
    RunConfig c;
    c.estimator = "nonsense";
    CHECK_THROWS_AS(run_command("deriv", c, false), ConfigError);
    RunConfig c2;
    CHECK_THROWS_AS(run_command("fly", c2, false), ConfigError);
}

TEST_CASE("deriv table on the boundary case emits four rows") {
    RunConfig c;
    c.model = "constant";
    c.model_params = {{"beta", 0.0}, {"sigma", 1.0}};
    c.payoff = "expm";
    c.x0 = 0.0;
    c.n = 32;
    c.paths = 4000;
    c.estimator = "all";
    const CommandResult r = run_command("deriv", c, false);
    int rows = 0;
    for (char ch : r.csv)
        if (ch == '\n') ++rows;
    CHECK(rows == 5);  // header + deriv_reflected x2 + deriv_mixed + deriv_bel
}
