#include "nlcomp/config.hpp"
#include "nlcomp/error.hpp"
#include "nlcomp/rng.hpp"

#include <doctest.h>

#include <filesystem>
#include <string>

using namespace nlcomp;

namespace {

std::string config_error(const std::string& text) {
    try {
        parse_config(text, "t.cfg");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
        return e.what();
    }
    return {};
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults") {
    const ScenarioConfig cfg = parse_config("");
    CHECK(cfg.n == 200);
    CHECK(cfg.kernel_u.family == KernelFamily::Gaussian);
    CHECK(cfg.regime.tag == BoundaryRegime::Tag::NoFlux);
    CHECK(cfg.coefficients.at("b").value == 0.5);
    CHECK(cfg.coefficients.at("c1").value == 1.0);
    CHECK(cfg.seed == 1);
    CHECK(cfg.verify);
    CHECK(cfg.sweep.empty());
}

TEST_CASE("full file") {
    const ScenarioConfig cfg = parse_config(R"(
# comment
grid.lo = -1
grid.hi = 1      # trailing comment
grid.n = 64
kernel.u.family = tophat
kernel.u.radius = 0.2
kernel.v.family = gaussian
kernel.v.sigma = 0.05
regime = periodic
model.d = 0.5
model.D = 2
coef.m.profile = cosine
coef.m.offset = 1
coef.m.amplitude = 0.3
coef.b = 0.25
init.kind = constant
init.u = 0.3
init.v = 0.4
rng.seed = 18446744073709551615
control.horizon = 50
control.verify = no
output.report = out.txt
sweep.c = 0.1:0.9:5
sweep.D = 1,2,4
sweep.filter = weak
)");
    CHECK(cfg.lo == -1.0);
    CHECK(cfg.n == 64);
    CHECK(cfg.kernel_u.family == KernelFamily::Tophat);
    CHECK(cfg.kernel_u.scale == 0.2);
    CHECK(cfg.kernel_v.scale == 0.05);
    CHECK(cfg.regime.tag == BoundaryRegime::Tag::Periodic);
    CHECK(cfg.regime.period == 2.0);
    CHECK(cfg.coefficients.at("m").kind == ProfileSpec::Kind::Cosine);
    CHECK(cfg.coefficients.at("b").value == 0.25);
    CHECK(cfg.init.kind == InitSpec::Kind::Constant);
    CHECK(cfg.seed == 18446744073709551615ULL);
    CHECK_FALSE(cfg.verify);
    REQUIRE(cfg.sweep.size() == 2);
    CHECK(cfg.sweep[0].name == "c");
    CHECK(cfg.sweep[0].values.size() == 5);
    CHECK(cfg.sweep[0].values[2] == doctest::Approx(0.5));
    CHECK(cfg.sweep[1].values == std::vector<double>{1, 2, 4});
    CHECK(cfg.sweep_weak_only);

    const ModelParams p = build_model(cfg);
    CHECK(p.m[0] == doctest::Approx(1.0 + 0.3 * std::cos(2.0 * 3.141592653589793 * p.grid().node(0))));
    CHECK(p.op_v->rate() == 2.0);
    const ModelParams q = build_model(cfg, {{"c", 0.7}, {"D", 3.0}});
    CHECK(q.c.maxCoeff() == 0.7);
    CHECK(q.op_v->rate() == 3.0);
    const SystemState s = build_initial_state(cfg, p);
    CHECK(s.u[5] == 0.3);
}

TEST_CASE("errors name the line and key") {
    CHECK(config_error("grid.n = 10\ngrid.n = 20\n").find("t.cfg:2: duplicate key 'grid.n' (first set on line 1)") == 0);
    CHECK(config_error("\n\nmodel.q = 1\n") == "t.cfg:3: key 'model.q': unknown key");
    CHECK(config_error("grid.n = 2\n") == "t.cfg:1: key 'grid.n': must be between 3 and 4000");
    CHECK(config_error("grid.n = 5000\n").find("between 3 and 4000") != std::string::npos);
    CHECK(config_error("model.d = abc\n") == "t.cfg:1: key 'model.d': expected a number, got 'abc'");
    CHECK(config_error("x\n") == "t.cfg:1: expected 'key = value'");
    CHECK(config_error("regime = robin\n").find("t.cfg:1: key 'regime'") == 0);
    CHECK(config_error("kernel.u.sigma = 0.1\nkernel.u.radius = 0.1\n").find("not both") != std::string::npos);
    CHECK(config_error("kernel.u.family = tophat\nkernel.u.sigma = 0.1\n").find("radius") != std::string::npos);
    CHECK(config_error("coef.b = 1\ncoef.b.profile = sine\n").find("not both") != std::string::npos);
    CHECK(config_error("regime = hostile\nmodel.alpha = 0.5\n").find("noflux") != std::string::npos);
    CHECK(config_error("rng.algorithm = pcg\n").find("mt19937_64") != std::string::npos);
    CHECK(config_error("output.report = ../x\n").find("plain file name") != std::string::npos);
    CHECK(config_error("model.d = inf\n").find("finite") != std::string::npos);
    CHECK(config_error("sweep.b = 1:0:3\n").find("t.cfg:1: key 'sweep.b': empty or malformed range") == 0);
}

TEST_CASE("ranges") {
    CHECK(parse_range("0:1:3") == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(parse_range("2:2:1") == std::vector<double>{2.0});
    CHECK(parse_range(" 0.5 , 1.5 ") == std::vector<double>{0.5, 1.5});
    CHECK_THROWS_AS(parse_range("0:1:0"), Error);
    CHECK_THROWS_AS(parse_range("0:1"), Error);
    CHECK_THROWS_AS(parse_range("0:1:2.5"), Error);
    CHECK_THROWS_AS(parse_range(""), Error);
    CHECK_THROWS_AS(parse_range("1,,2"), Error);
}

TEST_CASE("garbage only raises config errors") {
    const std::string alphabet = "abcdgmnru.=:#,-+e0123456789 \n\t";
    const std::string keys[] = {"grid.n", "model.d", "coef.b", "sweep.c", "regime", "kernel.u.family", "init.kind"};
    Rng rng(99);
    for (int t = 0; t < 2000; ++t) {
        std::string text;
        const auto len = static_cast<int>(rng.uniform(0.0, 60.0));
        if (t % 2 == 0) {
            text = keys[static_cast<std::size_t>(rng.uniform(0.0, 7.0))] + " = ";
        }
        for (int i = 0; i < len; ++i) {
            text += alphabet[static_cast<std::size_t>(rng.uniform(0.0, static_cast<double>(alphabet.size())))];
        }
        try {
            parse_config(text, "fuzz");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Config);
        }
    }
}

TEST_CASE("shipped scenarios parse") {
    int count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(NLCOMP_SCENARIO_DIR)) {
        if (entry.path().extension() != ".cfg") {
            continue;
        }
        ++count;
        CAPTURE(entry.path().string());
        if (entry.path().filename().string().rfind("bad_", 0) == 0) {
            CHECK_THROWS_AS(load_config(entry.path()), Error);
        } else {
            CHECK_NOTHROW(load_config(entry.path()));
        }
    }
    CHECK(count > 0);
    CHECK_THROWS_AS(load_config("/nonexistent/file.cfg"), Error);
}

}
