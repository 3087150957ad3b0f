#include "nlcomp/classifier.hpp"
#include "nlcomp/error.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace nlcomp;

namespace {

ModelParams constant_params(double b, double c, double m = 1.0, std::size_t n = 40) {
    const SpatialGrid g = build_grid(0.0, 1.0, n);
    auto op = std::make_shared<const DispersalOperator>(
        assemble_dispersal(KernelSpec::gaussian(0.1), g, BoundaryRegime::no_flux(), 1.0));
    const auto k = static_cast<Eigen::Index>(n);
    return ModelParams::lotka_volterra(op, op, Eigen::VectorXd::Constant(k, m), Eigen::VectorXd::Ones(k), b, c);
}

ErrorKind kind_of(const ModelParams& p) {
    try {
        classify(p);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("classify did not throw");
    return ErrorKind::Contract;
}

}  // namespace

TEST_SUITE("classifier") {

// u_d = v_D = 1, so mu = 1 - b and nu = 1 - c.
TEST_CASE("constant exponents") {
    const ModelParams p = constant_params(0.25, 2.0);
    const SemiTrivialStates semi = solve_semi_trivial(p);
    REQUIRE(semi.u.exists);
    REQUIRE(semi.v.exists);
    const StabilityExponents e = stability_exponents(p, *semi.u.state, *semi.v.state);
    CHECK(e.mu == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(e.nu == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(e.neutral_band == doctest::Approx(3e-8));

    const ModelParams q = constant_params(1.0, 1.0);
    const SemiTrivialStates flat = solve_semi_trivial(q);
    const StabilityExponents z = stability_exponents(q, *flat.u.state, *flat.v.state);
    CHECK(std::abs(z.mu) < 1e-12);
    CHECK(std::abs(z.nu) < 1e-12);

    CHECK_THROWS_AS(stability_exponents(p, Eigen::VectorXd::Constant(40, 0.5), *semi.v.state), Error);
}

TEST_CASE("verdicts") {
    const ClassificationOutcome both = classify(constant_params(0.5, 0.5));
    CHECK(both.kind == CaseKind::BothUnstable);
    CHECK(both.prediction == Prediction::UniqueCoexistence);
    CHECK(both.status == ClassStatus::Ok);

    const ClassificationOutcome vw = classify(constant_params(0.25, 2.0));
    CHECK(vw.kind == CaseKind::USemitrivialUnstable);
    CHECK(vw.prediction == Prediction::VWins);
    CHECK(expected_limit(vw.prediction) == LimitType::VWins);

    const ClassificationOutcome uw = classify(constant_params(2.0, 0.25));
    CHECK(uw.prediction == Prediction::UWins);

    const ClassificationOutcome deg = classify(constant_params(1.0, 1.0));
    CHECK(deg.kind == CaseKind::Degenerate);
    CHECK(deg.prediction == Prediction::Continuum);
    CHECK(deg.status == ClassStatus::Ok);
    CHECK(deg.evidence.certificate);
    CHECK(attractors_for(deg).continuum);
}

TEST_CASE("error paths") {
    CHECK(kind_of(constant_params(1.5, 1.5)) == ErrorKind::Unsupported);
    CHECK(kind_of(constant_params(0.5, 0.5, -1.0)) == ErrorKind::Hypothesis);
    try {
        classify(constant_params(0.5, 0.5, -1.0));
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("lambda*") != std::string::npos);
    }
}

TEST_CASE("random initial data") {
    const ModelParams p = constant_params(0.5, 0.5);
    const auto a = random_initial_states(p, 4, 7);
    const auto b = random_initial_states(p, 4, 7);
    REQUIRE(a.size() == 4);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].u == b[i].u);
        CHECK(a[i].v == b[i].v);
        CHECK(a[i].u.minCoeff() > 0.0);
        CHECK(a[i].v.maxCoeff() <= 1.0);
    }
    CHECK(random_initial_states(p, 1, 8)[0].u != a[0].u);
}

TEST_CASE("verification of a dominance case") {
    const ModelParams p = constant_params(0.25, 2.0, 1.0, 30);
    const ClassificationOutcome out = classify(p);
    VerifyOptions options;
    options.n_inits = 3;
    options.horizon = 300.0;
    const VerificationReport report = verify_prediction(p, out, options);
    CHECK(report.total == 3);
    CHECK(report.matches == 3);
    CHECK_FALSE(report.bracket);
}

TEST_CASE("continuum table") {
    const ModelParams p = constant_params(1.0, 1.0, 1.0, 30);
    const ClassificationOutcome out = classify(p);
    const ContinuumTable t = continuum_check(p, out.u_d, out.v_D, {0.0, 0.25, 0.5, 1.0});
    CHECK(t.rows.size() == 4);
    CHECK(t.all_pass);
    CHECK(t.certificate);
    CHECK(t.advisory.empty());

    const ModelParams q = constant_params(0.5, 0.5, 1.0, 30);
    const ContinuumTable off = continuum_check(q, out.u_d, out.v_D, {0.5});
    CHECK_FALSE(off.all_pass);
    CHECK_FALSE(off.advisory.empty());
}

// u_d = v_D = 1 on a unit interval: I2 = 1 - c, combined = (b - 1)^2 (b + 1).
TEST_CASE("nonexistence probe") {
    const ModelParams p = constant_params(0.25, 2.0);
    const ClassificationOutcome out = classify(p);
    const NonexistenceReport r = nonexistence_probe(p, out.u_d, out.v_D, out.exponents);
    CHECK(r.i2 == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(r.i1 == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(r.combined == doctest::Approx(0.703125).epsilon(1e-12));
    CHECK(r.consistent);
}

}
