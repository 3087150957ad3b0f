#include "oracles.hpp"

#include "nlcomp/competition.hpp"
#include "nlcomp/error.hpp"
#include "nlcomp/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace nlcomp;

namespace {

ModelParams constant_params(std::size_t n, double b, double c, double sigma = 0.1) {
    const SpatialGrid g = build_grid(0.0, 1.0, n);
    auto op = std::make_shared<const DispersalOperator>(
        assemble_dispersal(KernelSpec::gaussian(sigma), g, BoundaryRegime::no_flux(), 1.0));
    const auto ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
    return ModelParams::lotka_volterra(op, op, ones, ones, b, c);
}

SystemState constant_state(std::size_t n, double u, double v) {
    const auto k = static_cast<Eigen::Index>(n);
    return {Eigen::VectorXd::Constant(k, u), Eigen::VectorXd::Constant(k, v), 0.0};
}

}  // namespace

TEST_SUITE("competition") {

TEST_CASE("parameter validation") {
    ModelParams p = constant_params(20, 0.5, 0.5);
    CHECK_NOTHROW(p.validate());
    CHECK(p.weak_competition());
    CHECK(constant_params(20, 1.0, 1.0).weak_competition());
    CHECK_FALSE(constant_params(20, 1.5, 1.0).weak_competition());
    p.b[3] = -0.1;
    CHECK_THROWS_AS(p.validate(), Error);
    p = constant_params(20, 0.5, 0.5);
    p.m = Eigen::VectorXd::Ones(7);
    CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("coexistence state has zero residual") {
    const ModelParams p = constant_params(30, 0.5, 0.5);
    CHECK(steady_residual(p, constant_state(30, 2.0 / 3.0, 2.0 / 3.0)) < 1e-15);
    CHECK(steady_residual(p, constant_state(30, 0.5, 0.5)) == doctest::Approx(0.125));
    const SystemState rhs = system_rhs(p, constant_state(30, 0.5, 0.25));
    CHECK(rhs.u[0] == doctest::Approx(0.5 * (1.0 - 0.5 - 0.125)));
    CHECK(rhs.v[0] == doctest::Approx(0.25 * (1.0 - 0.25 - 0.25)));
}

TEST_CASE("competitive order") {
    const SystemState a = constant_state(5, 0.2, 0.8);
    const SystemState b = constant_state(5, 0.3, 0.7);
    CHECK(competitively_le(a, b));
    CHECK_FALSE(competitively_le(b, a));
    CHECK(competitively_le(b, a, 0.1 + 1e-12));
}

TEST_CASE("order fractions") {
    SystemState s;
    s.u = Eigen::Vector2d(0.2, 0.6);
    s.v = Eigen::Vector2d(0.7, 0.3);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(2);
    const OrderFractions f = order_fractions(s, ones, ones);
    CHECK(f.theta == doctest::Approx(0.2));
    CHECK(f.eta == doctest::Approx(0.7));

    Rng rng(8);
    for (int t = 0; t < 10; ++t) {
        SystemState r;
        r.u.resize(12);
        r.v.resize(12);
        Eigen::VectorXd ur(12);
        Eigen::VectorXd vr(12);
        for (Eigen::Index i = 0; i < 12; ++i) {
            r.u[i] = rng.uniform(0.0, 2.0);
            r.v[i] = rng.uniform(0.0, 2.0);
            ur[i] = rng.uniform(0.5, 1.5);
            vr[i] = rng.uniform(0.5, 1.5);
        }
        const OrderFractions lib = order_fractions(r, ur, vr);
        const auto [theta, eta] = oracle::scan_order_fractions(r, ur, vr);
        CHECK(std::abs(lib.theta - theta) < 1e-10);
        CHECK(std::abs(lib.eta - eta) < 1e-10);
        CHECK(lib.theta <= lib.eta + 1e-12);
    }
    CHECK_THROWS_AS(order_fractions(s, Eigen::Vector2d(1.0, 0.0), ones), Error);
}

TEST_CASE("energy in the degenerate configuration") {
    const ModelParams p = constant_params(25, 1.0, 1.0);
    const Eigen::VectorXd ud = Eigen::VectorXd::Ones(25);
    SystemState s = constant_state(25, 0.3, 0.5);
    s.u[4] = 0.9;
    const EnergyDiagnostics e1 = energy_residual(s, p, ud, ud, 0.1);
    const EnergyDiagnostics e2 = energy_residual(s, p, ud, ud, 0.8);
    CHECK(e1.s_independent);
    CHECK(e1.advisory.empty());
    CHECK(e1.energy == doctest::Approx(e2.energy).epsilon(1e-12));
    CHECK(e1.energy_direct == doctest::Approx(e1.energy).epsilon(1e-12));
    // h = 1/25; (u + v - 1)^2 = 0.04 at 24 nodes and 0.16 at one
    CHECK(e1.energy_direct == doctest::Approx((24 * 0.04 + 0.16) / 25.0).epsilon(1e-12));

    const ModelParams q = constant_params(25, 0.5, 0.5);
    const EnergyDiagnostics e3 = energy_residual(s, q, ud, ud, 0.1);
    CHECK_FALSE(e3.degenerate_config);
    CHECK_FALSE(e3.advisory.empty());
}

TEST_CASE("exchange identity") {
    Rng rng(13);
    for (const BoundaryRegime& r : {BoundaryRegime::no_flux(), BoundaryRegime::periodic(1.0)}) {
        const SpatialGrid g = build_grid(0.0, 1.0, 40);
        const DispersalOperator op = assemble_dispersal(KernelSpec::gaussian(0.15), g, r, 1.0);
        Eigen::VectorXd u(40);
        Eigen::VectorXd us(40);
        for (Eigen::Index i = 0; i < 40; ++i) {
            us[i] = rng.uniform(0.5, 1.5);
            u[i] = us[i] + rng.uniform(0.01, 1.0);
        }
        const SymmetrizationGap gap = symmetrization_gap(op, u, us);
        CHECK(gap.ordered);
        CHECK(gap.sign_ok);
        CHECK(gap.lhs == doctest::Approx(gap.rhs).epsilon(1e-10));
        CHECK(gap.rhs == doctest::Approx(oracle::exchange_rhs(op, u, us)).epsilon(1e-10));
    }
    const SpatialGrid g = build_grid(0.0, 1.0, 10);
    const DispersalOperator hostile = assemble_dispersal(KernelSpec::gaussian(0.1), g, BoundaryRegime::hostile(), 1.0);
    CHECK_THROWS_AS(symmetrization_gap(hostile, Eigen::VectorXd::Ones(10), Eigen::VectorXd::Ones(10)), Error);
}

TEST_CASE("continuum distance and limit classification") {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(8);
    CHECK(distance_to_continuum(constant_state(8, 0.25, 0.75), ones, ones) < 1e-12);
    CHECK(distance_to_continuum(constant_state(8, 0.5, 0.7), ones, ones) == doctest::Approx(0.1).epsilon(1e-8));

    AttractorSet set;
    set.u_d = ones;
    set.v_D = ones;
    const LimitClassification uw = classify_limit(constant_state(8, 1.0, 1e-6), set, 1e-4);
    CHECK(uw.type == LimitType::UWins);
    const LimitClassification far = classify_limit(constant_state(8, 0.5, 0.5), set, 1e-4);
    CHECK(far.type == LimitType::Undecided);
    set.continuum = true;
    const LimitClassification line = classify_limit(constant_state(8, 0.4, 0.6), set, 1e-4);
    CHECK(line.type == LimitType::ContinuumPoint);
    REQUIRE(line.s_estimate);
    CHECK(*line.s_estimate == doctest::Approx(0.4).epsilon(1e-8));
}

// Constant data stay constant, so the limit follows the ODE u' = u (1 - u - v),
// v' = v (1 - u - v): u/v is conserved and u + v -> 1, giving s = 3/7.
TEST_CASE("degenerate constant case selects s = 3/7") {
    const ModelParams p = constant_params(40, 1.0, 1.0);
    SimulationControls controls;
    controls.horizon = 400.0;
    controls.attractors.u_d = Eigen::VectorXd::Ones(40);
    controls.attractors.v_D = Eigen::VectorXd::Ones(40);
    controls.attractors.continuum = true;
    const SimulationOutcome out = simulate(p, constant_state(40, 0.3, 0.4), controls);
    CHECK(out.converged);
    CHECK(out.limit_type == LimitType::ContinuumPoint);
    REQUIRE(out.s_estimate);
    CHECK(*out.s_estimate == doctest::Approx(3.0 / 7.0).epsilon(1e-7));
    const auto [u, v] = oracle::ode_limit(0.3, 0.4, 1.0, 1.0, 1.0, 400.0);
    CHECK(u == doctest::Approx(3.0 / 7.0).epsilon(1e-9));
    CHECK(out.final.u[17] == doctest::Approx(u).epsilon(1e-7));
    CHECK(out.final.v[17] == doctest::Approx(v).epsilon(1e-7));
    CHECK_FALSE(out.series.empty());
}

TEST_CASE("simulation bookkeeping") {
    const ModelParams p = constant_params(30, 0.5, 0.5);
    SimulationControls controls;
    controls.horizon = 5.0;
    controls.stop_on_convergence = false;
    controls.record_states = true;
    const SimulationOutcome out = simulate(p, constant_state(30, 0.1, 0.2), controls);
    CHECK(out.series.size() == 6);
    CHECK(out.snapshots.size() == 6);
    CHECK(out.series.back().t == doctest::Approx(5.0));
    CHECK_FALSE(out.converged);
    CHECK_FALSE(out.trend.empty());
    CHECK(out.dt > 0.0);

    const SimulationOutcome zero = simulate(p, constant_state(30, 0.0, 0.0), controls);
    CHECK(zero.both_vanished);
}

TEST_CASE("comparison principle") {
    const ModelParams p = constant_params(30, 0.5, 0.5);
    SystemState lo = constant_state(30, 0.1, 0.9);
    SystemState hi = constant_state(30, 0.2, 0.4);
    lo.u[3] = 0.05;
    hi.v[10] = 0.3;
    CHECK(comparison_check(p, lo, hi, 20.0));
    CHECK_THROWS_AS(comparison_check(p, hi, lo, 20.0), Error);
}

TEST_CASE("bracket preconditions") {
    const ModelParams p = constant_params(30, 0.5, 0.5);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(30);
    CHECK_THROWS_AS(monotone_bracket(p, ones, ones, 0.0, 0.1), Error);
    CHECK_THROWS_AS(monotone_bracket(p, ones, ones, 0.1, -1.0), Error);
    try {
        monotone_bracket(constant_params(30, 1.5, 1.5), ones, ones, 0.1, 0.1);
        FAIL("strong competition accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Unsupported);
    }
    const BracketReport r = monotone_bracket(p, ones, ones, 0.1, 0.05, 2000.0);
    CHECK(r.certified);
    CHECK(r.distance < 1e-6);
    CHECK(r.upper_limit.u[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
    CHECK(r.max_monotonicity_violation <= 1e-10);
}

}
