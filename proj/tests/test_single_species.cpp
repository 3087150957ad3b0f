#include "nlcomp/error.hpp"
#include "nlcomp/single_species.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace nlcomp;

namespace {

std::shared_ptr<const DispersalOperator> make_op(const KernelSpec& k, const SpatialGrid& g, const BoundaryRegime& r,
                                                 double rate = 1.0) {
    return std::make_shared<const DispersalOperator>(assemble_dispersal(k, g, r, rate));
}

// Three cells with every pair coupled at k h = 1/4 and m = (2, 0, 2). The
// symmetric steady state (x, y, x) satisfies y = 4x^2 - 7x and
// x/2 - y/2 - y^2 = 0; the root with y > 0 lies in (7/4, 2).
double three_cell_x() {
    auto g = [](double x) {
        const double y = 4.0 * x * x - 7.0 * x;
        return 0.5 * x - 0.5 * y - y * y;
    };
    double lo = 1.75;
    double hi = 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("single_species") {

TEST_CASE("constant growth under noflux") {
    const SpatialGrid g = build_grid(0.0, 1.0, 60);
    const auto op = make_op(KernelSpec::gaussian(0.1), g, BoundaryRegime::no_flux(), 0.5);
    const auto problem = SingleSpeciesProblem::logistic(op, Eigen::VectorXd::Constant(60, 1.5),
                                                        Eigen::VectorXd::Constant(60, 3.0));
    CHECK(lambda_star(problem) == doctest::Approx(1.5).epsilon(1e-12));
    const SteadyStateResult r = solve_steady_state(problem);
    REQUIRE(r.exists);
    CHECK((r.state->array() - 0.5).abs().maxCoeff() < 1e-12);
    CHECK(r.residual < 1e-12);
}

TEST_CASE("three cell closed form") {
    const SpatialGrid g = build_grid(0.0, 1.0, 3);
    const auto op = make_op(KernelSpec::tophat(2.0 / 3.0), g, BoundaryRegime::no_flux());
    REQUIRE(op->kmat()(0, 2) == doctest::Approx(0.25));
    Eigen::VectorXd m(3);
    m << 2.0, 0.0, 2.0;
    const auto problem = SingleSpeciesProblem::logistic(op, m);
    CHECK(lambda_star(problem) == doctest::Approx(0.625 + std::sqrt(1.390625)).epsilon(1e-13));

    const SteadyStateResult r = solve_steady_state(problem);
    REQUIRE(r.exists);
    const double x = three_cell_x();
    CHECK((*r.state)[0] == doctest::Approx(x).epsilon(1e-10));
    CHECK((*r.state)[2] == doctest::Approx(x).epsilon(1e-10));
    CHECK((*r.state)[1] == doctest::Approx(4.0 * x * x - 7.0 * x).epsilon(1e-10));
    CHECK(r.uniqueness_gap < 1e-6);
}

TEST_CASE("extinction and degeneracy") {
    const SpatialGrid g = build_grid(0.0, 1.0, 4);
    // kmat - I is tridiag(0.5, -0.5, 0.5) with top eigenvalue -0.5 + cos(pi/5)
    const auto hostile = make_op(KernelSpec::tophat(0.25), g, BoundaryRegime::hostile());
    const auto dying = SingleSpeciesProblem::logistic(hostile, Eigen::VectorXd::Constant(4, -0.5));
    const SteadyStateResult none = solve_steady_state(dying);
    CHECK_FALSE(none.exists);
    CHECK(none.lambda_star < 0.0);
    const auto living = SingleSpeciesProblem::logistic(hostile, Eigen::VectorXd::Zero(4));
    const SteadyStateResult some = solve_steady_state(living);
    CHECK(some.exists);
    CHECK(some.state->minCoeff() > 0.0);

    const auto nf = make_op(KernelSpec::gaussian(0.2), g, BoundaryRegime::no_flux());
    const SteadyStateResult flat = solve_steady_state(SingleSpeciesProblem::logistic(nf, Eigen::VectorXd::Zero(4)));
    CHECK(flat.degenerate);
    CHECK_FALSE(flat.exists);
}

TEST_CASE("time march approaches the steady state") {
    const SpatialGrid g = build_grid(0.0, 1.0, 50);
    const auto op = make_op(KernelSpec::cosine_bump(0.2), g, BoundaryRegime::no_flux(), 0.3);
    Eigen::VectorXd m(50);
    for (Eigen::Index i = 0; i < 50; ++i) {
        m[i] = 1.0 + 0.5 * std::sin(6.0 * g.node(static_cast<std::size_t>(i)));
    }
    const auto problem = SingleSpeciesProblem::logistic(op, m);
    const SteadyStateResult r = solve_steady_state(problem);
    REQUIRE(r.exists);
    const SingleTrajectory traj =
        time_march_single(problem, Eigen::VectorXd::Constant(50, 0.05), 400.0, MarchOptions{}, &*r.state);
    CHECK(traj.converged);
    REQUIRE(traj.sup_dist_to_steady);
    CHECK(*traj.sup_dist_to_steady < 1e-7);
    for (double low : traj.min_series) {
        CHECK(low > 0.0);
    }
    CHECK(upper_solution_level(problem) >= r.state->maxCoeff());
}

TEST_CASE("general reaction validation") {
    const SpatialGrid g = build_grid(0.0, 1.0, 10);
    const auto op = make_op(KernelSpec::gaussian(0.1), g, BoundaryRegime::no_flux());
    Reaction bad;
    bad.value = [](const StateField& u) -> StateField { return (u.array() + 1.0).matrix(); };
    bad.derivative = [](const StateField& u) -> StateField { return StateField::Ones(u.size()); };
    CHECK_THROWS_AS(SingleSpeciesProblem::general(op, bad), Error);

    Reaction cubic;
    cubic.value = [](const StateField& u) -> StateField { return (u.array() * (1.0 - u.array().square())).matrix(); };
    cubic.derivative = [](const StateField& u) -> StateField { return (1.0 - 3.0 * u.array().square()).matrix(); };
    const auto problem = SingleSpeciesProblem::general(op, cubic);
    const SteadyStateResult r = solve_steady_state(problem);
    REQUIRE(r.exists);
    CHECK((r.state->array() - 1.0).abs().maxCoeff() < 1e-10);
}

}
