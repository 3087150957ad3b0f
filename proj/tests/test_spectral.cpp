#include "oracles.hpp"

#include "nlcomp/error.hpp"
#include "nlcomp/rng.hpp"
#include "nlcomp/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace nlcomp;

TEST_SUITE("spectral") {

TEST_CASE("constant potential under noflux") {
    const SpatialGrid g = build_grid(0.0, 1.0, 80);
    const DispersalOperator op = assemble_dispersal(KernelSpec::gaussian(0.1), g, BoundaryRegime::no_flux(), 0.7);
    for (SpectralMethod m : {SpectralMethod::Dense, SpectralMethod::Power, SpectralMethod::Rayleigh}) {
        const SpectralReport r = spectral_bound(op, Eigen::VectorXd::Constant(80, 0.3), m);
        CHECK(r.bound == doctest::Approx(0.3).epsilon(1e-12));
        REQUIRE(r.eigvec);
        CHECK(r.eigvec->minCoeff() > 0.0);
        CHECK(r.has_positive_eigvec);
    }
}

// kmat - I for the four-cell tophat (R = h) is tridiag(0.5, -0.5, 0.5); its
// eigenvalues are -0.5 + cos(j pi / 5), j = 1..4.
TEST_CASE("hostile tophat closed form") {
    const SpatialGrid g = build_grid(0.0, 1.0, 4);
    const DispersalOperator op = assemble_dispersal(KernelSpec::tophat(0.25), g, BoundaryRegime::hostile(), 1.0);
    const double expected = -0.5 + std::cos(std::numbers::pi / 5.0);
    const SpectralReport r = spectral_bound(op, Eigen::VectorXd::Zero(4));
    CHECK(r.bound == doctest::Approx(expected).epsilon(1e-14));
    CHECK(r.bound == doctest::Approx(0.30901699437494745).epsilon(1e-14));
}

TEST_CASE("dense agrees with the inertia oracle") {
    Rng rng(21);
    for (int t = 0; t < 4; ++t) {
        const std::size_t n = 30 + 20 * static_cast<std::size_t>(t);
        const SpatialGrid g = build_grid(0.0, 1.0, n);
        const DispersalOperator op =
            assemble_dispersal(KernelSpec::cosine_bump(0.2), g, t % 2 ? BoundaryRegime::hostile() : BoundaryRegime::no_flux(), 1.3);
        Eigen::VectorXd q(static_cast<Eigen::Index>(n));
        for (Eigen::Index i = 0; i < q.size(); ++i) {
            q[i] = rng.uniform(-1.0, 1.0);
        }
        const double dense = spectral_bound(op, q).bound;
        CHECK(std::abs(dense - oracle::top_eigenvalue_bisection(operator_matrix(op, q))) < 1e-10);
    }
}

TEST_CASE("jacobi oracle on tiny matrices") {
    Eigen::MatrixXd a(3, 3);
    a << 2, 1, 0, 1, 2, 1, 0, 1, 2;
    const auto eig = oracle::jacobi_eigenvalues(a);
    CHECK(eig.back() == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-14));
    CHECK(spectral_bound(a).bound == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-14));
    CHECK(oracle::count_above(a, 2.0) == 1);
}

TEST_CASE("nonsymmetric input") {
    Eigen::MatrixXd a(2, 2);
    a << 0, 1, -1, 0;  // eigenvalues +-i
    const SpectralReport r = spectral_bound(a);
    CHECK(r.complex_top);
    CHECK(std::abs(r.bound) < 1e-14);
    CHECK_FALSE(is_symmetric(a));
    CHECK_THROWS_AS(spectral_bound(a, SpectralMethod::Rayleigh), Error);
}

TEST_CASE("iterative methods report the eigenvector") {
    const SpatialGrid g = build_grid(0.0, 1.0, 120);
    const DispersalOperator op = assemble_dispersal(KernelSpec::gaussian(0.1), g, BoundaryRegime::no_flux(), 1.0);
    Eigen::VectorXd q(120);
    for (Eigen::Index i = 0; i < 120; ++i) {
        q[i] = std::cos(2.0 * std::numbers::pi * g.node(static_cast<std::size_t>(i)));
    }
    const SpectralReport dense = spectral_bound(op, q);
    const SpectralReport power = spectral_bound(op, q, SpectralMethod::Power);
    const SpectralReport ray = spectral_bound(op, q, SpectralMethod::Rayleigh);
    CHECK(std::abs(dense.bound - power.bound) < 1e-9);
    CHECK(std::abs(dense.bound - ray.bound) < 1e-9);
    CHECK(power.residual < 1e-9);
    CHECK((power.eigvec->cwiseAbs() - dense.eigvec->cwiseAbs()).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(rayleigh_quotient(op, q, *dense.eigvec) == doctest::Approx(dense.bound).epsilon(1e-12));
    CHECK(rayleigh_quotient(op, q, Eigen::VectorXd::Ones(120)) <= dense.bound + 1e-14);
}

TEST_CASE("power iteration gives up with a lower bound") {
    const SpatialGrid g = build_grid(0.0, 1.0, 60);
    const DispersalOperator op = assemble_dispersal(KernelSpec::gaussian(0.1), g, BoundaryRegime::no_flux(), 1.0);
    SpectralOptions options;
    options.max_iterations = 3;
    Eigen::VectorXd q = Eigen::VectorXd::LinSpaced(60, -1.0, 1.0);
    try {
        spectral_bound(op, q, SpectralMethod::Power, options);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.iterations() == 3);
        CHECK(e.lower_bound() <= spectral_bound(op, q).bound + 1e-12);
    }
}

TEST_CASE("positive surrogate and zero field") {
    Eigen::VectorXd v(3);
    v << -0.2, -0.5, -0.1;
    const Eigen::VectorXd s = positive_surrogate(v);
    CHECK(s.minCoeff() > 0.0);
    CHECK(s.maxCoeff() == doctest::Approx(1.0));
    const SpatialGrid g = build_grid(0.0, 1.0, 3);
    const DispersalOperator op = assemble_dispersal(KernelSpec::gaussian(0.1), g, BoundaryRegime::no_flux(), 1.0);
    CHECK_THROWS_AS(rayleigh_quotient(op, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3)), Error);
}

}
