#include "oracles.hpp"

#include "nlcomp/dispersal.hpp"
#include "nlcomp/error.hpp"
#include "nlcomp/rng.hpp"

#include <doctest.h>

using namespace nlcomp;

namespace {

Eigen::VectorXd random_field(Rng& rng, Eigen::Index n) {
    Eigen::VectorXd phi(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        phi[i] = rng.uniform(-1.0, 1.0);
    }
    return phi;
}

}  // namespace

TEST_SUITE("dispersal") {

// tophat R = 0.25 on four cells of width 0.25: neighbours at distance h sit on
// the closed edge of the support, k h = 2 * 0.25 = 0.5.
TEST_CASE("hand-assembled tophat matrices") {
    const SpatialGrid g = build_grid(0.0, 1.0, 4);
    const KernelSpec k = KernelSpec::tophat(0.25);

    const DispersalOperator nf = assemble_dispersal(k, g, BoundaryRegime::no_flux(), 1.0);
    Eigen::MatrixXd expected(4, 4);
    expected << 0.5, 0.5, 0.0, 0.0, 0.5, 0.5, 0.5, 0.0, 0.0, 0.5, 0.5, 0.5, 0.0, 0.0, 0.5, 0.5;
    CHECK((nf.kmat() - expected).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(nf.adiag()[0] == doctest::Approx(1.0));
    CHECK(nf.adiag()[1] == doctest::Approx(1.5));

    const DispersalOperator ho = assemble_dispersal(k, g, BoundaryRegime::hostile(), 1.0);
    CHECK(ho.adiag() == Eigen::VectorXd::Ones(4));

    const DispersalOperator pe = assemble_dispersal(k, g, BoundaryRegime::periodic(1.0), 1.0);
    CHECK(pe.kmat()(0, 3) == doctest::Approx(0.5));
    CHECK(pe.kmat()(0, 2) == 0.0);
    for (Eigen::Index i = 0; i < 4; ++i) {
        CHECK(pe.adiag()[i] == doctest::Approx(1.5));
    }
}

TEST_CASE("apply matches the pairwise oracle") {
    const SpatialGrid g = build_grid(-0.5, 1.5, 97);
    Rng rng(5);
    for (const KernelSpec& k : {KernelSpec::gaussian(0.3), KernelSpec::tophat(0.7), KernelSpec::cosine_bump(2.5)}) {
        for (const BoundaryRegime& r :
             {BoundaryRegime::no_flux(), BoundaryRegime::hostile(), BoundaryRegime::periodic(2.0)}) {
            const DispersalOperator op = assemble_dispersal(k, g, r, 1.0);
            const Eigen::VectorXd phi = random_field(rng, 97);
            const Eigen::VectorXd ref = oracle::brute_force_dispersal(k, g, r, phi);
            CHECK((op.apply(phi) - ref).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("symmetry, mass and dissipation") {
    const SpatialGrid g = build_grid(0.0, 1.0, 150);
    Rng rng(11);
    for (const BoundaryRegime& r : {BoundaryRegime::no_flux(), BoundaryRegime::periodic(1.0)}) {
        const DispersalOperator op = assemble_dispersal(KernelSpec::gaussian(0.15), g, r, 2.0);
        CHECK(op.max_abs_asymmetry() == 0.0);
        CHECK(op.apply(Eigen::VectorXd::Constant(150, 3.0)).cwiseAbs().maxCoeff() < 1e-13);
        for (int t = 0; t < 20; ++t) {
            const Eigen::VectorXd phi = random_field(rng, 150);
            CHECK(std::abs(g.integrate(op.apply(phi))) < 1e-12 * 150);
            CHECK(op.quadratic_form(phi) <= 1e-12);
        }
    }
}

TEST_CASE("periodic wrap count") {
    CHECK(wrap_count(0.3, 1.0) == 2);
    CHECK(wrap_count(2.5, 1.0) == 4);
}

TEST_CASE("laplacian stencil") {
    const SpatialGrid g = build_grid(0.0, 1.0, 4);
    const Eigen::MatrixXd lap = Eigen::MatrixXd(assemble_laplacian(g));
    Eigen::MatrixXd expected(4, 4);
    expected << -16, 16, 0, 0, 16, -32, 16, 0, 0, 16, -32, 16, 0, 0, 16, -16;
    CHECK((lap - expected).cwiseAbs().maxCoeff() == 0.0);
    const SpatialGrid big = build_grid(0.0, 1.0, 101);
    const Eigen::MatrixXd l2 = Eigen::MatrixXd(assemble_laplacian(big));
    CHECK(l2.rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mixed operator combines both parts") {
    const SpatialGrid g = build_grid(0.0, 1.0, 50);
    const KernelSpec k = KernelSpec::gaussian(0.1);
    const DispersalOperator pure = assemble_dispersal(k, g, BoundaryRegime::no_flux(), 2.0);
    const DispersalOperator mixed = assemble_dispersal(k, g, BoundaryRegime::no_flux(), 2.0, 0.25);
    CHECK_FALSE(pure.has_local_part());
    REQUIRE(mixed.has_local_part());
    CHECK(mixed.local_coefficient() == doctest::Approx(1.5));
    Rng rng(3);
    const Eigen::VectorXd phi = random_field(rng, 50);
    const Eigen::VectorXd expected = 0.25 * pure.apply(phi) + 1.5 * (*mixed.local_part() * phi);
    CHECK((mixed.apply(phi) - expected).cwiseAbs().maxCoeff() < 1e-10);
    Eigen::VectorXd nonlocal(50);
    mixed.apply_nonlocal_into(phi, nonlocal);
    CHECK((nonlocal - 0.25 * pure.apply(phi)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("assembly preconditions") {
    const SpatialGrid g = build_grid(0.0, 1.0, 20);
    const KernelSpec k = KernelSpec::gaussian(0.1);
    CHECK_THROWS_AS(assemble_dispersal(k, g, BoundaryRegime::no_flux(), -1.0), Error);
    CHECK_THROWS_AS(assemble_dispersal(k, g, BoundaryRegime::no_flux(), 1.0, 1.5), Error);
    CHECK_THROWS_AS(assemble_dispersal(k, g, BoundaryRegime::hostile(), 1.0, 0.5), Error);
    CHECK_THROWS_AS(assemble_dispersal(k, g, BoundaryRegime::periodic(2.0), 1.0), Error);
    CHECK(parse_regime("dirichlet") == BoundaryRegime::Tag::Hostile);
    CHECK(parse_regime("neumann") == BoundaryRegime::Tag::NoFlux);
    CHECK_THROWS_AS(parse_regime("robin"), Error);
}

}
