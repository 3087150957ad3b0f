#pragma once

#include "nlcomp/grid.hpp"
#include "nlcomp/kernel.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <optional>
#include <string>

namespace nlcomp {

/// How the nonlocal operator treats the edge of the habitat.
///
///  - NoFlux:   K[phi](x) = int k(x,y) phi(y) dy - (int k(y,x) dy) phi(x)
///  - Hostile:  K[phi](x) = int k(x,y) phi(y) dy - phi(x)
///  - Periodic: kernel wrapped over all translates y + m L, outflow from the
///              discrete column sums (so constants are annihilated exactly)
struct BoundaryRegime {
    enum class Tag { NoFlux, Hostile, Periodic };

    Tag tag = Tag::NoFlux;
    double period = 0.0;  ///< only meaningful for Periodic

    static BoundaryRegime no_flux() { return {Tag::NoFlux, 0.0}; }
    static BoundaryRegime hostile() { return {Tag::Hostile, 0.0}; }
    static BoundaryRegime periodic(double period) { return {Tag::Periodic, period}; }

    std::string describe() const;
};

BoundaryRegime::Tag parse_regime(const std::string& name);
const char* to_string(BoundaryRegime::Tag tag);

/// Cell-centred Neumann Laplacian, (phi[i-1] - 2 phi[i] + phi[i+1]) / h^2 with
/// mirrored ghost cells. Rows sum to exactly zero.
Eigen::SparseMatrix<double> assemble_laplacian(const SpatialGrid& grid);

/// Discretized dispersal operator
///   rate * [ mix * (kmat phi - adiag .* phi) + (1 - mix) * laplacian phi ].
///
/// Immutable after assembly; apply() is a pure function, so one operator may be
/// shared between threads.
class DispersalOperator {
public:
    const SpatialGrid& grid() const noexcept { return grid_; }
    const KernelSpec& kernel() const noexcept { return kernel_; }
    const BoundaryRegime& regime() const noexcept { return regime_; }
    /// Quadrature-weighted kernel values k(x_i, x_j) h (wrapped for Periodic).
    const Eigen::MatrixXd& kmat() const noexcept { return kmat_; }
    const Eigen::VectorXd& adiag() const noexcept { return adiag_; }
    const std::optional<Eigen::SparseMatrix<double>>& local_part() const noexcept { return laplacian_; }
    double mix() const noexcept { return mix_; }
    double rate() const noexcept { return rate_; }

    bool has_local_part() const noexcept { return laplacian_.has_value(); }
    /// rate * (1 - mix); zero for a purely nonlocal operator.
    double local_coefficient() const noexcept { return has_local_part() ? rate_ * (1.0 - mix_) : 0.0; }

    StateField apply(const StateField& phi) const;
    void apply_into(const StateField& phi, StateField& out) const;
    /// Nonlocal contribution only: rate * mix * (kmat phi - adiag .* phi).
    void apply_nonlocal_into(const StateField& phi, StateField& out) const;

    /// Pure kernel action (kmat phi - adiag .* phi) without rate or mixing.
    StateField kernel_action(const StateField& phi) const;

    /// The full n-by-n matrix of the operator (rate and mixing included).
    Eigen::MatrixXd dense_matrix() const;

    /// h phi^T (kmat - diag(adiag)) phi
    double quadratic_form(const StateField& phi) const;

    double max_abs_asymmetry() const;

    friend DispersalOperator assemble_dispersal(const KernelSpec&, const SpatialGrid&, const BoundaryRegime&,
                                                double, double);

private:
    DispersalOperator(SpatialGrid grid, KernelSpec kernel, BoundaryRegime regime)
        : grid_(std::move(grid)), kernel_(kernel), regime_(regime) {}

    void check_grid(const StateField& phi) const;

    SpatialGrid grid_;
    KernelSpec kernel_;
    BoundaryRegime regime_;
    Eigen::MatrixXd kmat_;
    Eigen::VectorXd adiag_;
    std::optional<Eigen::SparseMatrix<double>> laplacian_;
    double mix_ = 1.0;
    double rate_ = 0.0;
};

/// Assembles the operator. A Laplacian part is built whenever mix < 1, which
/// is only accepted under NoFlux. Throws Error(Config) on bad arguments.
DispersalOperator assemble_dispersal(const KernelSpec& spec, const SpatialGrid& grid, const BoundaryRegime& regime,
                                     double rate, double mix = 1.0);

/// Number of periodic images summed on each side for a kernel of the given
/// support on a cell of the given period.
int wrap_count(double support, double period);

}  // namespace nlcomp
