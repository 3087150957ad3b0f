#include "nlcomp/dispersal.hpp"

#include "nlcomp/error.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace nlcomp {

std::string BoundaryRegime::describe() const {
    std::ostringstream out;
    out << to_string(tag);
    if (tag == Tag::Periodic) {
        out << "(L=" << period << ")";
    }
    return out.str();
}

BoundaryRegime::Tag parse_regime(const std::string& name) {
    if (name == "noflux" || name == "no-flux" || name == "neumann") {
        return BoundaryRegime::Tag::NoFlux;
    }
    if (name == "hostile" || name == "dirichlet") {
        return BoundaryRegime::Tag::Hostile;
    }
    if (name == "periodic") {
        return BoundaryRegime::Tag::Periodic;
    }
    throw Error(ErrorKind::Config, "unknown regime '" + name + "' (expected noflux|hostile|periodic)");
}

const char* to_string(BoundaryRegime::Tag tag) {
    switch (tag) {
    case BoundaryRegime::Tag::NoFlux:
        return "noflux";
    case BoundaryRegime::Tag::Hostile:
        return "hostile";
    case BoundaryRegime::Tag::Periodic:
        return "periodic";
    }
    return "?";
}

int wrap_count(double support, double period) {
    // images with |m| L - L > support contribute nothing
    return static_cast<int>(std::ceil(support / period)) + 1;
}

Eigen::SparseMatrix<double> assemble_laplacian(const SpatialGrid& grid) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    const double inv_h2 = 1.0 / (grid.weight() * grid.weight());
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(3 * n));
    for (Eigen::Index i = 0; i < n; ++i) {
        double diag = 0.0;
        if (i > 0) {
            entries.emplace_back(i, i - 1, inv_h2);
            diag -= inv_h2;
        }
        if (i + 1 < n) {
            entries.emplace_back(i, i + 1, inv_h2);
            diag -= inv_h2;
        }
        entries.emplace_back(i, i, diag);
    }
    Eigen::SparseMatrix<double> lap(n, n);
    lap.setFromTriplets(entries.begin(), entries.end());
    return lap;
}

DispersalOperator assemble_dispersal(const KernelSpec& spec, const SpatialGrid& grid, const BoundaryRegime& regime,
                                     double rate, double mix) {
    if (!std::isfinite(rate) || rate < 0.0) {
        throw Error(ErrorKind::Config, "dispersal rate must be finite and >= 0");
    }
    if (!std::isfinite(mix) || mix < 0.0 || mix > 1.0) {
        throw Error(ErrorKind::Config, "mixing weight must lie in [0, 1]");
    }
    if (mix < 1.0 && regime.tag != BoundaryRegime::Tag::NoFlux) {
        throw Error(ErrorKind::Config, "mixed local/nonlocal dispersal is only supported with the noflux regime");
    }
    if (regime.tag == BoundaryRegime::Tag::Periodic &&
        !(std::abs(regime.period - grid.length()) <= 1e-12 * grid.length())) {
        throw Error(ErrorKind::Config, "periodic regime requires period == hi - lo");
    }

    DispersalOperator op(grid, spec, regime);
    op.rate_ = rate;
    op.mix_ = mix;

    const auto n = static_cast<Eigen::Index>(grid.size());
    const double h = grid.weight();
    op.kmat_.resize(n, n);

    const bool periodic = regime.tag == BoundaryRegime::Tag::Periodic;
    const double period = grid.length();
    const int images = periodic ? wrap_count(spec.support(), period) : 0;

    // One evaluation per unordered pair keeps kmat exactly symmetric.
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            const double z = static_cast<double>(j - i) * h;
            double value = 0.0;
            if (periodic) {
                for (int m = -images; m <= images; ++m) {
                    value += spec(z + static_cast<double>(m) * period);
                }
            } else {
                value = spec(z);
            }
            op.kmat_(i, j) = value * h;
            op.kmat_(j, i) = value * h;
        }
    }

    if (regime.tag == BoundaryRegime::Tag::Hostile) {
        op.adiag_ = Eigen::VectorXd::Ones(n);
    } else {
        op.adiag_ = op.kmat_.colwise().sum().transpose();
    }

    if (mix < 1.0) {
        op.laplacian_ = assemble_laplacian(grid);
    }
    return op;
}

void DispersalOperator::check_grid(const StateField& phi) const {
    if (phi.size() != static_cast<Eigen::Index>(grid_.size())) {
        throw Error(ErrorKind::Contract, "grid function does not live on the operator's grid");
    }
}

void DispersalOperator::apply_into(const StateField& phi, StateField& out) const {
    check_grid(phi);
    out.noalias() = kmat_ * phi;
    out -= adiag_.cwiseProduct(phi);
    if (laplacian_) {
        const StateField local = *laplacian_ * phi;
        out = rate_ * (mix_ * out + (1.0 - mix_) * local);
    } else {
        out *= rate_;
    }
}

StateField DispersalOperator::apply(const StateField& phi) const {
    StateField out(phi.size());
    apply_into(phi, out);
    return out;
}

void DispersalOperator::apply_nonlocal_into(const StateField& phi, StateField& out) const {
    check_grid(phi);
    out.noalias() = kmat_ * phi;
    out -= adiag_.cwiseProduct(phi);
    out *= rate_ * mix_;
}

StateField DispersalOperator::kernel_action(const StateField& phi) const {
    check_grid(phi);
    StateField out = kmat_ * phi;
    out -= adiag_.cwiseProduct(phi);
    return out;
}

Eigen::MatrixXd DispersalOperator::dense_matrix() const {
    Eigen::MatrixXd a = kmat_;
    a.diagonal() -= adiag_;
    if (laplacian_) {
        a = rate_ * (mix_ * a + (1.0 - mix_) * Eigen::MatrixXd(*laplacian_));
    } else {
        a *= rate_;
    }
    return a;
}

double DispersalOperator::quadratic_form(const StateField& phi) const {
    check_grid(phi);
    return grid_.weight() * phi.dot(kernel_action(phi));
}

double DispersalOperator::max_abs_asymmetry() const {
    return (kmat_ - kmat_.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace nlcomp
