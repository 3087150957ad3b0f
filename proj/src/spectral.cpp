#include "nlcomp/spectral.hpp"

#include "nlcomp/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <sstream>

namespace nlcomp {

const char* to_string(SpectralMethod method) {
    switch (method) {
    case SpectralMethod::Dense:
        return "dense";
    case SpectralMethod::Power:
        return "power";
    case SpectralMethod::Rayleigh:
        return "rayleigh";
    }
    return "?";
}

bool is_symmetric(const Eigen::MatrixXd& a, double relative_tolerance) {
    if (a.rows() != a.cols()) {
        return false;
    }
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    return (a - a.transpose()).cwiseAbs().maxCoeff() <= relative_tolerance * scale;
}

Eigen::MatrixXd operator_matrix(const DispersalOperator& op, const PotentialField& q) {
    if (q.size() != static_cast<Eigen::Index>(op.grid().size())) {
        throw Error(ErrorKind::Contract, "potential does not live on the operator's grid");
    }
    if (!q.allFinite()) {
        throw Error(ErrorKind::Contract, "potential has non-finite values");
    }
    Eigen::MatrixXd a = op.dense_matrix();
    a.diagonal() += q;
    return a;
}

namespace {

double inf_norm(const Eigen::MatrixXd& a) {
    return a.cwiseAbs().rowwise().sum().maxCoeff();
}

void finish(SpectralReport& report, const Eigen::MatrixXd& a, Eigen::VectorXd v) {
    if (v.sum() < 0.0) {
        v = -v;
    }
    v.normalize();
    const Eigen::VectorXd r = a * v - report.bound * v;
    report.residual = r.cwiseAbs().maxCoeff() / v.cwiseAbs().maxCoeff();
    report.has_positive_eigvec = v.minCoeff() > 0.0;
    report.eigvec = std::move(v);
}

SpectralReport dense_bound(const Eigen::MatrixXd& a) {
    SpectralReport report;
    report.method = SpectralMethod::Dense;
    if (is_symmetric(a)) {
        // exact symmetrization removes rounding-level asymmetry
        const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
        if (solver.info() != Eigen::Success) {
            throw Error(ErrorKind::Numerical, "symmetric eigensolver failed");
        }
        const Eigen::Index top = sym.rows() - 1;
        report.bound = solver.eigenvalues()[top];
        finish(report, a, solver.eigenvectors().col(top));
        return report;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::Numerical, "nonsymmetric eigensolver failed");
    }
    const auto& values = solver.eigenvalues();
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < values.size(); ++i) {
        if (values[i].real() > values[best].real()) {
            best = i;
        }
    }
    report.bound = values[best].real();
    report.complex_top = std::abs(values[best].imag()) > 1e-12 * (1.0 + std::abs(values[best].real()));
    finish(report, a, solver.eigenvectors().col(best).real());
    return report;
}

SpectralReport power_bound(const Eigen::MatrixXd& a, const SpectralOptions& options) {
    const Eigen::Index n = a.rows();
    const double shift = inf_norm(a) + 1.0;

    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    Eigen::VectorXd ax(n);
    double rho = std::numeric_limits<double>::quiet_NaN();
    double rho_prev = std::numeric_limits<double>::infinity();

    for (int it = 1; it <= options.max_iterations; ++it) {
        ax.noalias() = a * x;
        rho = x.dot(ax);
        const double residual = (ax - rho * x).cwiseAbs().maxCoeff() / x.cwiseAbs().maxCoeff();
        if (std::abs(rho - rho_prev) < options.power_tolerance * (1.0 + std::abs(rho)) &&
            residual < options.residual_tolerance) {
            SpectralReport report;
            report.method = SpectralMethod::Power;
            report.bound = rho;
            report.iterations = it;
            finish(report, a, x);
            return report;
        }
        rho_prev = rho;
        x = ax + shift * x;
        x.normalize();
    }
    std::ostringstream msg;
    msg << "power iteration did not converge in " << options.max_iterations
        << " iterations; last Rayleigh quotient " << rho << " is a lower bound (symmetric case)";
    throw ConvergenceError(msg.str(), rho, options.max_iterations);
}

/// Locally optimal conjugate-gradient ascent of the Rayleigh quotient:
/// Rayleigh-Ritz on span{x, residual, previous direction}.
SpectralReport rayleigh_bound(const Eigen::MatrixXd& a, const SpectralOptions& options) {
    if (!is_symmetric(a)) {
        throw Error(ErrorKind::Contract, "rayleigh maximization needs a symmetric operator");
    }
    const Eigen::Index n = a.rows();
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    Eigen::VectorXd p;
    double rho = std::numeric_limits<double>::quiet_NaN();

    for (int it = 1; it <= options.max_iterations; ++it) {
        const Eigen::VectorXd ax = a * x;
        rho = x.dot(ax);
        const Eigen::VectorXd r = ax - rho * x;
        if (r.cwiseAbs().maxCoeff() / x.cwiseAbs().maxCoeff() < options.residual_tolerance) {
            SpectralReport report;
            report.method = SpectralMethod::Rayleigh;
            report.bound = rho;
            report.iterations = it;
            finish(report, a, x);
            return report;
        }

        Eigen::MatrixXd basis(n, 3);
        basis.col(0) = x;
        Eigen::Index k = 1;
        auto add_direction = [&](Eigen::VectorXd d) {
            for (int pass = 0; pass < 2; ++pass) {
                for (Eigen::Index j = 0; j < k; ++j) {
                    d -= basis.col(j).dot(d) * basis.col(j);
                }
            }
            const double norm = d.norm();
            if (norm > 1e-13) {
                basis.col(k++) = d / norm;
            }
        };
        add_direction(r);
        if (p.size() == n) {
            add_direction(p);
        }

        const Eigen::MatrixXd v = basis.leftCols(k);
        Eigen::MatrixXd small = v.transpose() * a * v;
        small = 0.5 * (small + small.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(small);
        const Eigen::VectorXd c = ritz.eigenvectors().col(k - 1);

        p = v.rightCols(k - 1) * c.tail(k - 1);
        x = v * c;
        x.normalize();
    }
    std::ostringstream msg;
    msg << "rayleigh maximization did not converge in " << options.max_iterations
        << " iterations; last quotient " << rho << " is a lower bound";
    throw ConvergenceError(msg.str(), rho, options.max_iterations);
}

}  // namespace

SpectralReport spectral_bound(const Eigen::MatrixXd& a, SpectralMethod method, const SpectralOptions& options) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw Error(ErrorKind::Contract, "spectral_bound needs a nonempty square matrix");
    }
    if (method == SpectralMethod::Dense && static_cast<std::size_t>(a.rows()) > options.dense_cutoff) {
        method = SpectralMethod::Power;
    }
    switch (method) {
    case SpectralMethod::Dense:
        return dense_bound(a);
    case SpectralMethod::Power:
        return power_bound(a, options);
    case SpectralMethod::Rayleigh:
        return rayleigh_bound(a, options);
    }
    throw Error(ErrorKind::Contract, "unknown spectral method");
}

SpectralReport spectral_bound(const DispersalOperator& op, const PotentialField& q, SpectralMethod method,
                              const SpectralOptions& options) {
    return spectral_bound(operator_matrix(op, q), method, options);
}

double rayleigh_quotient(const DispersalOperator& op, const PotentialField& q, const StateField& phi) {
    if (phi.size() != static_cast<Eigen::Index>(op.grid().size())) {
        throw Error(ErrorKind::Contract, "test field does not live on the operator's grid");
    }
    const double h = op.grid().weight();
    const double denom = h * phi.squaredNorm();
    if (!(denom > 0.0)) {
        throw Error(ErrorKind::Contract, "rayleigh_quotient: zero test field");
    }
    const StateField a_phi = op.apply(phi) + q.cwiseProduct(phi);
    return h * phi.dot(a_phi) / denom;
}

Eigen::VectorXd positive_surrogate(const Eigen::VectorXd& eigvec) {
    Eigen::VectorXd v = eigvec.sum() < 0.0 ? Eigen::VectorXd(-eigvec) : eigvec;
    const double peak = v.cwiseAbs().maxCoeff();
    if (!(peak > 0.0)) {
        throw Error(ErrorKind::Contract, "positive_surrogate: zero vector");
    }
    v /= peak;
    if (v.minCoeff() <= 0.0) {
        v.array() += -v.minCoeff() + 1e-3;
        v /= v.maxCoeff();
    }
    return v;
}

}  // namespace nlcomp
