#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nlcomp::oracle {

int count_above(const Eigen::MatrixXd& a, double x) {
    const Eigen::Index n = a.rows();
    // column-wise LDL^T of a - x I; pivots keep the inertia
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    std::vector<double> d(static_cast<std::size_t>(n));
    const double tiny = std::numeric_limits<double>::epsilon() * (1.0 + a.cwiseAbs().maxCoeff());
    int positive = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        double pivot = a(k, k) - x;
        for (Eigen::Index j = 0; j < k; ++j) {
            pivot -= l(k, j) * l(k, j) * d[static_cast<std::size_t>(j)];
        }
        if (std::abs(pivot) < tiny) {
            pivot = -tiny;
        }
        d[static_cast<std::size_t>(k)] = pivot;
        positive += pivot > 0.0 ? 1 : 0;
        for (Eigen::Index i = k + 1; i < n; ++i) {
            double s = a(i, k);
            for (Eigen::Index j = 0; j < k; ++j) {
                s -= l(i, j) * l(k, j) * d[static_cast<std::size_t>(j)];
            }
            l(i, k) = s / pivot;
        }
    }
    return positive;
}

double top_eigenvalue_bisection(const Eigen::MatrixXd& a, double tolerance) {
    // Gershgorin interval
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const double radius = a.row(i).cwiseAbs().sum() - std::abs(a(i, i));
        lo = std::min(lo, a(i, i) - radius);
        hi = std::max(hi, a(i, i) + radius);
    }
    while (hi - lo > tolerance * (1.0 + std::abs(hi))) {
        const double mid = 0.5 * (lo + hi);
        if (count_above(a, mid) > 0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a) {
    const Eigen::Index n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                off += a(p, q) * a(p, q);
            }
        }
        if (off < 1e-32 * (1.0 + a.squaredNorm())) {
            break;
        }
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) {
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> out(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = a(i, i);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Eigen::VectorXd brute_force_dispersal(const KernelSpec& kernel, const SpatialGrid& grid,
                                      const BoundaryRegime& regime, const Eigen::VectorXd& phi) {
    const std::size_t n = grid.size();
    const double h = grid.weight();
    const double period = grid.length();
    const bool periodic = regime.tag == BoundaryRegime::Tag::Periodic;
    const int images = periodic ? static_cast<int>(std::ceil(kernel.support() / period)) + 3 : 0;

    Eigen::VectorXd out(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        double inflow = 0.0;
        double outflow = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double k = 0.0;
            for (int m = -images; m <= images; ++m) {
                k += kernel(grid.node(i) - grid.node(j) + m * period);
            }
            inflow += k * h * phi[static_cast<Eigen::Index>(j)];
            outflow += k * h;
        }
        if (regime.tag == BoundaryRegime::Tag::Hostile) {
            outflow = 1.0;
        }
        out[static_cast<Eigen::Index>(i)] = inflow - outflow * phi[static_cast<Eigen::Index>(i)];
    }
    return out;
}

std::pair<double, double> ode_limit(double u0, double v0, double m, double b, double c, double horizon, double dt) {
    auto f = [&](double u, double v) {
        return std::pair<double, double>{u * (m - u - c * v), v * (m - b * u - v)};
    };
    double u = u0;
    double v = v0;
    const long steps = static_cast<long>(std::ceil(horizon / dt));
    for (long k = 0; k < steps; ++k) {
        const auto [a1, b1] = f(u, v);
        const auto [a2, b2] = f(u + 0.5 * dt * a1, v + 0.5 * dt * b1);
        const auto [a3, b3] = f(u + 0.5 * dt * a2, v + 0.5 * dt * b2);
        const auto [a4, b4] = f(u + dt * a3, v + dt * b3);
        u += dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        v += dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
    }
    return {u, v};
}

std::pair<double, double> scan_order_fractions(const SystemState& state, const Eigen::VectorXd& u_ref,
                                               const Eigen::VectorXd& v_ref) {
    const Eigen::Index n = u_ref.size();
    auto below = [&](double s) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (state.u[i] < s * u_ref[i] || state.v[i] > (1.0 - s) * v_ref[i]) {
                return false;
            }
        }
        return true;
    };
    auto above = [&](double s) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (state.u[i] > s * u_ref[i] || state.v[i] < (1.0 - s) * v_ref[i]) {
                return false;
            }
        }
        return true;
    };
    double lo = -1e3;
    double hi = 1e3;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (below(mid) ? lo : hi) = mid;
    }
    const double theta = lo;
    lo = -1e3;
    hi = 1e3;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (above(mid) ? hi : lo) = mid;
    }
    return {theta, hi};
}

double exchange_rhs(const DispersalOperator& op, const Eigen::VectorXd& u, const Eigen::VectorXd& u_star) {
    const auto& k = op.kmat();
    const Eigen::Index n = u.size();
    long double total = 0.0L;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const long double cross =
                static_cast<long double>(u_star[i]) * u[j] - static_cast<long double>(u[i]) * u_star[j];
            const long double w = 1.0L / (static_cast<long double>(u[i]) * u[j]) -
                                  1.0L / (static_cast<long double>(u_star[i]) * u_star[j]);
            total += static_cast<long double>(k(i, j)) * cross * cross * w;
        }
    }
    return static_cast<double>(0.5L * static_cast<long double>(op.grid().weight()) * total);
}

}  // namespace nlcomp::oracle
