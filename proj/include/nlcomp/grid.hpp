#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace nlcomp {

/// Grid functions (densities, potentials, eigenvectors) live in plain Eigen vectors.
using StateField = Eigen::VectorXd;
using PotentialField = Eigen::VectorXd;

/// Uniform midpoint discretization of the interval (lo, hi).
///
/// Node i sits at lo + (i + 1/2) h with h = (hi - lo) / n; every node carries
/// the same quadrature weight h.
class SpatialGrid {
public:
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    double length() const noexcept { return hi_ - lo_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(nodes_.size()); }
    double weight() const noexcept { return h_; }
    const Eigen::VectorXd& nodes() const noexcept { return nodes_; }
    double node(std::size_t i) const { return nodes_[static_cast<Eigen::Index>(i)]; }

    /// Quadrature of f over the interval.
    double integrate(const Eigen::VectorXd& f) const { return h_ * f.sum(); }
    /// Discrete L2 inner product.
    double inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const { return h_ * f.dot(g); }

    bool same_as(const SpatialGrid& other) const noexcept {
        return lo_ == other.lo_ && hi_ == other.hi_ && nodes_.size() == other.nodes_.size();
    }

    friend SpatialGrid build_grid(double lo, double hi, std::size_t n);

private:
    SpatialGrid(double lo, double hi, double h, Eigen::VectorXd nodes)
        : lo_(lo), hi_(hi), h_(h), nodes_(std::move(nodes)) {}

    double lo_;
    double hi_;
    double h_;
    Eigen::VectorXd nodes_;
};

/// Throws Error(Config) unless lo < hi (both finite) and n >= 3.
SpatialGrid build_grid(double lo, double hi, std::size_t n);

}  // namespace nlcomp
