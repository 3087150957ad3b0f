#include "nlcomp/grid.hpp"

#include "nlcomp/error.hpp"

#include <cmath>
#include <string>

namespace nlcomp {

SpatialGrid build_grid(double lo, double hi, std::size_t n) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw Error(ErrorKind::Config, "grid: need finite lo < hi, got lo=" + std::to_string(lo) +
                                           " hi=" + std::to_string(hi));
    }
    if (n < 3) {
        throw Error(ErrorKind::Config, "grid: need at least 3 cells, got " + std::to_string(n));
    }
    const double h = (hi - lo) / static_cast<double>(n);
    Eigen::VectorXd nodes(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        nodes[static_cast<Eigen::Index>(i)] = lo + (static_cast<double>(i) + 0.5) * h;
    }
    return SpatialGrid(lo, hi, h, std::move(nodes));
}

}  // namespace nlcomp
