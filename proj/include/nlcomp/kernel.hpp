#pragma once

#include <string>

namespace nlcomp {

enum class KernelFamily { Tophat, Gaussian, CosineBump };

/// Radial dispersal kernel k(x, y) = J(|x - y|), normalized so that J
/// integrates to one over the real line.
///
/// Gaussian profiles are cut off at 8 standard deviations; the discarded
/// tail mass is below 1e-14.
class KernelSpec {
public:
    static KernelSpec tophat(double radius);
    static KernelSpec gaussian(double sigma);
    static KernelSpec cosine_bump(double radius);

    KernelFamily family() const noexcept { return family_; }
    /// Radius for tophat/cosine-bump, standard deviation for gaussian.
    double scale() const noexcept { return scale_; }

    /// J(z) for a signed separation z.
    double operator()(double z) const noexcept;

    /// |z| beyond which J vanishes.
    double support() const noexcept;

    std::string describe() const;

private:
    KernelSpec(KernelFamily family, double scale) : family_(family), scale_(scale) {}

    KernelFamily family_;
    double scale_;
};

inline constexpr double kGaussianCutoff = 8.0;

KernelFamily parse_kernel_family(const std::string& name);
const char* to_string(KernelFamily family);

}  // namespace nlcomp
