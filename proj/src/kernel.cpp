#include "nlcomp/kernel.hpp"

#include "nlcomp/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace nlcomp {

namespace {

void require_positive(double value, const char* what) {
    if (!std::isfinite(value) || value <= 0.0) {
        std::ostringstream msg;
        msg << "kernel: " << what << " must be positive and finite, got " << value;
        throw Error(ErrorKind::Config, msg.str());
    }
}

}  // namespace

KernelSpec KernelSpec::tophat(double radius) {
    require_positive(radius, "tophat radius");
    return {KernelFamily::Tophat, radius};
}

KernelSpec KernelSpec::gaussian(double sigma) {
    require_positive(sigma, "gaussian sigma");
    return {KernelFamily::Gaussian, sigma};
}

KernelSpec KernelSpec::cosine_bump(double radius) {
    require_positive(radius, "cosine-bump radius");
    return {KernelFamily::CosineBump, radius};
}

double KernelSpec::operator()(double z) const noexcept {
    const double r = std::abs(z);
    switch (family_) {
    case KernelFamily::Tophat:
        // closed support; the relative slack makes |i-j|h == R count as inside
        return r <= scale_ * (1.0 + 1e-12) ? 0.5 / scale_ : 0.0;
    case KernelFamily::Gaussian: {
        if (r > kGaussianCutoff * scale_) {
            return 0.0;
        }
        const double t = r / scale_;
        return std::exp(-0.5 * t * t) / (scale_ * std::sqrt(2.0 * std::numbers::pi));
    }
    case KernelFamily::CosineBump:
        if (r > scale_) {
            return 0.0;
        }
        return (1.0 + std::cos(std::numbers::pi * r / scale_)) / (2.0 * scale_);
    }
    return 0.0;
}

double KernelSpec::support() const noexcept {
    return family_ == KernelFamily::Gaussian ? kGaussianCutoff * scale_ : scale_ * (1.0 + 1e-12);
}

std::string KernelSpec::describe() const {
    std::ostringstream out;
    out << to_string(family_) << (family_ == KernelFamily::Gaussian ? "(sigma=" : "(radius=") << scale_ << ")";
    return out.str();
}

KernelFamily parse_kernel_family(const std::string& name) {
    if (name == "tophat") {
        return KernelFamily::Tophat;
    }
    if (name == "gaussian") {
        return KernelFamily::Gaussian;
    }
    if (name == "cosine-bump" || name == "cosine_bump") {
        return KernelFamily::CosineBump;
    }
    throw Error(ErrorKind::Config, "unknown kernel family '" + name + "' (expected tophat|gaussian|cosine-bump)");
}

const char* to_string(KernelFamily family) {
    switch (family) {
    case KernelFamily::Tophat:
        return "tophat";
    case KernelFamily::Gaussian:
        return "gaussian";
    case KernelFamily::CosineBump:
        return "cosine-bump";
    }
    return "?";
}

}  // namespace nlcomp
