#pragma once

#include <string>

namespace fieldtail {

/// Model constants that are not pinned down by the closed-form expressions alone.
///
/// `as_written` evaluates the kernel exp(-D d^2/2), the boundary term with its
/// full (1/x)(pi/2)^{1/2} weight and the interior correction 1 - r^2/(2 sigma^2).
///
/// `reference` is the reconstruction that reproduces the reference tables: the
/// kernel exp(-D d^2) (kernel precision 2D), half the boundary weight, and the
/// correction 1 + r^2/(2 sigma^2).
struct ModelConventions {
    enum class Id { as_written, reference };

    Id id = Id::as_written;
    /// Kernel precision is kernel_factor * D.
    double kernel_factor = 1.0;
    double boundary_weight = 1.0;
    /// Sign s in 1 + s r^2 / (2 sigma^2).
    double r_correction_sign = -1.0;

    static ModelConventions as_written() { return {}; }
    static ModelConventions reference() { return {Id::reference, 2.0, 0.5, 1.0}; }

    std::string name() const { return id == Id::reference ? "reference" : "as-written"; }
};

ModelConventions parse_conventions(const std::string& name);

}  // namespace fieldtail
