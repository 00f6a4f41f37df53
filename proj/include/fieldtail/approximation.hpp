#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "fieldtail/conventions.hpp"
#include "fieldtail/field.hpp"
#include "fieldtail/quadrature.hpp"

namespace fieldtail {

enum class ApproxMode { full, gaussian };

/// One side of the unit square, parameterized t(s) = origin + s * direction, s in (0, 1).
struct EdgeSpec {
    std::string name;
    /// Outward gradient of the active constraint g(t) <= 0.
    Vec2 gradient{};
    Vec2 origin{};
    Vec2 direction{};

    Vec2 at(double s) const { return {origin[0] + s * direction[0], origin[1] + s * direction[1]}; }
};

/// T = [0, 1]^2 as {g_i(t) <= 0} with g = -t1, t1 - 1, -t2, t2 - 1.
struct RegionSpec {
    std::array<EdgeSpec, 4> edges;

    static RegionSpec unit_square();
    /// Value of constraint i at t.
    double constraint(std::size_t i, const Vec2& t) const;
    bool contains(const Vec2& t) const;
};

/// e^{-delta} |Lambda|^{1/2} (1 + sign r^2/(2 sigma^2)) in full mode, |Lambda|^{1/2} in gaussian mode.
double interior_integrand(const LocalFunctionals& lf, ApproxMode mode, double r_correction_sign = -1.0);
double interior_integrand(const FieldContext& ctx, const Vec2& t, double x, ApproxMode mode,
                          double r_correction_sign = -1.0);

/// e^{-delta} (|Lambda| <g, Lambda^{-1} g>)^{1/2} / |g|, with delta = 0 in gaussian mode.
double boundary_integrand(const LocalFunctionals& lf, const EdgeSpec& edge, ApproxMode mode);
double boundary_integrand(const FieldContext& ctx, const Vec2& t, const EdgeSpec& edge, double x, ApproxMode mode);

/// x^{d-1} (2 pi)^{-d/2} phi(x) with d = 2.
double tail_prefactor(double x);
/// (1/x)(pi/2)^{1/2}.
double boundary_factor(double x);

struct ApproxOptions {
    QuadratureOptions quadrature;
    double boundary_weight = 1.0;
    double r_correction_sign = -1.0;

    static ApproxOptions from(const ModelConventions& conv, QuadratureOptions quad = {});
};

struct ApproxResult {
    double x = 0.0;
    /// Integrals over T and dT, before the prefactor.
    double interior = 0.0;
    double boundary = 0.0;
    double interior_gaussian = 0.0;
    double boundary_gaussian = 0.0;
    double prefactor = 0.0;
    double p_E = 0.0;
    double p_G = 0.0;

    double interior_error = 0.0;
    double boundary_error = 0.0;
    int interior_panels = 0;
    int boundary_panels = 0;
    std::size_t evaluations = 0;
    /// Relative quadrature error proxy of p_E.
    double p_E_error = 0.0;

    /// x^4 >= n, outside the asymptotic regime x = o(n^{1/4}).
    bool validity_warning = false;
    /// p_E or p_G left [0, 1].
    bool range_warning = false;
};

/// Evaluates every threshold in one pass over the quadrature nodes.
std::vector<ApproxResult> tail_approx(const FieldContext& ctx, const RegionSpec& region, std::span<const double> xs,
                                      const ApproxOptions& options);
ApproxResult tail_approx(const FieldContext& ctx, const RegionSpec& region, double x, const ApproxOptions& options);

}  // namespace fieldtail
