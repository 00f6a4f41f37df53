#include "fieldtail/approximation.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fieldtail {

ModelConventions parse_conventions(const std::string& name) {
    if (name == "as-written") return ModelConventions::as_written();
    if (name == "reference") return ModelConventions::reference();
    throw std::invalid_argument("unknown convention '" + name + "' (expected 'reference' or 'as-written')");
}

RegionSpec RegionSpec::unit_square() {
    RegionSpec r;
    r.edges[0] = {"t1=0", {-1.0, 0.0}, {0.0, 0.0}, {0.0, 1.0}};
    r.edges[1] = {"t1=1", {1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    r.edges[2] = {"t2=0", {0.0, -1.0}, {0.0, 0.0}, {1.0, 0.0}};
    r.edges[3] = {"t2=1", {0.0, 1.0}, {0.0, 1.0}, {1.0, 0.0}};
    return r;
}

double RegionSpec::constraint(std::size_t i, const Vec2& t) const {
    switch (i) {
        case 0: return -t[0];
        case 1: return t[0] - 1.0;
        case 2: return -t[1];
        case 3: return t[1] - 1.0;
        default: throw std::out_of_range("constraint index");
    }
}

bool RegionSpec::contains(const Vec2& t) const {
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (constraint(i, t) > 0.0) return false;
    return true;
}

double interior_integrand(const LocalFunctionals& lf, ApproxMode mode, double r_correction_sign) {
    const double volume = std::sqrt(det(lf.lambda));
    if (mode == ApproxMode::gaussian) return volume;
    return std::exp(-lf.delta) * volume * (1.0 + r_correction_sign * lf.r * lf.r / (2.0 * lf.sigma2));
}

double interior_integrand(const FieldContext& ctx, const Vec2& t, double x, ApproxMode mode,
                          double r_correction_sign) {
    const KernelSnapshot snap = ctx.snapshot(t);
    if (mode == ApproxMode::gaussian) return interior_integrand(gaussian_functionals(snap, x), mode);
    return interior_integrand(local_functionals(snap, ctx.family(), x), mode, r_correction_sign);
}

double boundary_integrand(const LocalFunctionals& lf, const EdgeSpec& edge, ApproxMode mode) {
    const double g_norm = std::hypot(edge.gradient[0], edge.gradient[1]);
    const double volume = std::sqrt(det(lf.lambda) * inverse_quadratic_form(lf.lambda, edge.gradient)) / g_norm;
    return mode == ApproxMode::gaussian ? volume : std::exp(-lf.delta) * volume;
}

double boundary_integrand(const FieldContext& ctx, const Vec2& t, const EdgeSpec& edge, double x, ApproxMode mode) {
    const KernelSnapshot snap = ctx.snapshot(t);
    if (mode == ApproxMode::gaussian) return boundary_integrand(gaussian_functionals(snap, x), edge, mode);
    return boundary_integrand(local_functionals(snap, ctx.family(), x), edge, mode);
}

double tail_prefactor(double x) { return x / (2.0 * std::numbers::pi) * normal_pdf(x); }

double boundary_factor(double x) { return std::sqrt(0.5 * std::numbers::pi) / x; }

ApproxOptions ApproxOptions::from(const ModelConventions& conv, QuadratureOptions quad) {
    ApproxOptions o;
    o.quadrature = quad;
    o.boundary_weight = conv.boundary_weight;
    o.r_correction_sign = conv.r_correction_sign;
    return o;
}

std::vector<ApproxResult> tail_approx(const FieldContext& ctx, const RegionSpec& region, std::span<const double> xs,
                                      const ApproxOptions& options) {
    if (xs.empty()) throw std::invalid_argument("tail_approx: no thresholds given");
    for (double x : xs)
        if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("tail_approx: thresholds must be positive");
    const std::size_t k = xs.size();

    // Interior components: [full(x_0) .. full(x_{k-1}), gaussian].
    const auto interior = integrate_box(
        [&](const Vec2& t, std::span<double> out) {
            thread_local KernelSnapshot snap;
            thread_local std::vector<LocalFunctionals> lfs;
            ctx.snapshot_into(t, snap);
            local_functionals_many(snap, ctx.family(), xs, lfs);
            for (std::size_t i = 0; i < k; ++i)
                out[i] = interior_integrand(lfs[i], ApproxMode::full, options.r_correction_sign);
            out[k] = interior_integrand(lfs[0], ApproxMode::gaussian);
        },
        k + 1, {0.0, 0.0}, {1.0, 1.0}, options.quadrature);

    // Boundary components, per edge e: [full(x_i)..., gaussian] at offset e * (k + 1).
    const std::size_t stride = k + 1;
    const auto boundary = integrate_interval(
        [&](double s, std::span<double> out) {
            thread_local KernelSnapshot snap;
            thread_local std::vector<LocalFunctionals> lfs;
            for (std::size_t e = 0; e < region.edges.size(); ++e) {
                const EdgeSpec& edge = region.edges[e];
                ctx.snapshot_into(edge.at(s), snap);
                local_functionals_many(snap, ctx.family(), xs, lfs);
                // Unit speed parameterization: dV = ds.
                for (std::size_t i = 0; i < k; ++i)
                    out[e * stride + i] = boundary_integrand(lfs[i], edge, ApproxMode::full);
                out[e * stride + k] = boundary_integrand(lfs[0], edge, ApproxMode::gaussian);
            }
        },
        region.edges.size() * stride, 0.0, 1.0, options.quadrature);

    const double n = static_cast<double>(ctx.size());
    std::vector<ApproxResult> results;
    results.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        ApproxResult r;
        r.x = xs[i];
        r.interior = interior.value[i];
        r.interior_gaussian = interior.value[k];
        r.interior_error = interior.error[i];
        double b_err = 0.0;
        for (std::size_t e = 0; e < region.edges.size(); ++e) {
            r.boundary += boundary.value[e * stride + i];
            r.boundary_gaussian += boundary.value[e * stride + k];
            b_err += boundary.error[e * stride + i];
        }
        r.boundary_error = b_err;
        r.prefactor = tail_prefactor(r.x);
        const double bf = options.boundary_weight * boundary_factor(r.x);
        r.p_E = r.prefactor * (r.interior + bf * r.boundary);
        r.p_G = r.prefactor * (r.interior_gaussian + bf * r.boundary_gaussian);
        r.p_E_error = r.prefactor * (r.interior_error + bf * r.boundary_error);
        r.interior_panels = interior.panels;
        r.boundary_panels = boundary.panels;
        r.evaluations = interior.evaluations + boundary.evaluations * region.edges.size();
        r.validity_warning = std::pow(r.x, 4) >= n;
        r.range_warning = !(r.p_E >= 0.0 && r.p_E <= 1.0 && r.p_G >= 0.0 && r.p_G <= 1.0);
        results.push_back(r);
    }
    return results;
}

ApproxResult tail_approx(const FieldContext& ctx, const RegionSpec& region, double x, const ApproxOptions& options) {
    const double xs[] = {x};
    return tail_approx(ctx, region, xs, options).front();
}

}  // namespace fieldtail
