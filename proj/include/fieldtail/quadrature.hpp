#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fieldtail/numerics.hpp"

namespace fieldtail {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int n);

/// Composite tensor Gauss-Legendre with panel doubling.
struct QuadratureOptions {
    int nodes_per_panel = 16;
    int initial_panels = 4;
    /// Number of panel doublings allowed after the first comparison.
    int max_refinements = 4;
    double rel_tol = 1e-4;
    /// Components smaller than this in magnitude are compared absolutely.
    double abs_floor = 1e-300;
    unsigned threads = 1;
};

struct QuadratureResult {
    double value = 0.0;
    /// |I(2P) - I(P)| at the accepted level.
    double error = 0.0;
    int panels = 0;
    int refinements = 0;
    std::size_t evaluations = 0;
};

struct VectorQuadratureResult {
    std::vector<double> value;
    std::vector<double> error;
    int panels = 0;
    int refinements = 0;
    std::size_t evaluations = 0;
};

/// f(t, out) writes `components` values. f is called concurrently when
/// options.threads > 1. Panels are reduced in a fixed order, so the result does
/// not depend on the thread count. Throws NumericalError when max_refinements
/// doublings do not reach rel_tol.
using VectorIntegrand1D = std::function<void(double, std::span<double>)>;
using VectorIntegrand2D = std::function<void(const Vec2&, std::span<double>)>;

VectorQuadratureResult integrate_interval(const VectorIntegrand1D& f, std::size_t components, double a, double b,
                                          const QuadratureOptions& options);
VectorQuadratureResult integrate_box(const VectorIntegrand2D& f, std::size_t components, const Vec2& lo,
                                     const Vec2& hi, const QuadratureOptions& options);

QuadratureResult quadrature_1d(const std::function<double(double)>& f, double a, double b,
                               const QuadratureOptions& options = {});
QuadratureResult quadrature_2d(const std::function<double(const Vec2&)>& f, const Vec2& lo, const Vec2& hi,
                               const QuadratureOptions& options = {});

/// Runs body(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace fieldtail
