#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fieldtail/field.hpp"

namespace fieldtail {

struct SimConfig {
    int m = 5;
    /// Kernel precision passed to the field (already scaled by any convention factor).
    double D = 10.0;
    double p0 = 0.1;
    bool gaussian = false;
    /// Ascending.
    std::vector<double> thresholds;
    std::size_t iterations = 5000;
    std::uint64_t seed = 20240601;
    /// Coarse grid points per axis; 0 picks max(32, ceil(4 sqrt(D))).
    int coarse_grid = 0;
    int top_k = 5;
    int max_steps = 50;
    int max_halvings = 30;
    double step_tol = 1e-8;
    unsigned threads = 1;
    /// Line-delimited dump of the refined sup per iteration; empty disables it.
    std::string sups_output;

    int coarse_resolution() const;
    /// Throws std::invalid_argument.
    void validate() const;
};

/// Null observation vector for iteration `iteration`: W_u = (B_u - p0)/s for the
/// Bernoulli family, N(0, 1) for the Gaussian family. Depends only on
/// (seed, iteration), never on scheduling.
void sample_field(const FamilySpec& family, std::size_t n, std::uint64_t seed, std::uint64_t iteration,
                  std::vector<double>& out);

/// Normalized kernel vectors beta(t) on a coarse G x G grid over [0, 1]^2,
/// stored pixel-major so a sparse field update touches contiguous memory.
class CoarseBasis {
public:
    CoarseBasis(const FieldContext& ctx, int resolution);

    int resolution() const { return resolution_; }
    std::size_t points() const { return points_.size(); }
    const Vec2& point(std::size_t g) const { return points_[g]; }
    /// Z at every coarse point.
    void scores(std::span<const double> w, std::vector<double>& out) const;

private:
    int resolution_;
    std::size_t pixels_;
    std::vector<Vec2> points_;
    std::vector<double> beta_;   // beta_[u * points + g]
    std::vector<double> totals_;  // sum_u beta_u(t_g)
};

struct MaximizeResult {
    double sup = 0.0;
    Vec2 argmax{};
    double coarse_sup = 0.0;
    Vec2 coarse_argmax{};
    /// Some start hit max_steps before the step tolerance.
    bool converged = true;
    int steps = 0;
};

struct MaximizeOptions {
    int top_k = 5;
    int max_steps = 50;
    int max_halvings = 30;
    /// Armijo constant for the backtracking line search.
    double armijo = 0.1;
    /// Step doublings tried after a full step is accepted.
    int max_expansions = 6;
    double step_tol = 1e-8;
    /// Also stop once a step gains less than value_tol * max(1, |Z|).
    double value_tol = 1e-12;
};

/// Coarse-grid scan followed by Lambda-preconditioned ascent from the best
/// top_k grid points, with a projected step on active box faces.
MaximizeResult maximize_score(const FieldContext& ctx, const CoarseBasis& basis, std::span<const double> w,
                              const MaximizeOptions& options = {});

struct SimResult {
    std::vector<double> thresholds;
    std::size_t iterations = 0;
    /// Exceedances of the refined (continuum) sup.
    std::vector<std::size_t> counts;
    /// Exceedances of the coarse-grid sup.
    std::vector<std::size_t> grid_counts;
    std::vector<double> sups;
    std::vector<double> grid_sups;
    std::size_t nonconverged = 0;
    double seconds = 0.0;

    double p_hat(std::size_t i) const;
    double se(std::size_t i) const;
    double grid_p_hat(std::size_t i) const;
    double grid_se(std::size_t i) const;
};

double binomial_se(double p, std::size_t n);

/// Exceedance frequencies of sup Z over `config.iterations` null fields.
SimResult estimate_pvalues(const FieldContext& ctx, const SimConfig& config);
/// Builds the field from the config and runs estimate_pvalues.
SimResult estimate_pvalues(const SimConfig& config);

}  // namespace fieldtail
