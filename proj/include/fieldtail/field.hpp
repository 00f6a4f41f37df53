#pragma once

#include <span>
#include <vector>

#include "fieldtail/expfam.hpp"
#include "fieldtail/geometry.hpp"
#include "fieldtail/numerics.hpp"

namespace fieldtail {

/// Kernel values theta_u(t) and gradients for every pixel at one parameter point,
/// with the Fisher information I(t) = sum theta^2 and J(t) = sum theta * grad theta.
struct KernelSnapshot {
    Vec2 t{};
    std::vector<double> theta;
    std::vector<Vec2> grad;
    double info = 0.0;
    Vec2 J{};

    std::size_t size() const { return theta.size(); }
    /// beta_u = theta_u / sqrt(I).
    double beta(std::size_t u) const;
    /// d beta_u / dt = grad_u / sqrt(I) - J theta_u / I^{3/2}.
    Vec2 beta_grad(std::size_t u) const;
};

/// Immutable description of the score field: pixels, observation family and kernel.
class FieldContext {
public:
    /// `truncation` zeroes kernel values below it (0 keeps everything).
    FieldContext(Grid grid, FamilySpec family, double kernel_D, double truncation = 0.0);

    const Grid& grid() const { return grid_; }
    const FamilySpec& family() const { return family_; }
    double kernel_D() const { return kernel_D_; }
    double truncation() const { return truncation_; }
    std::size_t size() const { return grid_.size(); }

    KernelSnapshot snapshot(const Vec2& t) const;
    /// Reuses the storage of `out`.
    void snapshot_into(const Vec2& t, KernelSnapshot& out) const;

private:
    Grid grid_;
    FamilySpec family_;
    double kernel_D_;
    double truncation_;
};

/// Every deterministic functional of the tilted field at (t, x).
struct LocalFunctionals {
    Vec2 t{};
    double x = 0.0;
    double info = 0.0;
    double xi = 0.0;
    Vec2 J{};
    Mat2 lambda;
    double delta = 0.0;
    double r = 0.0;
    Mat2 sigma;
    Vec2 rho{};
    double sigma2 = 1.0;
};

double fisher_info(const FieldContext& ctx, const Vec2& t);

/// Z(t) = sum beta_u W_u. Throws std::invalid_argument on a length mismatch.
double score(const FieldContext& ctx, const Vec2& t, std::span<const double> w);
double score(const KernelSnapshot& snap, std::span<const double> w);

struct ScoreGradient {
    double value = 0.0;
    Vec2 grad{};
};

/// Z(t) and its analytic gradient sum (d beta_u/dt) W_u.
ScoreGradient score_with_gradient(const KernelSnapshot& snap, std::span<const double> w);

/// sum(grad theta (x) grad theta)/I - (grad I (x) grad I)/(4 I^2), grad I = 2 J.
/// Throws DegeneracyError when the smallest eigenvalue is below 1e-10.
Mat2 lambda_matrix(const KernelSnapshot& snap);
Mat2 lambda_matrix(const FieldContext& ctx, const Vec2& t);

/// Lambda without the eigenvalue guard.
Mat2 lambda_matrix_unchecked(const KernelSnapshot& snap);

/// Throws std::invalid_argument for x <= 0 and DegeneracyError when Sigma or
/// sigma^2 is not positive.
LocalFunctionals local_functionals(const KernelSnapshot& snap, const FamilySpec& family, double x);
LocalFunctionals local_functionals(const FieldContext& ctx, const Vec2& t, double x);

/// local_functionals for several thresholds, sharing Lambda and beta.
void local_functionals_many(const KernelSnapshot& snap, const FamilySpec& family, std::span<const double> xs,
                            std::vector<LocalFunctionals>& out);

/// Only the Lambda-dependent part, for the Gaussian-limit integrands.
LocalFunctionals gaussian_functionals(const KernelSnapshot& snap, double x);

/// Test-only fault injection: flips the sign of the J (x) J / I^2 term in Lambda
/// so the verification suite can demonstrate that it catches the error.
void set_lambda_fault_for_testing(bool enabled);

}  // namespace fieldtail
