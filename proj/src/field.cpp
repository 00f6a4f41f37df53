#include "fieldtail/field.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace fieldtail {

namespace {

constexpr double kMinLambdaEigen = 1e-10;

std::atomic<bool> g_lambda_fault{false};

}  // namespace

double KernelSnapshot::beta(std::size_t u) const { return theta[u] / std::sqrt(info); }

Vec2 KernelSnapshot::beta_grad(std::size_t u) const {
    const double root = std::sqrt(info);
    const double c = theta[u] / (info * root);
    return {grad[u][0] / root - J[0] * c, grad[u][1] / root - J[1] * c};
}

FieldContext::FieldContext(Grid grid, FamilySpec family, double kernel_D, double truncation)
    : grid_(std::move(grid)), family_(family), kernel_D_(kernel_D), truncation_(truncation) {
    if (!(kernel_D > 0.0) || !std::isfinite(kernel_D)) throw std::invalid_argument("kernel scale D must be positive");
    if (!(truncation >= 0.0 && truncation < 1.0)) throw std::invalid_argument("kernel truncation must lie in [0, 1)");
}

KernelSnapshot FieldContext::snapshot(const Vec2& t) const {
    KernelSnapshot snap;
    snapshot_into(t, snap);
    return snap;
}

void FieldContext::snapshot_into(const Vec2& t, KernelSnapshot& out) const {
    const SignalParams params(t, kernel_D_);
    const std::size_t n = grid_.size();
    out.t = t;
    out.theta.resize(n);
    out.grad.resize(n);
    BlockedSum info, j0, j1;
    const auto pts = grid_.points();
    for (std::size_t u = 0; u < n; ++u) {
        KernelValue k = kernel(pts[u], params);
        if (k.theta < truncation_) k = {};
        out.theta[u] = k.theta;
        out.grad[u] = k.grad;
        info.add(k.theta * k.theta);
        j0.add(k.theta * k.grad[0]);
        j1.add(k.theta * k.grad[1]);
    }
    out.info = info.value();
    out.J = {j0.value(), j1.value()};
    if (!(out.info > 0.0)) throw DegeneracyError("Fisher information vanishes");
}

double fisher_info(const FieldContext& ctx, const Vec2& t) { return ctx.snapshot(t).info; }

double score(const KernelSnapshot& snap, std::span<const double> w) {
    if (w.size() != snap.size()) throw std::invalid_argument("score: field length does not match the grid");
    CompensatedSum<> acc;
    for (std::size_t u = 0; u < w.size(); ++u) acc.add(snap.theta[u] * w[u]);
    return acc.value() / std::sqrt(snap.info);
}

double score(const FieldContext& ctx, const Vec2& t, std::span<const double> w) {
    if (w.size() != ctx.size()) throw std::invalid_argument("score: field length does not match the grid");
    return score(ctx.snapshot(t), w);
}

ScoreGradient score_with_gradient(const KernelSnapshot& snap, std::span<const double> w) {
    if (w.size() != snap.size()) throw std::invalid_argument("score: field length does not match the grid");
    // Plain sums: this sits in the simulator's inner loop.
    double s = 0.0, g0 = 0.0, g1 = 0.0;
    for (std::size_t u = 0; u < w.size(); ++u) {
        const double wu = w[u];
        if (wu == 0.0) continue;
        s += snap.theta[u] * wu;
        g0 += snap.grad[u][0] * wu;
        g1 += snap.grad[u][1] * wu;
    }
    const double root = std::sqrt(snap.info);
    ScoreGradient out;
    out.value = s / root;
    const double c = s / (snap.info * root);
    out.grad = {g0 / root - snap.J[0] * c, g1 / root - snap.J[1] * c};
    return out;
}

Mat2 lambda_matrix_unchecked(const KernelSnapshot& snap) {
    BlockedSum xx, xy, yy;
    for (std::size_t u = 0; u < snap.size(); ++u) {
        const Vec2& g = snap.grad[u];
        xx.add(g[0] * g[0]);
        xy.add(g[0] * g[1]);
        yy.add(g[1] * g[1]);
    }
    const double I = snap.info;
    const Mat2 first{xx.value() / I, xy.value() / I, yy.value() / I};
    // (2J (x) 2J) / (4 I^2) = J (x) J / I^2
    const double sign = g_lambda_fault.load(std::memory_order_relaxed) ? -1.0 : 1.0;
    return first - Mat2::outer(snap.J) * (sign / (I * I));
}

void set_lambda_fault_for_testing(bool enabled) { g_lambda_fault.store(enabled); }

Mat2 lambda_matrix(const KernelSnapshot& snap) {
    const Mat2 lambda = lambda_matrix_unchecked(snap);
    if (!(min_eigenvalue(lambda) >= kMinLambdaEigen)) throw DegeneracyError("Lambda is not positive-definite");
    return lambda;
}

Mat2 lambda_matrix(const FieldContext& ctx, const Vec2& t) { return lambda_matrix(ctx.snapshot(t)); }

LocalFunctionals gaussian_functionals(const KernelSnapshot& snap, double x) {
    if (!(x > 0.0)) throw std::invalid_argument("threshold x must be positive");
    LocalFunctionals out;
    out.t = snap.t;
    out.x = x;
    out.info = snap.info;
    out.xi = x / std::sqrt(snap.info);
    out.J = snap.J;
    out.lambda = lambda_matrix(snap);
    out.sigma = out.lambda;
    return out;
}

namespace {

// Sums over pixels that depend on the tilt; `lf` already carries Lambda and xi.
void fill_tilted(const KernelSnapshot& snap, const FamilySpec& family, std::span<const double> beta,
                 std::span<const Vec2> beta_grad, LocalFunctionals& lf) {
    BlockedSum psi_sum, mean_sum, sxx, sxy, syy, r0, r1;
    for (std::size_t u = 0; u < snap.size(); ++u) {
        const CumulantValues c = family.cumulants(lf.xi * snap.theta[u]);
        const double b = beta[u];
        const Vec2& bg = beta_grad[u];
        psi_sum.add(c.psi);
        mean_sum.add(b * c.d1);
        sxx.add(bg[0] * bg[0] * c.d2);
        sxy.add(bg[0] * bg[1] * c.d2);
        syy.add(bg[1] * bg[1] * c.d2);
        r0.add(b * bg[0] * c.d2);
        r1.add(b * bg[1] * c.d2);
    }
    lf.delta = 0.5 * lf.x * lf.x - psi_sum.value();
    lf.r = mean_sum.value() - lf.x;
    lf.sigma = {sxx.value(), sxy.value(), syy.value()};
    lf.rho = {r0.value(), r1.value()};
    if (!(min_eigenvalue(lf.sigma) > 0.0)) throw DegeneracyError("Sigma is not positive-definite");
    lf.sigma2 = 1.0 - inverse_quadratic_form(lf.sigma, lf.rho);
    if (!(lf.sigma2 > 0.0)) throw DegeneracyError("residual variance sigma^2 is not positive");
}

void fill_beta(const KernelSnapshot& snap, std::vector<double>& beta, std::vector<Vec2>& beta_grad) {
    beta.resize(snap.size());
    beta_grad.resize(snap.size());
    for (std::size_t u = 0; u < snap.size(); ++u) {
        beta[u] = snap.beta(u);
        beta_grad[u] = snap.beta_grad(u);
    }
}

}  // namespace

LocalFunctionals local_functionals(const KernelSnapshot& snap, const FamilySpec& family, double x) {
    LocalFunctionals out = gaussian_functionals(snap, x);
    std::vector<double> beta;
    std::vector<Vec2> beta_grad;
    fill_beta(snap, beta, beta_grad);
    fill_tilted(snap, family, beta, beta_grad, out);
    return out;
}

void local_functionals_many(const KernelSnapshot& snap, const FamilySpec& family, std::span<const double> xs,
                            std::vector<LocalFunctionals>& out) {
    out.clear();
    if (xs.empty()) return;
    const LocalFunctionals base = gaussian_functionals(snap, xs[0]);
    thread_local std::vector<double> beta;
    thread_local std::vector<Vec2> beta_grad;
    fill_beta(snap, beta, beta_grad);
    const double root = std::sqrt(snap.info);
    for (double x : xs) {
        if (!(x > 0.0)) throw std::invalid_argument("threshold x must be positive");
        LocalFunctionals lf = base;
        lf.x = x;
        lf.xi = x / root;
        fill_tilted(snap, family, beta, beta_grad, lf);
        out.push_back(lf);
    }
}

LocalFunctionals local_functionals(const FieldContext& ctx, const Vec2& t, double x) {
    return local_functionals(ctx.snapshot(t), ctx.family(), x);
}

}  // namespace fieldtail
