#include "fieldtail/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fieldtail {

namespace {

constexpr double kSingularRel = 1e-14;

void check_conditioning(const Mat2& a, double d) {
    const double scale = a.max_abs();
    if (!(std::abs(d) >= kSingularRel * scale * scale) || scale == 0.0)
        throw DegeneracyError("2x2 matrix is numerically singular");
}

}  // namespace

double Mat2::max_abs() const { return std::max({std::abs(xx), std::abs(xy), std::abs(yy)}); }

double det(const Mat2& a) { return a.xx * a.yy - a.xy * a.xy; }

Mat2 inverse(const Mat2& a) {
    const double d = det(a);
    check_conditioning(a, d);
    return {a.yy / d, -a.xy / d, a.xx / d};
}

Vec2 solve(const Mat2& a, const Vec2& b) {
    const double d = det(a);
    check_conditioning(a, d);
    return {(a.yy * b[0] - a.xy * b[1]) / d, (a.xx * b[1] - a.xy * b[0]) / d};
}

double min_eigenvalue(const Mat2& a) {
    const double mean = 0.5 * (a.xx + a.yy);
    const double half_diff = 0.5 * (a.xx - a.yy);
    const double radius = std::hypot(half_diff, a.xy);
    // Product form keeps precision when the eigenvalues differ greatly.
    const double big = mean >= 0 ? mean + radius : mean - radius;
    if (mean >= 0) return big != 0.0 ? det(a) / big : 0.0;
    return big;
}

double max_eigenvalue(const Mat2& a) {
    const double mean = 0.5 * (a.xx + a.yy);
    const double radius = std::hypot(0.5 * (a.xx - a.yy), a.xy);
    const double big = mean >= 0 ? mean + radius : mean - radius;
    if (mean >= 0) return big;
    return big != 0.0 ? det(a) / big : 0.0;
}

double inverse_quadratic_form(const Mat2& a, const Vec2& v) { return dot(v, solve(a, v)); }

double normal_pdf(double z) { return std::exp(-0.5 * z * z) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double trunc_moment(int j, double y) {
    if (j < 0) throw std::invalid_argument("trunc_moment: j must be nonnegative");
    const double phi = normal_pdf(y);
    double even = normal_cdf(y);  // psi_0
    double odd = -phi;            // psi_1
    if (j == 0) return even;
    if (j == 1) return odd;
    // psi_j = -y^{j-1} phi + (j-1) psi_{j-2}
    double ypow = y;  // y^{k-1} for k = 2
    double result = 0.0;
    for (int k = 2; k <= j; ++k) {
        if (k % 2 == 0) {
            even = -ypow * phi + (k - 1) * even;
            result = even;
        } else {
            odd = -ypow * phi + (k - 1) * odd;
            result = odd;
        }
        ypow *= y;
    }
    return result;
}

MillsExpansion mills_expansion_detail(double x, double y, double mu, double sigma2, int k) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("mills_expansion: sigma2 must be positive");
    if (k < 0) throw std::invalid_argument("mills_expansion: order must be nonnegative");
    const double base = x + (y - mu) / sigma2;
    if (!(base > 0.0)) throw std::invalid_argument("mills_expansion: x + (y - mu)/sigma2 must be positive");
    const double sigma = std::sqrt(sigma2);

    // Term m: (-1)^m (2m)! / (sigma^{2m} 2^m m!) * base^{-(2m+1)}. The ratio of
    // consecutive coefficients is -(2m+1)(2m+2)/(2(m+1) sigma2) = -(2m+1)/sigma2.
    double coeff = 1.0;
    double inv_base_pow = 1.0 / base;
    const double inv_base_sq = inv_base_pow * inv_base_pow;
    double series = 0.0;
    for (int m = 0; m <= k; ++m) {
        series += coeff * inv_base_pow;
        coeff *= -(2.0 * m + 1.0) / sigma2;
        inv_base_pow *= inv_base_sq;
    }
    MillsExpansion out;
    out.x = x;
    out.y = y;
    out.mu = mu;
    out.sigma2 = sigma2;
    out.order = k;
    // Density of Y, so phi((y - mu)/sigma)/sigma; the 1/sigma drops out only at sigma2 = 1.
    out.value = std::exp(-x * y) * normal_pdf((y - mu) / sigma) / sigma * series;
    out.remainder_power = 2 * k + 2;
    out.remainder_base = base;
    return out;
}

double mills_expansion(double x, double y, double mu, double sigma2, int k) {
    return mills_expansion_detail(x, y, mu, sigma2, k).value;
}

double mills_exact(double x, double y, double mu, double sigma2) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("mills_exact: sigma2 must be positive");
    const double s = std::sqrt(sigma2);
    // Written with erfc of a large positive argument to avoid cancellation.
    const double arg = (mu - y) / s - x * s;
    return std::exp(0.5 * x * x * sigma2 - x * mu) * normal_cdf(arg);
}

Vec2 finite_diff_grad(const std::function<double(const Vec2&)>& f, const Vec2& t, double h) {
    Vec2 g{};
    for (int i = 0; i < 2; ++i) {
        Vec2 up = t, down = t;
        up[i] += h;
        down[i] -= h;
        g[i] = (f(up) - f(down)) / (2.0 * h);
    }
    return g;
}

}  // namespace fieldtail
