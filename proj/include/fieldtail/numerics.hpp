#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>

namespace fieldtail {

/// A matrix or functional that should be positive-definite is not.
class DegeneracyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative numerical procedure failed to converge.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Vec2 = std::array<double, 2>;

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

/// Symmetric 2x2 matrix [[xx, xy], [xy, yy]].
struct Mat2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;

    static Mat2 identity() { return {1.0, 0.0, 1.0}; }
    static Mat2 outer(const Vec2& a) { return {a[0] * a[0], a[0] * a[1], a[1] * a[1]}; }

    Vec2 operator*(const Vec2& v) const { return {xx * v[0] + xy * v[1], xy * v[0] + yy * v[1]}; }
    Mat2& operator+=(const Mat2& o) {
        xx += o.xx;
        xy += o.xy;
        yy += o.yy;
        return *this;
    }
    Mat2 operator*(double s) const { return {xx * s, xy * s, yy * s}; }
    Mat2 operator-(const Mat2& o) const { return {xx - o.xx, xy - o.xy, yy - o.yy}; }
    Mat2 operator+(const Mat2& o) const { return {xx + o.xx, xy + o.xy, yy + o.yy}; }

    /// Max absolute entry.
    double max_abs() const;
};

double det(const Mat2& a);
/// Throws DegeneracyError when det < 1e-14 * ||A||^2.
Mat2 inverse(const Mat2& a);
Vec2 solve(const Mat2& a, const Vec2& b);
double min_eigenvalue(const Mat2& a);
double max_eigenvalue(const Mat2& a);
/// <v, A^{-1} v> without forming the inverse.
double inverse_quadratic_form(const Mat2& a, const Vec2& v);

/// Neumaier compensated accumulator.
template <class T = double>
class CompensatedSum {
public:
    void add(T v) {
        const T t = sum_ + v;
        if (abs_(sum_) >= abs_(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    T value() const { return sum_ + comp_; }

private:
    static T abs_(T v) { return v < 0 ? -v : v; }
    T sum_ = 0;
    T comp_ = 0;
};

/// Plain summation within blocks of 64 terms, compensated across blocks.
/// Error grows like 64 eps instead of n eps at close to plain-sum cost.
class BlockedSum {
public:
    void add(double v) {
        block_ += v;
        if (++count_ == 64) flush();
    }
    double value() const {
        CompensatedSum<> copy = total_;
        copy.add(block_);
        return copy.value();
    }

private:
    void flush() {
        total_.add(block_);
        block_ = 0.0;
        count_ = 0;
    }
    CompensatedSum<> total_;
    double block_ = 0.0;
    int count_ = 0;
};

double normal_pdf(double z);
double normal_cdf(double z);
/// Upper tail 1 - Phi(z), accurate for large z.
double normal_sf(double z);

/// Integral of z^j phi(z) over (-inf, y], by the downward recursion seeded with
/// psi_0 = Phi(y), psi_1 = -phi(y).
double trunc_moment(int j, double y);

/// Asymptotic expansion of E[exp(-x Y); Y >= y] for Y ~ N(mu, sigma2), truncated
/// after order k. The remainder is o([x + (y - mu)/sigma2]^{-(2k+2)}).
struct MillsExpansion {
    double x = 0.0;
    double y = 0.0;
    double mu = 0.0;
    double sigma2 = 1.0;
    int order = 0;
    double value = 0.0;
    /// Exponent of the remainder: o(base^{-remainder_power}).
    int remainder_power = 2;
    double remainder_base = 0.0;
};

double mills_expansion(double x, double y, double mu, double sigma2, int k);
MillsExpansion mills_expansion_detail(double x, double y, double mu, double sigma2, int k);

/// Closed form of the same expectation: exp(x^2 s^2/2 - x mu) Phi((mu - y)/s - x s).
double mills_exact(double x, double y, double mu, double sigma2);

Vec2 finite_diff_grad(const std::function<double(const Vec2&)>& f, const Vec2& t, double h);

}  // namespace fieldtail
