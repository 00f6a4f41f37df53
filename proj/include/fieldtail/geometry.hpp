#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fieldtail/numerics.hpp"

namespace fieldtail {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Dyadic pixel grid {(i/2^m, j/2^m) : 0 <= i, j <= 2^m} on the unit square.
class Grid {
public:
    explicit Grid(int level);

    int level() const { return level_; }
    /// Points per axis, 2^m + 1.
    std::size_t side() const { return side_; }
    std::size_t size() const { return points_.size(); }
    std::span<const Point> points() const { return points_; }
    const Point& operator[](std::size_t i) const { return points_[i]; }

private:
    int level_;
    std::size_t side_;
    std::vector<Point> points_;
};

/// Line segment signal joining (0, t1) and (1, t2), with kernel precision D.
struct SignalParams {
    Vec2 t{0.5, 0.5};
    double D = 1.0;

    SignalParams() = default;
    SignalParams(Vec2 t_, double D_);
    SignalParams(double t1, double t2, double D_) : SignalParams(Vec2{t1, t2}, D_) {}
};

/// Closest point on the segment {p (0, t1) + (1 - p)(1, t2) : p in [0, 1]}.
struct SegmentProjection {
    double distance = 0.0;
    /// Clamped minimizer p*.
    double p = 0.0;
    Point closest;
};

SegmentProjection segment_distance(const Point& u, const Vec2& t);
SegmentProjection segment_distance(const Point& u, const SignalParams& s);

/// exp(-D d(u, t)^2 / 2).
double theta(const Point& u, const SignalParams& s);

/// Gradient of theta in (t1, t2). Uses the envelope theorem at the clamped p*.
Vec2 theta_grad(const Point& u, const SignalParams& s);

struct KernelValue {
    double theta = 0.0;
    Vec2 grad{};
};

/// theta and its gradient from one projection.
KernelValue kernel(const Point& u, const SignalParams& s);

}  // namespace fieldtail
