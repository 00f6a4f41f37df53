#include "fieldtail/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fieldtail {

Grid::Grid(int level) : level_(level), side_(0) {
    if (level < 0 || level > 12) throw std::invalid_argument("grid level must lie in [0, 12]");
    side_ = (std::size_t{1} << level) + 1;
    const double step = 1.0 / static_cast<double>(side_ - 1);
    points_.reserve(side_ * side_);
    for (std::size_t i = 0; i < side_; ++i)
        for (std::size_t j = 0; j < side_; ++j) points_.push_back({static_cast<double>(i) * step, static_cast<double>(j) * step});
}

SignalParams::SignalParams(Vec2 t_, double D_) : t(t_), D(D_) {
    if (!(D_ > 0.0) || !std::isfinite(D_)) throw std::invalid_argument("kernel scale D must be positive");
    if (!(t_[0] >= 0.0 && t_[0] <= 1.0 && t_[1] >= 0.0 && t_[1] <= 1.0))
        throw std::invalid_argument("signal parameters must lie in [0, 1]^2");
}

SegmentProjection segment_distance(const Point& u, const Vec2& t) {
    // point(p) = (1, t2) + p * (-1, t1 - t2); |u - point(p)|^2 is a quadratic in p
    // with leading coefficient 1 + (t1 - t2)^2 > 0.
    const double dy = t[0] - t[1];
    const double ax = u.x - 1.0;
    const double ay = u.y - t[1];
    const double p = std::clamp((-ax + ay * dy) / (1.0 + dy * dy), 0.0, 1.0);
    SegmentProjection out;
    out.p = p;
    out.closest = {1.0 - p, t[1] + p * dy};
    out.distance = std::hypot(u.x - out.closest.x, u.y - out.closest.y);
    return out;
}

SegmentProjection segment_distance(const Point& u, const SignalParams& s) { return segment_distance(u, s.t); }

double theta(const Point& u, const SignalParams& s) {
    const double d = segment_distance(u, s.t).distance;
    return std::exp(-0.5 * s.D * d * d);
}

KernelValue kernel(const Point& u, const SignalParams& s) {
    const SegmentProjection proj = segment_distance(u, s.t);
    KernelValue out;
    out.theta = std::exp(-0.5 * s.D * proj.distance * proj.distance);
    // d(d^2)/dt1 = 2 p (q_y - u_y), d(d^2)/dt2 = 2 (1 - p)(q_y - u_y)
    const double gap = proj.closest.y - u.y;
    const double factor = -s.D * out.theta * gap;  // -(D/2) theta * 2 gap
    out.grad = {factor * proj.p, factor * (1.0 - proj.p)};
    return out;
}

Vec2 theta_grad(const Point& u, const SignalParams& s) { return kernel(u, s).grad; }

}  // namespace fieldtail
