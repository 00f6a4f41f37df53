#include "fieldtail/quadrature.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

namespace fieldtail {

GaussLegendreRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
    GaussLegendreRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    if (n == 1) {
        rule.weights[0] = 2.0;
        return rule;
    }
    // P_n(z) and P_n'(z) by the three-term recurrence.
    auto legendre = [n](double z) {
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        return std::pair{p1, n * (z * p1 - p0) / (z * z - 1.0)};
    };
    for (int i = 0; i < n / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [p, dp] = legendre(z);
            const double dz = p / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        const double dp = legendre(z).second;
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        const double dp = legendre(0.0).second;
        rule.weights[n / 2] = 2.0 / (dp * dp);
    }
    return rule;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    const unsigned n = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

namespace {

void check_options(const QuadratureOptions& o) {
    if (o.nodes_per_panel < 1 || o.initial_panels < 1 || o.max_refinements < 1 || !(o.rel_tol > 0.0))
        throw std::invalid_argument("invalid quadrature options");
}

// Sum of per-panel vectors in panel order.
std::vector<double> reduce_panels(const std::vector<std::vector<double>>& parts, std::size_t components) {
    std::vector<double> out(components, 0.0);
    for (std::size_t c = 0; c < components; ++c) {
        CompensatedSum<> acc;
        for (const auto& p : parts) acc.add(p[c]);
        out[c] = acc.value();
    }
    return out;
}

std::vector<double> box_estimate(const VectorIntegrand2D& f, std::size_t components, const Vec2& lo, const Vec2& hi,
                                 int panels, const GaussLegendreRule& rule, unsigned threads) {
    const double hx = (hi[0] - lo[0]) / panels;
    const double hy = (hi[1] - lo[1]) / panels;
    const std::size_t npanels = static_cast<std::size_t>(panels) * panels;
    std::vector<std::vector<double>> parts(npanels, std::vector<double>(components, 0.0));
    parallel_for(npanels, threads, [&](std::size_t idx) {
        const int pi = static_cast<int>(idx / panels);
        const int pj = static_cast<int>(idx % panels);
        const double cx = lo[0] + (pi + 0.5) * hx;
        const double cy = lo[1] + (pj + 0.5) * hy;
        std::vector<double> value(components);
        std::vector<double>& acc = parts[idx];
        for (std::size_t a = 0; a < rule.nodes.size(); ++a) {
            for (std::size_t b = 0; b < rule.nodes.size(); ++b) {
                const Vec2 t{cx + 0.5 * hx * rule.nodes[a], cy + 0.5 * hy * rule.nodes[b]};
                f(t, value);
                const double w = rule.weights[a] * rule.weights[b] * 0.25 * hx * hy;
                for (std::size_t c = 0; c < components; ++c) acc[c] += w * value[c];
            }
        }
    });
    return reduce_panels(parts, components);
}

std::vector<double> interval_estimate(const VectorIntegrand1D& f, std::size_t components, double lo, double hi,
                                      int panels, const GaussLegendreRule& rule, unsigned threads) {
    const double h = (hi - lo) / panels;
    std::vector<std::vector<double>> parts(panels, std::vector<double>(components, 0.0));
    parallel_for(static_cast<std::size_t>(panels), threads, [&](std::size_t idx) {
        const double c0 = lo + (static_cast<double>(idx) + 0.5) * h;
        std::vector<double> value(components);
        std::vector<double>& acc = parts[idx];
        for (std::size_t a = 0; a < rule.nodes.size(); ++a) {
            f(c0 + 0.5 * h * rule.nodes[a], value);
            const double w = rule.weights[a] * 0.5 * h;
            for (std::size_t c = 0; c < components; ++c) acc[c] += w * value[c];
        }
    });
    return reduce_panels(parts, components);
}

template <class Estimate, class Count>
VectorQuadratureResult refine(std::size_t components, const QuadratureOptions& options, Count&& count,
                              Estimate&& estimate) {
    int panels = options.initial_panels;
    std::vector<double> coarse = estimate(panels);
    std::size_t evaluations = count(panels);
    for (int level = 1; level <= options.max_refinements; ++level) {
        panels *= 2;
        std::vector<double> fine = estimate(panels);
        evaluations += count(panels);
        bool converged = true;
        std::vector<double> error(components);
        for (std::size_t c = 0; c < components; ++c) {
            error[c] = std::abs(fine[c] - coarse[c]);
            const double scale = std::max(std::abs(fine[c]), options.abs_floor);
            if (!(error[c] <= options.rel_tol * scale)) converged = false;
        }
        if (converged) {
            VectorQuadratureResult out;
            out.value = std::move(fine);
            out.error = std::move(error);
            out.panels = panels;
            out.refinements = level;
            out.evaluations = evaluations;
            return out;
        }
        coarse = std::move(fine);
    }
    std::ostringstream os;
    os << "quadrature did not reach relative tolerance " << options.rel_tol << " after " << options.max_refinements
       << " panel doublings (" << panels << " panels per axis)";
    throw NumericalError(os.str());
}

}  // namespace

VectorQuadratureResult integrate_interval(const VectorIntegrand1D& f, std::size_t components, double a, double b,
                                          const QuadratureOptions& options) {
    check_options(options);
    const GaussLegendreRule rule = gauss_legendre(options.nodes_per_panel);
    const std::size_t nodes = rule.nodes.size();
    return refine(components, options, [nodes](int panels) { return nodes * static_cast<std::size_t>(panels); },
                  [&](int panels) { return interval_estimate(f, components, a, b, panels, rule, options.threads); });
}

VectorQuadratureResult integrate_box(const VectorIntegrand2D& f, std::size_t components, const Vec2& lo,
                                     const Vec2& hi, const QuadratureOptions& options) {
    check_options(options);
    const GaussLegendreRule rule = gauss_legendre(options.nodes_per_panel);
    const std::size_t nodes = rule.nodes.size() * rule.nodes.size();
    return refine(
        components, options,
        [nodes](int panels) { return nodes * static_cast<std::size_t>(panels) * static_cast<std::size_t>(panels); },
        [&](int panels) {
        return box_estimate(f, components, lo, hi, panels, rule, options.threads);
    });
}

QuadratureResult quadrature_1d(const std::function<double(double)>& f, double a, double b,
                               const QuadratureOptions& options) {
    const auto r = integrate_interval([&](double t, std::span<double> out) { out[0] = f(t); }, 1, a, b, options);
    return {r.value[0], r.error[0], r.panels, r.refinements, r.evaluations};
}

QuadratureResult quadrature_2d(const std::function<double(const Vec2&)>& f, const Vec2& lo, const Vec2& hi,
                               const QuadratureOptions& options) {
    const auto r = integrate_box([&](const Vec2& t, std::span<double> out) { out[0] = f(t); }, 1, lo, hi, options);
    return {r.value[0], r.error[0], r.panels, r.refinements, r.evaluations};
}

}  // namespace fieldtail
