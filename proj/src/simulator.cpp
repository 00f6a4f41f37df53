#include "fieldtail/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fieldtail/quadrature.hpp"
#include "fieldtail/rng.hpp"

namespace fieldtail {

int SimConfig::coarse_resolution() const {
    if (coarse_grid > 0) return coarse_grid;
    return std::max(32, static_cast<int>(std::ceil(4.0 * std::sqrt(D))));
}

void SimConfig::validate() const {
    if (m < 0 || m > 12) throw std::invalid_argument("m must lie in [0, 12]");
    if (!(D > 0.0) || !std::isfinite(D)) throw std::invalid_argument("D must be positive");
    if (!gaussian && !(p0 > 0.0 && p0 < 1.0)) throw std::invalid_argument("p0 must lie in (0, 1)");
    if (thresholds.empty()) throw std::invalid_argument("at least one threshold is required");
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (std::isnan(thresholds[i])) throw std::invalid_argument("thresholds must be numbers");
        if (i > 0 && thresholds[i] < thresholds[i - 1]) throw std::invalid_argument("thresholds must be ascending");
    }
    if (iterations < 1) throw std::invalid_argument("iterations must be at least 1");
    if (coarse_grid != 0 && coarse_grid < 2) throw std::invalid_argument("coarse_grid must be at least 2");
    if (top_k < 1 || max_steps < 1 || max_halvings < 0 || !(step_tol > 0.0))
        throw std::invalid_argument("invalid maximizer settings");
}

void sample_field(const FamilySpec& family, std::size_t n, std::uint64_t seed, std::uint64_t iteration,
                  std::vector<double>& out) {
    out.resize(n);
    PhiloxStream rng(seed, iteration);
    if (family.is_gaussian()) {
        for (auto& w : out) w = rng.next_normal();
        return;
    }
    const double p0 = family.p0();
    const double s = family.scale();
    const double hi = (1.0 - p0) / s;
    const double lo = -p0 / s;
    for (auto& w : out) w = rng.next_uniform() < p0 ? hi : lo;
}

CoarseBasis::CoarseBasis(const FieldContext& ctx, int resolution) : resolution_(resolution), pixels_(ctx.size()) {
    if (resolution < 2) throw std::invalid_argument("coarse grid needs at least 2 points per axis");
    const double h = 1.0 / (resolution - 1);
    for (int i = 0; i < resolution; ++i)
        for (int j = 0; j < resolution; ++j) points_.push_back({i * h, j * h});
    const std::size_t g_count = points_.size();
    beta_.assign(pixels_ * g_count, 0.0);
    totals_.assign(g_count, 0.0);
    KernelSnapshot snap;
    for (std::size_t g = 0; g < g_count; ++g) {
        ctx.snapshot_into(points_[g], snap);
        const double root = std::sqrt(snap.info);
        double total = 0.0;
        for (std::size_t u = 0; u < pixels_; ++u) {
            const double b = snap.theta[u] / root;
            beta_[u * g_count + g] = b;
            total += b;
        }
        totals_[g] = total;
    }
}

void CoarseBasis::scores(std::span<const double> w, std::vector<double>& out) const {
    if (w.size() != pixels_) throw std::invalid_argument("score: field length does not match the grid");
    const std::size_t g_count = points_.size();
    // Z = base * sum(beta) + sum over pixels off the base value. For two-point
    // fields the median is the common value, so the update is sparse.
    thread_local std::vector<double> tmp;
    tmp.assign(w.begin(), w.end());
    std::nth_element(tmp.begin(), tmp.begin() + tmp.size() / 2, tmp.end());
    const double base = tmp[tmp.size() / 2];
    out.resize(g_count);
    for (std::size_t g = 0; g < g_count; ++g) out[g] = base * totals_[g];
    for (std::size_t u = 0; u < pixels_; ++u) {
        const double c = w[u] - base;
        if (c == 0.0) continue;
        const double* col = &beta_[u * g_count];
        for (std::size_t g = 0; g < g_count; ++g) out[g] += c * col[g];
    }
}

namespace {

struct Probe {
    Vec2 t{};
    double value = 0.0;
    Vec2 grad{};
};

Vec2 clip(const Vec2& t) { return {std::clamp(t[0], 0.0, 1.0), std::clamp(t[1], 0.0, 1.0)}; }

Probe probe(const FieldContext& ctx, const Vec2& t, std::span<const double> w, KernelSnapshot& snap) {
    ctx.snapshot_into(t, snap);
    const ScoreGradient sg = score_with_gradient(snap, w);
    return {t, sg.value, sg.grad};
}

// Ascent direction Lambda^{-1} grad Z / max(Z, 1); the expected Hessian of Z
// near a high maximum is -Z Lambda. Faces the step would leave are held fixed.
Vec2 ascent_direction(const KernelSnapshot& snap, const Probe& at) {
    Mat2 lambda = lambda_matrix_unchecked(snap);
    Vec2 d;
    try {
        d = solve(lambda, at.grad);
    } catch (const DegeneracyError&) {
        lambda = Mat2::identity();
        d = at.grad;
    }
    const double scale = std::max(at.value, 1.0);
    d = {d[0] / scale, d[1] / scale};
    bool fixed[2] = {false, false};
    for (int pass = 0; pass < 2; ++pass) {
        for (int k = 0; k < 2; ++k) {
            if (fixed[k]) continue;
            const bool blocked = (at.t[k] <= 0.0 && d[k] < 0.0) || (at.t[k] >= 1.0 && d[k] > 0.0);
            if (!blocked) continue;
            fixed[k] = true;
            if (fixed[1 - k]) return {0.0, 0.0};
            // d - Lambda^{-1} g <g, d> / <g, Lambda^{-1} g> with g = e_k.
            Vec2 g{0.0, 0.0};
            g[k] = 1.0;
            Vec2 lg;
            try {
                lg = solve(lambda, g);
            } catch (const DegeneracyError&) {
                lg = g;
            }
            const double c = d[k] / lg[k];
            d = {d[0] - c * lg[0], d[1] - c * lg[1]};
            d[k] = 0.0;
        }
    }
    return d;
}

}  // namespace

MaximizeResult maximize_score(const FieldContext& ctx, const CoarseBasis& basis, std::span<const double> w,
                              const MaximizeOptions& options) {
    thread_local std::vector<double> coarse;
    thread_local std::vector<std::size_t> order;
    thread_local KernelSnapshot snap;
    basis.scores(w, coarse);
    order.resize(coarse.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(options.top_k), order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) { return coarse[a] > coarse[b] || (coarse[a] == coarse[b] && a < b); });

    MaximizeResult result;
    result.coarse_sup = coarse[order[0]];
    result.coarse_argmax = basis.point(order[0]);
    result.sup = result.coarse_sup;
    result.argmax = result.coarse_argmax;

    for (std::size_t s = 0; s < k; ++s) {
        Probe cur = probe(ctx, basis.point(order[s]), w, snap);
        bool done = false;
        int step = 0;
        for (; step < options.max_steps && !done; ++step) {
            const Vec2 d = ascent_direction(snap, cur);
            if (std::hypot(d[0], d[1]) < options.step_tol) {
                done = true;
                break;
            }
            double alpha = 1.0;
            bool improved = false;
            Probe next;
            for (int h = 0; h <= options.max_halvings; ++h, alpha *= 0.5) {
                const Vec2 t = clip({cur.t[0] + alpha * d[0], cur.t[1] + alpha * d[1]});
                if (std::hypot(t[0] - cur.t[0], t[1] - cur.t[1]) < options.step_tol) break;
                next = probe(ctx, t, w, snap);
                // Sufficient increase; bare improvement lets the search bounce
                // between mirror points around the maximum.
                const double predicted = cur.grad[0] * (t[0] - cur.t[0]) + cur.grad[1] * (t[1] - cur.t[1]);
                if (next.value > cur.value && next.value - cur.value >= options.armijo * predicted) {
                    improved = true;
                    break;
                }
            }
            // The model step can be far too short off the high maxima; lengthen it
            // while that keeps paying.
            if (improved && alpha == 1.0) {
                for (int e = 0; e < options.max_expansions; ++e) {
                    alpha *= 2.0;
                    const Vec2 t = clip({cur.t[0] + alpha * d[0], cur.t[1] + alpha * d[1]});
                    if (std::hypot(t[0] - next.t[0], t[1] - next.t[1]) < options.step_tol) break;
                    const Probe longer = probe(ctx, t, w, snap);
                    if (!(longer.value > next.value)) break;
                    next = longer;
                }
                // Leave the snapshot at `next`.
                ctx.snapshot_into(next.t, snap);
            }
            if (!improved) {
                done = true;
                break;
            }
            const double moved = std::hypot(next.t[0] - cur.t[0], next.t[1] - cur.t[1]);
            const double gain = next.value - cur.value;
            cur = next;
            if (moved < options.step_tol || gain < options.value_tol * std::max(1.0, std::abs(cur.value))) done = true;
            // The snapshot now belongs to `cur`, as required by ascent_direction.
        }
        result.steps += step;
        if (!done) result.converged = false;
        if (cur.value > result.sup) {
            result.sup = cur.value;
            result.argmax = cur.t;
        }
    }
    return result;
}

double binomial_se(double p, std::size_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

double SimResult::p_hat(std::size_t i) const { return static_cast<double>(counts.at(i)) / iterations; }
double SimResult::se(std::size_t i) const { return binomial_se(p_hat(i), iterations); }
double SimResult::grid_p_hat(std::size_t i) const { return static_cast<double>(grid_counts.at(i)) / iterations; }
double SimResult::grid_se(std::size_t i) const { return binomial_se(grid_p_hat(i), iterations); }

SimResult estimate_pvalues(const FieldContext& ctx, const SimConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const CoarseBasis basis(ctx, config.coarse_resolution());
    MaximizeOptions opts;
    opts.top_k = config.top_k;
    opts.max_steps = config.max_steps;
    opts.max_halvings = config.max_halvings;
    opts.step_tol = config.step_tol;

    SimResult res;
    res.thresholds = config.thresholds;
    res.iterations = config.iterations;
    res.sups.assign(config.iterations, 0.0);
    res.grid_sups.assign(config.iterations, 0.0);
    std::vector<unsigned char> converged(config.iterations, 1);

    parallel_for(config.iterations, config.threads, [&](std::size_t it) {
        thread_local std::vector<double> w;
        sample_field(ctx.family(), ctx.size(), config.seed, it, w);
        const MaximizeResult r = maximize_score(ctx, basis, w, opts);
        if (r.sup < r.coarse_sup) throw std::logic_error("refined sup fell below the coarse-grid sup");
        res.sups[it] = r.sup;
        res.grid_sups[it] = r.coarse_sup;
        converged[it] = r.converged ? 1 : 0;
    });

    res.counts.assign(config.thresholds.size(), 0);
    res.grid_counts.assign(config.thresholds.size(), 0);
    for (std::size_t it = 0; it < config.iterations; ++it) {
        for (std::size_t i = 0; i < config.thresholds.size(); ++i) {
            if (res.sups[it] >= config.thresholds[i]) ++res.counts[i];
            if (res.grid_sups[it] >= config.thresholds[i]) ++res.grid_counts[i];
        }
        if (!converged[it]) ++res.nonconverged;
    }

    if (!config.sups_output.empty()) {
        std::ofstream out(config.sups_output);
        if (!out) throw std::runtime_error("cannot open " + config.sups_output);
        out.precision(17);
        for (double s : res.sups) out << s << '\n';
        if (!out) throw std::runtime_error("failed writing " + config.sups_output);
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

SimResult estimate_pvalues(const SimConfig& config) {
    config.validate();
    const FamilySpec family = config.gaussian ? FamilySpec::standard_gaussian() : FamilySpec::standardized_bernoulli(config.p0);
    const FieldContext ctx(Grid(config.m), family, config.D);
    return estimate_pvalues(ctx, config);
}

}  // namespace fieldtail
