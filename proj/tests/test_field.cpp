#include <doctest.h>

#include <cmath>
#include <random>

#include "fieldtail/field.hpp"
#include "fieldtail/rng.hpp"
#include "fieldtail/simulator.hpp"
#include "oracles.hpp"

using namespace fieldtail;

namespace {

FieldContext bernoulli(int m, double D, double p0 = 0.1) {
    return FieldContext(Grid(m), FamilySpec::standardized_bernoulli(p0), D);
}

}  // namespace

TEST_SUITE("field") {

TEST_CASE("Fisher information") {
    const FieldContext flat(Grid(3), FamilySpec::standard_gaussian(), 1e-14);
    CHECK(fisher_info(flat, {0.2, 0.9}) == doctest::Approx(81.0).epsilon(1e-12));

    const auto ctx = bernoulli(2, 10.0);
    double naive = 0.0;
    for (const auto& u : oracle::grid(2)) naive += std::pow(oracle::theta(u, {0.5, 0.5}, 10.0), 2);
    CHECK(fisher_info(ctx, {0.5, 0.5}) == doctest::Approx(naive).epsilon(1e-12));
    CHECK(fisher_info(ctx, {0.2, 0.7}) == doctest::Approx(fisher_info(ctx, {0.7, 0.2})).epsilon(1e-13));
}

TEST_CASE("score") {
    const auto ctx = bernoulli(2, 10.0);
    const Vec2 t{0.35, 0.6};
    std::vector<double> w(ctx.size(), 0.0);
    CHECK(score(ctx, t, w) == 0.0);

    const auto snap = ctx.snapshot(t);
    for (std::size_t u = 0; u < w.size(); ++u) w[u] = snap.beta(u);
    CHECK(score(ctx, t, w) == doctest::Approx(1.0).epsilon(1e-14));

    std::mt19937_64 rng(2);
    std::normal_distribution<double> N;
    for (auto& v : w) v = N(rng);
    double num = 0.0, info = 0.0;
    const auto px = oracle::grid(2);
    for (std::size_t u = 0; u < px.size(); ++u) {
        const double th = oracle::theta(px[u], t, 10.0);
        num += th * w[u];
        info += th * th;
    }
    CHECK(score(ctx, t, w) == doctest::Approx(num / std::sqrt(info)).epsilon(1e-12));
    CHECK(score_with_gradient(snap, w).value == doctest::Approx(num / std::sqrt(info)).epsilon(1e-12));

    w.pop_back();
    CHECK_THROWS_AS(score(ctx, t, w), std::invalid_argument);
}

TEST_CASE("score gradient matches finite differences") {
    const auto ctx = bernoulli(3, 15.0);
    std::vector<double> w;
    sample_field(ctx.family(), ctx.size(), 9, 0, w);
    const Vec2 t{0.41, 0.63};
    const auto g = score_with_gradient(ctx.snapshot(t), w).grad;
    const auto fd = finite_diff_grad([&](const Vec2& s) { return score(ctx, s, w); }, t, 1e-6);
    CHECK(g[0] == doctest::Approx(fd[0]).epsilon(1e-6));
    CHECK(g[1] == doctest::Approx(fd[1]).epsilon(1e-6));
}

TEST_CASE("Lambda identities") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> U(0.0, 1.0), Dd(2.0, 100.0);
    for (int i = 0; i < 200; ++i) {
        const FieldContext ctx(Grid(1 + i % 4), FamilySpec::standard_gaussian(), Dd(rng));
        const auto snap = ctx.snapshot({U(rng), U(rng)});
        Mat2 outer;
        Vec2 bb{0, 0};
        for (std::size_t u = 0; u < snap.size(); ++u) {
            const Vec2 g = snap.beta_grad(u);
            outer += Mat2::outer(g);
            bb[0] += snap.beta(u) * g[0];
            bb[1] += snap.beta(u) * g[1];
        }
        const Mat2 lambda = lambda_matrix_unchecked(snap);
        CHECK((lambda - outer).max_abs() <= 1e-12 * outer.max_abs());
        CHECK(std::abs(bb[0]) <= 1e-12);
        CHECK(std::abs(bb[1]) <= 1e-12);
    }
}

TEST_CASE("Lambda examples") {
    const auto ctx = bernoulli(3, 10.0);
    const Mat2 l = lambda_matrix(ctx, {0.3, 0.7});
    const auto ref = oracle::functionals(3, 10.0, 0.1, {0.3, 0.7}, 1.0).lambda;
    CHECK(l.xx == doctest::Approx(ref[0]).epsilon(1e-12));
    CHECK(l.xy == doctest::Approx(ref[1]).epsilon(1e-12));
    CHECK(l.yy == doctest::Approx(ref[2]).epsilon(1e-12));
    // Eigenvalues of the oracle matrix from the quadratic formula.
    const double tr = ref[0] + ref[2], dt = ref[0] * ref[2] - ref[1] * ref[1];
    CHECK(tr / 2 - std::sqrt(tr * tr / 4 - dt) > 0.0);
    CHECK(min_eigenvalue(l) > 0.0);

    const Mat2 sym = lambda_matrix(ctx, {0.5, 0.5});
    CHECK(sym.xx == doctest::Approx(sym.yy).epsilon(1e-13));
}

TEST_CASE("functionals against the naive oracle") {
    const auto ctx = bernoulli(5, 10.0);
    const auto lf = local_functionals(ctx, {0.5, 0.5}, 2.5);
    const auto ref = oracle::functionals(5, 10.0, 0.1, {0.5, 0.5}, 2.5);
    CHECK(lf.info == doctest::Approx(ref.info).epsilon(1e-10));
    CHECK(lf.xi == doctest::Approx(2.5 / std::sqrt(ref.info)).epsilon(1e-10));
    CHECK(lf.delta == doctest::Approx(ref.delta).epsilon(1e-10));
    CHECK(lf.r == doctest::Approx(ref.r).epsilon(1e-10));
    CHECK(lf.sigma.xx == doctest::Approx(ref.sigma[0]).epsilon(1e-10));
    CHECK(lf.sigma.yy == doctest::Approx(ref.sigma[2]).epsilon(1e-10));
    CHECK(std::abs(lf.sigma.xy - ref.sigma[1]) <= 1e-10 * std::abs(ref.sigma[0]));
    CHECK(std::abs(lf.rho[0] - ref.rho[0]) <= 1e-10 * std::hypot(ref.rho[0], ref.rho[1]) + 1e-15);
    CHECK(std::abs(lf.rho[1] - ref.rho[1]) <= 1e-10 * std::hypot(ref.rho[0], ref.rho[1]) + 1e-15);
    CHECK(lf.sigma2 == doctest::Approx(ref.sigma2).epsilon(1e-10));

    const auto off = local_functionals(ctx, {0.2, 0.85}, 3.0);
    const auto ref2 = oracle::functionals(5, 10.0, 0.1, {0.2, 0.85}, 3.0);
    CHECK(off.delta == doctest::Approx(ref2.delta).epsilon(1e-10));
    CHECK(off.r == doctest::Approx(ref2.r).epsilon(1e-10));
    CHECK(off.rho[0] == doctest::Approx(ref2.rho[0]).epsilon(1e-10));
    CHECK(off.rho[1] == doctest::Approx(ref2.rho[1]).epsilon(1e-10));
    CHECK(off.sigma2 == doctest::Approx(ref2.sigma2).epsilon(1e-10));
}

TEST_CASE("Gaussian family has no tilt corrections") {
    const FieldContext ctx(Grid(4), FamilySpec::standard_gaussian(), 20.0);
    for (const Vec2 t : {Vec2{0.5, 0.5}, Vec2{0.1, 0.8}, Vec2{0.0, 1.0}, Vec2{0.95, 0.3}}) {
        for (double x : {0.5, 2.5, 4.0}) {
            const auto lf = local_functionals(ctx, t, x);
            CHECK(std::abs(lf.delta) < 1e-13);
            CHECK(std::abs(lf.r) < 1e-13);
            CHECK(std::abs(lf.rho[0]) < 1e-13);
            CHECK(std::abs(lf.rho[1]) < 1e-13);
            CHECK(std::abs(lf.sigma2 - 1.0) < 1e-13);
        }
    }
}

TEST_CASE("zero-tilt limit") {
    const auto ctx = bernoulli(4, 10.0);
    const auto a = local_functionals(ctx, {0.4, 0.6}, 0.02);
    const auto b = local_functionals(ctx, {0.4, 0.6}, 0.01);
    CHECK(std::abs(b.delta) < 1e-5);
    CHECK(std::abs(b.r) < 1e-3);
    // delta ~ x^3, r ~ x^2.
    CHECK(a.delta / b.delta == doctest::Approx(8.0).epsilon(0.02));
    CHECK(a.r / b.r == doctest::Approx(4.0).epsilon(0.02));
    CHECK(b.sigma2 == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("reflection invariance and residual variance range") {
    for (int m : {3, 4, 5}) {
        for (double D : {10.0, 20.0, 50.0}) {
            const auto ctx = bernoulli(m, D);
            const auto a = local_functionals(ctx, {0.25, 0.7}, 3.0);
            const auto b = local_functionals(ctx, {0.7, 0.25}, 3.0);
            CHECK(a.delta == doctest::Approx(b.delta).epsilon(1e-12));
            CHECK(a.r == doctest::Approx(b.r).epsilon(1e-12));
            CHECK(a.sigma2 > 0.0);
            CHECK(a.sigma2 <= 1.0);
            CHECK(min_eigenvalue(a.sigma) > 0.0);
        }
    }
}

TEST_CASE("batched thresholds equal single evaluations") {
    const auto ctx = bernoulli(4, 20.0);
    const auto snap = ctx.snapshot({0.3, 0.45});
    const std::vector<double> xs{2.0, 2.7, 3.4};
    std::vector<LocalFunctionals> many;
    local_functionals_many(snap, ctx.family(), xs, many);
    REQUIRE(many.size() == 3);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto one = local_functionals(snap, ctx.family(), xs[i]);
        CHECK(many[i].delta == one.delta);
        CHECK(many[i].r == one.r);
        CHECK(many[i].sigma2 == one.sigma2);
    }
}

TEST_CASE("invalid thresholds") {
    const auto ctx = bernoulli(2, 10.0);
    CHECK_THROWS_AS(local_functionals(ctx, {0.5, 0.5}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(local_functionals(ctx, {0.5, 0.5}, -1.0), std::invalid_argument);
}

TEST_CASE("Monte Carlo covariance of the gradient is Lambda") {
    const auto ctx = bernoulli(3, 10.0);
    const Vec2 t{0.4, 0.6};
    const double h = 1e-5;
    // beta at the four stencil points, so each sample costs four dot products.
    std::vector<std::vector<double>> stencil;
    for (const Vec2 s : {Vec2{t[0] + h, t[1]}, Vec2{t[0] - h, t[1]}, Vec2{t[0], t[1] + h}, Vec2{t[0], t[1] - h}}) {
        const auto snap = ctx.snapshot(s);
        std::vector<double> b(snap.size());
        for (std::size_t u = 0; u < b.size(); ++u) b[u] = snap.beta(u);
        stencil.push_back(b);
    }
    const int N = 100000;
    double s00 = 0, s01 = 0, s11 = 0, q00 = 0, q01 = 0, q11 = 0;
    std::vector<double> w;
    for (int i = 0; i < N; ++i) {
        sample_field(ctx.family(), ctx.size(), 77, i, w);
        double z[4] = {0, 0, 0, 0};
        for (int k = 0; k < 4; ++k)
            for (std::size_t u = 0; u < w.size(); ++u) z[k] += stencil[k][u] * w[u];
        const double g0 = (z[0] - z[1]) / (2 * h), g1 = (z[2] - z[3]) / (2 * h);
        s00 += g0 * g0;
        s01 += g0 * g1;
        s11 += g1 * g1;
        q00 += g0 * g0 * g0 * g0;
        q01 += g0 * g0 * g1 * g1;
        q11 += g1 * g1 * g1 * g1;
    }
    const Mat2 lambda = lambda_matrix(ctx, t);
    auto within = [N](double sum, double sq, double target) {
        const double mean = sum / N;
        const double se = std::sqrt((sq / N - mean * mean) / N);
        return std::abs(mean - target) <= 3 * se;
    };
    CHECK(within(s00, q00, lambda.xx));
    CHECK(within(s01, q01, lambda.xy));
    CHECK(within(s11, q11, lambda.yy));
}

}  // TEST_SUITE
