#include <catch_amalgamated.hpp>
#include <cordes/grid.hpp>

#include <random>

using namespace cordes;
using Catch::Approx;

namespace {

double max_err(const CVec& a, const CVec& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("grid nodes and spacing") {
    Grid g = make_grid(1, 8, 4);
    CHECK(g.h() == 1.0);
    CHECK(g.x(0) == -4.0);
    CHECK(g.x(7) == 3.0);
    for (int k = 0; k < 8; ++k) CHECK(g.xi(k) == Approx(pi / 4 * (k - 4)));

    Grid g2 = make_grid(2, 16, 8);
    CHECK(g2.size() == 256);
    CHECK(g2.h() == 1.0);

    CHECK_THROWS_AS(make_grid(1, 7, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(3, 8, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1, 8, -1), std::invalid_argument);
}

TEST_CASE("fourier of closed-form functions") {
    Grid g = make_grid(1, 128, 8);
    CVec f(g.N), fx(g.N), want(g.N), want_x(g.N);
    for (int j = 0; j < g.N; ++j) {
        double x = g.x(j), xi = g.xi(j);
        f[j] = std::exp(-0.5 * x * x);
        fx[j] = x * std::exp(-0.5 * x * x);
        want[j] = std::exp(-0.5 * xi * xi);
        want_x[j] = cplx(0, -xi) * std::exp(-0.5 * xi * xi);
    }
    auto fh = fourier(SampledFn(g, f));
    CHECK(fh.side == Side::frequency);
    CHECK(max_err(fh.v, want) <= 1e-10);
    CHECK(max_err(fourier(SampledFn(g, fx)).v, want_x) <= 1e-9);
    CHECK(fourier(SampledFn(g, CVec::Zero(g.N))).v.cwiseAbs().maxCoeff() == 0.0);

    CHECK(max_err(inverse_fourier(fh).v, f) <= 1e-12);
    CHECK(max_err(inverse_fourier(SampledFn(g, want, Side::frequency)).v, f) <= 1e-10);
}

TEST_CASE("inverse fourier of a single frequency node") {
    Grid g = make_grid(1, 64, 8);
    int k = 40;
    CVec e = CVec::Zero(g.N);
    e[k] = 1.0 / (g.dxi() / std::sqrt(2 * pi));
    auto r = inverse_fourier(SampledFn(g, e, Side::frequency));
    double err = 0.0;
    for (int j = 0; j < g.N; ++j)
        err = std::max(err, std::abs(r.v[j] - std::polar(1.0, g.x(j) * g.xi(k))));
    CHECK(err <= 1e-12);
}

TEST_CASE("fourier rejects the wrong side") {
    Grid g = make_grid(1, 16, 4);
    SampledFn f(g, CVec::Zero(16), Side::frequency);
    CHECK_THROWS_AS(fourier(f), std::invalid_argument);
    CHECK_THROWS_AS(inverse_fourier(SampledFn(g, CVec::Zero(16))), std::invalid_argument);
}

TEST_CASE("quadrature") {
    Grid g = make_grid(1, 128, 8);
    CVec f(g.N), odd(g.N);
    for (int j = 0; j < g.N; ++j) {
        double x = g.x(j);
        f[j] = std::exp(-x * x);
        odd[j] = x * std::exp(-0.5 * x * x);
    }
    CHECK(std::abs(quad(SampledFn(g, f)) - std::sqrt(pi)) <= 1e-12);
    CHECK(std::abs(quad(SampledFn(g, odd))) <= 1e-13);
    CHECK(quad(SampledFn(g, CVec::Zero(g.N))) == cplx(0.0));
}

TEST_CASE("test functions") {
    Grid g = make_grid(1, 128, 8);
    TestParams p;
    auto f = test_function(TestFamily::gaussian, p, g);
    p.k[0] = 1;
    auto h1 = test_function(TestFamily::hermite, p, g);
    double e0 = 0.0, e1 = 0.0;
    for (int j = 0; j < g.N; ++j) {
        double x = g.x(j);
        e0 = std::max(e0, std::abs(f.v[j] - std::exp(-0.5 * x * x)));
        e1 = std::max(e1, std::abs(h1.v[j] - x * std::exp(-0.5 * x * x)));
    }
    CHECK(e0 == 0.0);
    CHECK(e1 <= 1e-15);

    TestParams edge;
    edge.center[0] = 7.9;
    CHECK_THROWS_AS(test_function(TestFamily::gaussian, edge, g), std::invalid_argument);
    TestParams bad;
    bad.k[0] = 9;
    CHECK_THROWS_AS(test_function(TestFamily::hermite, bad, g), std::invalid_argument);
}

TEST_CASE("two-dimensional transform") {
    Grid g = make_grid(2, 64, 8);
    auto f = gaussian_fn(g);
    auto fh = fourier(f);
    double err = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q) {
        auto k = unflatten(g, q);
        double s = g.xi(k[0]) * g.xi(k[0]) + g.xi(k[1]) * g.xi(k[1]);
        err = std::max(err, std::abs(fh.v[q] - std::exp(-0.5 * s)));
    }
    CHECK(err <= 1e-10);
    CHECK(max_err(inverse_fourier(fh).v, f.v) <= 1e-12);
}

TEST_CASE("unitarity and Parseval on random test functions") {
    Grid g = make_grid(1, 128, 8);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uw(0.5, 0.8), uc(-1, 1), uf(-3, 3);
    for (int i = 0; i < 30; ++i) {
        TestParams p;
        p.width = uw(rng);
        p.center[0] = uc(rng);
        p.freq[0] = uf(rng);
        p.k[0] = i % 5;
        auto f = test_function(TestFamily(i % 3), p, g);
        auto fh = fourier(f);
        CHECK(max_err(inverse_fourier(fh).v, f.v) <= 1e-12);
        double nf = quad(abs2(f)).real();
        CHECK(std::abs(nf - quad_freq(abs2(fh)).real()) <= 1e-10 * nf);
    }
}

TEST_CASE("sampled warns but keeps non-decaying samples") {
    Grid g = make_grid(1, 16, 4);
    auto f = sampled(g, CVec::Ones(16));
    CHECK_FALSE(f.effectively_supported());
    CHECK(gaussian_fn(make_grid(1, 64, 8)).effectively_supported());
}
