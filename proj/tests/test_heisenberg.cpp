#include <catch_amalgamated.hpp>
#include <cordes/heisenberg.hpp>

#include <random>

using namespace cordes;

namespace {

Grid G = make_grid(1, 128, 8);
FiberSet SC;

double max_abs(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("translation and modulation on test functions") {
    auto u = embed_scalar(gaussian_fn(G), SC);
    auto t = translate(u, {2 * G.h(), 0});
    double e = 0.0;
    for (int j = 2; j < G.N; ++j) e = std::max(e, std::abs(t.slices[0][j] - u.slices[0][j - 2]));
    CHECK(e == 0.0);

    auto m = modulate(u, {0.5, 0});
    for (int j = 0; j < G.N; ++j) CHECK(std::abs(m.slices[0][j] - std::polar(1.0, 0.5 * G.x(j)) * u.slices[0][j]) <= 1e-15);

    // band-limited shift agrees with the analytic Gaussian
    auto s = translate(u, {0.3, 0});
    double es = 0.0;
    for (int j = 0; j < G.N; ++j) es = std::max(es, std::abs(s.slices[0][j] - std::exp(-0.5 * std::pow(G.x(j) - 0.3, 2))));
    CHECK(es <= 1e-10);
}

TEST_CASE("orbit at the origin is the operator") {
    auto A = random_op(make_grid(1, 32, 4), SC, 3);
    CHECK(max_abs(conjugate(A, {0, 0}, {0, 0}).mats[0] - A.mats[0]) == 0.0);
}

TEST_CASE("covariance of quantization") {
    Symbol a = sample_family(json{{"family", "gaussian"}}, G, SC);
    CHECK(covariance_residual(a, {G.h(), 0}, {G.dxi(), 0}) <= 1e-9);
    json m = {{"family", "multiplier"}, {"profile", {{"type", "gaussian"}}}};
    Symbol b = sample_family(m, G, SC);
    auto B = quantize(b);
    CHECK(max_abs(conjugate(B, {5 * G.h(), 0}, {0, 0}).mats[0] - B.mats[0]) <= 1e-10);
    CHECK_THROWS_AS(covariance_residual(strip_family(a), {G.h() / 3, 0}, {0, 0}), std::invalid_argument);
}

TEST_CASE("unitarity of the action") {
    Grid g = make_grid(1, 32, 4);
    auto A = random_op(g, SC, 21);
    double n0 = op_norm(A);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int i = 0; i < 10; ++i) {
        Vec2 z{U(rng), 0}, ze{U(rng), 0};
        CHECK(std::abs(op_norm(conjugate(A, z, ze)) - n0) <= 1e-6);
    }
}

TEST_CASE("cocycle identity") {
    Grid g = make_grid(1, 32, 4);
    auto A = random_op(g, SC, 8);
    Vec2 z{3 * g.h(), 0}, ze{-2 * g.dxi(), 0};
    auto lhs = conjugate(A, z, ze);
    auto rhs = conjugate(conjugate(A, z, {0, 0}), {0, 0}, ze);
    CHECK(max_abs(lhs.mats[0] - rhs.mats[0]) <= 1e-10);
}

TEST_CASE("stencil realizes (1 + d)^2") {
    OrbitStencil st{0.5, 2};
    auto c = st.coefficients(0.5);
    double sum = 0.0;
    for (auto& [o, v] : c) sum += v;
    CHECK(sum == Catch::Approx(1.0));
    OrbitStencil st4{0.5, 4};
    auto c4 = st4.coefficients(0.5);
    double s4 = 0.0, m1 = 0.0;
    for (auto& [o, v] : c4) {
        s4 += v;
        m1 += v * o * 0.5;
    }
    CHECK(s4 == Catch::Approx(1.0));
    CHECK(m1 == Catch::Approx(2.0));
}

TEST_CASE("orbit derivative of the identity") {
    Grid g = make_grid(1, 32, 4);
    auto I = ModuleOp::identity(g, SC);
    auto B = orbit_b(I, {0, 0}, {0, 0});
    CHECK(max_abs(B.mats[0] - I.mats[0]) <= 1e-12);
    auto rep = smoothness_probe(I);
    CHECK_FALSE(rep.flag_raised());
    for (auto& r : rep.rows) CHECK(r.norm_d <= 1e-12);
}

TEST_CASE("orbit derivative matches the smoothing image") {
    Symbol a = sample_family(json{{"family", "gaussian"}}, G, SC);
    auto lhs = orbit_b(quantize(a), {0, 0}, {0, 0});
    auto rhs = quantize(smoothing_image(a));
    CHECK(max_abs(lhs.mats[0] - rhs.mats[0]) <= 1e-3);
    CHECK_THROWS_AS(orbit_b(quantize(a), {0, 0}, {0, 0}, OrbitStencil{1e-7, 2}), std::invalid_argument);
}

TEST_CASE("second-order stencil converges at rate four") {
    Symbol a = sample_family(json{{"family", "gaussian"}}, G, SC);
    auto A = quantize(a);
    auto exact = quantize(smoothing_image(a)).mats[0];
    double e1 = max_abs(orbit_b(A, {0, 0}, {0, 0}, OrbitStencil{4 * G.h(), 2}).mats[0] - exact);
    double e2 = max_abs(orbit_b(A, {0, 0}, {0, 0}, OrbitStencil{2 * G.h(), 2}).mats[0] - exact);
    CHECK(e1 / e2 == Catch::Approx(4.0).margin(0.5));
}

TEST_CASE("smoothness probe") {
    auto smooth = smoothness_probe(quantize(sample_family(json{{"family", "gaussian"}}, G, SC)));
    CHECK(smooth.consistent(1));
    CHECK(smooth.consistent(2));
    json rough = {{"family", "multiplication"}, {"profile", {{"type", "sigmoid"}, {"width", 0.05}}}};
    auto flagged = smoothness_probe(quantize(sample_family(rough, G, SC)));
    CHECK(flagged.flag_raised());
    CHECK_FALSE(flagged.consistent(1));
}
