#include <catch_amalgamated.hpp>
#include <cordes/recover.hpp>

using namespace cordes;
using Catch::Approx;

namespace {

FiberSet SC;

}  // namespace

TEST_CASE("fundamental solutions") {
    CHECK(gamma1(0.0) == 1.0);
    CHECK(gamma1(-0.5) == 0.0);
    CHECK(gamma1(1.0) == Approx(std::exp(-1.0)));
    CHECK(gamma2(0.0) == 0.0);
    CHECK(gamma2(2.0) == Approx(2 * std::exp(-2.0)));
    CHECK(gamma2(-1.0) == 0.0);
}

TEST_CASE("kernel values") {
    cplx v = kernel_v(1.0, 0.0);
    CHECK(std::abs(v.real()) <= 1e-15);
    CHECK(v.imag() == Approx(-0.1839397206).epsilon(1e-9));
    CHECK(kernel_v(0.0, 1.0) == cplx(0.0));
    CHECK(std::abs(kernel_u(-1.0, 0.0) + std::exp(-1.0)) <= 1e-15);
    CHECK(kernel_u(0.5, -1.0) == cplx(0.0));
    CHECK(kernel_u(-1.0, 0.5) == cplx(0.0));

    double x[2] = {-1.0, -1.0}, eta[2] = {0.0, 0.0};
    CHECK(std::abs(kernel_u_n(x, eta, 2) - std::exp(-2.0)) <= 1e-15);
    CHECK_THROWS_AS(kernel_u_n(x, eta, 3), std::invalid_argument);
}

TEST_CASE("kernel derivative against differences") {
    for (double eta : {-0.3, -1.7}) {
        double x = -0.8, d = 1e-6;
        cplx fd = (kernel_u(x + d, eta) - kernel_u(x - d, eta)) / (2 * d);
        CHECK(std::abs(fd - kernel_u_dx(x, eta)) <= 1e-8);
    }
}

TEST_CASE("recovery parameter validation") {
    RecoveryParams p;
    p.T = 8;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.coarse = true;
    CHECK_NOTHROW(p.validate());
    p.Qx = 7;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    CHECK_THROWS_AS(recovery_params_from_json(json{{"stencil_order", 3}}), std::invalid_argument);
}

TEST_CASE("direct reconstruction of constant and gaussian symbols") {
    Grid g = make_grid(1, 64, 8);
    RecoveryParams p;
    for (double z : {0.0, 0.5}) {
        Symbol one = sample_family(json{{"family", "constant"}}, g, SC);
        CHECK(std::abs(reconstruct_from_b(smoothing_image(one), z, -0.5, p)[0] - 1.0) <= 1e-3);
        Symbol a = sample_family(json{{"family", "gaussian"}}, g, SC);
        cplx want = std::exp(-0.5 * (z * z + 0.25));
        CHECK(std::abs(reconstruct_from_b(smoothing_image(a), z, -0.5, p)[0] - want) <= 1e-3);
    }
    Symbol zero = sample_family(json{{"family", "constant"}, {"value", 0.0}}, g, SC);
    CHECK(reconstruct_from_b(smoothing_image(zero), 0.0, 0.0, p)[0] == cplx(0.0));
    CHECK_THROWS_AS(reconstruct_from_b(strip_family(zero), 0.0, 0.0, p), std::invalid_argument);
}

TEST_CASE("operator path recovers quantized symbols") {
    Grid g = make_grid(1, 256, 16);
    RecoveryParams p;
    Symbol a = sample_family(json{{"family", "gaussian"}}, g, SC);
    auto r = recover_symbol(quantize(a), {{{0, 0}, {0, 0}}, {{0.5, 0}, {-0.5, 0}}}, p);
    CHECK(std::abs(r.values[0][0] - 1.0) <= 1e-2);
    CHECK(std::abs(r.values[1][0] - std::exp(-0.25)) <= 1e-2);

    auto zr = recover_symbol(ModuleOp::zero(g, SC), {{{0, 0}, {0, 0}}}, p);
    CHECK(zr.values[0][0] == cplx(0.0));

    CHECK_THROWS_AS(recover_symbol(random_op(g, SC, 1), {{{0, 0}, {0, 0}}}, p), std::invalid_argument);
    RecoveryParams ex = p;
    ex.experimental = true;
    CHECK_NOTHROW(recover_symbol(random_op(g, SC, 1), {{{0, 0}, {0, 0}}}, ex));
}

TEST_CASE("recovery is linear in the operator") {
    Grid g = make_grid(1, 128, 16);
    RecoveryParams p;
    p.experimental = true;
    auto k = RecoveryKernel::build(g, p);
    auto A = quantize(sample_family(json{{"family", "gaussian"}}, g, SC));
    auto B = quantize(sample_family(json{{"family", "trig"}, {"theta", 1.0}}, g, SC));
    cplx al(2.0, 1.0), be(-0.5, 0.0);
    std::vector<RecoveryPoint> pt{{{0.5, 0}, {0, 0}}};
    auto sa = recover_symbol(A, pt, p, k).values[0][0];
    auto sb = recover_symbol(B, pt, p, k).values[0][0];
    auto sc = recover_symbol(linear_combination(al, A, be, B), pt, p, k).values[0][0];
    CHECK(std::abs(sc - (al * sa + be * sb)) <= 1e-12);
}

TEST_CASE("sliced and trace forms agree") {
    Grid g = make_grid(1, 128, 16);
    RecoveryParams p;
    p.kink_corrections = false;
    auto k = RecoveryKernel::build(g, p);
    auto A = quantize(sample_family(json{{"family", "gaussian"}}, g, SC));
    CMat B = orbit_b_matrix(g, A.mats[0], {0, 0}, {0, 0}, OrbitStencil{});
    CHECK(std::abs(recover_sliced(B, *k) - k->pair(B)) <= 1e-10);
}

TEST_CASE("kernel requires a wide enough grid") {
    RecoveryParams p;
    CHECK_THROWS_AS(RecoveryKernel::build(make_grid(1, 64, 8), p), std::invalid_argument);
}

TEST_CASE("roundtrip report rows") {
    Grid g = make_grid(1, 256, 16);
    RecoveryParams p;
    Symbol a = sample_family(json{{"family", "gaussian"}, {"amplitudes", {1, 2}}}, g, FiberSet::numbered(2));
    auto rows = roundtrip_report(a, {{{0, 0}, {0, 0}}}, p);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].path == "operator");
    CHECK(rows[2].path == "direct");
    CHECK(std::abs(rows[1].S - 2.0 * rows[0].S) <= 1e-12);
    for (auto& r : rows) CHECK(r.err <= 2e-2);
}
