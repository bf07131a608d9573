#include <catch_amalgamated.hpp>
#include <cordes/rieffel.hpp>

using namespace cordes;

namespace {

FiberSet SC;
json gauss(double w) { return {{"type", "gaussian"}, {"width", w}}; }

}  // namespace

TEST_CASE("skew matrices") {
    Mat2 J;
    J << 0, 1, 1, 0;
    CHECK_THROWS_AS(SkewMatrix(2, J), std::invalid_argument);
    CHECK_NOTHROW(SkewMatrix(2, standard_J()));
}

TEST_CASE("n = 1 operators are commuting multiplications") {
    Grid g = make_grid(1, 64, 8);
    SkewMatrix J(1, Mat2::Zero());
    auto L = make_LF(gauss(1.0), J, g, SC);
    auto R = make_RG(gauss(0.7), J, g, SC);
    CMat off = L.mats[0];
    off.diagonal().setZero();
    CHECK(off.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(commutator(L, R).mats[0].cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("R_G is L_G with the opposite matrix") {
    Grid g = balanced_grid(2, 8);
    SkewMatrix J;
    SkewMatrix mJ(2, -standard_J());
    auto R = make_RG(gauss(1.0), J, g, SC);
    auto L = make_LF(gauss(1.0), mJ, g, SC);
    CHECK(R.mats[0] == L.mats[0]);
    CHECK_THROWS_AS(make_LF(gauss(1.0), SkewMatrix(1, Mat2::Zero()), g, SC), std::invalid_argument);
}

TEST_CASE("constant profile gives the identity") {
    Grid g = balanced_grid(2, 8);
    auto L = make_LF(json{{"type", "constant"}, {"value", 1.0}}, SkewMatrix(), g, SC);
    CHECK((L.mats[0] - CMat::Identity(64, 64)).cwiseAbs().maxCoeff() <= 1e-12);
    auto I = ModuleOp::identity(g, SC);
    CHECK(commutant_residual(I, gaussian_G_list({1.0}), SkewMatrix()).residual == 0.0);
}

TEST_CASE("shear operators commute on the balanced grid") {
    Grid g = balanced_grid(2, 16);
    SkewMatrix J;
    auto L = make_LF(gauss(1.0), J, g, SC);
    auto r = commutant_residual(L, gaussian_G_list({0.7, 1.5}), J);
    CHECK(r.per_G.size() == 2);
    CHECK(r.residual <= 1e-3);
    CHECK_THROWS_AS(commutant_residual(L, {}, J), std::invalid_argument);
}

TEST_CASE("residual is symmetric in F and G") {
    Grid g = balanced_grid(2, 16);
    SkewMatrix J;
    json F = gauss(1.0), Gp = {{"type", "gaussian"}, {"width", 1.0}, {"center", 0.3}};
    double a = commutant_residual(make_LF(F, J, g, SC), {Gp}, J).residual;
    double b = commutant_residual(make_LF(Gp, J, g, SC), {F}, J).residual;
    CHECK(std::abs(a - b) <= 1e-8);
}

TEST_CASE("multiplication by a coordinate is outside the commutant") {
    Grid g = balanced_grid(2, 16);
    json x1 = {{"family", "multiplication"}, {"profile", {{"type", "coordinate"}, {"axis", 0}}}, {"allow_unbounded", true}};
    auto A = quantize(sample_family(x1, g, SC));
    CHECK(commutant_residual(A, gaussian_G_list({1.0}), SkewMatrix()).residual >= 0.1);
}

TEST_CASE("default test profile list") {
    auto G = default_G_list();
    CHECK(G.size() == 6);
    CHECK(G[3]["type"] == "hermite");
}
