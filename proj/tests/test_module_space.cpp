#include <catch_amalgamated.hpp>
#include <cordes/module_space.hpp>

#include <random>

using namespace cordes;
using Catch::Approx;

namespace {

Grid G = make_grid(1, 128, 8);

ModuleVec slices(const SampledFn& u, std::vector<double> c) {
    FiberSet f = FiberSet::numbered(int(c.size()));
    std::vector<CVec> s;
    for (double v : c) s.push_back(v * u.v);
    return ModuleVec(f, u.grid, s);
}

}  // namespace

TEST_CASE("fiber labels") {
    FiberSet f = FiberSet::numbered(3);
    CHECK(f.m() == 3);
    CHECK(f.index("l2") == 1);
    CHECK_THROWS_AS(f.index("missing"), std::invalid_argument);
    CHECK_THROWS_AS(FiberSet({"a", "a"}), std::invalid_argument);
    CHECK_THROWS_AS(FiberSet(std::vector<std::string>{}), std::invalid_argument);
    CHECK(FiberSet::scalar().m() == 1);
}

TEST_CASE("C-valued inner product") {
    auto u = gaussian_fn(G);
    FiberSet f3 = FiberSet::numbered(3);
    auto e = embed_scalar(u, f3);
    for (cplx v : cstar_inner(e, e)) CHECK(std::abs(v - std::sqrt(pi)) <= 1e-12);

    TestParams p;
    p.k[0] = 1;
    auto xe = embed_scalar(test_function(TestFamily::hermite, p, G), f3);
    for (cplx v : cstar_inner(e, xe)) CHECK(std::abs(v) <= 1e-14);

    auto s = slices(u, {1, 2, 0});
    auto ip = cstar_inner(s, s);
    CHECK(std::abs(ip[0] - std::sqrt(pi)) <= 1e-12);
    CHECK(std::abs(ip[1] - 4 * std::sqrt(pi)) <= 1e-12);
    CHECK(std::abs(ip[2]) == 0.0);

    CHECK_THROWS_AS(cstar_inner(e, embed_scalar(u, FiberSet::numbered(2))), std::invalid_argument);
}

TEST_CASE("module norm is the largest fiber norm") {
    auto u = gaussian_fn(G);
    CHECK(module_norm(slices(u, {1, 2, 0})) == Approx(2 * std::pow(pi, 0.25)).epsilon(1e-12));
    CHECK(module_norm(embed_scalar(u, FiberSet::numbered(5))) == Approx(std::pow(pi, 0.25)).epsilon(1e-12));
    CHECK(module_norm(ModuleVec::zero(FiberSet::numbered(2), G)) == 0.0);
}

TEST_CASE("embedding and fiber evaluation") {
    auto u = gaussian_fn(G);
    auto e = embed_scalar(u, FiberSet::numbered(3));
    for (auto& s : e.slices) CHECK(s == u.v);
    auto z = embed_scalar(SampledFn(G, CVec::Zero(G.N)), FiberSet::numbered(3));
    CHECK(module_norm(z) == 0.0);

    auto s = slices(u, {1, 2, 0});
    CHECK(eval_fiber(s, "l2").v == 2.0 * u.v);
    for (auto& l : e.fibers.labels) CHECK(eval_fiber(e, l).v == u.v);
    CHECK_THROWS_AS(eval_fiber(s, "missing"), std::invalid_argument);
}

TEST_CASE("tensor product of module vectors") {
    Grid g = make_grid(1, 32, 8);
    auto u = gaussian_fn(g);
    FiberSet f = FiberSet::numbered(2);
    auto t = tensor(embed_scalar(u, f), embed_scalar(u, f));
    CHECK(t.grid.n == 2);
    auto want = gaussian_fn(make_grid(2, 32, 8));
    for (auto& s : t.slices) CHECK((s - want.v).cwiseAbs().maxCoeff() <= 1e-15);
    auto zero = tensor(embed_scalar(u, f), ModuleVec::zero(f, g));
    CHECK(module_norm(zero) == 0.0);
}

TEST_CASE("Cauchy-Schwarz per fiber") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    FiberSet f = FiberSet::numbered(3);
    for (int r = 0; r < 20; ++r) {
        std::vector<CVec> a, b;
        for (int l = 0; l < 3; ++l) {
            CVec x(G.N), y(G.N);
            for (int j = 0; j < G.N; ++j) {
                x[j] = cplx(nd(rng), nd(rng));
                y[j] = cplx(nd(rng), nd(rng));
            }
            a.push_back(x);
            b.push_back(y);
        }
        ModuleVec F(f, G, a), H(f, G, b);
        auto fg = cstar_inner(F, H), ff = cstar_inner(F, F), hh = cstar_inner(H, H);
        for (int l = 0; l < 3; ++l) CHECK(std::norm(fg[l]) <= ff[l].real() * hh[l].real() + 1e-12);
    }
}
