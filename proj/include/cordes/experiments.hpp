#pragma once

#include "harness.hpp"

#include <Eigen/SVD>

namespace cordes {

struct Experiment {
    std::string name;
    int criterion = 0;
    std::string runtime;  // expected wall time at the default config
    std::string summary;
    json defaults;
    std::function<Outcome(const json&, const RunContext&, bool dry)> run;

    std::vector<std::string> keys() const {
        std::vector<std::string> k;
        for (auto& [key, v] : defaults.items()) k.push_back(key);
        return k;
    }
};

namespace xp {

inline json nine_points() {
    json a = json::array();
    for (double z : {-0.5, 0.0, 0.5})
        for (double ze : {-0.5, 0.0, 0.5}) a.push_back({z, ze});
    return a;
}

inline const json& at(const json& c, const char* key) { return cfg::need(c, key, ""); }

inline json grid_spec(int n, int N, double L) { return {{"n", n}, {"N", N}, {"L", L}}; }

inline void recover_row(Table& t, const std::string& exp, int n, const std::string& fiber, const RecoveryPoint& pt,
                        cplx S, cplx a, const std::string& phash, double ms, const RunContext& ctx) {
    t.add({exp, std::to_string(n), fiber, vec_tag(pt.z, n), vec_tag(pt.zeta, n), fmt_num(S.real()), fmt_num(S.imag()),
           fmt_num(a.real()), fmt_num(a.imag()), fmt_num(std::abs(S - a)), phash,
           ctx.timing_in_csv ? fmt_num(ms) : "-"});
}

inline double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

inline double max_abs(const CVec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

inline Vec2 scaled(const json& steps, int offset, int n, double unit) {
    Vec2 v{0, 0};
    for (int a = 0; a < n; ++a) v[a] = steps[offset + a].get<int>() * unit;
    return v;
}

// ---- 1 ----
inline Outcome ft_selftest(const json& c, const RunContext& ctx, bool dry) {
    const std::string E = "ft-selftest";
    Grid g = cfg::grid(at(c, "grid"), "grid");
    int count = int(cfg::integer(at(c, "count"), "count", 1, 100000));
    auto seed = unsigned(cfg::integer(at(c, "seed"), "seed", 0, 4294967295L));
    if (dry) return {};

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uw(0.5, 0.8), uc(-1.0, 1.0), uf(-3.0, 3.0);
    std::uniform_int_distribution<int> uk(0, 4);
    std::vector<std::pair<TestFamily, TestParams>> cases(count);
    for (int i = 0; i < count; ++i) {
        auto& [fam, p] = cases[i];
        fam = TestFamily(i % 3);
        p.width = uw(rng);
        for (int a = 0; a < 2; ++a) {
            p.center[a] = uc(rng);
            p.k[a] = uk(rng);
            p.freq[a] = uf(rng);
        }
    }
    std::vector<double> rt(count), pv(count);
    parallel_for(count, ctx.workers, [&](std::size_t i) {
        auto f = test_function(cases[i].first, cases[i].second, g);
        auto fh = fourier(f);
        rt[i] = max_abs(inverse_fourier(fh).v - f.v);
        double nf = quad(abs2(f)).real(), nh = quad_freq(abs2(fh)).real();
        pv[i] = std::abs(nf - nh) / nf;
    });

    Outcome o{generic_table(), {}};
    const char* names[3] = {"gaussian", "hermite", "modulated_gaussian"};
    for (int fam = 0; fam < 3; ++fam) {
        double r = 0.0, p = 0.0;
        for (int i = fam; i < count; i += 3) {
            r = std::max(r, rt[i]);
            p = std::max(p, pv[i]);
        }
        if (fam >= count) continue;
        check(o, E, names[fam], "roundtrip_max_abs", r, "<=", 1e-12);
        check(o, E, names[fam], "parseval_rel", p, "<=", 1e-10);
    }

    auto f = gaussian_fn(g);
    auto fh = fourier(f);
    double self = 0.0;
    double xi[2];
    for (std::size_t q = 0; q < g.size(); ++q) {
        detail::freq_coords(g, q, xi);
        double s = 0.0;
        for (int a = 0; a < g.n; ++a) s += xi[a] * xi[a];
        self = std::max(self, std::abs(fh.v[q] - std::exp(-0.5 * s)));
    }
    check(o, E, "gaussian_self", "max_abs", self, "<=", 1e-10);

    // translation by 3h becomes the phase e^{-i a.xi}; modulation by 2 dxi becomes a shift by two nodes
    TestParams tp;
    for (int a = 0; a < g.n; ++a) tp.center[a] = 3 * g.h();
    auto th = fourier(test_function(TestFamily::gaussian, tp, g));
    double terr = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q) {
        detail::freq_coords(g, q, xi);
        double ph = 0.0;
        for (int a = 0; a < g.n; ++a) ph += 3 * g.h() * xi[a];
        terr = std::max(terr, std::abs(th.v[q] - std::polar(1.0, -ph) * fh.v[q]));
    }
    TestParams mp;
    for (int a = 0; a < g.n; ++a) mp.freq[a] = 2 * g.dxi();
    auto mh = fourier(test_function(TestFamily::modulated_gaussian, mp, g));
    int back[2] = {-2, -2};
    for (std::size_t q = 0; q < g.size(); ++q)
        terr = std::max(terr, std::abs(mh.v[q] - fh.v[detail::shifted_index(g, q, back)]));
    check(o, E, "translation_modulation", "max_abs", terr, "<=", 1e-10);
    return o;
}

// ---- 2 ----
inline Outcome quantize_check(const json& c, const RunContext&, bool dry) {
    const std::string E = "quantize-check";
    Grid g = cfg::grid(at(c, "grid"), "grid");
    if ((g.n == 1 && g.N > 256) || (g.n == 2 && g.N > 32))
        throw SchemaError("grid.N", "too large for the brute-force oracle");
    if (dry) return {};

    FiberSet sc;
    auto u = gaussian_fn(g);
    ModuleVec U = embed_scalar(u, sc);
    auto act = [&](const json& spec) { return apply(quantize(sample_family(spec, g, sc)), U).slices[0]; };
    Outcome o{generic_table(), {}};
    double x[2], xi[2];

    json mprof = {{"type", "gaussian"}, {"width", 1.5}, {"center", 0.3}};
    CVec r = act({{"family", "multiplication"}, {"profile", mprof}});
    Profile mp = profile_from_json(mprof);
    double err = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p) {
        detail::node_coords(g, p, x);
        err = std::max(err, std::abs(r[p] - mp(x, g.n) * u.v[p]));
    }
    check(o, E, "multiplication", "max_abs", err, "<=", 1e-10);

    json fprof = {{"type", "gaussian"}, {"width", 2.0}};
    r = act({{"family", "multiplier"}, {"profile", fprof}});
    Profile fp = profile_from_json(fprof);
    auto rh = fourier(SampledFn(g, r)), uh = fourier(u);
    err = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q) {
        detail::freq_coords(g, q, xi);
        err = std::max(err, std::abs(rh.v[q] - fp(xi, g.n) * uh.v[q]));
    }
    check(o, E, "multiplier", "max_abs", err, "<=", 1e-10);

    r = act({{"family", "constant"}, {"value", 2.5}});
    check(o, E, "constant", "max_abs", max_abs(r - 2.5 * u.v), "<=", 1e-10);

    // e^{i h xi} moves every sample by one node: (Op u)(x) = u(x + h)
    r = act({{"family", "multiplier"}, {"profile", {{"type", "plane_wave"}, {"k", g.h()}}}});
    TestParams sp;
    for (int a = 0; a < g.n; ++a) sp.center[a] = -g.h();
    check(o, E, "grid_step_shift", "max_abs", max_abs(r - test_function(TestFamily::gaussian, sp, g).v), "<=", 1e-10);

    for (json spec : {json{{"family", "gaussian"}}, json{{"family", "trig"}, {"theta", 1.0}}}) {
        Symbol a = sample_family(spec, g, sc);
        CVec fast = apply(quantize(a), U).slices[0];
        CVec slow = direct_apply_oracle(a, U).slices[0];
        check(o, E, spec_tag(spec), "oracle_max_abs", max_abs(fast - slow), "<=", 1e-10);
    }
    return o;
}

// ---- 3 ----
inline Outcome covariance(const json& c, const RunContext& ctx, bool dry) {
    const std::string E = "covariance";
    Grid g = cfg::grid(at(c, "grid"), "grid");
    cfg::symbol(at(c, "symbol"), "symbol", g.n);
    cfg::array(at(c, "shifts"), "shifts");
    for (std::size_t i = 0; i < at(c, "shifts").size(); ++i) {
        std::string p = "shifts[" + std::to_string(i) + "]";
        const json& s = cfg::array(at(c, "shifts")[i], p, 2 * g.n);
        if (s.size() != std::size_t(2 * g.n)) throw SchemaError(p, "needs 2n integers (z steps, zeta steps)");
        for (auto& v : s) cfg::integer(v, p, -g.N / 2, g.N / 2);
    }
    if (dry) return {};

    FiberSet sc;
    Symbol a = sample_family(at(c, "symbol"), g, sc);
    const json& shifts = at(c, "shifts");
    std::vector<double> res(shifts.size());
    parallel_for(shifts.size(), ctx.workers, [&](std::size_t i) {
        res[i] = covariance_residual(a, scaled(shifts[i], 0, g.n, g.h()), scaled(shifts[i], g.n, g.n, g.dxi()));
    });
    Outcome o{generic_table(), {}};
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        std::string cs = "shift(";
        for (std::size_t k = 0; k < shifts[i].size(); ++k) cs += (k ? " " : "") + std::to_string(shifts[i][k].get<int>());
        check(o, E, cs + ")", "residual", res[i], "<=", 1e-9);
    }

    ModuleOp A = quantize(a);
    auto group = [&](const std::string& cs, Vec2 z1, Vec2 k1, Vec2 z2, Vec2 k2) {
        ModuleOp lhs = conjugate(conjugate(A, z1, k1), z2, k2);
        ModuleOp rhs = conjugate(A, {z1[0] + z2[0], z1[1] + z2[1]}, {k1[0] + k2[0], k1[1] + k2[1]});
        check(o, E, cs, "group_residual", op_norm(linear_combination(1.0, lhs, -1.0, rhs)), "<=", 1e-10);
    };
    double h = g.h(), d = g.dxi();
    group("aligned", {2 * h, g.n == 2 ? -h : 0.0}, {d, g.n == 2 ? 2 * d : 0.0}, {-5 * h, 0.0}, {3 * d, g.n == 2 ? -d : 0.0});
    group("off_grid_translation", {0.3, 0.0}, {0.0, 0.0}, {0.41, 0.0}, {0.0, 0.0});
    return o;
}

// ---- 4 ----
inline Outcome reconstruct_identity(const json& c, const RunContext& ctx, bool dry) {
    const std::string E = "reconstruct-identity";
    Grid g = cfg::grid(at(c, "grid"), "grid");
    if (g.n != 1) throw SchemaError("grid.n", "the direct reconstruction path is one-dimensional");
    cfg::array(at(c, "symbols"), "symbols");
    for (std::size_t i = 0; i < at(c, "symbols").size(); ++i)
        cfg::symbol(at(c, "symbols")[i], "symbols[" + std::to_string(i) + "]", 1);
    auto pts = cfg::points(at(c, "points"), "points", 1);
    RecoveryParams p = cfg::recovery(at(c, "recovery"), "recovery");
    int refine = int(cfg::integer(at(c, "refine"), "refine", 2, 8));
    double tol = cfg::positive(at(c, "tolerance"), "tolerance");
    double ratio_min = cfg::positive(at(c, "ratio_min"), "ratio_min");
    if (dry) return {};

    RecoveryParams p2 = p;
    p2.Qx *= refine;
    p2.Qxi *= refine;
    p2.Qeta *= refine;
    Outcome o{recover_table(), {}};
    FiberSet sc;
    for (auto& spec : at(c, "symbols")) {
        std::string tag = spec_tag(spec);
        Symbol a = sample_family(spec, g, sc);
        Symbol b = smoothing_image(a);
        std::size_t P = pts.size();
        std::vector<cplx> val(2 * P);
        std::vector<double> ms(2 * P);
        parallel_for(2 * P, ctx.workers, [&](std::size_t i) {
            auto t0 = std::chrono::steady_clock::now();
            const auto& pt = pts[i % P];
            val[i] = reconstruct_from_b(b, pt.z[0], pt.zeta[0], i < P ? p : p2)[0];
            ms[i] = elapsed_ms(t0);
        });
        double err[2] = {0.0, 0.0};
        for (int lev = 0; lev < 2; ++lev) {
            const RecoveryParams& pp = lev ? p2 : p;
            std::string ph = hash_hex(pp.to_json().dump());
            std::string exp = E + ":" + tag + ":direct:Q=" + std::to_string(pp.Qx);
            for (std::size_t i = 0; i < P; ++i) {
                cplx truth = (*a.family)(pts[i].z.data(), pts[i].zeta.data(), 1, 0);
                err[lev] = std::max(err[lev], std::abs(val[lev * P + i] - truth));
                recover_row(o.table, exp, 1, sc.labels[0], pts[i], val[lev * P + i], truth, ph, ms[lev * P + i], ctx);
            }
        }
        expect(o, tag + ":max_err:Q=" + std::to_string(p.Qx), err[0], "<=", tol);
        expect(o, tag + ":refinement_ratio", err[1] > 0.0 ? err[0] / err[1] : INFINITY, ">=", ratio_min);
    }
    return o;
}

// ---- 5 ----
struct Level {
    int N;
    double L;
    int Q;
};

inline std::vector<Level> levels(const json& j, const std::string& path, int n) {
    std::vector<Level> out;
    cfg::array(j, path);
    for (std::size_t i = 0; i < j.size(); ++i) {
        std::string p = path + "[" + std::to_string(i) + "]";
        if (!j[i].is_object()) throw SchemaError(p, "must be an object with N, L, Q");
        Level lv;
        lv.N = cfg::even_size(cfg::need(j[i], "N", p + "."), p + ".N", n);
        lv.L = cfg::positive(cfg::need(j[i], "L", p + "."), p + ".L");
        lv.Q = int(cfg::integer(cfg::need(j[i], "Q", p + "."), p + ".Q", 2, 100000));
        out.push_back(lv);
    }
    return out;
}

inline Outcome roundtrip(const json& c, const RunContext& ctx, bool dry) {
    const std::string E = "roundtrip";
    cfg::array(at(c, "symbols"), "symbols");
    for (std::size_t i = 0; i < at(c, "symbols").size(); ++i)
        cfg::symbol(at(c, "symbols")[i], "symbols[" + std::to_string(i) + "]", 1);
    auto lv = levels(at(c, "levels"), "levels", 1);
    int ref = int(cfg::integer(at(c, "reference"), "reference", 0, long(lv.size()) - 1));
    auto pts = cfg::points(at(c, "points"), "points", 1);
    RecoveryParams base = cfg::recovery(at(c, "recovery"), "recovery");
    std::vector<double> amps;
    if (c.contains("amplitudes") && !c.at("amplitudes").is_null()) {
        cfg::array(at(c, "amplitudes"), "amplitudes", 2);
        for (std::size_t i = 0; i < at(c, "amplitudes").size(); ++i) {
            amps.push_back(cfg::number(at(c, "amplitudes")[i], "amplitudes[" + std::to_string(i) + "]"));
            if (amps.back() == 0.0) throw SchemaError("amplitudes[" + std::to_string(i) + "]", "must be nonzero");
        }
    }
    cfg::boolean(at(c, "direct"), "direct");
    bool direct = at(c, "direct").get<bool>();
    double tol = cfg::positive(at(c, "tolerance"), "tolerance");
    double ratio_tol = cfg::positive(at(c, "ratio_tolerance"), "ratio_tolerance");
    if (dry) return {};

    struct Job {
        std::size_t sym;
        int level;
        bool fibered;
    };
    std::vector<Job> jobs;
    for (std::size_t s = 0; s < at(c, "symbols").size(); ++s) {
        for (int k = 0; k < int(lv.size()); ++k) jobs.push_back({s, k, false});
        if (!amps.empty()) jobs.push_back({s, ref, true});
    }
    auto params_at = [&](const Level& l) {
        RecoveryParams p = base;
        p.Qx = p.Qxi = p.Qeta = l.Q;
        p.validate();
        return p;
    };
    std::vector<std::vector<RoundtripRow>> out(jobs.size());
    std::vector<double> ms(jobs.size());
    parallel_for(jobs.size(), ctx.workers, [&](std::size_t i) {
        auto t0 = std::chrono::steady_clock::now();
        const Job& jb = jobs[i];
        const Level& l = lv[jb.level];
        json spec = at(c, "symbols")[jb.sym];
        FiberSet f;
        if (jb.fibered) {
            spec["amplitudes"] = amps;
            f = FiberSet::numbered(int(amps.size()));
        }
        Symbol a = sample_family(spec, make_grid(1, l.N, l.L), f);
        out[i] = roundtrip_report(a, pts, params_at(l), direct);
        ms[i] = elapsed_ms(t0);
    });

    Outcome o{recover_table(), {}};
    std::vector<std::vector<double>> err(at(c, "symbols").size(), std::vector<double>(lv.size(), 0.0));
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const Job& jb = jobs[i];
        const Level& l = lv[jb.level];
        RecoveryParams p = params_at(l);
        std::string tag = spec_tag(at(c, "symbols")[jb.sym]);
        std::string ph = hash_hex(p.to_json().dump() + "N=" + std::to_string(l.N) + " L=" + fmt_num(l.L));
        FiberSet f = jb.fibered ? FiberSet::numbered(int(amps.size())) : FiberSet();
        double per_point_ms = ms[i] / double(out[i].size());
        double worst = 0.0;
        for (auto& r : out[i]) {
            std::string exp = E + ":" + tag + ":" + r.path + ":N=" + std::to_string(l.N) + ":m=" + std::to_string(f.m());
            recover_row(o.table, exp, 1, f.labels[r.fiber], r.point, r.S, r.a, ph, per_point_ms, ctx);
            if (r.path == "operator") worst = std::max(worst, r.err);
        }
        if (!jb.fibered) {
            err[jb.sym][jb.level] = worst;
            if (jb.level == ref) expect(o, tag + ":m=1:max_err", worst, "<=", tol);
        } else {
            expect(o, tag + ":m=" + std::to_string(f.m()) + ":max_err", worst, "<=", tol);
            // S_l / S_1 against amp_l / amp_1 wherever the first fiber is not tiny
            double dev = 0.0;
            for (std::size_t k = 0; k < out[i].size(); k += amps.size()) {
                if (out[i][k].path != "operator" || std::abs(out[i][k].S) < 1e-2) continue;
                for (std::size_t l2 = 1; l2 < amps.size(); ++l2) {
                    double want = amps[l2] / amps[0];
                    dev = std::max(dev, std::abs(out[i][k + l2].S / out[i][k].S - want) / std::abs(want));
                }
            }
            expect(o, tag + ":fiber_ratio_dev", dev, "<=", ratio_tol);
        }
    }
    for (std::size_t s = 0; s < err.size(); ++s)
        for (std::size_t k = 1; k < lv.size(); ++k)
            expect(o,
                   spec_tag(at(c, "symbols")[s]) + ":refine N=" + std::to_string(lv[k - 1].N) + "->" + std::to_string(lv[k].N),
                   err[s][k] / err[s][k - 1], "<", 1.0);
    return o;
}

// ---- 6 ----
inline Outcome cv_bound(const json& c, const RunContext& ctx, bool dry) {
    const std::string E = "cv-bound";
    Grid g = cfg::grid(at(c, "grid"), "grid");
    cfg::array(at(c, "thetas"), "thetas");
    std::vector<double> th;
    for (std::size_t i = 0; i < at(c, "thetas").size(); ++i) {
        std::string p = "thetas[" + std::to_string(i) + "]";
        th.push_back(cfg::positive(at(c, "thetas")[i], p));
        if (!is_multiple(th.back(), g.h())) throw SchemaError(p, "must be a multiple of the grid step (resonant)");
    }
    double ratio_max = cfg::positive(at(c, "ratio_max"), "ratio_max");
    double spread_max = cfg::positive(at(c, "spread_max"), "spread_max");
    if (dry) return {};

    std::vector<CvReport> rep(th.size());
    parallel_for(th.size(), ctx.workers, [&](std::size_t i) {
        rep[i] = cv_bound_report(sample_family(json{{"family", "trig"}, {"theta", th[i]}}, g, FiberSet()));
    });
    Outcome o{generic_table(), {}};
    double lo = INFINITY, hi = 0.0;
    for (std::size_t i = 0; i < th.size(); ++i) {
        std::string cs = "theta=" + short_num(th[i]);
        measure(o, E, cs, "op_norm", rep[i].norm);
        measure(o, E, cs, "seminorm", rep[i].seminorm);
        check(o, E, cs, "ratio", rep[i].ratio, "<=", ratio_max);
        lo = std::min(lo, rep[i].ratio);
        hi = std::max(hi, rep[i].ratio);
    }
    check(o, E, "all", "ratio_spread", hi / lo, "<=", spread_max);
    return o;
}

// ---- 7 ----
inline Outcome fibers(const json& c, const RunContext&, bool dry) {
    const std::string E = "fibers";
    Grid g = cfg::grid(at(c, "grid"), "grid");
    cfg::array(at(c, "slice_norms"), "slice_norms", 1);
    std::vector<double> sn;
    for (std::size_t i = 0; i < at(c, "slice_norms").size(); ++i)
        sn.push_back(cfg::positive(at(c, "slice_norms")[i], "slice_norms[" + std::to_string(i) + "]"));
    int count = int(cfg::integer(at(c, "count"), "count", 1, 10000));
    auto seed = unsigned(cfg::integer(at(c, "seed"), "seed", 0, 4294967295L));
    if (dry) return {};

    Outcome o{generic_table(), {}};
    const int m = int(sn.size());
    FiberSet f = FiberSet::numbered(m);
    auto top = [](const CMat& M) { return Eigen::JacobiSVD<CMat>(M).singularValues()(0); };

    ModuleOp D = random_op(g, f, seed);
    for (int l = 0; l < m; ++l) D.mats[l] *= sn[l] / top(D.mats[l]);
    double want = *std::max_element(sn.begin(), sn.end());
    double got = op_norm(D);
    measure(o, E, "prescribed_slices", "module_norm", got);
    check(o, E, "prescribed_slices", "abs_dev", std::abs(got - want), "<=", 1e-8);

    ModuleOp T = random_op(g, f, seed + 1);
    const Eigen::Index S = Eigen::Index(g.size());
    CMat block = CMat::Zero(m * S, m * S);
    for (int l = 0; l < m; ++l) block.block(l * S, l * S, S, S) = T.mats[l];
    double svd = top(block), pw = op_norm(T);
    measure(o, E, "block_svd", "module_norm", pw);
    measure(o, E, "block_svd", "svd_norm", svd);
    check(o, E, "block_svd", "abs_dev", std::abs(pw - svd), "<=", 1e-8);

    // a vector vanishing on fiber l is mapped to one vanishing on fiber l
    double leak = 0.0;
    for (int r = 0; r < count; ++r) {
        ModuleOp R = random_op(g, f, seed + 100 + r);
        ModuleVec x = random_vec(g, f, seed + 1000 + r);
        int lam = r % m;
        x.slices[lam].setZero();
        leak = std::max(leak, max_abs(apply(R, x).slices[lam]));
    }
    check(o, E, "vanishing_fiber", "max_abs", leak, "==", 0.0);
    return o;
}

// ---- 8 ----
inline Outcome commutant(const json& c, const RunContext& ctx, bool dry) {
    const std::string E = "commutant";
    cfg::array(at(c, "sizes"), "sizes");
    std::vector<int> sizes;
    for (std::size_t i = 0; i < at(c, "sizes").size(); ++i)
        sizes.push_back(cfg::even_size(at(c, "sizes")[i], "sizes[" + std::to_string(i) + "]", 2));
    int refN = cfg::even_size(at(c, "reference_N"), "reference_N", 2);
    if (std::find(sizes.begin(), sizes.end(), refN) == sizes.end())
        throw SchemaError("reference_N", "must be one of sizes");
    SkewMatrix J = cfg::skew(at(c, "J"), "J", 2);
    cfg::profile(at(c, "F"), "F");
    cfg::array(at(c, "G_list"), "G_list");
    for (std::size_t i = 0; i < at(c, "G_list").size(); ++i) cfg::profile(at(c, "G_list")[i], "G_list[" + std::to_string(i) + "]");
    cfg::symbol(at(c, "negative_control"), "negative_control", 2);
    double tol = cfg::positive(at(c, "tolerance"), "tolerance");
    double control_min = cfg::positive(at(c, "control_min"), "control_min");
    if (dry) return {};

    std::vector<json> Gs = at(c, "G_list").get<std::vector<json>>();
    FiberSet sc;
    Outcome o{rieffel_table(), {}};
    auto sweep = [&](const ModuleOp& A, const std::string& F_tag, int N, const std::string& flags) {
        std::vector<double> r(Gs.size());
        parallel_for(Gs.size(), ctx.workers, [&](std::size_t i) { r[i] = commutant_residual(A, {Gs[i]}, J).residual; });
        double worst = 0.0;
        for (std::size_t i = 0; i < Gs.size(); ++i) {
            worst = std::max(worst, r[i]);
            o.table.add({E, "2", std::to_string(N), skew_tag(J), F_tag, spec_tag(Gs[i]), fmt_num(r[i]), "-", flags});
        }
        o.table.add({E, "2", std::to_string(N), skew_tag(J), F_tag, "max", fmt_num(worst), "-", flags});
        return worst;
    };
    std::vector<double> res;
    for (int N : sizes) {
        Grid g = balanced_grid(2, N);
        res.push_back(sweep(make_LF(at(c, "F"), J, g, sc), spec_tag(at(c, "F")), N, ""));
        if (ctx.progress) *ctx.progress << "commutant: N=" << N << " residual " << res.back() << "\n";
    }
    std::size_t ri = std::find(sizes.begin(), sizes.end(), refN) - sizes.begin();
    expect(o, "residual N=" + std::to_string(refN), res[ri], "<=", tol);
    for (std::size_t k = 1; k < sizes.size(); ++k)
        expect(o, "decrease N=" + std::to_string(sizes[k - 1]) + "->" + std::to_string(sizes[k]), res[k] / res[k - 1],
               "<", 1.0);
    Grid g = balanced_grid(2, refN);
    double neg = sweep(quantize(sample_family(at(c, "negative_control"), g, sc)), spec_tag(at(c, "negative_control")), refN,
                       "negative-control");
    expect(o, "negative control N=" + std::to_string(refN), neg, ">=", control_min);
    return o;
}

// ---- 9 ----
inline Outcome conjecture_demo_run(const json& c, const RunContext& ctx, bool dry) {
    const std::string E = "conjecture-demo";
    DemoParams p;
    p.N = cfg::even_size(at(c, "N"), "N", 2);
    SkewMatrix J = cfg::skew(at(c, "J"), "J", 2);
    cfg::profile(at(c, "F"), "F");
    cfg::array(at(c, "G_list"), "G_list");
    for (std::size_t i = 0; i < at(c, "G_list").size(); ++i) cfg::profile(at(c, "G_list")[i], "G_list[" + std::to_string(i) + "]");
    p.G_list = at(c, "G_list").get<std::vector<json>>();
    p.recovery = cfg::recovery(at(c, "recovery"), "recovery", p.recovery);
    cfg::array(at(c, "points"), "points");
    p.points.clear();
    for (std::size_t i = 0; i < at(c, "points").size(); ++i) {
        std::string path = "points[" + std::to_string(i) + "]";
        const json& q = cfg::array(at(c, "points")[i], path, 4);
        if (q.size() != 4) throw SchemaError(path, "needs 4 integers (z1, z2, zeta1, zeta2) in grid steps");
        std::array<int, 4> s;
        for (int k = 0; k < 4; ++k) s[k] = int(cfg::integer(q[k], path, -p.N / 2, p.N / 2));
        p.points.push_back(s);
    }
    cfg::symbol(at(c, "negative_control"), "negative_control", 2);
    p.residual_tol = cfg::positive(at(c, "residual_tol"), "residual_tol");
    p.recovery_tol = cfg::positive(at(c, "recovery_tol"), "recovery_tol");
    double identity_tol = cfg::positive(at(c, "identity_tol"), "identity_tol");
    if (dry) return {};

    Grid g = balanced_grid(2, p.N);
    FiberSet sc;
    Outcome o{rieffel_table(), {}};
    const std::string Nt = std::to_string(p.N), Jt = skew_tag(J);
    auto report = [&](const std::string& cs, const DemoReport& r, const std::string& F_tag) {
        int flags = 0;
        for (auto& row : r.probe.rows) flags += !row.consistent;
        std::string f = cs + "; probe " + (r.smooth ? "consistent" : "flagged") + "; " + r.verdict;
        o.table.add({E, "2", Nt, Jt, F_tag, "max", fmt_num(r.residual), r.recovery_run ? fmt_num(r.max_err) : "-", f});
        for (auto& row : r.rows) {
            std::string pt = "point (" + vec_tag(row.point.z, 2) + ";" + vec_tag(row.point.zeta, 2) + ")";
            o.table.add({E, "2", Nt, Jt, F_tag, "-", "-", fmt_num(row.err), cs + "; " + pt});
        }
        return flags;
    };
    auto stage = [&](const std::string& s) {
        if (ctx.progress) *ctx.progress << "conjecture-demo: " << s << "\n";
    };

    stage("L_F");
    DemoReport main = conjecture_demo(make_LF(at(c, "F"), J, g, sc), at(c, "F"), J, p, ctx.progress);
    int flags = report("L_F", main, spec_tag(at(c, "F")));
    expect(o, "L_F:probe_flags", flags, "==", 0.0);
    expect(o, "L_F:commutant_residual", main.residual, "<=", p.residual_tol);
    expect(o, "L_F:recovery_max_err", main.recovery_run ? main.max_err : INFINITY, "<=", p.recovery_tol);

    stage("identity");
    json one = {{"type", "constant"}, {"value", 1.0}};
    DemoReport id = conjecture_demo(make_LF(one, J, g, sc), one, J, p, ctx.progress);
    report("identity", id, spec_tag(one));
    expect(o, "identity:recovery_max_err", id.recovery_run ? id.max_err : INFINITY, "<=", identity_tol);

    stage("negative control");
    DemoReport neg = conjecture_demo(quantize(sample_family(at(c, "negative_control"), g, sc)), at(c, "F"), J, p, ctx.progress);
    report("negative control", neg, spec_tag(at(c, "negative_control")));
    expect(o, "negative:not_in_commutant", neg.verdict == "not in commutant" ? 1.0 : 0.0, "==", 1.0);
    return o;
}

// ---- 10 ----
inline Outcome convergence(const json& c, const RunContext& ctx, bool dry) {
    const std::string E = "convergence";
    cfg::symbol(at(c, "symbol"), "symbol", 1);
    auto lv = levels(at(c, "levels"), "levels", 1);
    if (lv.size() < 2) throw SchemaError("levels", "needs at least 2 entries");
    auto pts = cfg::points(at(c, "points"), "points", 1);
    RecoveryParams base = cfg::recovery(at(c, "recovery"), "recovery");
    double ratio_min = cfg::positive(at(c, "ratio_min"), "ratio_min");
    if (dry) return {};

    std::vector<double> err(lv.size());
    parallel_for(lv.size(), ctx.workers, [&](std::size_t k) {
        RecoveryParams p = base;
        p.Qx = p.Qxi = p.Qeta = lv[k].Q;
        p.validate();
        Symbol a = sample_family(at(c, "symbol"), make_grid(1, lv[k].N, lv[k].L), FiberSet());
        double e = 0.0;
        for (auto& r : roundtrip_report(a, pts, p, false)) e = std::max(e, r.err);
        err[k] = e;
    });
    Outcome o{generic_table(), {}};
    std::string tag = spec_tag(at(c, "symbol"));
    for (std::size_t k = 0; k < lv.size(); ++k)
        measure(o, E, tag + " N=" + std::to_string(lv[k].N) + " Q=" + std::to_string(lv[k].Q), "max_err", err[k]);
    for (std::size_t k = 1; k < lv.size(); ++k)
        check(o, E, tag + " N=" + std::to_string(lv[k - 1].N) + "->" + std::to_string(lv[k].N), "error_ratio",
              err[k - 1] / err[k], ">=", ratio_min);
    return o;
}

}  // namespace xp

inline const std::vector<Experiment>& registry() {
    using namespace xp;
    static const std::vector<Experiment> r = [] {
        json gauss = {{"family", "gaussian"}};
        json trig = {{"family", "trig"}, {"theta", 1.0}};
        json F = {{"type", "gaussian"}, {"width", 1.0}};
        json Gs = json::array();
        for (double w : {0.7, 1.0, 1.5}) Gs.push_back({{"type", "gaussian"}, {"width", w}});
        json Jstd = {{0.0, 1.0}, {-1.0, 0.0}};
        json x1 = {{"family", "multiplication"},
                   {"profile", {{"type", "coordinate"}, {"axis", 0}}},
                   {"allow_unbounded", true}};
        json ref_levels = json::array({{{"N", 128}, {"L", 16.0}, {"Q", 80}}, {{"N", 256}, {"L", 16.0}, {"Q", 160}}});
        json conv_levels = ref_levels;
        conv_levels.push_back({{"N", 512}, {"L", 16.0}, {"Q", 320}});
        return std::vector<Experiment>{
            {"ft-selftest", 1, "< 1 s", "Fourier round trip, Parseval, Gaussian self-transform on random test functions",
             {{"grid", grid_spec(1, 128, 8.0)}, {"count", 100}, {"seed", 42}}, ft_selftest},
            {"quantize-check", 2, "< 10 s", "closed-form actions of quantized symbols and the brute-force oracle",
             {{"grid", grid_spec(1, 128, 8.0)}}, quantize_check},
            {"covariance", 3, "< 30 s", "conjugation by the Heisenberg group against shifted symbols",
             {{"grid", grid_spec(1, 128, 8.0)},
              {"symbol", gauss},
              {"shifts", {{0, 0}, {1, 1}, {-3, 2}, {8, -1}, {-5, -3}}}},
             covariance},
            {"reconstruct-identity", 4, "< 2 min", "direct reconstruction integral on smoothing images",
             {{"grid", grid_spec(1, 256, 16.0)},
              {"symbols", {{{"family", "constant"}, {"value", 1.0}}, gauss}},
              {"points", nine_points()},
              {"recovery", {{"T", 16.0}, {"W", 16.0}, {"Q", 160}}},
              {"refine", 2},
              {"tolerance", 1e-3},
              {"ratio_min", 4.0}},
             reconstruct_identity},
            {"roundtrip", 5, "< 5 min", "recover_symbol(quantize(a)) against a, scalar and fibered",
             {{"symbols", {gauss, trig}},
              {"levels", ref_levels},
              {"reference", 1},
              {"points", nine_points()},
              {"recovery", {{"T", 16.0}, {"W", 16.0}}},
              {"amplitudes", {1.0, 2.0, 3.0}},
              {"direct", true},
              {"tolerance", 1e-2},
              {"ratio_tolerance", 1e-2}},
             roundtrip},
            {"cv-bound", 6, "< 1 min", "operator norm over the mixed-derivative seminorm for sin(tx)sin(t xi)",
             {{"grid", grid_spec(1, 128, 8.0)}, {"thetas", {1.0, 2.0, 4.0}}, {"ratio_max", 100.0}, {"spread_max", 10.0}},
             cv_bound},
            {"fibers", 7, "< 30 s", "module norm as the supremum of fiber norms",
             {{"grid", grid_spec(1, 16, 4.0)}, {"slice_norms", {1.0, 2.0, 0.5}}, {"count", 20}, {"seed", 42}}, fibers},
            {"commutant", 8, "< 2 min", "residual of L_F against R_G on balanced n = 2 grids",
             {{"sizes", {16, 24, 32}},
              {"reference_N", 24},
              {"J", Jstd},
              {"F", F},
              {"G_list", Gs},
              {"negative_control", x1},
              {"tolerance", 1e-3},
              {"control_min", 0.1}},
             commutant},
            {"conjecture-demo", 9, "< 10 min", "L_F: smoothness probe, commutant residual, symbol recovery (extended)",
             {{"N", 24},
              {"J", Jstd},
              {"F", F},
              {"G_list", Gs},
              {"points", {{0, 0, 0, 0}, {1, 0, 0, 1}, {-1, 1, 1, 0}, {1, -1, -1, 1}}},
              {"recovery", {{"T", 16.0}, {"W", 16.0}, {"Q", 160}, {"stencil_order", 4}, {"coarse", true}}},
              {"negative_control", x1},
              {"residual_tol", 1e-3},
              {"recovery_tol", 5e-2},
              {"identity_tol", 1e-2}},
             conjecture_demo_run},
            {"convergence", 0, "< 1 min", "operator-path error under simultaneous grid and quadrature refinement",
             {{"symbol", gauss},
              {"levels", conv_levels},
              {"points", nine_points()},
              {"recovery", {{"T", 16.0}, {"W", 16.0}}},
              {"ratio_min", 3.0}},
             convergence},
        };
    }();
    return r;
}

inline const Experiment& find_experiment(const std::string& name) {
    std::string valid;
    for (auto& e : registry()) {
        if (e.name == name) return e;
        valid += (valid.empty() ? "" : ", ") + e.name;
    }
    throw SchemaError("experiment", "unknown experiment '" + name + "'; valid: " + valid);
}

inline const std::vector<std::string>& common_keys() {
    static const std::vector<std::string> k = {"experiment", "seed", "output", "workers", "timing_in_csv"};
    return k;
}

// Defaults merged with the user config, then checked field by field.
inline json effective_config(const json& user) {
    if (!user.is_object()) throw SchemaError("(root)", "config must be a JSON object");
    if (!user.contains("experiment")) throw SchemaError("experiment", "missing");
    if (!user["experiment"].is_string()) throw SchemaError("experiment", "must be a string");
    const Experiment& e = find_experiment(user["experiment"].get<std::string>());
    json c = e.defaults;
    for (auto& [k, v] : user.items()) {
        bool known = c.contains(k) || std::find(common_keys().begin(), common_keys().end(), k) != common_keys().end();
        if (!known) throw SchemaError(k, "unknown field for experiment " + e.name);
    }
    c.merge_patch(user);
    c["experiment"] = e.name;
    if (!c.contains("seed")) c["seed"] = 42;
    cfg::integer(c["seed"], "seed", 0, 4294967295L);
    if (c.contains("workers")) cfg::integer(c["workers"], "workers", 1, 256);
    if (c.contains("timing_in_csv")) cfg::boolean(c["timing_in_csv"], "timing_in_csv");
    if (c.contains("output")) {
        if (!c["output"].is_object()) throw SchemaError("output", "must be an object");
        for (auto& [k, v] : c["output"].items()) {
            if (k != "dir") throw SchemaError("output." + k, "unknown field");
            if (!v.is_string()) throw SchemaError("output.dir", "must be a string");
        }
    }
    e.run(c, RunContext{}, true);
    return c;
}

// Runs one experiment, writes <out>/<name>.csv and <out>/<name>.summary.json.
inline RunRecord run_experiment(const json& user, const std::string& cli_out = "", RunContext ctx = {}) {
    json c = effective_config(user);
    const Experiment& e = find_experiment(c["experiment"].get<std::string>());
    if (ctx.workers <= 0) ctx.workers = c.value("workers", 1);
    ctx.timing_in_csv = c.value("timing_in_csv", false);
    auto t0 = std::chrono::steady_clock::now();
    RunRecord rec;
    rec.outcome = e.run(c, ctx, false);
    rec.runtime_ms = xp::elapsed_ms(t0);
    fs::path dir = output_dir(cli_out, c);
    fs::create_directories(dir);
    rec.csv = dir / (e.name + ".csv");
    rec.summary = dir / (e.name + ".summary.json");
    detail::write_text(rec.csv, rec.outcome.table.csv());
    json s = summary_json(e.name, c, rec.outcome, rec.runtime_ms);
    s["csv"] = rec.csv.filename().string();
    detail::write_text(rec.summary, s.dump(2) + "\n");
    return rec;
}

}  // namespace cordes
