#pragma once

#include "quantize.hpp"

#include <map>

namespace cordes {

using Vec2 = std::array<double, 2>;

namespace detail {

inline bool aligned(const Grid& g, const Vec2& z) {
    for (int i = 0; i < g.n; ++i)
        if (!is_multiple(z[i], g.h())) return false;
    return true;
}

// flat index of node p moved by m grid steps per axis, circularly
inline std::size_t shifted_index(const Grid& g, std::size_t p, const int* m) {
    auto idx = unflatten(g, p);
    std::size_t r = 0;
    for (int i = 0; i < g.n; ++i) r = r * g.N + std::size_t(((idx[i] + m[i]) % g.N + g.N) % g.N);
    return r;
}

// T_z on every column of X: band-limited shift through the frequency-side multiplier e^{-i z.xi}
inline void translate_columns(const Grid& g, CMat& X, const Vec2& z) {
    const int N = g.N, n = g.n;
    const std::size_t S = g.size();
    CVec mult(S);
    for (std::size_t q = 0; q < S; ++q) {
        auto k = unflatten(g, q);
        double ph = 0.0;
        std::size_t slot = 0;
        for (int i = 0; i < n; ++i) {
            int s = k[i] - N / 2;
            ph += z[i] * g.dxi() * s;
            slot = slot * N + std::size_t((s + N) % N);
        }
        mult[slot] = std::polar(1.0 / double(S), -ph);
    }
    Dft work;
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
        cplx* col = X.col(c).data();
        dft(work, col, n, N, -1);
        for (std::size_t q = 0; q < S; ++q) col[q] *= mult[q];
        dft(work, col, n, N, +1);
    }
}

inline CVec phase_vector(const Grid& g, const Vec2& zeta) {
    CVec ph(g.size());
    double x[2];
    for (std::size_t p = 0; p < g.size(); ++p) {
        node_coords(g, p, x);
        double a = 0.0;
        for (int i = 0; i < g.n; ++i) a += zeta[i] * x[i];
        ph[p] = std::polar(1.0, a);
    }
    return ph;
}

// T_{-z} M_{-zeta} A M_zeta T_z for one fiber matrix
inline CMat conjugate_matrix(const Grid& g, const CMat& A, const Vec2& z, const Vec2& zeta) {
    CVec ph = phase_vector(g, zeta);  // e^{i zeta.x}
    CMat B = ph.conjugate().asDiagonal() * A * ph.asDiagonal();
    if (aligned(g, z)) {
        int m[2] = {0, 0};
        for (int i = 0; i < g.n; ++i) m[i] = int(std::lround(z[i] / g.h()));
        const std::size_t S = g.size();
        std::vector<std::size_t> sig(S);
        for (std::size_t p = 0; p < S; ++p) sig[p] = shifted_index(g, p, m);
        CMat C(S, S);
        for (std::size_t q = 0; q < S; ++q)
            for (std::size_t p = 0; p < S; ++p) C(p, q) = B(sig[p], sig[q]);
        return C;
    }
    Vec2 mz{-z[0], -z[1]};
    CMat Y = B.adjoint();
    translate_columns(g, Y, mz);
    CMat C = Y.adjoint();  // B T_z
    translate_columns(g, C, mz);
    return C;
}

}  // namespace detail

inline ModuleVec translate(const ModuleVec& f, const Vec2& z) {
    const Grid& g = f.grid;
    std::vector<CVec> out;
    for (auto& s : f.slices) {
        if (detail::aligned(g, z)) {
            int m[2] = {0, 0};
            for (int i = 0; i < g.n; ++i) m[i] = -int(std::lround(z[i] / g.h()));
            CVec r(s.size());
            for (std::size_t p = 0; p < g.size(); ++p) r[p] = s[detail::shifted_index(g, p, m)];
            out.push_back(std::move(r));
        } else {
            CMat col = s;
            detail::translate_columns(g, col, z);
            out.push_back(col.col(0));
        }
    }
    return ModuleVec(f.fibers, g, std::move(out));
}

inline ModuleVec modulate(const ModuleVec& f, const Vec2& zeta) {
    CVec ph = detail::phase_vector(f.grid, zeta);
    std::vector<CVec> out;
    for (auto& s : f.slices) out.push_back(ph.cwiseProduct(s));
    return ModuleVec(f.fibers, f.grid, std::move(out));
}

inline ModuleOp conjugate(const ModuleOp& a, const Vec2& z, const Vec2& zeta) {
    ModuleOp out{a.grid, a.fibers, {}, a.provenance};
    for (auto& M : a.mats) out.mats.push_back(detail::conjugate_matrix(a.grid, M, z, zeta));
    return out;
}

// Realizes prod_j (1 + d_zj)^2 (1 + d_zetaj)^2 per axis with central differences of the given order.
struct OrbitStencil {
    double delta = 0.0;  // 0 means one grid step
    int order = 2;       // 2: three-point differences, 4: five-point differences

    double step(const Grid& g) const { return delta > 0.0 ? delta : g.h(); }

    // coefficient of f(o * delta) in (1 + 2 d + d^2) f(0)
    std::map<int, double> coefficients(double d) const {
        std::map<int, double> D1, D2;
        if (order == 2) {
            D1 = {{-1, -0.5}, {1, 0.5}};
            D2 = {{-1, 1.0}, {0, -2.0}, {1, 1.0}};
        } else if (order == 4) {
            D1 = {{-2, 1.0 / 12}, {-1, -8.0 / 12}, {1, 8.0 / 12}, {2, -1.0 / 12}};
            D2 = {{-2, -1.0 / 12}, {-1, 16.0 / 12}, {0, -30.0 / 12}, {1, 16.0 / 12}, {2, -1.0 / 12}};
        } else {
            throw std::invalid_argument("OrbitStencil: order must be 2 or 4");
        }
        std::map<int, double> c;
        int r = order / 2;
        for (int o = -r; o <= r; ++o) {
            double v = (o == 0 ? 1.0 : 0.0);
            if (D1.count(o)) v += 2.0 * D1[o] / d;
            if (D2.count(o)) v += D2[o] / (d * d);
            c[o] = v;
        }
        return c;
    }
};

inline CMat orbit_b_matrix(const Grid& g, const CMat& A, const Vec2& z, const Vec2& zeta, const OrbitStencil& st) {
    const double d = st.step(g);
    if (!(d >= 1e-4 * g.h())) throw std::invalid_argument("orbit_b: step too small, cancellation dominates");
    auto c = st.coefficients(d);
    std::vector<std::pair<int, double>> taps(c.begin(), c.end());
    const int axes = 2 * g.n;
    std::size_t terms = 1;
    for (int i = 0; i < axes; ++i) terms *= taps.size();
    CMat B = CMat::Zero(A.rows(), A.cols());
    for (std::size_t t = 0; t < terms; ++t) {
        std::size_t r = t;
        double coef = 1.0;
        Vec2 zz = z, ze = zeta;
        for (int i = 0; i < g.n; ++i) {
            auto [oz, cz] = taps[r % taps.size()];
            r /= taps.size();
            auto [ok, ck] = taps[r % taps.size()];
            r /= taps.size();
            zz[i] += oz * d;
            ze[i] += ok * d;
            coef *= cz * ck;
        }
        B += coef * detail::conjugate_matrix(g, A, zz, ze);
    }
    return B;
}

inline ModuleOp orbit_b(const ModuleOp& a, const Vec2& z, const Vec2& zeta, const OrbitStencil& st = {}) {
    ModuleOp out{a.grid, a.fibers, {}, "orbit_b"};
    for (auto& M : a.mats) out.mats.push_back(orbit_b_matrix(a.grid, M, z, zeta, st));
    return out;
}

inline double covariance_residual(const Symbol& a, const Vec2& z, const Vec2& zeta) {
    const Grid& g = a.grid;
    for (int i = 0; i < g.n; ++i)
        if (!is_multiple(z[i], g.h()) || !is_multiple(zeta[i], g.dxi()))
            throw std::invalid_argument("covariance_residual: shift must be grid-aligned");
    ModuleOp lhs = conjugate(quantize(a), z, zeta);
    ModuleOp rhs = quantize(shift_symbol(a, z, zeta));
    return op_norm(linear_combination(1.0, lhs, -1.0, rhs));
}

struct ProbeRow {
    std::string direction;
    int order = 1;
    double norm_d = 0.0;   // derivative estimate at step delta
    double norm_d2 = 0.0;  // at delta/2
    double ratio = 0.0;    // |D(d) - D(d/2)| / |D(d/2) - D(d/4)|
    bool consistent = false;
    std::string note;
};

struct ProbeReport {
    std::vector<ProbeRow> rows;
    bool consistent(int order) const {
        for (auto& r : rows)
            if (r.order == order && !r.consistent) return false;
        return true;
    }
    bool flag_raised() const {
        for (auto& r : rows)
            if (!r.consistent) return true;
        return false;
    }
};

inline ProbeReport smoothness_probe(const ModuleOp& a, int max_order = 2, bool translations_only = false,
                                    double delta = 0.0) {
    if (max_order < 1 || max_order > 2) throw std::invalid_argument("smoothness_probe: max_order must be 1 or 2");
    const Grid& g = a.grid;
    const double d0 = delta > 0.0 ? delta : g.h();
    PowerOptions opt;
    opt.tol = 1e-6;
    opt.max_iter = 500;
    ProbeReport rep;
    auto fnorm = [&](const std::vector<CMat>& Ms) {
        ModuleOp t{g, a.fibers, Ms, "probe"};
        return op_norm_report(t, opt).value;
    };
    for (int kind = 0; kind < (translations_only ? 1 : 2); ++kind)
        for (int axis = 0; axis < g.n; ++axis) {
            auto orbit = [&](double s) {
                Vec2 z{0, 0}, ze{0, 0};
                (kind == 0 ? z : ze)[axis] = s;
                return conjugate(a, z, ze).mats;
            };
            // D1, D2 at steps d0, d0/2, d0/4
            std::vector<std::vector<CMat>> D1(3), D2(3);
            for (int k = 0; k < 3; ++k) {
                double s = d0 / double(1 << k);
                auto p = orbit(s), m = orbit(-s);
                for (int l = 0; l < a.m(); ++l) {
                    D1[k].push_back((p[l] - m[l]) / (2.0 * s));
                    D2[k].push_back((p[l] - 2.0 * a.mats[l] + m[l]) / (s * s));
                }
            }
            for (int order = 1; order <= max_order; ++order) {
                auto& D = order == 1 ? D1 : D2;
                ProbeRow row;
                row.direction = std::string(kind == 0 ? "z" : "zeta") + std::to_string(axis + 1);
                row.order = order;
                row.norm_d = fnorm(D[0]);
                row.norm_d2 = fnorm(D[1]);
                std::vector<CMat> e1, e2;
                for (int l = 0; l < a.m(); ++l) {
                    e1.push_back(D[0][l] - D[1][l]);
                    e2.push_back(D[1][l] - D[2][l]);
                }
                double n1 = fnorm(e1), n2 = fnorm(e2);
                double scale = std::max(1.0, row.norm_d);
                if (row.norm_d <= 1e-12 && row.norm_d2 <= 1e-12) {
                    row.consistent = true;
                    row.note = "constant";
                } else if (n1 <= 1e-11 * scale && n2 <= 1e-11 * scale) {
                    row.consistent = true;
                    row.note = "exact";
                } else {
                    row.ratio = n2 > 0.0 ? n1 / n2 : INFINITY;
                    row.consistent = row.ratio >= 3.0 && row.ratio <= 5.0;
                }
                rep.rows.push_back(row);
            }
        }
    return rep;
}

}  // namespace cordes
