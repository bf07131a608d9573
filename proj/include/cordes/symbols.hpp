#pragma once

#include "module_space.hpp"
#include "profile.hpp"

#include <optional>

namespace cordes {

using Mat2 = Eigen::Matrix2d;

inline bool is_skew(const Mat2& J, int n, double tol = 1e-12) {
    if (n == 1) return std::abs(J(0, 0)) <= tol;
    return (J + J.transpose()).cwiseAbs().maxCoeff() <= tol;
}

inline Mat2 standard_J() {
    Mat2 J;
    J << 0.0, 1.0, -1.0, 0.0;
    return J;
}

// wrap y into [-L, L)
inline double wrap_period(double y, double L) { return y - 2.0 * L * std::floor((y + L) / (2.0 * L)); }

struct SymbolFamily {
    enum Kind { constant, gaussian, trig, multiplication, multiplier, shear_plus, shear_minus };
    Kind kind = constant;
    json params = json::object();
    Profile px, pxi;  // separable kinds: px(x) * pxi(xi)
    Profile F;        // shear kinds: F(x +- J xi)
    Mat2 J = Mat2::Zero();
    bool periodic = true;
    double period_L = 0.0;              // half-period of the wrap, taken from the grid
    std::vector<cplx> amplitudes{1.0};  // one entry, or one per fiber
    std::array<double, 2> sx{0.0, 0.0}, sxi{0.0, 0.0};
    int smooth_level = 0;  // number of applications of prod (1+d_x)^2 (1+d_xi)^2

    bool separable() const { return kind != shear_plus && kind != shear_minus; }
    int sign() const { return kind == shear_minus ? -1 : 1; }

    cplx amplitude(int fiber) const {
        return amplitudes.size() == 1 ? amplitudes[0] : amplitudes.at(std::size_t(fiber));
    }

    // d_x^alpha d_xi^beta of the unsmoothed family
    cplx raw_deriv(const double* x, const double* xi, const int* al, const int* be, int n, int fiber) const {
        double X[2] = {0, 0}, Xi[2] = {0, 0};
        for (int a = 0; a < n; ++a) {
            X[a] = x[a] + sx[a];
            Xi[a] = xi[a] + sxi[a];
        }
        cplx amp = amplitude(fiber);
        if (separable()) return amp * px.deriv(X, al, n) * pxi.deriv(Xi, be, n);

        double y[2] = {0, 0};
        for (int i = 0; i < n; ++i) {
            y[i] = X[i];
            for (int j = 0; j < n; ++j) y[i] += sign() * J(i, j) * Xi[j];
            if (periodic && period_L > 0.0) y[i] = wrap_period(y[i], period_L);
        }
        // d_xi_j acts as sign * sum_i J_ij d_y_i; expand into monomials of d_y
        struct Term {
            int g[2];
            double c;
        };
        std::vector<Term> terms{{{al[0], n > 1 ? al[1] : 0}, 1.0}};
        for (int j = 0; j < n; ++j)
            for (int r = 0; r < be[j]; ++r) {
                std::vector<Term> next;
                for (auto& t : terms)
                    for (int i = 0; i < n; ++i) {
                        double c = sign() * J(i, j);
                        if (c == 0.0) continue;
                        Term u = t;
                        u.g[i] += 1;
                        u.c *= c;
                        next.push_back(u);
                    }
                terms = std::move(next);
            }
        cplx s = 0.0;
        for (auto& t : terms) s += t.c * F.deriv(y, t.g, n);
        return amp * s;
    }

    cplx deriv_level(const double* x, const double* xi, const int* al, const int* be, int n, int fiber,
                     int level) const {
        if (level == 0) return raw_deriv(x, xi, al, be, n, fiber);
        static constexpr double c[3] = {1.0, 2.0, 1.0};
        cplx s = 0.0;
        int terms = 1;
        for (int i = 0; i < 2 * n; ++i) terms *= 3;
        for (int t = 0; t < terms; ++t) {
            int r = t, a2[2] = {0, 0}, b2[2] = {0, 0};
            double coef = 1.0;
            for (int i = 0; i < n; ++i) {
                a2[i] = r % 3;
                r /= 3;
                b2[i] = r % 3;
                r /= 3;
                coef *= c[a2[i]] * c[b2[i]];
                a2[i] += al[i];
                b2[i] += be[i];
            }
            s += coef * deriv_level(x, xi, a2, b2, n, fiber, level - 1);
        }
        return s;
    }

    cplx deriv(const double* x, const double* xi, const int* al, const int* be, int n, int fiber) const {
        return deriv_level(x, xi, al, be, n, fiber, smooth_level);
    }

    cplx operator()(const double* x, const double* xi, int n, int fiber) const {
        int z[2] = {0, 0};
        return deriv(x, xi, z, z, n, fiber);
    }
};

inline SymbolFamily family_from_json(const json& j, int n) {
    SymbolFamily f;
    f.params = j;
    std::string name = j.value("family", "constant");
    if (j.contains("amplitudes")) {
        f.amplitudes.clear();
        for (auto& a : j.at("amplitudes")) f.amplitudes.push_back(a.get<double>());
        if (f.amplitudes.empty()) throw std::invalid_argument("symbol: amplitudes must be nonempty");
    } else if (j.contains("amplitude")) {
        f.amplitudes = {j.at("amplitude").get<double>()};
    }
    if (name == "constant") {
        f.kind = SymbolFamily::constant;
        f.px = constant_profile(j.value("value", 1.0));
        f.pxi = constant_profile();
    } else if (name == "gaussian") {
        f.kind = SymbolFamily::gaussian;
        f.px = profile_from_json({{"type", "gaussian"},
                                  {"width", j.value("width_x", 1.0)},
                                  {"center", j.value("center_x", json(0.0))}});
        f.pxi = profile_from_json({{"type", "gaussian"},
                                   {"width", j.value("width_xi", 1.0)},
                                   {"center", j.value("center_xi", json(0.0))}});
    } else if (name == "trig") {
        f.kind = SymbolFamily::trig;
        f.px = profile_from_json({{"type", "sine"}, {"freq", j.value("theta_x", j.value("theta", 1.0))}});
        f.pxi = profile_from_json({{"type", "sine"}, {"freq", j.value("theta_xi", j.value("theta", 1.0))}});
        if (n == 1) {
            f.px.f[1] = Factor{};
            f.pxi.f[1] = Factor{};
        }
    } else if (name == "multiplication") {
        f.kind = SymbolFamily::multiplication;
        f.px = profile_from_json(j.at("profile"));
        f.pxi = constant_profile();
    } else if (name == "multiplier") {
        f.kind = SymbolFamily::multiplier;
        f.px = constant_profile();
        f.pxi = profile_from_json(j.at("profile"));
    } else if (name == "shear_plus" || name == "shear_minus") {
        f.kind = name == "shear_plus" ? SymbolFamily::shear_plus : SymbolFamily::shear_minus;
        f.F = profile_from_json(j.at("profile"));
        f.periodic = j.value("periodic", true);
        if (j.contains("J")) {
            auto& Jj = j.at("J");
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) f.J(a, b) = Jj.at(a).at(b).get<double>();
        } else if (n == 2) {
            f.J = standard_J();
        }
        if (!is_skew(f.J, n)) throw std::invalid_argument("symbol: J must be skew-symmetric");
    } else {
        throw std::invalid_argument("symbol: unknown family '" + name + "'");
    }
    const Profile* ps[3] = {&f.px, &f.pxi, &f.F};
    for (auto* p : ps)
        if (!p->bounded() && !j.value("allow_unbounded", false))
            throw std::invalid_argument("symbol: profile is unbounded");
    return f;
}

struct Symbol {
    Grid grid;
    FiberSet fibers;
    std::vector<CMat> data;  // per fiber, rows = x nodes, cols = xi nodes
    std::optional<SymbolFamily> family;

    int m() const { return fibers.m(); }
};

namespace detail {

inline void node_coords(const Grid& g, std::size_t p, double* x) {
    auto idx = unflatten(g, p);
    for (int a = 0; a < g.n; ++a) x[a] = g.x(idx[a]);
}

inline void freq_coords(const Grid& g, std::size_t q, double* xi) {
    auto idx = unflatten(g, q);
    for (int a = 0; a < g.n; ++a) xi[a] = g.xi(idx[a]);
}

inline std::vector<CMat> sample(const SymbolFamily& f, const Grid& g, int m) {
    std::vector<CMat> out(m, CMat(g.size(), g.size()));
    double x[2], xi[2];
    for (int l = 0; l < m; ++l)
        for (std::size_t q = 0; q < g.size(); ++q) {
            freq_coords(g, q, xi);
            for (std::size_t p = 0; p < g.size(); ++p) {
                node_coords(g, p, x);
                out[l](p, q) = f(x, xi, g.n, l);
            }
        }
    return out;
}

}  // namespace detail

inline Symbol sample_family(SymbolFamily fam, const Grid& g, const FiberSet& fibers) {
    if (fam.amplitudes.size() != 1 && int(fam.amplitudes.size()) != fibers.m())
        throw std::invalid_argument("sample_family: need one amplitude or one per fiber");
    if (!fam.separable() && !is_skew(fam.J, g.n)) throw std::invalid_argument("sample_family: J must be skew-symmetric");
    fam.period_L = g.L;
    Symbol s{g, fibers, detail::sample(fam, g, fibers.m()), fam};
    for (auto& d : s.data)
        if (!d.allFinite()) throw std::invalid_argument("sample_family: non-finite samples");
    return s;
}

inline Symbol sample_family(const json& spec, const Grid& g, const FiberSet& fibers) {
    return sample_family(family_from_json(spec, g.n), g, fibers);
}

inline bool is_multiple(double v, double step, double tol = 1e-9) {
    double r = v / step;
    return std::abs(r - std::round(r)) <= tol;
}

inline Symbol shift_symbol(const Symbol& a, const std::array<double, 2>& z, const std::array<double, 2>& zeta) {
    const Grid& g = a.grid;
    if (a.family) {
        SymbolFamily f = *a.family;
        for (int i = 0; i < g.n; ++i) {
            f.sx[i] += z[i];
            f.sxi[i] += zeta[i];
        }
        return Symbol{g, a.fibers, detail::sample(f, g, a.m()), f};
    }
    int mz[2] = {0, 0}, mk[2] = {0, 0};
    for (int i = 0; i < g.n; ++i) {
        if (!is_multiple(z[i], g.h()) || !is_multiple(zeta[i], g.dxi()))
            throw std::invalid_argument("shift_symbol: off-grid shift of a sampled symbol");
        mz[i] = int(std::lround(z[i] / g.h()));
        mk[i] = int(std::lround(zeta[i] / g.dxi()));
    }
    auto shifted = [&](std::size_t p, const int* m) {
        auto idx = unflatten(g, p);
        std::size_t r = 0;
        for (int i = 0; i < g.n; ++i) r = r * g.N + std::size_t(((idx[i] + m[i]) % g.N + g.N) % g.N);
        return r;
    };
    Symbol out{g, a.fibers, a.data, std::nullopt};
    for (int l = 0; l < a.m(); ++l)
        for (std::size_t q = 0; q < g.size(); ++q)
            for (std::size_t p = 0; p < g.size(); ++p) out.data[l](p, q) = a.data[l](shifted(p, mz), shifted(q, mk));
    return out;
}

namespace detail {

// Multiply the spectrum along one of the 2n phase-space axes by mult(kappa).
// Axis 0..n-1 are x axes, n..2n-1 are xi axes.
template <class Mult>
void spectral_axis(const Grid& g, CMat& A, int axis, Mult mult) {
    const int N = g.N, n = g.n;
    bool on_xi = axis >= n;
    int a = axis % n;
    double d = on_xi ? g.dxi() : g.h();
    std::vector<cplx> kappa_mult(N);
    for (int q = 0; q < N; ++q) {
        int s = q < N / 2 ? q : q - N;
        double kappa = 2.0 * pi * s / (N * d);
        kappa_mult[q] = mult(kappa, s == -N / 2) / double(N);
    }
    Dft dft;
    std::vector<cplx> line(N);
    std::size_t S = g.size();
    std::size_t stride = (n == 2 && a == 0) ? std::size_t(N) : 1;
    for (std::size_t other = 0; other < S; ++other) {
        for (std::size_t l = 0; l < (n == 1 ? 1u : std::size_t(N)); ++l) {
            std::size_t base = (n == 1) ? 0 : (a == 0 ? l : l * N);
            for (int i = 0; i < N; ++i)
                line[i] = on_xi ? A(other, base + i * stride) : A(base + i * stride, other);
            dft.in = line;
            dft.fft.fwd(dft.out, dft.in);
            for (int i = 0; i < N; ++i) dft.out[i] *= kappa_mult[i];
            dft.fft.inv(line, dft.out);
            for (int i = 0; i < N; ++i) {
                if (on_xi)
                    A(other, base + i * stride) = line[i];
                else
                    A(base + i * stride, other) = line[i];
            }
        }
    }
}

inline CMat spectral_deriv(const Grid& g, CMat A, const int* al, const int* be) {
    for (int axis = 0; axis < 2 * g.n; ++axis) {
        int m = axis < g.n ? al[axis] : be[axis - g.n];
        if (m == 0) continue;
        spectral_axis(g, A, axis, [m](double k, bool nyq) -> cplx {
            if (nyq && (m % 2)) return 0.0;
            return std::pow(cplx(0.0, k), m);
        });
    }
    return A;
}

}  // namespace detail

inline double cv_seminorm(const Symbol& a) {
    const Grid& g = a.grid;
    int combos = 1 << (2 * g.n);
    double best = 0.0;
    double x[2], xi[2];
    for (int c = 0; c < combos; ++c) {
        int al[2] = {0, 0}, be[2] = {0, 0};
        for (int i = 0; i < g.n; ++i) {
            al[i] = (c >> i) & 1;
            be[i] = (c >> (g.n + i)) & 1;
        }
        for (int l = 0; l < a.m(); ++l) {
            if (a.family) {
                for (std::size_t q = 0; q < g.size(); ++q) {
                    detail::freq_coords(g, q, xi);
                    for (std::size_t p = 0; p < g.size(); ++p) {
                        detail::node_coords(g, p, x);
                        best = std::max(best, std::abs(a.family->deriv(x, xi, al, be, g.n, l)));
                    }
                }
            } else {
                best = std::max(best, detail::spectral_deriv(g, a.data[l], al, be).cwiseAbs().maxCoeff());
            }
        }
    }
    return best;
}

inline Symbol smoothing_image(const Symbol& a) {
    const Grid& g = a.grid;
    if (a.family) {
        SymbolFamily f = *a.family;
        f.smooth_level += 1;
        return Symbol{g, a.fibers, detail::sample(f, g, a.m()), f};
    }
    Symbol b{g, a.fibers, a.data, std::nullopt};
    for (auto& d : b.data)
        for (int axis = 0; axis < 2 * g.n; ++axis)
            detail::spectral_axis(g, d, axis, [](double k, bool nyq) -> cplx {
                return nyq ? cplx(1.0 - k * k) : cplx(1.0 - k * k, 2.0 * k);
            });
    return b;
}

// Sampled symbol with the descriptor dropped (forces the spectral/circular paths).
inline Symbol strip_family(Symbol a) {
    a.family.reset();
    return a;
}

inline Symbol linear_combination(cplx alpha, const Symbol& a, cplx beta, const Symbol& b) {
    require_same(a.grid, b.grid, "linear_combination");
    require_same(a.fibers, b.fibers, "linear_combination");
    Symbol out{a.grid, a.fibers, a.data, std::nullopt};
    for (int l = 0; l < a.m(); ++l) out.data[l] = alpha * a.data[l] + beta * b.data[l];
    return out;
}

}  // namespace cordes
