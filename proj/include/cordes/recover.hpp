#pragma once

#include "heisenberg.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <memory>

namespace cordes {

inline double gamma1(double t) { return t >= 0.0 ? std::exp(-t) : 0.0; }
inline double gamma2(double t) { return t >= 0.0 ? t * std::exp(-t) : 0.0; }

inline cplx kernel_v(double xi, double eta) {
    double g = gamma1(xi - eta);
    if (g == 0.0) return 0.0;
    cplx d(1.0, xi);
    return g / (d * d);
}

// u(x, eta) = (1 + d_eta)[(1 - i eta)^2 gamma2(-x) gamma2(-eta) e^{i x eta}], differentiated in closed form.
// On eta = 0 the value is the limit from eta < 0.
inline cplx kernel_u(double x, double eta) {
    if (x > 0.0 || eta > 0.0) return 0.0;
    const cplx I(0.0, 1.0);
    cplx a = 1.0 - I * eta;
    cplx q = a * (a * (1.0 + 2.0 * eta + I * x * eta) - 2.0 * I * eta);
    return x * std::exp(cplx(x + eta, x * eta)) * q;
}

// d/dx of kernel_u on its support
inline cplx kernel_u_dx(double x, double eta) {
    if (x > 0.0 || eta > 0.0) return 0.0;
    const cplx I(0.0, 1.0);
    cplx a = 1.0 - I * eta;
    cplx q = a * (a * (1.0 + 2.0 * eta + I * x * eta) - 2.0 * I * eta);
    cplx dq = a * a * (I * eta);
    cplx c(1.0, eta);
    return std::exp(x * c + eta) * ((1.0 + x * c) * q + x * dq);
}

inline cplx kernel_u_n(const double* x, const double* eta, int n) {
    if (n != 1 && n != 2) throw std::invalid_argument("kernel_u_n: n must be 1 or 2");
    cplx v = 1.0;
    for (int i = 0; i < n; ++i) v *= kernel_u(x[i], eta[i]);
    return v;
}

inline cplx kernel_v_n(const double* xi, const double* eta, int n) {
    if (n != 1 && n != 2) throw std::invalid_argument("kernel_v_n: n must be 1 or 2");
    cplx v = 1.0;
    for (int i = 0; i < n; ++i) v *= kernel_v(xi[i], eta[i]);
    return v;
}

struct RecoveryParams {
    double T = 16.0;
    double W = 16.0;
    int Qx = 160, Qxi = 160, Qeta = 160;
    bool midpoint = true;      // half-step offsets for the direct path
    bool extrapolate = true;   // one Richardson step on the direct path
    bool kink_corrections = true;
    double delta = 0.0;        // orbit step, 0 means one grid step
    int stencil_order = 2;
    bool coarse = false;       // waive the tail bounds for grids shorter than T
    bool experimental = false; // allow operators that are not quantizations

    void validate() const {
        if (!coarse && (T < 12.0 || W < 12.0)) throw std::invalid_argument("recovery: T and W must be at least 12");
        if (!(T > 0.0) || !(W > 0.0)) throw std::invalid_argument("recovery: T and W must be positive");
        for (int q : {Qx, Qxi, Qeta})
            if (q < 2 || (extrapolate && q % 2)) throw std::invalid_argument("recovery: node counts must be even and >= 2");
        if (stencil_order != 2 && stencil_order != 4) throw std::invalid_argument("recovery: stencil order must be 2 or 4");
    }

    json to_json() const {
        return {{"T", T}, {"W", W}, {"Qx", Qx}, {"Qxi", Qxi}, {"Qeta", Qeta}, {"midpoint", midpoint},
                {"extrapolate", extrapolate}, {"kink_corrections", kink_corrections}, {"delta", delta},
                {"stencil_order", stencil_order}, {"coarse", coarse}, {"experimental", experimental}};
    }
};

inline RecoveryParams recovery_params_from_json(const json& j) {
    RecoveryParams p;
    p.T = j.value("T", p.T);
    p.W = j.value("W", p.W);
    if (j.contains("Q")) p.Qx = p.Qxi = p.Qeta = j.at("Q").get<int>();
    p.Qx = j.value("Qx", p.Qx);
    p.Qxi = j.value("Qxi", p.Qxi);
    p.Qeta = j.value("Qeta", p.Qeta);
    p.midpoint = j.value("midpoint", p.midpoint);
    p.extrapolate = j.value("extrapolate", p.extrapolate);
    p.kink_corrections = j.value("kink_corrections", p.kink_corrections);
    p.delta = j.value("delta", p.delta);
    p.stencil_order = j.value("stencil_order", p.stencil_order);
    p.coarse = j.value("coarse", p.coarse);
    p.experimental = j.value("experimental", p.experimental);
    p.validate();
    return p;
}

namespace detail {

// Riemann sum of the truncated reconstruction integral with Qx, Qeta, Qxi nodes.
inline cplx reconstruct_sum(const SymbolFamily& b, double z, double zeta, const RecoveryParams& p, int Qx, int Qe,
                            int Qs, int fiber) {
    const double o = p.midpoint ? 0.5 : 0.0;
    const double dx = p.T / Qx, de = p.T / Qe, ds = p.W / Qs;
    std::vector<double> eta(Qe), s(Qs), G(Qs);
    for (int m = 0; m < Qe; ++m) eta[m] = -(m + o) * de;
    for (int l = 0; l < Qs; ++l) {
        s[l] = (l + o) * ds;
        G[l] = gamma1(s[l]);
    }
    const bool lattice = std::abs(de - ds) <= 1e-14 * de && p.midpoint;
    cplx total = 0.0;
    std::vector<cplx> uconj(Qe);
    for (int i = 0; i < Qx; ++i) {
        double x = -(i + o) * dx;
        for (int m = 0; m < Qe; ++m) uconj[m] = std::conj(kernel_u(x, eta[m]));
        double xb[1] = {x + z};
        cplx acc = 0.0;
        if (lattice) {
            // xi = eta_m + s_l = (l - m) * de, shared across (m, l)
            int r0 = -(Qe - 1), r1 = Qs - 1;
            std::vector<cplx> row(r1 - r0 + 1);
            for (int r = r0; r <= r1; ++r) {
                double xi = r * de;
                double xib[1] = {xi + zeta};
                cplx d(1.0, xi);
                row[r - r0] = std::polar(1.0, x * xi) * b(xb, xib, 1, fiber) / (d * d);
            }
            for (int m = 0; m < Qe; ++m) {
                if (uconj[m] == 0.0) continue;
                cplx inner = 0.0;
                for (int l = 0; l < Qs; ++l) inner += row[l - m - r0] * G[l];
                acc += uconj[m] * inner;
            }
        } else {
            for (int m = 0; m < Qe; ++m) {
                if (uconj[m] == 0.0) continue;
                cplx inner = 0.0;
                for (int l = 0; l < Qs; ++l) {
                    double xi = eta[m] + s[l];
                    double xib[1] = {xi + zeta};
                    inner += std::polar(1.0, x * xi) * b(xb, xib, 1, fiber) * kernel_v(xi, eta[m]);
                }
                acc += uconj[m] * inner;
            }
        }
        total += acc;
    }
    return total * dx * de * ds;
}

}  // namespace detail

// Direct quadrature of the reconstruction integral for an analytic smoothing image b.
inline std::vector<cplx> reconstruct_from_b(const Symbol& b, double z, double zeta, const RecoveryParams& p) {
    p.validate();
    if (!b.family) throw std::invalid_argument("reconstruct_from_b: needs an analytic symbol for off-grid evaluation");
    if (b.grid.n != 1) throw std::invalid_argument("reconstruct_from_b: direct path is implemented for n = 1");
    std::vector<cplx> out(b.m());
    for (int l = 0; l < b.m(); ++l) {
        cplx fine = detail::reconstruct_sum(*b.family, z, zeta, p, p.Qx, p.Qeta, p.Qxi, l);
        if (p.extrapolate) {
            cplx coarse = detail::reconstruct_sum(*b.family, z, zeta, p, p.Qx / 2, p.Qeta / 2, p.Qxi / 2, l);
            fine = (4.0 * fine - coarse) / 3.0;
        }
        out[l] = fine;
    }
    return out;
}

// Pairing kernel for one axis: S = sum_{j,k} B[j,k] K[k,j].
// K[k,j] = h sum_l dxi e^{i x_k xi_l} Omega(x_j, xi_l) with
// Omega(x, xi) = int conj(u(x, eta)) v(xi, eta) d eta over eta in [max(-T, xi - W), min(xi, 0)].
struct RecoveryKernel {
    Grid axis;
    RecoveryParams params;
    std::vector<double> eta, weight;  // eta nodes shared by every xi
    CMat omega;                       // N x N, rows x nodes, cols xi nodes
    CMat K1;                          // N x N
    CMat K;                           // K1 for n = 1, K1 (x) K1 for n = 2

    static constexpr int gl_order = 10;

    static std::shared_ptr<RecoveryKernel> build(const Grid& g, const RecoveryParams& p) {
        p.validate();
        auto rk = std::make_shared<RecoveryKernel>();
        rk->axis = g.axis();
        rk->params = p;
        const Grid& a = rk->axis;
        if (a.L < p.T && !p.coarse)
            throw std::invalid_argument("recovery: operator grid half-width L must be at least T");
        const int N = a.N;
        const double h = a.h(), dk = a.dxi();

        // the eta integrand jumps where eta meets a xi node or a xi node minus W
        std::vector<double> br{-p.T, 0.0};
        for (int l = 0; l < N; ++l) {
            for (double e : {a.xi(l), a.xi(l) - p.W})
                if (e > -p.T && e < 0.0) br.push_back(e);
        }
        std::sort(br.begin(), br.end());
        br.erase(std::unique(br.begin(), br.end(), [](double u, double v) { return std::abs(u - v) < 1e-13; }),
                 br.end());
        using GL = boost::math::quadrature::gauss<double, gl_order>;
        const auto& ab = GL::abscissa();
        const auto& wt = GL::weights();
        std::vector<std::pair<double, double>> cell;  // cell bounds for each node
        for (std::size_t c = 0; c + 1 < br.size(); ++c) {
            double lo = br[c], hi = br[c + 1], mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
            for (std::size_t i = 0; i < ab.size(); ++i)
                for (int sgn : {-1, 1}) {
                    if (ab[i] == 0.0 && sgn < 0) continue;
                    rk->eta.push_back(mid + sgn * half * ab[i]);
                    rk->weight.push_back(half * wt[i]);
                    cell.push_back({lo, hi});
                }
        }
        const std::size_t E = rk->eta.size();

        std::vector<int> xs;
        for (int j = 0; j < N; ++j)
            if (a.x(j) <= 1e-12 && a.x(j) >= -p.T - 1e-12) xs.push_back(j);

        CMat U(xs.size(), E);  // conj(u(x_j, eta)) * weight
        for (std::size_t r = 0; r < xs.size(); ++r)
            for (std::size_t e = 0; e < E; ++e) U(r, e) = std::conj(kernel_u(a.x(xs[r]), rk->eta[e])) * rk->weight[e];
        CMat V = CMat::Zero(E, N);  // v(xi_l, eta) restricted to the window
        for (int l = 0; l < N; ++l) {
            double xi = a.xi(l);
            for (std::size_t e = 0; e < E; ++e) {
                double mid = 0.5 * (cell[e].first + cell[e].second);
                if (mid < xi && mid > xi - p.W) V(e, l) = kernel_v(xi, rk->eta[e]);
            }
        }
        CMat om = U * V;
        rk->omega = CMat::Zero(N, N);
        for (std::size_t r = 0; r < xs.size(); ++r) rk->omega.row(xs[r]) = om.row(r);

        if (p.kink_corrections) {
            // Euler-Maclaurin end corrections for the kinks at xi = 0 and x = 0
            int l0 = N / 2;
            for (int j : xs) rk->omega(j, l0) += dk / 12.0 * (-std::conj(kernel_u(a.x(j), 0.0)));
            int j0 = -1;
            for (int j : xs)
                if (std::abs(a.x(j)) < 1e-12) j0 = j;
            if (j0 >= 0) {
                CVec ux(E);
                for (std::size_t e = 0; e < E; ++e) ux[e] = std::conj(kernel_u_dx(0.0, rk->eta[e])) * rk->weight[e];
                CVec dOmega = V.transpose() * ux;
                rk->omega.row(j0) += (h / 12.0 * (-dOmega)).transpose();
            }
        }
        CMat Ex(N, N);
        for (int k = 0; k < N; ++k)
            for (int l = 0; l < N; ++l) Ex(k, l) = dk * std::polar(1.0, a.x(k) * a.xi(l));
        rk->K1 = h * Ex * rk->omega.transpose();
        rk->K = g.n == 1 ? rk->K1 : CMat(Eigen::kroneckerProduct(rk->K1, rk->K1));
        return rk;
    }

    cplx pair(const CMat& B) const { return B.cwiseProduct(K.transpose()).sum(); }
};

struct RecoveryPoint {
    Vec2 z{0, 0}, zeta{0, 0};
};

struct RecoveryResult {
    std::vector<RecoveryPoint> points;
    std::vector<std::vector<cplx>> values;  // [point][fiber]
};

inline bool is_quantization(const ModuleOp& op) {
    return op.provenance.rfind("quantize", 0) == 0 || op.provenance == "identity" || op.provenance == "zero";
}

inline RecoveryResult recover_symbol(const ModuleOp& op, const std::vector<RecoveryPoint>& points,
                                     const RecoveryParams& p, std::shared_ptr<const RecoveryKernel> kernel = nullptr) {
    if (!is_quantization(op) && !p.experimental)
        throw std::invalid_argument("recover_symbol: operator is not a quantization; set the experimental flag");
    if (!kernel) kernel = RecoveryKernel::build(op.grid, p);
    if (!(kernel->axis == op.grid.axis())) throw std::invalid_argument("recover_symbol: kernel built for another grid");
    OrbitStencil st{p.delta, p.stencil_order};
    RecoveryResult res;
    res.points = points;
    for (auto& pt : points) {
        std::vector<cplx> vals;
        for (auto& M : op.mats) {
            cplx s = kernel->pair(orbit_b_matrix(op.grid, M, pt.z, pt.zeta, st));
            if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
                throw std::runtime_error("recover_symbol: non-finite intermediate values");
            vals.push_back(s);
        }
        res.values.push_back(std::move(vals));
    }
    return res;
}

// Literal slice-wise form for n = 1: for each eta node apply B F* to v(., eta) and pair with conj(u(., eta)).
// Uses the kernel's eta nodes; matches the trace form when kink corrections are off.
inline cplx recover_sliced(const CMat& B, const RecoveryKernel& rk) {
    const Grid& a = rk.axis;
    const int N = a.N;
    const double W = rk.params.W, T = rk.params.T;
    cplx total = 0.0;
    for (std::size_t e = 0; e < rk.eta.size(); ++e) {
        double eta = rk.eta[e];
        CVec vh(N);
        for (int l = 0; l < N; ++l) {
            double xi = a.xi(l);
            vh[l] = (eta < xi && eta > xi - W) ? kernel_v(xi, eta) : cplx(0.0);
        }
        SampledFn phi = inverse_fourier(SampledFn(a, vh, Side::frequency));
        CVec psi = B * phi.v;
        cplx s = 0.0;
        for (int j = 0; j < N; ++j)
            if (a.x(j) <= 1e-12 && a.x(j) >= -T - 1e-12) s += std::conj(kernel_u(a.x(j), eta)) * psi[j];
        total += rk.weight[e] * a.h() * s;
    }
    return std::sqrt(2.0 * pi) * total;
}

struct RoundtripRow {
    std::string path;  // "operator" or "direct"
    RecoveryPoint point;
    int fiber = 0;
    cplx S = 0.0, a = 0.0;
    double err = 0.0;
};

inline std::vector<RoundtripRow> roundtrip_report(const Symbol& a, const std::vector<RecoveryPoint>& points,
                                                  const RecoveryParams& p, bool direct = true) {
    if (!a.family) throw std::invalid_argument("roundtrip_report: symbol needs a family descriptor");
    std::vector<RoundtripRow> rows;
    auto truth = [&](const RecoveryPoint& pt, int l) {
        return (*a.family)(pt.z.data(), pt.zeta.data(), a.grid.n, l);
    };
    RecoveryResult r = recover_symbol(quantize(a), points, p);
    for (std::size_t i = 0; i < points.size(); ++i)
        for (int l = 0; l < a.m(); ++l) {
            RoundtripRow row{"operator", points[i], l, r.values[i][l], truth(points[i], l), 0.0};
            row.err = std::abs(row.S - row.a);
            rows.push_back(row);
        }
    if (direct && a.grid.n == 1) {
        Symbol b = smoothing_image(a);
        for (auto& pt : points) {
            auto vals = reconstruct_from_b(b, pt.z[0], pt.zeta[0], p);
            for (int l = 0; l < a.m(); ++l) {
                RoundtripRow row{"direct", pt, l, vals[l], truth(pt, l), 0.0};
                row.err = std::abs(row.S - row.a);
                rows.push_back(row);
            }
        }
    }
    return rows;
}

}  // namespace cordes
