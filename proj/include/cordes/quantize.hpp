#pragma once

#include "symbols.hpp"

#include <random>

namespace cordes {

struct ModuleOp {
    Grid grid;
    FiberSet fibers;
    std::vector<CMat> mats;  // (Op f)_l = mats[l] * f_l
    std::string provenance;

    int m() const { return fibers.m(); }

    static ModuleOp identity(const Grid& g, const FiberSet& f) {
        return ModuleOp{g, f, std::vector<CMat>(f.m(), CMat::Identity(g.size(), g.size())), "identity"};
    }
    static ModuleOp zero(const Grid& g, const FiberSet& f) {
        return ModuleOp{g, f, std::vector<CMat>(f.m(), CMat::Zero(g.size(), g.size())), "zero"};
    }
};

inline void require_compatible(const ModuleOp& a, const ModuleOp& b, const char* where) {
    require_same(a.grid, b.grid, where);
    require_same(a.fibers, b.fibers, where);
}

// M[j,k] = N^{-n} sum_l e^{i (x_j - x_k).xi_l} a(x_j, xi_l), one inverse DFT per row.
inline ModuleOp quantize(const Symbol& a) {
    const Grid& g = a.grid;
    const int N = g.N, n = g.n;
    const std::size_t S = g.size();
    const double scale = 1.0 / std::pow(double(N), n);
    ModuleOp op{g, a.fibers, std::vector<CMat>(a.m(), CMat(S, S)), "quantize"};
    if (a.family) op.provenance += ":" + a.family->params.dump();
    std::vector<std::size_t> wrapped(S);  // xi node -> DFT slot of its signed index
    for (std::size_t q = 0; q < S; ++q) {
        auto k = unflatten(g, q);
        std::size_t r = 0;
        for (int i = 0; i < n; ++i) r = r * N + std::size_t((k[i] - N / 2 + N) % N);
        wrapped[q] = r;
    }
    detail::Dft dft;
    CVec buf(S);
    for (int l = 0; l < a.m(); ++l) {
        CMat& M = op.mats[l];
        for (std::size_t p = 0; p < S; ++p) {
            for (std::size_t q = 0; q < S; ++q) buf[wrapped[q]] = a.data[l](p, q);
            detail::dft(dft, buf.data(), n, N, +1);
            auto j = unflatten(g, p);
            for (std::size_t c = 0; c < S; ++c) {
                auto k = unflatten(g, c);
                std::size_t r = 0;
                for (int i = 0; i < n; ++i) r = r * N + std::size_t((j[i] - k[i] + N) % N);
                M(p, c) = scale * buf[r];
            }
        }
    }
    return op;
}

inline ModuleVec apply(const ModuleOp& op, const ModuleVec& f) {
    require_same(op.grid, f.grid, "apply");
    require_same(op.fibers, f.fibers, "apply");
    std::vector<CVec> out(op.m());
    for (int l = 0; l < op.m(); ++l) out[l] = op.mats[l] * f.slices[l];
    return ModuleVec(f.fibers, f.grid, std::move(out));
}

// Brute-force double Riemann sum for the operator action, no fast transforms.
inline ModuleVec direct_apply_oracle(const Symbol& a, const ModuleVec& f) {
    const Grid& g = a.grid;
    require_same(g, f.grid, "direct_apply_oracle");
    require_same(a.fibers, f.fibers, "direct_apply_oracle");
    if ((g.n == 1 && g.N > 256) || (g.n == 2 && g.N > 32))
        throw std::invalid_argument("direct_apply_oracle: grid too large for the brute-force oracle");
    const std::size_t S = g.size();
    const double cf = std::pow(g.h() / std::sqrt(2.0 * pi), g.n);
    const double ci = std::pow(g.dxi() / std::sqrt(2.0 * pi), g.n);
    CMat E(S, S);  // e^{i x_j . xi_l}
    double x[2], xi[2];
    for (std::size_t p = 0; p < S; ++p) {
        detail::node_coords(g, p, x);
        for (std::size_t q = 0; q < S; ++q) {
            detail::freq_coords(g, q, xi);
            double ph = 0.0;
            for (int i = 0; i < g.n; ++i) ph += x[i] * xi[i];
            E(p, q) = std::polar(1.0, ph);
        }
    }
    std::vector<CVec> out(a.m());
    for (int l = 0; l < a.m(); ++l) {
        CVec uhat(S);
        for (std::size_t q = 0; q < S; ++q) {
            cplx s = 0.0;
            for (std::size_t p = 0; p < S; ++p) s += std::conj(E(p, q)) * f.slices[l][p];
            uhat[q] = cf * s;
        }
        CVec r(S);
        for (std::size_t p = 0; p < S; ++p) {
            cplx s = 0.0;
            for (std::size_t q = 0; q < S; ++q) s += E(p, q) * a.data[l](p, q) * uhat[q];
            r[p] = ci * s;
        }
        out[l] = std::move(r);
    }
    return ModuleVec(f.fibers, g, std::move(out));
}

// Weights are uniform, so the weighted adjoint is the conjugate transpose.
inline ModuleOp adjoint(const ModuleOp& a) {
    ModuleOp out{a.grid, a.fibers, {}, "adjoint"};
    for (auto& M : a.mats) out.mats.push_back(M.adjoint());
    return out;
}

inline ModuleOp compose(const ModuleOp& a, const ModuleOp& b) {
    require_compatible(a, b, "compose");
    ModuleOp out{a.grid, a.fibers, {}, "compose"};
    for (int l = 0; l < a.m(); ++l) out.mats.push_back(a.mats[l] * b.mats[l]);
    return out;
}

inline ModuleOp commutator(const ModuleOp& a, const ModuleOp& b) {
    require_compatible(a, b, "commutator");
    ModuleOp out{a.grid, a.fibers, {}, "commutator"};
    for (int l = 0; l < a.m(); ++l) {
        CMat c = a.mats[l] * b.mats[l];
        c.noalias() -= b.mats[l] * a.mats[l];
        out.mats.push_back(std::move(c));
    }
    return out;
}

inline ModuleOp linear_combination(cplx alpha, const ModuleOp& a, cplx beta, const ModuleOp& b) {
    require_compatible(a, b, "linear_combination");
    ModuleOp out{a.grid, a.fibers, {}, "combination"};
    for (int l = 0; l < a.m(); ++l) out.mats.push_back(alpha * a.mats[l] + beta * b.mats[l]);
    return out;
}

inline const CMat& fiber_op(const ModuleOp& a, const std::string& label) { return a.mats[a.fibers.index(label)]; }

struct PowerOptions {
    double tol = 1e-8;
    int max_iter = 10000;
    unsigned seed = 42;
    double floor = 0.0;  // stop once the singular value estimate drops below this
};

struct NormResult {
    double value = 0.0;
    int iterations = 0;
    bool converged = true;
    int fiber = 0;
};

// Largest singular value by power iteration on M*M. Stops when the eigen-residual
// |M*M v - rho v| falls below tol * rho.
inline NormResult spectral_norm(const CMat& M, const PowerOptions& opt = {}) {
    const Eigen::Index S = M.cols();
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> nd;
    CVec v(S);
    for (Eigen::Index i = 0; i < S; ++i) {
        double re = nd(rng);
        double im = nd(rng);
        v[i] = cplx(re, im);
    }
    v.normalize();
    NormResult r;
    CVec y, w;
    double rho = 0.0;
    for (int it = 1; it <= opt.max_iter; ++it) {
        y.noalias() = M * v;
        w.noalias() = M.adjoint() * y;
        rho = y.squaredNorm();
        r.iterations = it;
        if (rho == 0.0) {
            r.value = 0.0;
            return r;
        }
        double res = (w - rho * v).norm();
        if (res <= opt.tol * rho || std::sqrt(rho) <= opt.floor) {
            r.value = std::sqrt(rho);
            return r;
        }
        v = w / w.norm();
    }
    r.value = std::sqrt(rho);
    r.converged = false;
    return r;
}

inline NormResult op_norm_report(const ModuleOp& a, const PowerOptions& opt = {}) {
    NormResult best;
    best.value = -1.0;
    bool all = true;
    for (int l = 0; l < a.m(); ++l) {
        NormResult r = spectral_norm(a.mats[l], opt);
        all = all && r.converged;
        if (r.value > best.value) {
            best = r;
            best.fiber = l;
        }
    }
    best.converged = all;
    return best;
}

inline double op_norm(const ModuleOp& a, const PowerOptions& opt = {}) {
    NormResult r = op_norm_report(a, opt);
    if (!r.converged) std::cerr << "cordes: warning: power iteration hit the iteration cap\n";
    return r.value;
}

// A (x) I on the 2-axis grid, applied matrix-free along the first variable.
struct ExtendedOp {
    ModuleOp base;
    Grid grid2;

    ModuleVec apply(const ModuleVec& f) const {
        require_same(f.grid, grid2, "tensor_extend");
        require_same(f.fibers, base.fibers, "tensor_extend");
        const int N = grid2.N;
        std::vector<CVec> out(base.m());
        for (int l = 0; l < base.m(); ++l) {
            // row-major (x, y) samples viewed as an N x N column-major matrix are indexed (y, x)
            Eigen::Map<const CMat> F(f.slices[l].data(), N, N);
            CMat R = F * base.mats[l].transpose();
            out[l] = Eigen::Map<const CVec>(R.data(), R.size());
        }
        return ModuleVec(f.fibers, grid2, std::move(out));
    }

    ModuleOp to_dense() const {
        const int N = grid2.N;
        ModuleOp out{grid2, base.fibers, {}, "tensor_extend"};
        for (auto& M : base.mats) {
            CMat D = CMat::Zero(grid2.size(), grid2.size());
            for (int j = 0; j < N; ++j)
                for (int k = 0; k < N; ++k)
                    for (int y = 0; y < N; ++y) D(std::size_t(j) * N + y, std::size_t(k) * N + y) = M(j, k);
            out.mats.push_back(std::move(D));
        }
        return out;
    }
};

inline ExtendedOp tensor_extend(const ModuleOp& a) {
    if (a.grid.n != 1) throw std::invalid_argument("tensor_extend: operator must act on a 1-axis grid");
    return ExtendedOp{a, Grid{2, a.grid.N, a.grid.L}};
}

struct CvReport {
    double norm = 0.0;
    double seminorm = 0.0;
    double ratio = 0.0;
};

inline CvReport cv_bound_report(const Symbol& a, const PowerOptions& opt = {}) {
    CvReport r;
    r.seminorm = cv_seminorm(a);
    if (r.seminorm <= 1e-12) throw std::invalid_argument("cv_bound_report: degenerate symbol");
    r.norm = op_norm(quantize(a), opt);
    r.ratio = r.norm / r.seminorm;
    return r;
}

inline ModuleOp random_op(const Grid& g, const FiberSet& f, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    ModuleOp op{g, f, {}, "random"};
    for (int l = 0; l < f.m(); ++l) {
        CMat M(g.size(), g.size());
        for (Eigen::Index c = 0; c < M.cols(); ++c)
            for (Eigen::Index r = 0; r < M.rows(); ++r) {
                double re = nd(rng);
                double im = nd(rng);
                M(r, c) = cplx(re, im);
            }
        op.mats.push_back(M / std::sqrt(double(g.size())));
    }
    return op;
}

inline ModuleVec random_vec(const Grid& g, const FiberSet& f, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<CVec> s;
    for (int l = 0; l < f.m(); ++l) {
        CVec v(g.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            double re = nd(rng);
            double im = nd(rng);
            v[i] = cplx(re, im);
        }
        s.push_back(v);
    }
    return ModuleVec(f, g, std::move(s));
}

}  // namespace cordes
