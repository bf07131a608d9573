#pragma once

#include "grid.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

namespace cordes {

// Finitely many sample points of the spectrum of a commutative coefficient algebra.
struct FiberSet {
    std::vector<std::string> labels;

    FiberSet() : labels{"0"} {}
    explicit FiberSet(std::vector<std::string> l) : labels(std::move(l)) {
        if (labels.empty()) throw std::invalid_argument("FiberSet: need at least one fiber");
        std::set<std::string> seen(labels.begin(), labels.end());
        if (seen.size() != labels.size()) throw std::invalid_argument("FiberSet: labels must be unique");
    }

    static FiberSet scalar() { return FiberSet(); }
    static FiberSet numbered(int m) {
        std::vector<std::string> l;
        for (int i = 1; i <= m; ++i) l.push_back("l" + std::to_string(i));
        return FiberSet(std::move(l));
    }

    int m() const { return int(labels.size()); }

    int index(const std::string& label) const {
        auto it = std::find(labels.begin(), labels.end(), label);
        if (it == labels.end()) throw std::invalid_argument("unknown fiber label: " + label);
        return int(it - labels.begin());
    }

    bool operator==(const FiberSet&) const = default;
};

inline void require_same(const FiberSet& a, const FiberSet& b, const char* where) {
    if (!(a == b)) throw std::invalid_argument(std::string(where) + ": fiber set mismatch");
}

struct ModuleVec {
    FiberSet fibers;
    Grid grid;
    std::vector<CVec> slices;

    ModuleVec() = default;
    ModuleVec(FiberSet f, const Grid& g, std::vector<CVec> s)
        : fibers(std::move(f)), grid(g), slices(std::move(s)) {
        if (int(slices.size()) != fibers.m()) throw std::invalid_argument("ModuleVec: one slice per fiber");
        for (auto& v : slices)
            if (std::size_t(v.size()) != grid.size()) throw std::invalid_argument("ModuleVec: slice size mismatch");
    }

    static ModuleVec zero(const FiberSet& f, const Grid& g) {
        return ModuleVec(f, g, std::vector<CVec>(f.m(), CVec::Zero(g.size())));
    }
};

inline void require_compatible(const ModuleVec& a, const ModuleVec& b, const char* where) {
    require_same(a.grid, b.grid, where);
    require_same(a.fibers, b.fibers, where);
}

inline std::vector<cplx> cstar_inner(const ModuleVec& f, const ModuleVec& g) {
    require_compatible(f, g, "cstar_inner");
    double w = std::pow(f.grid.h(), f.grid.n);
    std::vector<cplx> out(f.fibers.m());
    for (int l = 0; l < f.fibers.m(); ++l) out[l] = w * f.slices[l].dot(g.slices[l]);
    return out;
}

namespace detail {

inline double fiber_norm2(const Grid& g, const CVec& v) {
    double s = std::pow(g.h(), g.n) * v.squaredNorm();
    if (s < -1e-14) throw std::runtime_error("negative inner product");
    return std::max(s, 0.0);
}

}  // namespace detail

inline double l2_norm(const SampledFn& f) { return std::sqrt(detail::fiber_norm2(f.grid, f.v)); }

inline double module_norm(const ModuleVec& f) {
    double best = 0.0;
    for (auto& s : f.slices) best = std::max(best, std::sqrt(detail::fiber_norm2(f.grid, s)));
    return best;
}

inline ModuleVec embed_scalar(const SampledFn& u, const FiberSet& fibers) {
    if (u.side != Side::position) throw std::invalid_argument("embed_scalar: expects a position-side function");
    return ModuleVec(fibers, u.grid, std::vector<CVec>(fibers.m(), u.v));
}

inline SampledFn eval_fiber(const ModuleVec& f, const std::string& label) {
    return SampledFn(f.grid, f.slices[f.fibers.index(label)]);
}

inline ModuleVec tensor(const ModuleVec& f, const ModuleVec& g) {
    require_same(f.fibers, g.fibers, "tensor");
    require_same(f.grid, g.grid, "tensor");
    if (f.grid.n != 1) throw std::invalid_argument("tensor: inputs must live on a 1-axis grid");
    Grid g2{2, f.grid.N, f.grid.L};
    const int N = f.grid.N;
    std::vector<CVec> out(f.fibers.m());
    for (int l = 0; l < f.fibers.m(); ++l) {
        CVec t(g2.size());
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k) t[std::size_t(j) * N + k] = f.slices[l][j] * g.slices[l][k];
        out[l] = std::move(t);
    }
    return ModuleVec(f.fibers, g2, std::move(out));
}

}  // namespace cordes
