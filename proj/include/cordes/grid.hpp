#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <iostream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace cordes {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr double pi = std::numbers::pi;

struct Grid {
    int n = 1;
    int N = 0;
    double L = 0.0;

    double h() const { return 2.0 * L / N; }
    double dxi() const { return pi / L; }
    std::size_t size() const { return n == 1 ? std::size_t(N) : std::size_t(N) * N; }

    double x(int j) const { return -L + j * h(); }
    // k runs over 0..N-1 and stands for the signed index k - N/2
    double xi(int k) const { return dxi() * (k - N / 2); }

    // 1-d grid carrying the same axis
    Grid axis() const { return Grid{1, N, L}; }

    bool operator==(const Grid&) const = default;
};

inline Grid make_grid(int n, int N, double L) {
    if (n != 1 && n != 2) throw std::invalid_argument("grid: n must be 1 or 2");
    if (N % 2 != 0) throw std::invalid_argument("grid: N must be even");
    if (N < 8) throw std::invalid_argument("grid: N must be at least 8");
    if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("grid: L must be positive");
    return Grid{n, N, L};
}

inline void require_same(const Grid& a, const Grid& b, const char* where) {
    if (!(a == b)) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

// position of flat node index p along each axis (row-major, last axis fastest)
inline std::array<int, 2> unflatten(const Grid& g, std::size_t p) {
    if (g.n == 1) return {int(p), 0};
    return {int(p / g.N), int(p % g.N)};
}

enum class Side { position, frequency };

struct SampledFn {
    Grid grid;
    CVec v;
    Side side = Side::position;

    SampledFn() = default;
    SampledFn(const Grid& g, CVec samples, Side s = Side::position)
        : grid(g), v(std::move(samples)), side(s) {
        if (std::size_t(v.size()) != grid.size())
            throw std::invalid_argument("SampledFn: sample count must be N^n");
        if (!v.allFinite()) throw std::invalid_argument("SampledFn: non-finite samples");
    }

    // largest boundary sample relative to the largest sample
    double edge_ratio() const {
        double peak = v.cwiseAbs().maxCoeff();
        if (peak == 0.0) return 0.0;
        double edge = 0.0;
        for (std::size_t p = 0; p < grid.size(); ++p) {
            auto [a, b] = unflatten(grid, p);
            bool on_edge = a == 0 || a == grid.N - 1;
            if (grid.n == 2) on_edge = on_edge || b == 0 || b == grid.N - 1;
            if (on_edge) edge = std::max(edge, std::abs(v[p]));
        }
        return edge / peak;
    }

    bool effectively_supported(double tol = 1e-10) const { return edge_ratio() <= tol; }
};

// Generic constructor: only warns when the effective-support condition fails.
inline SampledFn sampled(const Grid& g, CVec samples, Side s = Side::position) {
    SampledFn f(g, std::move(samples), s);
    if (!f.effectively_supported())
        std::cerr << "cordes: warning: samples not negligible at the grid boundary\n";
    return f;
}

namespace detail {

// In-place unscaled DFT along one axis of a row-major N^n array.
// sign = -1 is e^{-2 pi i jk/N}, sign = +1 is e^{+2 pi i jk/N}.
struct Dft {
    Eigen::FFT<double> fft;
    std::vector<cplx> in, out;
    Dft() { fft.SetFlag(Eigen::FFT<double>::Unscaled); }
};

inline void dft_axis(Dft& d, cplx* data, int n, int N, int axis, int sign) {
    auto& fft = d.fft;
    auto& in = d.in;
    auto& out = d.out;
    in.resize(N);
    out.resize(N);
    std::size_t stride = (n == 2 && axis == 0) ? std::size_t(N) : 1;
    std::size_t lines = (n == 1) ? 1 : std::size_t(N);
    for (std::size_t l = 0; l < lines; ++l) {
        std::size_t base = (n == 1) ? 0 : (axis == 0 ? l : l * N);
        for (int i = 0; i < N; ++i) in[i] = data[base + i * stride];
        if (sign < 0)
            fft.fwd(out, in);
        else
            fft.inv(out, in);
        for (int i = 0; i < N; ++i) data[base + i * stride] = out[i];
    }
}

inline void dft(Dft& d, cplx* data, int n, int N, int sign) {
    for (int a = 0; a < n; ++a) dft_axis(d, data, n, N, a, sign);
}

inline void dft(cplx* data, int n, int N, int sign) {
    Dft d;
    dft(d, data, n, N, sign);
}

inline double parity(int k) { return (k & 1) ? -1.0 : 1.0; }

}  // namespace detail

// fhat(xi_k) = (2pi)^{-n/2} h^n sum_j e^{-i x_j.xi_k} f(x_j).
// With x_j = -L + jh and xi_k = (pi/L)(k - N/2) the kernel is (-1)^(k-N/2) e^{-2 pi i j k/N}.
inline SampledFn fourier(const SampledFn& f) {
    if (f.side != Side::position) throw std::invalid_argument("fourier: expects a position-side function");
    const Grid& g = f.grid;
    const int N = g.N, half = N / 2;
    CVec w = f.v;
    detail::dft(w.data(), g.n, N, -1);
    double c = std::pow(g.h() / std::sqrt(2.0 * pi), g.n);
    CVec out(g.size());
    for (std::size_t p = 0; p < g.size(); ++p) {
        auto [k1, k2] = unflatten(g, p);
        int s1 = k1 - half, s2 = k2 - half;
        int q1 = (s1 + N) % N;
        double sgn = detail::parity(s1);
        std::size_t src = q1;
        if (g.n == 2) {
            src = std::size_t(q1) * N + (s2 + N) % N;
            sgn *= detail::parity(s2);
        }
        out[p] = c * sgn * w[src];
    }
    return SampledFn(g, std::move(out), Side::frequency);
}

inline SampledFn inverse_fourier(const SampledFn& fh) {
    if (fh.side != Side::frequency) throw std::invalid_argument("inverse_fourier: expects a frequency-side function");
    const Grid& g = fh.grid;
    const int N = g.N, half = N / 2;
    CVec w(g.size());
    for (std::size_t p = 0; p < g.size(); ++p) {
        auto [k1, k2] = unflatten(g, p);
        int s1 = k1 - half, s2 = k2 - half;
        double sgn = detail::parity(s1);
        std::size_t dst = (s1 + N) % N;
        if (g.n == 2) {
            dst = dst * N + (s2 + N) % N;
            sgn *= detail::parity(s2);
        }
        w[dst] = sgn * fh.v[p];
    }
    detail::dft(w.data(), g.n, N, +1);
    w *= std::pow(g.dxi() / std::sqrt(2.0 * pi), g.n);
    return SampledFn(g, std::move(w), Side::position);
}

inline cplx quad(const SampledFn& f) {
    double wgt = f.side == Side::position ? f.grid.h() : f.grid.dxi();
    return std::pow(wgt, f.grid.n) * f.v.sum();
}

// quadrature on the frequency side; same as quad for frequency-side input
inline cplx quad_freq(const SampledFn& fh) { return quad(fh); }

inline SampledFn abs2(const SampledFn& f) {
    return SampledFn(f.grid, f.v.cwiseAbs2().cast<cplx>(), f.side);
}

// Probabilists' Hermite polynomial He_k.
inline double hermite_he(int k, double t) {
    if (k == 0) return 1.0;
    double a = 1.0, b = t;
    for (int m = 1; m < k; ++m) {
        double c = t * b - m * a;
        a = b;
        b = c;
    }
    return b;
}

enum class TestFamily { gaussian, hermite, modulated_gaussian };

struct TestParams {
    double center[2] = {0.0, 0.0};
    double width = 1.0;
    int k[2] = {0, 0};           // hermite index per axis
    double freq[2] = {0.0, 0.0};  // modulation frequency per axis
};

inline SampledFn test_function(TestFamily fam, const TestParams& p, const Grid& g) {
    if (!(p.width > 0.0)) throw std::invalid_argument("test_function: width must be positive");
    for (int a = 0; a < g.n; ++a)
        if (p.k[a] < 0 || p.k[a] > 8) throw std::invalid_argument("test_function: hermite index must be in 0..8");
    CVec v(g.size());
    for (std::size_t q = 0; q < g.size(); ++q) {
        auto idx = unflatten(g, q);
        cplx val = 1.0;
        for (int a = 0; a < g.n; ++a) {
            double t = (g.x(idx[a]) - p.center[a]) / p.width;
            double f = std::exp(-0.5 * t * t);
            if (fam == TestFamily::hermite) f *= hermite_he(p.k[a], t);
            val *= f;
            if (fam == TestFamily::modulated_gaussian) val *= std::polar(1.0, p.freq[a] * g.x(idx[a]));
        }
        v[q] = val;
    }
    SampledFn f(g, std::move(v));
    if (!f.effectively_supported())
        throw std::invalid_argument("test_function: parameters violate effective support");
    return f;
}

inline SampledFn gaussian_fn(const Grid& g, double width = 1.0) {
    TestParams p;
    p.width = width;
    return test_function(TestFamily::gaussian, p, g);
}

}  // namespace cordes
