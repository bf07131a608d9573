#pragma once

#include "grid.hpp"

#include <json.hpp>

#include <array>
#include <string>
#include <vector>

namespace cordes {

using json = nlohmann::json;

// One-variable building block with derivatives of every order.
struct Factor {
    enum Kind { one, gaussian, hermite, sine, plane_wave, sigmoid, coordinate };
    Kind kind = one;
    double center = 0.0;
    double width = 1.0;
    int order = 0;      // hermite index
    double freq = 0.0;  // sine / plane wave
    double phase = 0.0;

    // d^m/dt^m of the factor at t
    cplx deriv(double t, int m) const {
        switch (kind) {
            case one:
                return m == 0 ? 1.0 : 0.0;
            case gaussian:
            case hermite: {
                double s = (t - center) / width;
                double sc = std::pow(-1.0 / width, m);
                return sc * hermite_he(order + m, s) * std::exp(-0.5 * s * s);
            }
            case sine:
                return std::pow(freq, m) * std::sin(freq * t + phase + m * pi / 2);
            case plane_wave:
                return std::pow(cplx(0.0, freq), m) * std::polar(1.0, freq * t);
            case sigmoid:
                return std::pow(1.0 / width, m) * tanh_deriv(std::tanh((t - center) / width), m);
            case coordinate:
                return m == 0 ? cplx(t) : (m == 1 ? cplx(1.0) : cplx(0.0));
        }
        return 0.0;
    }

    bool bounded() const { return kind != coordinate; }

    // d^m/ds^m tanh(s) written as a polynomial in T = tanh(s)
    static double tanh_deriv(double T, int m) {
        std::vector<double> p{0.0, 1.0};
        for (int k = 0; k < m; ++k) {
            std::vector<double> q(p.size() + 1, 0.0);
            for (std::size_t i = 1; i < p.size(); ++i) {
                q[i - 1] += i * p[i];
                q[i + 1] -= i * p[i];
            }
            p = std::move(q);
        }
        double v = 0.0;
        for (std::size_t i = p.size(); i-- > 0;) v = v * T + p[i];
        return v;
    }
};

// Separable function on R^n: amplitude times a product of per-axis factors.
struct Profile {
    std::string tag = "constant";
    cplx amp = 1.0;
    std::array<Factor, 2> f{};

    cplx deriv(const double* y, const int* alpha, int n) const {
        cplx v = amp;
        for (int a = 0; a < n; ++a) {
            v *= f[a].deriv(y[a], alpha[a]);
            if (v == 0.0) break;
        }
        return v;
    }

    cplx operator()(const double* y, int n) const {
        int zero[2] = {0, 0};
        return deriv(y, zero, n);
    }

    bool bounded() const { return f[0].bounded() && f[1].bounded(); }
};

namespace detail {

inline std::array<double, 2> pair_or_scalar(const json& j, const char* key, double dflt) {
    if (!j.contains(key)) return {dflt, dflt};
    const auto& v = j.at(key);
    if (v.is_array()) {
        if (v.size() == 1) return {v[0].get<double>(), v[0].get<double>()};
        return {v.at(0).get<double>(), v.at(1).get<double>()};
    }
    return {v.get<double>(), v.get<double>()};
}

}  // namespace detail

// Profiles from JSON, e.g. {"type":"gaussian","width":1}, {"type":"hermite","order":[1,0]},
// {"type":"coordinate","axis":0}, {"type":"sigmoid","width":0.05}, {"type":"plane_wave","k":0.125}.
inline Profile profile_from_json(const json& j) {
    Profile p;
    std::string type = j.value("type", "constant");
    p.tag = type;
    if (j.contains("amplitude")) p.amp = j.at("amplitude").get<double>();
    int axis = j.value("axis", -1);
    auto on_axes = [&](Factor base) {
        for (int a = 0; a < 2; ++a)
            if (axis < 0 || axis == a) p.f[a] = base;
    };
    if (type == "constant") {
        if (j.contains("value")) p.amp = j.at("value").get<double>();
    } else if (type == "gaussian" || type == "hermite") {
        auto c = detail::pair_or_scalar(j, "center", 0.0);
        auto w = detail::pair_or_scalar(j, "width", 1.0);
        auto k = detail::pair_or_scalar(j, "order", 0.0);
        for (int a = 0; a < 2; ++a) {
            if (!(w[a] > 0.0)) throw std::invalid_argument("profile: width must be positive");
            Factor f;
            f.kind = Factor::hermite;
            f.center = c[a];
            f.width = w[a];
            f.order = int(k[a]);
            if (f.order < 0 || f.order > 8) throw std::invalid_argument("profile: hermite order must be in 0..8");
            p.f[a] = f;
        }
    } else if (type == "sine") {
        Factor f;
        f.kind = Factor::sine;
        f.freq = j.value("freq", 1.0);
        f.phase = j.value("phase", 0.0);
        on_axes(f);
    } else if (type == "plane_wave") {
        auto k = detail::pair_or_scalar(j, "k", 0.0);
        for (int a = 0; a < 2; ++a) {
            Factor f;
            f.kind = Factor::plane_wave;
            f.freq = k[a];
            p.f[a] = f;
        }
    } else if (type == "sigmoid") {
        Factor f;
        f.kind = Factor::sigmoid;
        f.width = j.value("width", 0.05);
        f.center = j.value("center", 0.0);
        if (!(f.width > 0.0)) throw std::invalid_argument("profile: width must be positive");
        p.f[axis < 0 ? 0 : axis] = f;
    } else if (type == "coordinate") {
        Factor f;
        f.kind = Factor::coordinate;
        p.f[axis < 0 ? 0 : axis] = f;
    } else {
        throw std::invalid_argument("profile: unknown type '" + type + "'");
    }
    return p;
}

inline Profile gaussian_profile(double width = 1.0) {
    return profile_from_json(json{{"type", "gaussian"}, {"width", width}});
}

inline Profile constant_profile(double value = 1.0) {
    return profile_from_json(json{{"type", "constant"}, {"value", value}});
}

}  // namespace cordes
