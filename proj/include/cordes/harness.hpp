#pragma once

#include "io.hpp"
#include "rieffel.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <functional>
#include <mutex>
#include <thread>

namespace cordes {

struct SchemaError : std::runtime_error {
    std::string field;
    SchemaError(std::string f, const std::string& msg) : std::runtime_error(f + ": " + msg), field(std::move(f)) {}
};

struct Assertion {
    std::string name;
    double value = 0.0;
    std::string relation;  // "<=", ">=", "<", "==", ...
    double tolerance = 0.0;
    bool pass = false;
};

struct Outcome {
    Table table;
    std::vector<Assertion> assertions;

    bool passed() const {
        for (auto& a : assertions)
            if (!a.pass) return false;
        return true;
    }
};

struct RunContext {
    int workers = 0;  // 0: take it from the config, else 1
    bool timing_in_csv = false;
    std::ostream* progress = nullptr;
};

inline bool holds(double v, const std::string& rel, double tol) {
    if (std::isnan(v)) return false;
    if (rel == "<=") return v <= tol;
    if (rel == ">=") return v >= tol;
    if (rel == "<") return v < tol;
    if (rel == ">") return v > tol;
    if (rel == "==") return v == tol;
    throw std::logic_error("unknown relation " + rel);
}

inline Assertion& expect(Outcome& o, std::string name, double value, std::string rel, double tol) {
    bool ok = holds(value, rel, tol);
    o.assertions.push_back({std::move(name), value, std::move(rel), tol, ok});
    return o.assertions.back();
}

// Runs f(0..count-1) on up to `workers` threads. Callers write into per-index slots, so the
// result never depends on scheduling.
inline void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& f) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    auto body = [&] {
        for (std::size_t i; (i = next++) < count;) {
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<int>(workers, int(count)); ++t) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

// ---- config checking ----

namespace cfg {

inline const json& need(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) throw SchemaError(path + key, "missing");
    return j.at(key);
}

inline double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw SchemaError(path, "must be a number");
    return j.get<double>();
}

inline double positive(const json& j, const std::string& path) {
    double v = number(j, path);
    if (!(v > 0.0)) throw SchemaError(path, "must be positive");
    return v;
}

inline long integer(const json& j, const std::string& path, long lo, long hi) {
    if (!j.is_number_integer()) throw SchemaError(path, "must be an integer");
    long v = j.get<long>();
    if (v < lo || v > hi)
        throw SchemaError(path, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
}

inline const json& array(const json& j, const std::string& path, std::size_t min_size = 1) {
    if (!j.is_array()) throw SchemaError(path, "must be an array");
    if (j.size() < min_size) throw SchemaError(path, "needs at least " + std::to_string(min_size) + " entries");
    return j;
}

inline void boolean(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw SchemaError(path, "must be true or false");
}

inline int even_size(const json& j, const std::string& path, int n) {
    long N = integer(j, path, 4, n == 1 ? 4096 : 32);
    if (N % 2) throw SchemaError(path, "must be even");
    return int(N);
}

inline Grid grid(const json& j, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "must be an object with n, N, L");
    int n = int(integer(need(j, "n", path + "."), path + ".n", 1, 2));
    int N = even_size(need(j, "N", path + "."), path + ".N", n);
    double L = positive(need(j, "L", path + "."), path + ".L");
    for (auto& [k, v] : j.items())
        if (k != "n" && k != "N" && k != "L") throw SchemaError(path + "." + k, "unknown field");
    return make_grid(n, N, L);
}

inline SymbolFamily symbol(const json& j, const std::string& path, int n) {
    if (!j.is_object()) throw SchemaError(path, "must be an object with a family field");
    try {
        return family_from_json(j, n);
    } catch (const json::exception& e) {
        throw SchemaError(path, e.what());
    } catch (const std::invalid_argument& e) {
        throw SchemaError(path, e.what());
    }
}

inline Profile profile(const json& j, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "must be an object with a type field");
    try {
        Profile p = profile_from_json(j);
        if (!p.bounded() && !j.value("allow_unbounded", false)) throw SchemaError(path, "profile is unbounded");
        return p;
    } catch (const json::exception& e) {
        throw SchemaError(path, e.what());
    } catch (const std::invalid_argument& e) {
        throw SchemaError(path, e.what());
    }
}

inline RecoveryParams recovery(const json& j, const std::string& path, RecoveryParams base = {}) {
    if (!j.is_object()) throw SchemaError(path, "must be an object");
    static const std::vector<std::string> known = {"T", "W", "Q", "Qx", "Qxi", "Qeta", "midpoint", "extrapolate",
                                                   "kink_corrections", "delta", "stencil_order", "coarse"};
    for (auto& [k, v] : j.items())
        if (std::find(known.begin(), known.end(), k) == known.end()) throw SchemaError(path + "." + k, "unknown field");
    if (j.contains("T")) base.T = positive(j.at("T"), path + ".T");
    if (j.contains("W")) base.W = positive(j.at("W"), path + ".W");
    if (j.contains("Q")) base.Qx = base.Qxi = base.Qeta = int(integer(j.at("Q"), path + ".Q", 2, 100000));
    if (j.contains("Qx")) base.Qx = int(integer(j.at("Qx"), path + ".Qx", 2, 100000));
    if (j.contains("Qxi")) base.Qxi = int(integer(j.at("Qxi"), path + ".Qxi", 2, 100000));
    if (j.contains("Qeta")) base.Qeta = int(integer(j.at("Qeta"), path + ".Qeta", 2, 100000));
    for (const char* k : {"midpoint", "extrapolate", "kink_corrections", "coarse"})
        if (j.contains(k)) boolean(j.at(k), path + "." + k);
    base.midpoint = j.value("midpoint", base.midpoint);
    base.extrapolate = j.value("extrapolate", base.extrapolate);
    base.kink_corrections = j.value("kink_corrections", base.kink_corrections);
    base.coarse = j.value("coarse", base.coarse);
    if (j.contains("delta")) {
        base.delta = number(j.at("delta"), path + ".delta");
        if (base.delta < 0.0) throw SchemaError(path + ".delta", "must be non-negative (0 means one grid step)");
    }
    if (j.contains("stencil_order")) {
        long o = integer(j.at("stencil_order"), path + ".stencil_order", 2, 4);
        if (o == 3) throw SchemaError(path + ".stencil_order", "must be 2 or 4");
        base.stencil_order = int(o);
    }
    try {
        base.validate();
    } catch (const std::invalid_argument& e) {
        throw SchemaError(path, e.what());
    }
    return base;
}

inline std::vector<RecoveryPoint> points(const json& j, const std::string& path, int n) {
    std::vector<RecoveryPoint> out;
    array(j, path);
    for (std::size_t i = 0; i < j.size(); ++i) {
        std::string p = path + "[" + std::to_string(i) + "]";
        array(j[i], p, 2 * n);
        if (j[i].size() != std::size_t(2 * n)) throw SchemaError(p, "needs " + std::to_string(2 * n) + " numbers (z, zeta)");
        RecoveryPoint pt;
        for (int a = 0; a < n; ++a) {
            pt.z[a] = number(j[i][a], p);
            pt.zeta[a] = number(j[i][n + a], p);
        }
        out.push_back(pt);
    }
    return out;
}

inline SkewMatrix skew(const json& j, const std::string& path, int n) {
    array(j, path, n);
    Mat2 J = Mat2::Zero();
    if (j.size() != std::size_t(n)) throw SchemaError(path, "must be " + std::to_string(n) + "x" + std::to_string(n));
    for (int a = 0; a < n; ++a) {
        array(j[a], path, n);
        if (j[a].size() != std::size_t(n)) throw SchemaError(path, "must be square");
        for (int b = 0; b < n; ++b) J(a, b) = number(j[a][b], path);
    }
    if (!is_skew(J, n)) throw SchemaError(path, "J + J^T must vanish");
    return SkewMatrix(n, J);
}

}  // namespace cfg

// ---- tags and rows ----

inline std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

inline std::string vec_tag(const Vec2& v, int n) { return n == 1 ? fmt_num(v[0]) : fmt_num(v[0]) + ";" + fmt_num(v[1]); }

// compact tag of a profile or symbol spec, e.g. gaussian(width=1)
inline std::string spec_tag(const json& j) {
    std::string name = j.value("type", j.value("family", std::string("?")));
    std::string args;
    for (auto& [k, v] : j.items()) {
        if (k == "type" || k == "family") continue;
        if (!args.empty()) args += " ";
        args += k + "=" + (v.is_number() ? short_num(v.get<double>()) : v.is_object() ? spec_tag(v) : v.dump());
    }
    return args.empty() ? name : name + "(" + args + ")";
}

inline std::string skew_tag(const SkewMatrix& J) {
    if (J.n == 1) return "0";
    return "[" + short_num(J.J(0, 0)) + " " + short_num(J.J(0, 1)) + ";" + short_num(J.J(1, 0)) + " " +
           short_num(J.J(1, 1)) + "]";
}

inline Table generic_table() { return Table{{"experiment", "case", "metric", "value", "tolerance", "pass"}, {}}; }

inline Table recover_table() {
    return Table{{"experiment", "n", "fiber", "z", "zeta", "re_S", "im_S", "re_a", "im_a", "abs_err", "params_hash",
                  "runtime_ms"},
                 {}};
}

inline Table rieffel_table() {
    return Table{{"experiment", "n", "N", "J_tag", "F_tag", "G_tag", "residual", "recovery_err", "flags"}, {}};
}

// generic row for a plain measurement
inline void measure(Outcome& o, const std::string& exp, const std::string& cs, const std::string& metric, double v) {
    o.table.add({exp, cs, metric, fmt_num(v), "", ""});
}

// generic row that is also an assertion
inline void check(Outcome& o, const std::string& exp, const std::string& cs, const std::string& metric, double v,
                  const std::string& rel, double tol) {
    auto& a = expect(o, cs + ":" + metric, v, rel, tol);
    o.table.add({exp, cs, metric, fmt_num(v), rel + fmt_num(tol), a.pass ? "true" : "false"});
}

// ---- output ----

inline std::string utc_timestamp() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// --out, then CORDES_OUT, then output.dir from the config, then ./cordes_out
inline fs::path output_dir(const std::string& cli_out, const json& config) {
    if (!cli_out.empty()) return cli_out;
    if (const char* env = std::getenv("CORDES_OUT"); env && *env) return env;
    if (config.contains("output") && config["output"].contains("dir")) return config["output"]["dir"].get<std::string>();
    return "cordes_out";
}

struct RunRecord {
    Outcome outcome;
    fs::path csv, summary;
    double runtime_ms = 0.0;
};

inline json summary_json(const std::string& experiment, const json& config, const Outcome& o, double runtime_ms) {
    json as = json::array();
    for (auto& a : o.assertions)
        as.push_back({{"name", a.name}, {"value", a.value}, {"relation", a.relation}, {"tolerance", a.tolerance},
                      {"pass", a.pass}});
    return {{"experiment", experiment},
            {"config_hash", hash_hex(config.dump())},
            {"assertions", as},
            {"pass", o.passed()},
            {"runtime_ms", runtime_ms},
            {"timestamp", utc_timestamp()}};
}

}  // namespace cordes
