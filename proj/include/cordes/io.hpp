#pragma once

#include "quantize.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace cordes {

namespace fs = std::filesystem;

namespace detail {

inline void put_f64(std::ostream& os, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

inline double get_f64(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("sidecar: truncated data");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= std::uint64_t(b[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

inline json grid_json(const Grid& g) { return {{"n", g.n}, {"N", g.N}, {"L", g.L}}; }

inline Grid grid_of(const json& j) { return make_grid(j.at("n").get<int>(), j.at("N").get<int>(), j.at("L").get<double>()); }

// blocks are written row-major: block, row, column
inline void write_blocks(const fs::path& file, const std::vector<CMat>& blocks) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + file.string());
    for (auto& M : blocks)
        for (Eigen::Index r = 0; r < M.rows(); ++r)
            for (Eigen::Index c = 0; c < M.cols(); ++c) {
                put_f64(os, M(r, c).real());
                put_f64(os, M(r, c).imag());
            }
}

inline std::vector<CMat> read_blocks(const fs::path& file, int count, std::size_t rows, std::size_t cols) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + file.string());
    std::vector<CMat> out(count, CMat(rows, cols));
    for (auto& M : out)
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) {
                double re = get_f64(is);
                double im = get_f64(is);
                M(r, c) = cplx(re, im);
            }
    return out;
}

inline json read_json(const fs::path& p) {
    std::ifstream is(p);
    if (!is) throw std::runtime_error("cannot read " + p.string());
    return json::parse(is);
}

inline void write_text(const fs::path& p, const std::string& s) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os << s;
}

}  // namespace detail

// Writes <stem>.json and the sidecar <stem>.bin next to it.
inline void save_symbol(const Symbol& a, const fs::path& manifest) {
    fs::path bin = manifest;
    bin.replace_extension(".bin");
    json m = {{"kind", "symbol"},
              {"grid", detail::grid_json(a.grid)},
              {"fibers", a.fibers.labels},
              {"shape", {a.m(), a.grid.size(), a.grid.size()}},
              {"layout", "fiber,x,xi; float64 re,im little-endian"},
              {"data", bin.filename().string()}};
    if (a.family) {
        const auto& f = *a.family;
        m["family"] = f.params;
        m["shift_x"] = f.sx;
        m["shift_xi"] = f.sxi;
        m["smooth_level"] = f.smooth_level;
    } else {
        m["family"] = nullptr;
    }
    detail::write_text(manifest, m.dump(2) + "\n");
    detail::write_blocks(bin, a.data);
}

inline Symbol load_symbol(const fs::path& manifest) {
    json m = detail::read_json(manifest);
    if (m.value("kind", "") != "symbol") throw std::runtime_error("load_symbol: manifest is not a symbol");
    Grid g = detail::grid_of(m.at("grid"));
    FiberSet f(m.at("fibers").get<std::vector<std::string>>());
    Symbol s{g, f, detail::read_blocks(manifest.parent_path() / m.at("data").get<std::string>(), f.m(), g.size(), g.size()),
             std::nullopt};
    if (!m.at("family").is_null()) {
        SymbolFamily fam = family_from_json(m.at("family"), g.n);
        fam.sx = m.at("shift_x").get<std::array<double, 2>>();
        fam.sxi = m.at("shift_xi").get<std::array<double, 2>>();
        fam.smooth_level = m.at("smooth_level").get<int>();
        fam.period_L = g.L;
        s.family = fam;
    }
    return s;
}

inline void save_op(const ModuleOp& a, const fs::path& manifest) {
    fs::path bin = manifest;
    bin.replace_extension(".bin");
    json m = {{"kind", "operator"},
              {"grid", detail::grid_json(a.grid)},
              {"fibers", a.fibers.labels},
              {"shape", {a.m(), a.grid.size(), a.grid.size()}},
              {"layout", "fiber,row,col; float64 re,im little-endian"},
              {"provenance", a.provenance},
              {"data", bin.filename().string()}};
    detail::write_text(manifest, m.dump(2) + "\n");
    detail::write_blocks(bin, a.mats);
}

inline ModuleOp load_op(const fs::path& manifest) {
    json m = detail::read_json(manifest);
    if (m.value("kind", "") != "operator") throw std::runtime_error("load_op: manifest is not an operator");
    Grid g = detail::grid_of(m.at("grid"));
    FiberSet f(m.at("fibers").get<std::vector<std::string>>());
    return ModuleOp{g, f,
                    detail::read_blocks(manifest.parent_path() / m.at("data").get<std::string>(), f.m(), g.size(), g.size()),
                    m.value("provenance", "")};
}

inline std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> r) {
        if (r.size() != header.size()) throw std::logic_error("Table: row width does not match header");
        rows.push_back(std::move(r));
    }

    std::string csv() const {
        std::ostringstream os;
        auto line = [&](const std::vector<std::string>& r) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (i) os << ',';
                const auto& c = r[i];
                if (c.find_first_of(",\"\n") != std::string::npos) {
                    os << '"';
                    for (char ch : c) os << (ch == '"' ? "\"\"" : std::string(1, ch));
                    os << '"';
                } else {
                    os << c;
                }
            }
            os << '\n';
        };
        line(header);
        for (auto& r : rows) line(r);
        return os.str();
    }
};

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hash_hex(const std::string& s) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(s)));
    return buf;
}

}  // namespace cordes
