#include <catch_amalgamated.hpp>
#include <cordes/io.hpp>

#include <cstdio>
#include <cstdlib>
#include <sys/wait.h>

using namespace cordes;

namespace {

struct Result {
    int code = -1;
    std::string out, err;
};

std::string env(const char* k) {
    const char* v = std::getenv(k);
    return v ? v : "";
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    return std::string(std::istreambuf_iterator<char>(is), {});
}

Result cli(const std::string& args) {
    fs::path err = fs::temp_directory_path() / "cordes_cli_stderr.txt";
    std::string cmd = "\"" + env("CORDES_CLI") + "\" " + args + " 2>\"" + err.string() + "\"";
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
    int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    r.err = slurp(err);
    return r;
}

std::string config(const std::string& name) { return "run --config \"" + env("CORDES_CONFIGS") + "/" + name + "\""; }

fs::path scratch(const std::string& name) {
    fs::path d = fs::temp_directory_path() / ("cordes_cli_" + name);
    fs::remove_all(d);
    return d;
}

int count_lines(const std::string& s) { return int(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("cli is available") {
    REQUIRE_FALSE(env("CORDES_CLI").empty());
    REQUIRE_FALSE(env("CORDES_CONFIGS").empty());
}

TEST_CASE("list shows every experiment") {
    Result r = cli("list");
    CHECK(r.code == 0);
    CHECK(count_lines(r.out) == 11);
    for (auto* name : {"ft-selftest", "roundtrip", "conjecture-demo", "convergence"})
        CHECK(r.out.find(name) != std::string::npos);

    Result j = cli("list --json");
    CHECK(j.code == 0);
    json a = json::parse(j.out);
    CHECK(a.size() == 10);
    CHECK(a[0]["name"] == "ft-selftest");
    CHECK(a[0]["keys"].is_array());
}

TEST_CASE("schema is valid JSON") {
    Result r = cli("schema");
    CHECK(r.code == 0);
    json s = json::parse(r.out);
    CHECK(s["properties"].contains("experiment"));
}

TEST_CASE("odd grid size is a schema error naming the field") {
    fs::path d = scratch("odd");
    Result r = cli(config("bad-odd-N.json") + " --out \"" + d.string() + "\"");
    CHECK(r.code == 2);
    CHECK(r.err.find("grid.N") != std::string::npos);
    CHECK(r.out.empty());
    CHECK_FALSE(fs::exists(d / "ft-selftest.csv"));
}

TEST_CASE("unknown experiment lists valid names") {
    fs::path cfg = fs::temp_directory_path() / "cordes_unknown.json";
    std::ofstream(cfg) << R"({"experiment": "nope"})";
    Result r = cli("run --config \"" + cfg.string() + "\"");
    CHECK(r.code == 2);
    CHECK(r.err.find("experiment") != std::string::npos);
    CHECK(r.err.find("roundtrip") != std::string::npos);
}

TEST_CASE("malformed JSON is a schema error") {
    fs::path cfg = fs::temp_directory_path() / "cordes_broken.json";
    std::ofstream(cfg) << "{\"experiment\": ";
    CHECK(cli("run --config \"" + cfg.string() + "\"").code == 2);
}

TEST_CASE("unknown field is rejected") {
    fs::path cfg = fs::temp_directory_path() / "cordes_extra.json";
    std::ofstream(cfg) << R"({"experiment": "fibers", "colour": 1})";
    Result r = cli("run --config \"" + cfg.string() + "\"");
    CHECK(r.code == 2);
    CHECK(r.err.find("colour") != std::string::npos);
}

TEST_CASE("missing config file is a usage error") {
    CHECK(cli("run --config /nonexistent/cordes.json").code != 0);
    CHECK(cli("").code != 0);
}

TEST_CASE("roundtrip on the gaussian writes nine rows") {
    fs::path d = scratch("roundtrip");
    Result r = cli(config("roundtrip-gaussian.json") + " --out \"" + d.string() + "\"");
    CHECK(r.code == 0);
    CHECK(r.out.find("roundtrip.summary.json") != std::string::npos);
    std::string csv = slurp(d / "roundtrip.csv");
    CHECK(count_lines(csv) == 10);
    CHECK(csv.rfind("experiment,n,fiber,z,zeta,re_S,im_S,re_a,im_a,abs_err,params_hash,runtime_ms", 0) == 0);
    json s = json::parse(slurp(d / "roundtrip.summary.json"));
    CHECK(s["pass"] == true);
    CHECK(s["experiment"] == "roundtrip");
    CHECK(s["assertions"].is_array());
}

TEST_CASE("fibers config passes and is deterministic") {
    fs::path a = scratch("fibers_a"), b = scratch("fibers_b");
    CHECK(cli(config("fibers.json") + " --out \"" + a.string() + "\"").code == 0);
    CHECK(cli(config("fibers.json") + " --out \"" + b.string() + "\" --workers 2").code == 0);
    CHECK(slurp(a / "fibers.csv") == slurp(b / "fibers.csv"));
}

TEST_CASE("output directory from the environment") {
    fs::path d = scratch("env");
    std::string args = config("ft-selftest.json");
    std::string cmd = "CORDES_OUT=\"" + d.string() + "\" \"" + env("CORDES_CLI") + "\" " + args + " >/dev/null 2>&1";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(fs::exists(d / "ft-selftest.csv"));
}

TEST_CASE("convergence config passes") {
    fs::path d = scratch("convergence");
    Result r = cli(config("convergence.json") + " --out \"" + d.string() + "\"");
    CHECK(r.code == 0);
    json s = json::parse(slurp(d / "convergence.summary.json"));
    CHECK(s["pass"] == true);
}
