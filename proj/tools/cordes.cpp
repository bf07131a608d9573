#include <cordes/experiments.hpp>
#include <cordes/schema.hpp>

#include <CLI11.hpp>

using namespace cordes;

namespace {

int list_experiments(bool as_json) {
    if (as_json) {
        json a = json::array();
        for (auto& e : registry())
            a.push_back({{"name", e.name},
                         {"criterion", e.criterion},
                         {"keys", e.keys()},
                         {"runtime", e.runtime},
                         {"summary", e.summary}});
        std::cout << a.dump(2) << "\n";
        return 0;
    }
    std::printf("%-22s %-4s %-10s %s\n", "experiment", "crit", "runtime", "config keys");
    for (auto& e : registry()) {
        std::string keys;
        for (auto& k : e.keys()) keys += (keys.empty() ? "" : ",") + k;
        std::string crit = e.criterion ? std::to_string(e.criterion) : "-";
        std::printf("%-22s %-4s %-10s %s\n", e.name.c_str(), crit.c_str(), e.runtime.c_str(), keys.c_str());
    }
    return 0;
}

int run(const std::string& config_path, const std::string& out, int workers) {
    json user;
    try {
        user = detail::read_json(config_path);
    } catch (const json::parse_error& e) {
        std::cerr << "cordes: schema error: (root): not valid JSON: " << e.what() << "\n";
        return 2;
    }
    try {
        RunContext ctx;
        ctx.workers = workers;
        ctx.progress = &std::cerr;
        RunRecord rec = run_experiment(user, out, ctx);
        for (auto& a : rec.outcome.assertions)
            if (!a.pass)
                std::cerr << "cordes: assertion failed: " << a.name << " = " << fmt_num(a.value) << " (want "
                          << a.relation << " " << fmt_num(a.tolerance) << ")\n";
        std::cout << rec.summary.string() << "\n";
        return rec.outcome.passed() ? 0 : 1;
    } catch (const SchemaError& e) {
        std::cerr << "cordes: schema error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cordes: numerical operator-calculus lab"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "run one experiment from a JSON config");
    std::string config, out;
    int workers = 0;
    run_cmd->add_option("--config", config, "config file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--out", out, "output directory");
    run_cmd->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);

    auto* list_cmd = app.add_subcommand("list", "list registered experiments");
    bool as_json = false;
    list_cmd->add_flag("--json", as_json, "print the registry as a JSON array");

    app.add_subcommand("schema", "print the config JSON schema");

    CLI11_PARSE(app, argc, argv);
    try {
        if (app.got_subcommand("list")) return list_experiments(as_json);
        if (app.got_subcommand("schema")) {
            std::cout << config_schema();
            return 0;
        }
        return run(config, out, workers);
    } catch (const std::exception& e) {
        std::cerr << "cordes: error: " << e.what() << "\n";
        return 3;
    }
}
