// Experiment driver. Talks to the library through the C API only.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "rbsing/rbsing.h"

#ifndef RBSING_DEFAULT_FIXTURES
#define RBSING_DEFAULT_FIXTURES "tests/fixtures/pinned.json"
#endif

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitAssert = 3;

struct Options {
    std::map<std::string, std::string> params;
    std::string out;
    std::string format = "json";
    std::string fixtures = RBSING_DEFAULT_FIXTURES;
    std::string archive;
    bool pilot = false;
    bool check = false;
};

struct Owned {
    char* s = nullptr;
    ~Owned() { rbsing_string_free(s); }
};

int status_exit(rbsing_status st) {
    std::cerr << "error: " << rbsing_last_error() << "\n";
    return st == RBSING_E_INVALID || st == RBSING_E_BUDGET ? kExitInvalid : kExitError;
}

std::optional<std::string> slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
    return static_cast<bool>(out);
}

int run(const std::string& name, const Options& opt) {
    rbsing_experiment* raw = nullptr;
    if (auto st = rbsing_experiment_create(name.c_str(), &raw)) return status_exit(st);
    std::unique_ptr<rbsing_experiment, decltype(&rbsing_experiment_destroy)> e(raw, rbsing_experiment_destroy);

    for (const auto& [k, v] : opt.params)
        if (auto st = rbsing_experiment_set(e.get(), k.c_str(), v.c_str())) return status_exit(st);
    if (opt.pilot)
        if (auto st = rbsing_experiment_set(e.get(), "pilot", "1")) return status_exit(st);
    if (auto text = slurp(opt.fixtures))
        if (auto st = rbsing_experiment_load_fixtures(e.get(), text->c_str())) return status_exit(st);

    if (auto st = rbsing_experiment_run(e.get())) return status_exit(st);

    Owned body;
    const auto st = opt.format == "csv" ? rbsing_experiment_csv(e.get(), &body.s) : rbsing_experiment_json(e.get(), &body.s);
    if (st) return status_exit(st);
    if (opt.out.empty()) {
        std::cout << body.s << (opt.format == "csv" ? "" : "\n");
    } else if (!write_file(opt.out, std::string(body.s) + (opt.format == "csv" ? "" : "\n"))) {
        std::cerr << "error: cannot write " << opt.out << "\n";
        return kExitError;
    }

    if (!opt.archive.empty()) {
        Owned arc;
        if (auto s = rbsing_experiment_archive_json(e.get(), &arc.s)) return status_exit(s);
        if (!write_file(opt.archive, std::string(arc.s) + "\n")) {
            std::cerr << "error: cannot write " << opt.archive << "\n";
            return kExitError;
        }
    }

    if (opt.pilot) {
        Owned fx;
        if (auto s = rbsing_experiment_updated_fixtures(e.get(), &fx.s)) return status_exit(s);
        if (!write_file(opt.fixtures, std::string(fx.s) + "\n")) {
            std::cerr << "error: cannot write " << opt.fixtures << "\n";
            return kExitError;
        }
        std::cerr << "pinned constants written to " << opt.fixtures << "\n";
    }

    if (opt.check) {
        int passed = 0;
        Owned report;
        if (auto s = rbsing_experiment_check(e.get(), &passed, &report.s)) return status_exit(s);
        std::cerr << report.s;
        if (!passed) return kExitAssert;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random Bernoulli matrix singularity experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", rbsing_version());

    Options opt;
    std::string chosen;
    for (std::size_t i = 0; i < rbsing_experiment_count(); ++i) {
        const std::string name = rbsing_experiment_name(i);
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
        for (const char* key : {"n", "p", "s", "delta", "nu", "eps", "L", "trials", "seed", "workers", "grid", "model",
                                "budget", "bound"}) {
            sub->add_option_function<std::string>(
                std::string("--") + key, [&opt, key](const std::string& v) { opt.params[key] = v; },
                std::string(key) + " (see README)");
        }
        sub->add_option("--out", opt.out, "output path (default stdout)");
        sub->add_option("--format", opt.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--fixtures", opt.fixtures, "pinned-constants file")->capture_default_str();
        sub->add_option("--archive", opt.archive, "rounding-suite: write certificates here");
        sub->add_flag("--pilot", opt.pilot, "10x trials; write pinned constants to the fixtures file");
        sub->add_flag("--assert", opt.check, "check acceptance criteria; exit 3 on failure");
        sub->callback([&chosen, name] { chosen = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInvalid;
    }
    return run(chosen, opt);
}
