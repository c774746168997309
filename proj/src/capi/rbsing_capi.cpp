#include "rbsing/rbsing.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "common/errors.hpp"
#include "concentration/concentration.hpp"
#include "exactlinalg/exactlinalg.hpp"
#include "expcli/experiments.hpp"

struct rbsing_experiment {
    rbsing::ExperimentConfig config;
    rbsing::Json fixtures = rbsing::Json::object();
    std::optional<rbsing::ExperimentResult> result;
};

namespace {

thread_local std::string g_last_error;

rbsing_status fail(rbsing_status code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

// Maps core exceptions onto status codes.
template <typename F>
rbsing_status guarded(F&& f) {
    try {
        g_last_error.clear();
        f();
        return RBSING_OK;
    } catch (const rbsing::InvalidArgument& e) {
        return fail(RBSING_E_INVALID, e.what());
    } catch (const rbsing::BudgetExceeded& e) {
        return fail(RBSING_E_BUDGET, e.what());
    } catch (const rbsing::DegenerateNullspace& e) {
        return fail(RBSING_E_DEGENERATE, e.what());
    } catch (const rbsing::PropertyViolation& e) {
        return fail(RBSING_E_PROPERTY, e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(RBSING_E_INVALID, std::string("json: ") + e.what());
    } catch (const std::bad_alloc&) {
        return fail(RBSING_E_BUDGET, "out of memory");
    } catch (const std::exception& e) {
        return fail(RBSING_E_INTERNAL, e.what());
    } catch (...) {
        return fail(RBSING_E_INTERNAL, "unknown error");
    }
}

char* dup(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

const rbsing::ExperimentResult& finished(const rbsing_experiment* e) {
    if (!e->result) throw std::logic_error("experiment has not been run");
    return *e->result;
}

rbsing_status need(const void* p, const char* what) {
    return p ? RBSING_OK : fail(RBSING_E_INVALID, std::string(what) + " is null");
}

rbsing::Json certificate_json(const rbsing::RoundingCertificate& c) {
    rbsing::Json checks = rbsing::Json::array();
    for (const auto& b : c.checks) checks.push_back({{"pass", b.pass}, {"measured", b.measured}, {"limit", b.limit}});
    return {{"y", c.y},
            {"y_prime", c.y_prime},
            {"lambda", c.lambda},
            {"p", c.p},
            {"L", c.L},
            {"constants", {{"C", c.constants.C}, {"c", c.constants.c}, {"sum_bound", c.constants.sum_bound}}},
            {"checks", checks},
            {"levy_y", c.levy_y},
            {"levy_y_prime", c.levy_y_prime},
            {"attempts", c.attempts},
            {"exact", c.exact}};
}

}  // namespace

extern "C" {

const char* rbsing_version(void) { return rbsing::kLibraryVersion; }

const char* rbsing_last_error(void) { return g_last_error.c_str(); }

void rbsing_string_free(char* s) { std::free(s); }

size_t rbsing_experiment_count(void) { return rbsing::experiment_names().size(); }

const char* rbsing_experiment_name(size_t index) {
    const auto& names = rbsing::experiment_names();
    return index < names.size() ? names[index].c_str() : nullptr;
}

rbsing_status rbsing_experiment_create(const char* name, rbsing_experiment** out) {
    if (auto s = need(name, "name")) return s;
    if (auto s = need(out, "out")) return s;
    *out = nullptr;
    return guarded([&] { *out = new rbsing_experiment{rbsing::default_config(name), rbsing::Json::object(), std::nullopt}; });
}

void rbsing_experiment_destroy(rbsing_experiment* e) { delete e; }

rbsing_status rbsing_experiment_set(rbsing_experiment* e, const char* key, const char* value) {
    if (auto s = need(e, "experiment")) return s;
    if (auto s = need(key, "key")) return s;
    if (auto s = need(value, "value")) return s;
    return guarded([&] {
        rbsing::set_param(e->config, key, value);
        e->result.reset();
    });
}

rbsing_status rbsing_experiment_load_fixtures(rbsing_experiment* e, const char* json_text) {
    if (auto s = need(e, "experiment")) return s;
    if (auto s = need(json_text, "json_text")) return s;
    return guarded([&] {
        auto j = rbsing::Json::parse(json_text);
        if (!j.is_object()) throw rbsing::InvalidArgument("fixtures must be a JSON object");
        e->fixtures = std::move(j);
    });
}

rbsing_status rbsing_experiment_run(rbsing_experiment* e) {
    if (auto s = need(e, "experiment")) return s;
    return guarded([&] {
        e->result.reset();
        e->result = rbsing::run_experiment(e->config, e->fixtures);
    });
}

#define RBSING_OUTPUT(body)                                                   \
    if (auto s = need(e, "experiment")) return s;                             \
    if (auto s = need(out, "out")) return s;                                  \
    if (!e->result) return fail(RBSING_E_STATE, "experiment has not been run"); \
    return guarded([&] { *out = dup(body); })

rbsing_status rbsing_experiment_json(const rbsing_experiment* e, char** out) {
    RBSING_OUTPUT(rbsing::to_json(finished(e).record).dump(2));
}

rbsing_status rbsing_experiment_csv(const rbsing_experiment* e, char** out) {
    RBSING_OUTPUT(rbsing::to_csv(finished(e).record));
}

rbsing_status rbsing_experiment_points_json(const rbsing_experiment* e, char** out) {
    RBSING_OUTPUT(rbsing::points_json(finished(e).record.points).dump());
}

rbsing_status rbsing_experiment_archive_json(const rbsing_experiment* e, char** out) {
    RBSING_OUTPUT([&] {
        rbsing::Json arr = rbsing::Json::array();
        for (const auto& c : finished(e).artifacts.certificates) arr.push_back(certificate_json(c));
        return arr.dump();
    }());
}

rbsing_status rbsing_experiment_updated_fixtures(const rbsing_experiment* e, char** out) {
    RBSING_OUTPUT(rbsing::merge_fixtures(e->fixtures, finished(e)).dump(2));
}

#undef RBSING_OUTPUT

rbsing_status rbsing_experiment_check(const rbsing_experiment* e, int* passed, char** report) {
    if (auto s = need(e, "experiment")) return s;
    if (auto s = need(passed, "passed")) return s;
    if (auto s = need(report, "report")) return s;
    if (!e->result) return fail(RBSING_E_STATE, "experiment has not been run");
    return guarded([&] {
        const auto lines = rbsing::check_experiment(e->config, *e->result);
        std::string text;
        bool all = true;
        for (const auto& l : lines) {
            all = all && l.pass;
            text += (l.pass ? "PASS " : "FAIL ") + l.name;
            if (!l.detail.empty()) text += " (" + l.detail + ")";
            text += '\n';
        }
        *passed = all ? 1 : 0;
        *report = dup(text);
    });
}

rbsing_status rbsing_det_exact(const int64_t* data, size_t n, char** out) {
    if (auto s = need(out, "out")) return s;
    if (n > 0)
        if (auto s = need(data, "data")) return s;
    return guarded([&] {
        rbsing::IntMatrix m(n, n, std::vector<std::int64_t>(data, data + n * n));
        *out = dup(rbsing::to_string(rbsing::det_exact(m)));
    });
}

rbsing_status rbsing_enum_singularity(size_t n, const char* p, const char* model, char** out_rational) {
    if (auto s = need(p, "p")) return s;
    if (auto s = need(model, "model")) return s;
    if (auto s = need(out_rational, "out")) return s;
    return guarded([&] {
        const std::string m(model);
        rbsing::require(m == "bernoulli" || m == "sign", "model must be bernoulli or sign");
        *out_rational = dup(rbsing::to_string(rbsing::enum_singularity(n, rbsing::parse_rational(p), m == "sign")));
    });
}

rbsing_status rbsing_levy_integer(const int64_t* x, size_t n, const char* p, double t, double* out) {
    if (auto s = need(x, "x")) return s;
    if (auto s = need(p, "p")) return s;
    if (auto s = need(out, "out")) return s;
    return guarded([&] {
        const auto law = rbsing::walk_pmf<double>(std::span<const std::int64_t>(x, n), rbsing::parse_rational(p));
        *out = rbsing::levy(law, t);
    });
}

rbsing_status rbsing_threshold(const double* x, size_t n, const char* p, double L, double* out) {
    if (auto s = need(x, "x")) return s;
    if (auto s = need(p, "p")) return s;
    if (auto s = need(out, "out")) return s;
    return guarded([&] {
        *out = rbsing::threshold(std::span<const double>(x, n), rbsing::ThresholdQuery{L, rbsing::parse_rational(p)}).T;
    });
}

}  // extern "C"
