#include "doctest.h"

#include <cstring>
#include <string>

#include "rbsing/rbsing.h"

namespace {

std::string take(char* s) {
    std::string out = s ? s : "";
    rbsing_string_free(s);
    return out;
}

}  // namespace

TEST_CASE("version and names") {
    CHECK(std::string(rbsing_version()) == "0.1.0");
    REQUIRE(rbsing_experiment_count() == 6);
    CHECK(std::string(rbsing_experiment_name(0)) == "enum-singularity");
    CHECK(rbsing_experiment_name(6) == nullptr);
}

TEST_CASE("experiment lifecycle") {
    rbsing_experiment* e = nullptr;
    REQUIRE(rbsing_experiment_create("enum-singularity", &e) == RBSING_OK);
    char* out = nullptr;
    CHECK(rbsing_experiment_json(e, &out) == RBSING_E_STATE);
    CHECK(rbsing_experiment_set(e, "n", "3") == RBSING_OK);
    CHECK(rbsing_experiment_set(e, "model", "sign") == RBSING_OK);
    CHECK(rbsing_experiment_set(e, "colour", "red") == RBSING_E_INVALID);
    CHECK(std::string(rbsing_last_error()).find("colour") != std::string::npos);
    REQUIRE(rbsing_experiment_run(e) == RBSING_OK);
    CHECK(std::string(rbsing_last_error()).empty());
    REQUIRE(rbsing_experiment_json(e, &out) == RBSING_OK);
    const std::string json = take(out);
    CHECK(json.find("\"exact\": \"5/8\"") != std::string::npos);
    REQUIRE(rbsing_experiment_csv(e, &out) == RBSING_OK);
    CHECK(take(out).find("enum-singularity,n;exact,3;5/8,0.625") != std::string::npos);
    int passed = 0;
    REQUIRE(rbsing_experiment_check(e, &passed, &out) == RBSING_OK);
    CHECK(passed == 1);
    CHECK(take(out).rfind("PASS", 0) == 0);
    rbsing_experiment_destroy(e);

    CHECK(rbsing_experiment_create("nope", &e) == RBSING_E_INVALID);
    CHECK(e == nullptr);
    CHECK(rbsing_experiment_create(nullptr, &e) == RBSING_E_INVALID);
}

TEST_CASE("budget and fixtures errors") {
    rbsing_experiment* e = nullptr;
    REQUIRE(rbsing_experiment_create("enum-singularity", &e) == RBSING_OK);
    CHECK(rbsing_experiment_set(e, "n", "5") == RBSING_OK);
    CHECK(rbsing_experiment_run(e) == RBSING_E_BUDGET);
    CHECK(rbsing_experiment_load_fixtures(e, "[1,2]") == RBSING_E_INVALID);
    CHECK(rbsing_experiment_load_fixtures(e, "{not json") == RBSING_E_INVALID);
    CHECK(rbsing_experiment_load_fixtures(e, "{}") == RBSING_OK);
    rbsing_experiment_destroy(e);
}

TEST_CASE("pilot fixtures round trip") {
    rbsing_experiment* e = nullptr;
    REQUIRE(rbsing_experiment_create("normal-threshold", &e) == RBSING_OK);
    rbsing_experiment_set(e, "n", "6");
    rbsing_experiment_set(e, "trials", "20");
    rbsing_experiment_set(e, "pilot", "1");
    REQUIRE(rbsing_experiment_load_fixtures(e, "{\"smin-tail\": {\"band_low\": 1}}") == RBSING_OK);
    REQUIRE(rbsing_experiment_run(e) == RBSING_OK);
    char* out = nullptr;
    REQUIRE(rbsing_experiment_updated_fixtures(e, &out) == RBSING_OK);
    const std::string fx = take(out);
    CHECK(fx.find("\"smin-tail\"") != std::string::npos);
    CHECK(fx.find("\"K\"") != std::string::npos);
    rbsing_experiment_destroy(e);
}

TEST_CASE("direct operations") {
    const int64_t m[9] = {2, 0, 1, 1, 3, 0, 0, 1, 4};
    char* out = nullptr;
    REQUIRE(rbsing_det_exact(m, 3, &out) == RBSING_OK);
    CHECK(take(out) == "25");
    REQUIRE(rbsing_enum_singularity(2, "1/2", "bernoulli", &out) == RBSING_OK);
    CHECK(take(out) == "5/8");
    CHECK(rbsing_enum_singularity(2, "1/2", "gaussian", &out) == RBSING_E_INVALID);
    const int64_t x[3] = {1, 1, 1};
    double v = 0;
    REQUIRE(rbsing_levy_integer(x, 3, "1/2", 0.0, &v) == RBSING_OK);
    CHECK(v == doctest::Approx(0.375));
    const double e1[1] = {1.0};
    REQUIRE(rbsing_threshold(e1, 1, "1/2", 4.0, &v) == RBSING_OK);
    CHECK(v == 0.125);
    CHECK(rbsing_threshold(nullptr, 1, "1/2", 4.0, &v) == RBSING_E_INVALID);
    CHECK(rbsing_levy_integer(x, 3, "abc", 0.0, &v) == RBSING_E_INVALID);
}
