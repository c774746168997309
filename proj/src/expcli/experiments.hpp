#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "common/rational.hpp"
#include "rounding/rounding.hpp"

namespace rbsing {

using Json = nlohmann::ordered_json;

inline constexpr const char* kLibraryVersion = "0.1.0";

/// Subcommand names, in CLI order.
const std::vector<std::string>& experiment_names();

struct ExperimentConfig {
    std::string name;
    std::vector<std::size_t> n{2};  // theorem-b sweeps a list; others use n[0]
    Rational p{1, 2};
    Rational s{0};
    double delta = 0.25;
    double nu = 0.3;
    double eps = 0.1;
    double L = 20.0;
    std::uint64_t trials = 1;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    bool pilot = false;
    std::string model = "bernoulli";  // enum/mc: bernoulli | sign
    std::vector<double> grid;         // smin-tail t grid, theorem-b L_B grid
    std::uint64_t budget = kDefaultRoundingBudget;
    double entry_bound = 50.0;        // rounding-suite: y_i uniform on [-bound, bound]

    std::size_t dim() const { return n.front(); }
    /// Trials actually run: 10x in pilot mode.
    std::uint64_t effective_trials() const { return pilot ? 10 * trials : trials; }
};

/// Default parameters for a named experiment. Throws InvalidArgument for unknown names.
ExperimentConfig default_config(std::string_view name);

/// Sets one parameter from its textual form (keys: n p s delta nu eps L trials seed workers pilot model grid
/// budget bound). Throws InvalidArgument for unknown keys or unparsable values.
void set_param(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Range checks; throws InvalidArgument.
void validate(const ExperimentConfig& cfg);

struct Point {
    Json x;
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t count = 0;
};

struct ExperimentRecord {
    std::string experiment;
    Json params;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    std::vector<Point> points;
    Json pinned = Json::object();
    double runtime_sec = 0.0;
    std::string version = kLibraryVersion;
};

Json points_json(const std::vector<Point>& points);
Json to_json(const ExperimentRecord& r);
/// One row per point: experiment,param_key,param_value,estimate,ci_low,ci_high,count.
/// Multi-key x values join keys and values with ';'.
std::string to_csv(const ExperimentRecord& r);

struct CheckLine {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Side data kept by an experiment for its own assertions.
struct ExperimentArtifacts {
    std::vector<RoundingCertificate> certificates;
    std::uint64_t rank_deficient = 0;  // normal-threshold: exact-rank oracle count
    std::uint64_t degenerate = 0;      // normal-threshold: draws skipped by unit_normal
    double min_threshold_ratio = 0.0;  // normal-threshold: min T L / (1-p)^n
    std::string exact;                 // enum-singularity: exact probability
};

struct ExperimentResult {
    ExperimentRecord record;
    ExperimentArtifacts artifacts;
};

/// Runs the experiment. `fixtures` is the whole pinned-constants object (may be empty);
/// the record's "pinned" field carries this experiment's entry, or the freshly derived one in pilot mode.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const Json& fixtures = Json::object());

/// The --assert criteria for a finished run. Criteria needing a pinned constant fail when it is missing.
std::vector<CheckLine> check_experiment(const ExperimentConfig& cfg, const ExperimentResult& result);

/// Returns `fixtures` with this experiment's pinned entry replaced by the one in `result`.
Json merge_fixtures(const Json& fixtures, const ExperimentResult& result);

// Individual experiments. Each trial k draws from RngSeed{seed, derive_stream(tag, k)}.

/// Exact singularity probability by enumeration of all 2^(n^2) matrices (n <= 4).
Rational enum_singularity(std::size_t n, const Rational& p, bool sign_model, unsigned workers = 1);

struct CountEstimate {
    std::uint64_t hits = 0;
    std::uint64_t trials = 0;
};

CountEstimate mc_singularity(std::size_t n, const Rational& p, const Rational& s, bool sign_model,
                             std::uint64_t trials, std::uint64_t seed, unsigned workers);

/// s_min(B + s 1 1^T) for each trial.
std::vector<double> smin_samples(std::size_t n, const Rational& p, const Rational& s, std::uint64_t trials,
                                 std::uint64_t seed, unsigned workers);

struct NormalSample {
    bool degenerate = false;
    bool rank_deficient = false;  // exact-rank oracle on the leading n-1 columns
    bool incomp = false;
    double T = 0.0;
};

std::vector<NormalSample> normal_threshold_samples(std::size_t n, const Rational& p, const Rational& s, double L,
                                                   double delta, double nu, std::uint64_t trials,
                                                   std::uint64_t seed, unsigned workers);

struct RoundingOutcome {
    bool success = false;
    std::uint64_t attempts = 0;
    RoundingCertificate certificate;  // valid only on success
};

std::vector<RoundingOutcome> rounding_outcomes(std::size_t n, double p, double bound, std::uint64_t count,
                                               std::uint64_t budget, std::uint64_t seed, unsigned workers);

}  // namespace rbsing
