#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mbm/point_cloud.hpp"
#include "mbm/scaling.hpp"

namespace mbm {

inline constexpr const char* kVersion = "0.1.0";

enum class ExperimentKind {
    BetaScan,
    Concentration,
    Subadditivity,
    DecimationAudit,
    AnomalousScaling,
    RandomLink,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

// Fully resolved description of one experiment run. Field applicability by
// kind:
//   beta_scan          dims (>= 3 each), sizes, trials, mode
//   concentration      dims[0], sizes[0], trials[0], t_grid (empty = default)
//   subadditivity      dims[0], sizes[0] (Poisson mean), trials[0], m
//   decimation_audit   dims[0], sizes[0], trials[0], depth
//   anomalous_scaling  dims[0] in {1,2}, sizes, trials
//   random_link        sizes (matrix orders), trials[0], distribution
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::BetaScan;
    std::vector<int> dims;
    std::vector<long> sizes;
    std::vector<long> trials;  // one entry, or one per size for ladder kinds
    std::uint64_t seed = 1;
    bool seed_explicit = false;  // true when the config or a flag set the seed
    CardinalityMode mode = CardinalityMode::Fixed;
    std::string output_path;  // JSON report destination; empty = none
    std::string csv_path;     // optional per-trial stream; empty = none
    int workers = 1;
    std::vector<double> t_grid;
    long m = 2;
    int depth = 2;
    LinkDistribution distribution = LinkDistribution::Uniform;

    void validate() const;  // throws std::invalid_argument on any violation
};

// Parses the key = value config dialect: optional [section] headers (ignored),
// # comments, quoted strings, booleans, numbers, and [a, b, c] arrays.
// Unknown keys are errors. Throws std::invalid_argument with a line number.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

struct CheckResult {
    std::string name;
    std::string status;  // "pass", "fail", or "skipped"
    std::string detail;
};

struct RunManifest {
    std::string version = kVersion;
    std::string command;  // "run" or "selftest"
    ExperimentConfig config;
    long instances_solved = 0;  // matchings computed, heuristic and exact alike
    double wall_seconds = 0.0;  // reported on stdout only, never persisted
    std::vector<CheckResult> checks;
    std::string report_json;  // exact bytes written to output_path when set

    bool all_passed() const;
};

// Executes the configured experiment, writes the JSON report (and optional
// trial CSV) when paths are set, and returns the manifest. The report bytes
// depend only on the config contents, not on worker count or wall time.
RunManifest run_experiment(const ExperimentConfig& config);

// Fast property suite: small-instance oracle agreement, the one-dimensional
// sorting law, per-instance inequality chains, synthetic fit recovery, a
// deliberately injected leaf-cost fault, and replay determinism.
RunManifest run_selftest();

}  // namespace mbm
