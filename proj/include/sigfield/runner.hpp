#pragma once

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace sigfield {

enum ExitCode : int { kExitPass = 0, kExitAssertion = 1, kExitConfig = 2, kExitNumerical = 3 };

/// Experiment kinds accepted by the runner.
const std::vector<std::string>& experiment_kinds();

struct ExperimentConfig {
    std::string experiment;
    std::string measure;  // empty: kind default (normalized-lebesgue for spectral/equivalence, else lebesgue)
    double domain_lo = 0.0;
    double domain_hi = 1.0;
    unsigned depth = 8;
    nlohmann::json params = nlohmann::json::object();
    std::size_t replicas = 10000;
    std::uint64_t seed = 1;
    std::string output = "sigfield-out";
    unsigned workers = 0;  // 0: SIGFIELD_WORKERS, else hardware concurrency
};

/// Validates keys and types. Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
/// Reads a JSON config file. Throws ConfigError (TOML files are rejected with a hint).
ExperimentConfig load_config(const std::filesystem::path& path);

struct Assertion {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct ExperimentReport {
    std::string experiment;
    std::vector<Assertion> assertions;
    std::vector<std::string> notes;
    /// file name -> CSV content; always contains "<experiment>.csv".
    std::map<std::string, std::string> tables;
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();

    bool passed() const;
    /// Pass/fail summary. Contains no timestamps or worker counts, so identical
    /// (config, seed) pairs give identical bytes.
    std::string summary_json(const ExperimentConfig& cfg) const;
};

/// Runs the experiment in memory. Throws the library's error types.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Writes the tables and "<experiment>.json" into cfg.output; returns the paths.
std::vector<std::filesystem::path> write_report(const ExperimentConfig& cfg, const ExperimentReport& report);

/// run_experiment + write_report with errors mapped to exit codes: assertion
/// failure 1, configuration error 2, numerical failure 3.
int run(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace sigfield
