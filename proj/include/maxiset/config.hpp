#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace maxiset {

inline constexpr const char* kToolVersion = "0.1.0";

/// Config file problems: malformed JSON, schema violations, unknown registry
/// names. The CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ProcedureConfig {
    std::string type;          ///< "fixed" or "lepski"
    std::vector<double> betas; ///< fixed: one experiment per beta; lepski: the grid B
    double C = 1.0;
    double C1 = 0.0;           ///< lepski threshold constant; <= 0 requests calibration
    double target_beta = 0.0;  ///< lepski rate target; 0 defaults to max(betas)
};

/// One self-contained experiment description, parsed from a JSON document:
/// {
///   "model": {"sigma": 1.0, "p": 2.0, "d": 1, "resolution": 16384},
///   "function": "weierstrass:beta=0.5",
///   "procedure": {"type": "fixed", "betas": [0.5], "C": 1.0},
///   "kernels": ["box"],
///   "n_grid": [1024, 4096],
///   "replications": 2,
///   "seed": 42,
///   "outputs": {"dir": "out"}
/// }
struct ExperimentConfig {
    double sigma = 1.0;
    double p = 2.0;
    int dim = 1;
    int resolution = 1 << 14;
    std::string function;
    ProcedureConfig procedure;
    std::vector<std::string> kernels;
    std::vector<std::int64_t> n_grid;
    int replications = 2;
    std::uint64_t seed = 0;
    std::string out_dir;

    static ExperimentConfig from_json(const nlohmann::json& doc);

    /// Schema and invariant checks plus registry-name resolution.
    /// Throws ConfigError with the offending detail.
    void validate() const;
};

/// Parses and validates a config file. Throws ConfigError.
ExperimentConfig load_config(const std::string& path, nlohmann::json* raw = nullptr);

/// FNV-1a hash of the canonical (key-sorted) serialization: stable under key
/// reordering in the source file.
std::string config_hash(const nlohmann::json& doc);

} // namespace maxiset
