#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "maxiset/config.hpp"
#include "maxiset/risk.hpp"

namespace maxiset {

/// Frozen CSV body: header n,h,risk,std_error,bias_sup,variance_risk,psi,ratio
/// with 12-significant-digit decimals. Guarded by golden-file tests.
/// Throws std::invalid_argument for reports with no rows.
std::string csv_body(const RiskReport& report);

void write_text_file(const std::string& path, const std::string& body);

/// Summary document {fitted_exponent, target_exponent, verdict, channels}.
nlohmann::json summary_json(const RiskReport& report,
                            const std::optional<MaxisetVerdict>& channels);

/// Static log-log SVG: one data polyline per procedure plus one reference
/// line with the target slope.
std::string svg_plot(const RiskReport& report);

struct RunOptions {
    std::string out_dir;      ///< overrides config outputs.dir when nonempty
    int threads = 1;
    bool svg = false;
    std::optional<std::uint64_t> seed_override;
};

/// Executes all experiments described by a config file: writes per-experiment
/// CSV + JSON summary (+ SVG on request) and a run manifest. Returns the
/// process exit code: 0 success, 2 validation error, 3 runtime error.
int run_config(const std::string& config_path, const RunOptions& options,
               std::ostream& log);

/// validate subcommand: parse + validate only; prints the config hash.
int validate_config(const std::string& config_path, std::ostream& log);

} // namespace maxiset
