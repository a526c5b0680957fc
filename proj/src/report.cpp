#include "maxiset/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "maxiset/errors.hpp"
#include "maxiset/parallel.hpp"
#include "maxiset/rng.hpp"

namespace maxiset {

namespace {

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

} // namespace

std::string csv_body(const RiskReport& report) {
    if (report.rows.empty())
        throw std::invalid_argument("reports must have at least 1 row");
    std::ostringstream os;
    os << "n,h,risk,std_error,bias_sup,variance_risk,psi,ratio\n";
    for (const RiskRow& r : report.rows) {
        os << r.n << ',' << fmt12(r.h) << ',' << fmt12(r.risk) << ','
           << fmt12(r.std_error) << ',' << fmt12(r.bias_sup) << ','
           << fmt12(r.variance_risk) << ',' << fmt12(r.psi) << ','
           << fmt12(r.ratio) << '\n';
    }
    return os.str();
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << body;
    if (!out) throw std::runtime_error("write failed for " + path);
}

nlohmann::json summary_json(const RiskReport& report,
                            const std::optional<MaxisetVerdict>& channels) {
    nlohmann::json doc;
    const bool fitted = std::isfinite(report.fitted_exponent);
    doc["fitted_exponent"] = fitted ? nlohmann::json(report.fitted_exponent)
                                    : nlohmann::json(nullptr);
    doc["target_exponent"] = std::isfinite(report.target_exponent)
                                 ? nlohmann::json(report.target_exponent)
                                 : nlohmann::json(nullptr);
    doc["verdict"] = fitted ? nlohmann::json(to_string(report.verdict))
                            : nlohmann::json(nullptr);
    if (channels) {
        nlohmann::json ch;
        ch["bias"] = to_string(channels->bias_channel);
        ch["rate"] = to_string(channels->rate_channel);
        ch["seminorm"] = to_string(channels->seminorm_channel);
        ch["agree"] = channels->channels_agree;
        if (channels->integer_boundary) {
            ch["integer_boundary"] = true;
            ch["holder_side"] = channels->holder_side;
            ch["besov_side"] = channels->besov_side;
        }
        doc["channels"] = ch;
        doc["verdict"] = to_string(channels->overall);
    }
    return doc;
}

std::string svg_plot(const RiskReport& report) {
    if (report.rows.empty())
        throw std::invalid_argument("reports must have at least 1 row");
    const double width = 640, height = 480, margin = 60;
    // log-log: x = log(log n / n), y = log risk
    std::vector<double> xs, ys;
    for (const RiskRow& r : report.rows) {
        xs.push_back(std::log(std::log(static_cast<double>(r.n)) / r.n));
        ys.push_back(std::log(std::max(r.risk, 1e-300)));
    }
    double xmin = xs.front(), xmax = xs.front(), ymin = ys.front(), ymax = ys.front();
    for (double x : xs) { xmin = std::min(xmin, x); xmax = std::max(xmax, x); }
    // reference line psi^p through the first point
    const double slope =
        std::isfinite(report.target_exponent) ? report.target_exponent * report.p : 0.0;
    std::vector<double> ref;
    for (double x : xs) ref.push_back(ys.front() + slope * (x - xs.front()));
    for (double y : ys) { ymin = std::min(ymin, y); ymax = std::max(ymax, y); }
    for (double y : ref) { ymin = std::min(ymin, y); ymax = std::max(ymax, y); }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto px = [&](double x) {
        return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin);
    };
    auto py = [&](double y) {
        return height - margin - (y - ymin) / (ymax - ymin) * (height - 2 * margin);
    };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
       << "\" height=\"" << height << "\">\n";
    os << "  <line class=\"axis\" x1=\"" << margin << "\" y1=\"" << height - margin
       << "\" x2=\"" << width - margin << "\" y2=\"" << height - margin << "\"/>\n";
    os << "  <line class=\"axis\" x1=\"" << margin << "\" y1=\"" << margin
       << "\" x2=\"" << margin << "\" y2=\"" << height - margin << "\"/>\n";
    os << "  <line class=\"ref\" x1=\"" << px(xs.front()) << "\" y1=\""
       << py(ref.front()) << "\" x2=\"" << px(xs.back()) << "\" y2=\""
       << py(ref.back()) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    os << "  <polyline class=\"data\" fill=\"none\" stroke=\"black\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i)
        os << (i ? " " : "") << px(xs[i]) << ',' << py(ys[i]);
    os << "\"/>\n";
    os << "</svg>\n";
    return os.str();
}

namespace {

struct ExperimentArtifacts {
    std::string label;
    std::string csv;
    std::string summary;
    std::string svg;
};

} // namespace

int run_config(const std::string& config_path, const RunOptions& options,
               std::ostream& log) {
    ExperimentConfig cfg;
    nlohmann::json raw;
    try {
        cfg = load_config(config_path, &raw);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return 2;
    }
    if (options.seed_override) cfg.seed = *options.seed_override;
    std::string out_dir = !options.out_dir.empty() ? options.out_dir : cfg.out_dir;
    if (out_dir.empty()) out_dir = "out";

    try {
        std::filesystem::create_directories(out_dir);
        const auto out_path = [&](const std::string& name) {
            return (std::filesystem::path(out_dir) / name).string();
        };

        std::vector<ExperimentArtifacts> artifacts;
        const auto family = [&cfg](int res) {
            return zoo_from_spec(cfg.function, cfg.dim, res);
        };
        const ZooFunction zoo = family(cfg.resolution);

        if (cfg.procedure.type == "fixed") {
            for (std::size_t i = 0; i < cfg.procedure.betas.size(); ++i) {
                const double beta = cfg.procedure.betas[i];
                const std::string& kname =
                    cfg.kernels.size() == 1 ? cfg.kernels[0] : cfg.kernels[i];
                FixedBetaProcedure proc{beta, kernel_from_spec(kname, cfg.dim),
                                        cfg.procedure.C, false};
                log << "experiment " << i << ": fixed beta=" << beta << " kernel="
                    << kname << " function=" << cfg.function << "\n";
                RiskReport report =
                    mc_risk(zoo.signal, proc, cfg.sigma, cfg.p, cfg.n_grid,
                            cfg.replications, cfg.seed, options.threads);
                std::optional<MaxisetVerdict> channels;
                if (report.rows.size() >= 4) {
                    channels = maxiset_verdict(family, proc, std::move(report),
                                               cfg.n_grid, cfg.resolution);
                    report = channels->report;
                } else {
                    // too few rows for a rate fit; keep the raw rows
                    report.target_exponent = rate_exponent(beta, cfg.dim);
                }

                char label[32];
                std::snprintf(label, sizeof(label), "exp%03zu", i);
                ExperimentArtifacts art;
                art.label = label;
                art.csv = std::string(label) + ".csv";
                art.summary = std::string(label) + ".json";
                write_text_file(out_path(art.csv), csv_body(report));
                write_text_file(out_path(art.summary),
                                summary_json(report, channels).dump(2) + "\n");
                if (options.svg) {
                    art.svg = std::string(label) + ".svg";
                    write_text_file(out_path(art.svg), svg_plot(report));
                }
                artifacts.push_back(art);
            }
        } else {
            RegularityGrid grid;
            grid.betas = cfg.procedure.betas;
            grid.C = cfg.procedure.C;
            for (std::size_t i = 0; i < cfg.kernels.size(); ++i)
                grid.kernels.push_back(kernel_from_spec(cfg.kernels[i], cfg.dim));
            double c1 = cfg.procedure.C1;
            if (!(c1 > 0.0)) {
                grid.C1 = 1.0;
                c1 = calibrate_threshold_constant(grid, cfg.sigma, cfg.resolution,
                                                  cfg.n_grid.front(), 200,
                                                  mix_seed(cfg.seed, 0xCA11B),
                                                  options.threads);
                log << "calibrated C1 = " << c1 << "\n";
            }
            grid.C1 = c1;
            const double target = cfg.procedure.target_beta > 0.0
                                      ? cfg.procedure.target_beta
                                      : cfg.procedure.betas.back();
            log << "experiment 0: lepski B={";
            for (std::size_t i = 0; i < grid.betas.size(); ++i)
                log << (i ? "," : "") << grid.betas[i];
            log << "} target=" << target << " function=" << cfg.function << "\n";
            AdaptiveRiskResult result =
                mc_adaptive_risk(zoo.signal, grid, cfg.sigma, cfg.p, cfg.n_grid,
                                 cfg.replications, target, cfg.seed, options.threads);
            if (result.report.rows.size() >= 4)
                rate_fit(result.report, target, cfg.dim);
            else
                result.report.target_exponent = rate_exponent(target, cfg.dim);

            ExperimentArtifacts art;
            art.label = "exp000";
            art.csv = "exp000.csv";
            art.summary = "exp000.json";
            write_text_file(out_path(art.csv), csv_body(result.report));
            nlohmann::json summary = summary_json(result.report, std::nullopt);
            summary["C1"] = grid.C1;
            nlohmann::json freqs = nlohmann::json::array();
            for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
                nlohmann::json row;
                row["n"] = cfg.n_grid[ni];
                for (std::size_t l = 0; l < grid.betas.size(); ++l) {
                    char key[32];
                    std::snprintf(key, sizeof(key), "beta_%g", grid.betas[l]);
                    row[key] = static_cast<double>(result.selection_counts[ni][l]) /
                               cfg.replications;
                }
                freqs.push_back(row);
            }
            summary["selection_frequencies"] = freqs;
            write_text_file(out_path(art.summary), summary.dump(2) + "\n");

            // per-replication selection trace
            std::ostringstream sel;
            sel << "n,rep,selected_beta\n";
            for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni)
                for (std::size_t r = 0; r < result.selections[ni].size(); ++r)
                    sel << cfg.n_grid[ni] << ',' << r << ','
                        << fmt12(grid.betas[result.selections[ni][r]]) << '\n';
            write_text_file(out_path("exp000_selections.csv"), sel.str());
            if (options.svg) {
                art.svg = "exp000.svg";
                write_text_file(out_path(art.svg), svg_plot(result.report));
            }
            artifacts.push_back(art);
        }

        nlohmann::json manifest;
        manifest["config_hash"] = config_hash(raw);
        manifest["tool_version"] = kToolVersion;
        manifest["timestamp"] = iso_timestamp();
        manifest["exit_status"] = 0;
        nlohmann::json exps = nlohmann::json::array();
        for (const ExperimentArtifacts& art : artifacts) {
            nlohmann::json e;
            e["label"] = art.label;
            e["csv"] = art.csv;
            e["summary"] = art.summary;
            if (!art.svg.empty()) e["svg"] = art.svg;
            exps.push_back(e);
        }
        manifest["experiments"] = exps;
        write_text_file(out_path("run_manifest.json"), manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        log << "runtime error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

int validate_config(const std::string& config_path, std::ostream& log) {
    nlohmann::json raw;
    try {
        (void)load_config(config_path, &raw);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return 2;
    }
    log << "ok " << config_hash(raw) << "\n";
    return 0;
}

} // namespace maxiset
