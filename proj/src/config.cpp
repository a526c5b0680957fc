#include "maxiset/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "maxiset/kernel.hpp"
#include "maxiset/zoo.hpp"

namespace maxiset {

namespace {

template <class T>
T require(const nlohmann::json& doc, const std::string& key) {
    if (!doc.contains(key)) throw ConfigError("missing config key '" + key + "'");
    try {
        return doc.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad value for '" + key + "': " + e.what());
    }
}

template <class T>
T optional_value(const nlohmann::json& doc, const std::string& key, T fallback) {
    if (!doc.contains(key)) return fallback;
    try {
        return doc.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad value for '" + key + "': " + e.what());
    }
}

} // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& doc) {
    ExperimentConfig cfg;
    const auto model = require<nlohmann::json>(doc, "model");
    cfg.sigma = require<double>(model, "sigma");
    cfg.p = optional_value<double>(model, "p", 2.0);
    cfg.dim = require<int>(model, "d");
    cfg.resolution = require<int>(model, "resolution");
    cfg.function = require<std::string>(doc, "function");

    const auto proc = require<nlohmann::json>(doc, "procedure");
    cfg.procedure.type = require<std::string>(proc, "type");
    cfg.procedure.betas = require<std::vector<double>>(proc, "betas");
    cfg.procedure.C = optional_value<double>(proc, "C", 1.0);
    cfg.procedure.C1 = optional_value<double>(proc, "C1", 0.0);
    cfg.procedure.target_beta = optional_value<double>(proc, "target_beta", 0.0);

    cfg.kernels = require<std::vector<std::string>>(doc, "kernels");
    cfg.n_grid = require<std::vector<std::int64_t>>(doc, "n_grid");
    cfg.replications = require<int>(doc, "replications");
    cfg.seed = optional_value<std::uint64_t>(doc, "seed", 0);
    if (doc.contains("outputs"))
        cfg.out_dir = optional_value<std::string>(doc.at("outputs"), "dir", "");
    return cfg;
}

void ExperimentConfig::validate() const {
    if (!(sigma >= 0.0)) throw ConfigError("model.sigma must be >= 0");
    if (!(p >= 1.0)) throw ConfigError("model.p must be >= 1");
    if (dim != 1 && dim != 2) throw ConfigError("model.d must be 1 or 2");
    if (resolution < 4 || (resolution & (resolution - 1)) != 0)
        throw ConfigError("model.resolution must be a power of two >= 4");
    if (replications < 2) throw ConfigError("replications must be >= 2");
    if (n_grid.size() < 1) throw ConfigError("n_grid must be nonempty");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 2) throw ConfigError("n_grid entries must be >= 2");
        if (i > 0 && n_grid[i] < 2 * n_grid[i - 1])
            throw ConfigError("n_grid must be geometric with ratio >= 2");
    }
    if (procedure.type != "fixed" && procedure.type != "lepski")
        throw ConfigError("procedure.type must be 'fixed' or 'lepski'");
    if (procedure.betas.empty()) throw ConfigError("procedure.betas must be nonempty");
    for (double b : procedure.betas)
        if (!(b > 0.0)) throw ConfigError("procedure.betas must be > 0");
    if (!(procedure.C > 0.0)) throw ConfigError("procedure.C must be > 0");
    if (procedure.type == "lepski") {
        for (std::size_t i = 0; i < procedure.betas.size(); ++i) {
            const double b = procedure.betas[i];
            if (b == std::floor(b))
                throw ConfigError("lepski betas must be non-integer");
            if (i > 0 && !(b > procedure.betas[i - 1]))
                throw ConfigError("lepski betas must be strictly increasing");
        }
        if (kernels.size() != procedure.betas.size())
            throw ConfigError("lepski needs one kernel per beta");
    } else {
        if (kernels.size() != procedure.betas.size() && kernels.size() != 1)
            throw ConfigError("fixed procedure needs one kernel per beta (or a single shared one)");
    }

    // registry resolution; kernel construction also checks its own bounds
    for (const std::string& spec : kernels) (void)kernel_from_spec(spec, dim);
    (void)zoo_from_spec(function, dim, std::max(64, resolution / 64));
}

ExperimentConfig load_config(const std::string& path, nlohmann::json* raw) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig cfg = ExperimentConfig::from_json(doc);
    try {
        cfg.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    if (raw) *raw = doc;
    return cfg;
}

std::string config_hash(const nlohmann::json& doc) {
    const std::string canonical = doc.dump(); // object keys are sorted
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex;
    for (int shift = 60; shift >= 0; shift -= 4) os << ((h >> shift) & 0xF);
    return os.str();
}

} // namespace maxiset
