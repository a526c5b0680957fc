#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "maxiset/config.hpp"
#include "maxiset/report.hpp"

using namespace maxiset;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("maxilab_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

nlohmann::json smoke_config() {
    nlohmann::json cfg;
    cfg["model"] = {{"sigma", 1.0}, {"p", 2.0}, {"d", 1}, {"resolution", 1024}};
    cfg["function"] = "cosine";
    cfg["procedure"] = {{"type", "fixed"}, {"betas", {0.5}}, {"C", 1.0}};
    cfg["kernels"] = {"box"};
    cfg["n_grid"] = {1024, 4096};
    cfg["replications"] = 2;
    cfg["seed"] = 42;
    return cfg;
}

fs::path write_config(const fs::path& dir, const nlohmann::json& cfg,
                      const std::string& name = "config.json") {
    const fs::path p = dir / name;
    std::ofstream out(p);
    out << cfg.dump(2);
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(MAXILAB_BIN) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("smoke run produces the expected artifacts and exit code") {
    const fs::path dir = fresh_dir("smoke");
    const fs::path cfg = write_config(dir, smoke_config());
    const fs::path out = dir / "out";
    const int code = run_cli("run " + cfg.string() + " --out " + out.string());
    CHECK(code == 0);
    const std::string csv = slurp(out / "exp000.csv");
    CHECK(csv.rfind("n,h,risk,std_error,bias_sup,variance_risk,psi,ratio\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3); // header + 2 rows
    CHECK(fs::exists(out / "exp000.json"));
    const nlohmann::json manifest =
        nlohmann::json::parse(slurp(out / "run_manifest.json"));
    CHECK(manifest["exit_status"] == 0);
    CHECK(manifest["tool_version"] == kToolVersion);
    for (const auto& exp : manifest["experiments"]) {
        CHECK(fs::exists(out / exp["csv"].get<std::string>()));
        CHECK(fs::exists(out / exp["summary"].get<std::string>()));
    }
}

TEST_CASE("unknown registry names fail validation with exit 2") {
    const fs::path dir = fresh_dir("badname");
    nlohmann::json cfg = smoke_config();
    cfg["kernels"] = {"gauss"};
    const fs::path path = write_config(dir, cfg);
    CHECK(run_cli("validate " + path.string()) == 2);
    CHECK(run_cli("run " + path.string() + " --out " + (dir / "out").string()) == 2);

    // the error message names the registry
    std::ostringstream log;
    CHECK(validate_config(path.string(), log) == 2);
    CHECK(log.str().find("box") != std::string::npos);
}

TEST_CASE("under-resolved bandwidth is a runtime error with exit 3") {
    const fs::path dir = fresh_dir("underres");
    nlohmann::json cfg = smoke_config();
    cfg["model"]["resolution"] = 256;
    cfg["n_grid"] = {1024, 4096, 16384, 65536};
    cfg["replications"] = 2;
    const fs::path path = write_config(dir, cfg);
    CHECK(run_cli("validate " + path.string()) == 0); // statically fine
    std::ostringstream log;
    const RunOptions options{(dir / "out").string(), 1, false, std::nullopt};
    CHECK(run_config(path.string(), options, log) == 3);
    CHECK(log.str().find("under-resolved") != std::string::npos);
    CHECK(log.str().find("65536") != std::string::npos);
}

TEST_CASE("identical configs produce byte-identical CSV bodies") {
    const fs::path dir = fresh_dir("determinism");
    const fs::path path = write_config(dir, smoke_config());
    std::ostringstream log;
    const RunOptions a{(dir / "a").string(), 1, false, std::nullopt};
    const RunOptions b{(dir / "b").string(), 2, false, std::nullopt};
    REQUIRE(run_config(path.string(), a, log) == 0);
    REQUIRE(run_config(path.string(), b, log) == 0);
    CHECK(slurp(dir / "a" / "exp000.csv") == slurp(dir / "b" / "exp000.csv"));
    CHECK(slurp(dir / "a" / "exp000.json") == slurp(dir / "b" / "exp000.json"));
}

TEST_CASE("config hash is stable under key reordering") {
    const nlohmann::json cfg = smoke_config();
    // same document spelled in a different key order
    nlohmann::json reordered;
    reordered["seed"] = 42;
    reordered["replications"] = 2;
    reordered["n_grid"] = {1024, 4096};
    reordered["kernels"] = {"box"};
    reordered["procedure"] = {{"C", 1.0}, {"betas", {0.5}}, {"type", "fixed"}};
    reordered["function"] = "cosine";
    reordered["model"] = {{"resolution", 1024}, {"d", 1}, {"p", 2.0}, {"sigma", 1.0}};
    CHECK(config_hash(cfg) == config_hash(reordered));
    nlohmann::json changed = cfg;
    changed["seed"] = 43;
    CHECK(config_hash(cfg) != config_hash(changed));
}

TEST_CASE("csv body format is frozen") {
    RiskReport rep;
    rep.p = 2.0;
    RiskRow row;
    row.n = 1024;
    row.h = 0.0823;
    row.risk = 0.123456789012345;
    row.std_error = 0.01;
    row.bias_sup = 0.2;
    row.variance_risk = 0.05;
    row.psi = 0.3;
    row.ratio = row.risk / (row.psi * row.psi);
    rep.rows.push_back(row);
    const std::string body = csv_body(rep);
    CHECK(body ==
          "n,h,risk,std_error,bias_sup,variance_risk,psi,ratio\n"
          "1024,0.0823,0.123456789012,0.01,0.2,0.05,0.3,1.37174210014\n");
    // ratio column is definitional to machine precision
    CHECK(row.ratio == doctest::Approx(row.risk / std::pow(row.psi, rep.p)).epsilon(1e-12));

    const RiskReport empty;
    CHECK_THROWS_AS(csv_body(empty), std::invalid_argument);
}

TEST_CASE("svg plot has one data polyline and one reference line") {
    RiskReport rep;
    rep.p = 2.0;
    rep.target_exponent = 0.25;
    for (std::int64_t n : {1024, 4096, 16384, 65536}) {
        RiskRow row;
        row.n = n;
        row.psi = psi(n, 0.5, 1);
        row.risk = std::pow(row.psi, 2.0);
        row.ratio = 1.0;
        rep.rows.push_back(row);
    }
    const std::string svg = svg_plot(rep);
    auto count = [&](const std::string& needle) {
        std::size_t hits = 0, pos = 0;
        while ((pos = svg.find(needle, pos)) != std::string::npos) {
            ++hits;
            pos += needle.size();
        }
        return hits;
    };
    CHECK(count("<polyline class=\"data\"") == 1);
    CHECK(count("class=\"ref\"") == 1);
    CHECK(count("<svg") == 1);
}

TEST_CASE("golden file comparison for the committed smoke experiment") {
    const fs::path golden_dir(MAXISET_GOLDEN_DIR);
    const fs::path dir = fresh_dir("golden");
    std::ostringstream log;
    const RunOptions options{(dir / "out").string(), 2, false, std::nullopt};
    REQUIRE(run_config((golden_dir / "smoke.json").string(), options, log) == 0);
    CHECK(slurp(dir / "out" / "exp000.csv") == slurp(golden_dir / "exp000.csv"));
}

TEST_CASE("lepski config runs end to end") {
    const fs::path dir = fresh_dir("lepski");
    nlohmann::json cfg = smoke_config();
    cfg["model"]["resolution"] = 4096;
    cfg["function"] = "weierstrass:beta=1.5";
    cfg["procedure"] = {{"type", "lepski"},
                        {"betas", {0.5, 1.5}},
                        {"C", 0.7},
                        {"C1", 1.5},
                        {"target_beta", 1.5}};
    cfg["kernels"] = {"poly:beta=1:pow=1", "order:N=2"};
    cfg["n_grid"] = {1024, 4096, 16384};
    cfg["replications"] = 4;
    const fs::path path = write_config(dir, cfg);
    std::ostringstream log;
    const RunOptions options{(dir / "out").string(), 2, true, std::nullopt};
    REQUIRE(run_config(path.string(), options, log) == 0);
    CHECK(fs::exists(dir / "out" / "exp000.csv"));
    CHECK(fs::exists(dir / "out" / "exp000_selections.csv"));
    CHECK(fs::exists(dir / "out" / "exp000.svg"));
    const nlohmann::json summary = nlohmann::json::parse(slurp(dir / "out" / "exp000.json"));
    CHECK(summary.contains("selection_frequencies"));
    CHECK(summary["C1"] == 1.5);
    // the per-replication trace has one row per (n, rep)
    const std::string trace = slurp(dir / "out" / "exp000_selections.csv");
    CHECK(std::count(trace.begin(), trace.end(), '\n') == 1 + 3 * 4);
}

TEST_CASE("lepski config without C1 calibrates it from pure noise") {
    const fs::path dir = fresh_dir("lepski_calib");
    nlohmann::json cfg = smoke_config();
    cfg["model"]["resolution"] = 4096;
    cfg["function"] = "weierstrass:beta=1.5";
    cfg["procedure"] = {{"type", "lepski"}, {"betas", {0.5, 1.5}}, {"C", 0.7},
                        {"target_beta", 1.5}};
    cfg["kernels"] = {"poly:beta=1:pow=1", "order:N=2"};
    cfg["n_grid"] = {1024, 4096};
    cfg["replications"] = 3;
    const fs::path path = write_config(dir, cfg);
    std::ostringstream log;
    const RunOptions options{(dir / "out").string(), 2, false, std::nullopt};
    REQUIRE(run_config(path.string(), options, log) == 0);
    const nlohmann::json summary = nlohmann::json::parse(slurp(dir / "out" / "exp000.json"));
    CHECK(summary["C1"].get<double>() > 0.0);
    CHECK(log.str().find("calibrated C1") != std::string::npos);
}

TEST_CASE("config validation rejects schema violations") {
    auto expect_bad = [&](nlohmann::json cfg, const char* tag) {
        const fs::path dir = fresh_dir(std::string("schema_") + tag);
        const fs::path path = write_config(dir, cfg);
        std::ostringstream log;
        INFO(tag);
        CHECK(validate_config(path.string(), log) == 2);
    };
    nlohmann::json bad = smoke_config();
    bad["model"]["resolution"] = 1000; // not a power of two
    expect_bad(bad, "resolution");
    bad = smoke_config();
    bad["n_grid"] = {1024, 1500}; // ratio < 2
    expect_bad(bad, "ratio");
    bad = smoke_config();
    bad["replications"] = 1;
    expect_bad(bad, "reps");
    bad = smoke_config();
    bad["procedure"]["type"] = "oracle";
    expect_bad(bad, "type");
    bad = smoke_config();
    bad.erase("function");
    expect_bad(bad, "missing");
}

TEST_CASE("two-dimensional smoke config runs") {
    const fs::path dir = fresh_dir("twodim");
    nlohmann::json cfg = smoke_config();
    cfg["model"]["d"] = 2;
    cfg["model"]["resolution"] = 128;
    cfg["n_grid"] = {64, 256};
    const fs::path path = write_config(dir, cfg);
    std::ostringstream log;
    const RunOptions options{(dir / "out").string(), 2, false, std::nullopt};
    CHECK(run_config(path.string(), options, log) == 0);
    CHECK(fs::exists(dir / "out" / "exp000.csv"));
}

TEST_CASE("registry listings are printed by the CLI") {
    CHECK(run_cli("kernels list") == 0);
    CHECK(run_cli("zoo list") == 0);
    CHECK(run_cli("--version") == 0);
}
