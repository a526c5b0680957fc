#include "maxiset/risk.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "maxiset/errors.hpp"
#include "maxiset/parallel.hpp"
#include "maxiset/rng.hpp"

namespace maxiset {

double psi(std::int64_t n, double beta, int dim) {
    if (n < 2) throw std::invalid_argument("psi: n must be >= 2");
    if (!(beta > 0.0)) throw std::invalid_argument("psi: beta must be > 0");
    const double base = std::log(static_cast<double>(n)) / static_cast<double>(n);
    return std::pow(base, rate_exponent(beta, dim));
}

double rate_exponent(double beta, int dim) {
    return beta / (2.0 * beta + dim);
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::member: return "member";
        case Verdict::non_member: return "non-member";
        case Verdict::boundary: return "boundary";
    }
    return "boundary";
}

namespace {

struct MomentStats {
    double mean = 0.0;
    double std_error = 0.0;
};

MomentStats summarize(std::span<const double> values) {
    MomentStats s;
    const std::size_t r = values.size();
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(r);
    if (r >= 2) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.std_error = std::sqrt(ss / static_cast<double>(r - 1)) /
                      std::sqrt(static_cast<double>(r));
    }
    return s;
}

void validate_n_grid(std::span<const std::int64_t> n_grid) {
    if (n_grid.empty()) throw std::invalid_argument("empty n grid");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 2) throw std::invalid_argument("n grid entries must be >= 2");
        if (i > 0 && n_grid[i] <= n_grid[i - 1])
            throw std::invalid_argument("n grid must be strictly increasing");
    }
}

// Resolves all bandwidths up front so an inadmissible configuration is
// reported with the full list of offending n values.
std::vector<double> admissible_bandwidths(const BandwidthRule& rule,
                                          std::span<const std::int64_t> n_grid,
                                          double support_radius, int resolution) {
    std::vector<double> hs;
    hs.reserve(n_grid.size());
    std::ostringstream bad;
    bool any_bad = false;
    for (std::int64_t n : n_grid) {
        double h = 0.0;
        std::string reason;
        try {
            h = bandwidth(n, rule);
            if (static_cast<double>(resolution) * h < kMinCellsPerBandwidth)
                reason = "M*h < " + std::to_string(kMinCellsPerBandwidth);
            else if (2.0 * support_radius * h >= 1.0)
                reason = "kernel support wraps";
        } catch (const std::exception& e) {
            reason = e.what();
        }
        if (!reason.empty()) {
            bad << (any_bad ? ", " : "") << "n=" << n << " (" << reason << ")";
            any_bad = true;
        }
        hs.push_back(h);
    }
    if (any_bad)
        throw UnderResolvedBandwidth("under-resolved bandwidth at: " + bad.str());
    return hs;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

RiskReport mc_risk(const GridFunction& f, const FixedBetaProcedure& procedure,
                   double sigma, double p, std::span<const std::int64_t> n_grid,
                   int replications, std::uint64_t seed, int threads) {
    validate_n_grid(n_grid);
    if (replications < 2) throw std::invalid_argument("mc_risk: replications must be >= 2");
    if (!(p >= 1.0)) throw std::invalid_argument("mc_risk: p must be >= 1");
    if (!(sigma >= 0.0)) throw std::invalid_argument("mc_risk: sigma must be >= 0");
    const int dim = f.dim();
    const int m = f.resolution();
    const BandwidthRule rule{procedure.C, procedure.beta, dim, procedure.dyadic_snap};
    const std::vector<double> hs =
        admissible_bandwidths(rule, n_grid, procedure.kernel.support_radius, m);

    RiskReport report;
    report.sigma = sigma;
    report.p = p;
    report.replications = replications;
    report.degenerate_noise = (sigma == 0.0);

    for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
        const std::int64_t n = n_grid[ni];
        const double h = hs[ni];
        const GridFunction bias_dev = smooth(f, procedure.kernel, h) - f;
        const double bias_sup = sup_norm(bias_dev);

        RiskRow row;
        row.n = n;
        row.h = h;
        row.bias_sup = bias_sup;
        row.psi = psi(n, procedure.beta, dim);

        if (sigma == 0.0) {
            row.risk = std::pow(bias_sup, p);
            row.std_error = 0.0;
            row.variance_risk = 0.0;
        } else {
            const double s = noise_scale(sigma, n, h, dim);
            std::vector<double> errs(replications, 0.0);
            std::vector<double> vars(replications, 0.0);
            parallel_for(static_cast<std::size_t>(replications), threads, [&](std::size_t r) {
                const std::uint64_t stream =
                    (static_cast<std::uint64_t>(ni) << 32) | static_cast<std::uint64_t>(r);
                const NoiseField z = sample_noise(dim, m, mix_seed(seed, stream));
                const GridFunction xi = stochastic_convolution(z, procedure.kernel, h);
                double sup_err = 0.0;
                double sup_noise = 0.0;
                for (std::size_t i = 0; i < xi.size(); ++i) {
                    const double noise_i = s * xi[i];
                    sup_noise = std::max(sup_noise, std::fabs(noise_i));
                    sup_err = std::max(sup_err, std::fabs(bias_dev[i] + noise_i));
                }
                errs[r] = std::pow(sup_err, p);
                vars[r] = std::pow(sup_noise, p);
            });
            const MomentStats es = summarize(errs);
            const MomentStats vs = summarize(vars);
            row.risk = es.mean;
            row.std_error = es.std_error;
            row.variance_risk = vs.mean;
        }
        row.ratio = row.risk / std::pow(row.psi, p);
        report.rows.push_back(row);
    }
    return report;
}

std::pair<double, Verdict> rate_fit(RiskReport& report, double beta, int dim) {
    if (report.rows.size() < 4)
        throw std::invalid_argument("rate_fit: need at least 4 rows");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double cnt = static_cast<double>(report.rows.size());
    for (const RiskRow& row : report.rows) {
        if (!(row.risk > 0.0))
            throw std::invalid_argument("rate_fit: nonpositive risk row");
        const double x =
            std::log(std::log(static_cast<double>(row.n)) / static_cast<double>(row.n));
        const double y = std::log(row.risk);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    const double fitted = slope / report.p;
    const double target = rate_exponent(beta, dim);

    std::vector<double> ratios;
    ratios.reserve(report.rows.size());
    for (const RiskRow& row : report.rows) ratios.push_back(row.ratio);
    const double med = median_of(ratios);
    bool tail_ok = true;
    for (std::size_t i = ratios.size() - 3; i < ratios.size(); ++i)
        if (ratios[i] > 1.5 * med) tail_ok = false;

    bool growing_tail = true;
    const std::size_t last4 = ratios.size() - 4;
    for (std::size_t i = last4 + 1; i < ratios.size(); ++i)
        if (!(ratios[i] > ratios[i - 1])) growing_tail = false;
    growing_tail = growing_tail && ratios.back() >= 2.0 * ratios[last4];

    Verdict verdict = Verdict::boundary;
    if (std::fabs(fitted - target) <= 0.1 && tail_ok)
        verdict = Verdict::member;
    else if (fitted < target - 0.1 || growing_tail)
        verdict = Verdict::non_member;

    report.fitted_exponent = fitted;
    report.target_exponent = target;
    report.verdict = verdict;
    return {fitted, verdict};
}

std::vector<Lemma1Row> lemma1_check(const RiskReport& report) {
    std::vector<Lemma1Row> out;
    out.reserve(report.rows.size());
    for (const RiskRow& row : report.rows) {
        const double rel = row.risk > 0.0 ? row.std_error / row.risk : 0.0;
        const double slack = 1.0 + 3.0 * rel;
        Lemma1Row r;
        r.n = row.n;
        r.bias_ok = std::pow(row.bias_sup, report.p) <= row.risk * slack + 1e-15;
        r.variance_ok =
            row.variance_risk <= std::pow(2.0, report.p) * row.risk * slack + 1e-15;
        out.push_back(r);
    }
    return out;
}

std::vector<VarianceBoundRow> variance_lower_bound_check(
    const Kernel& kernel, std::span<const double> h_list, const ModelParams& params,
    int resolution, double delta, int replications, std::uint64_t seed, int threads) {
    if (!(delta > 0.0) || !(delta < 1.0))
        throw std::invalid_argument("variance bound check: delta must be in (0,1)");
    if (h_list.empty()) throw std::invalid_argument("variance bound check: empty h list");
    for (std::size_t i = 1; i < h_list.size(); ++i)
        if (!(h_list[i] < h_list[i - 1]))
            throw std::invalid_argument("variance bound check: h list must be decreasing");
    params.validate();
    if (!(params.sigma > 0.0))
        throw std::invalid_argument("variance bound check: sigma must be > 0");
    const int dim = kernel.dim;

    // one shared field per replication across the whole sweep (one
    // observation, many bandwidths) keeps the ratio curve smooth in h
    std::vector<std::vector<double>> moments(
        h_list.size(), std::vector<double>(replications, 0.0));
    parallel_for(static_cast<std::size_t>(replications), threads, [&](std::size_t r) {
        const NoiseField z = sample_noise(dim, resolution, mix_seed(seed, r));
        for (std::size_t hi = 0; hi < h_list.size(); ++hi) {
            const GridFunction xi = stochastic_convolution(z, kernel, h_list[hi]);
            const double s = noise_scale(params.sigma, params.n, h_list[hi], dim);
            moments[hi][r] = std::pow(s * sup_norm(xi), params.p);
        }
    });

    std::vector<VarianceBoundRow> rows;
    rows.reserve(h_list.size());
    for (std::size_t hi = 0; hi < h_list.size(); ++hi) {
        VarianceBoundRow row;
        row.h = h_list[hi];
        row.mc_moment = summarize(moments[hi]).mean;
        const double l2sq = kernel.l2_norm * kernel.l2_norm;
        const double inner = 2.0 * dim * params.sigma * params.sigma * l2sq *
                             std::fabs(std::log(row.h)) /
                             (static_cast<double>(params.n) * std::pow(row.h, dim));
        row.bound = std::pow(inner, params.p / 2.0);
        row.ratio = row.mc_moment / row.bound;
        row.pass = row.ratio >= 1.0 - delta;
        rows.push_back(row);
    }
    return rows;
}

BandwidthCheck theorem1_bandwidth_check(std::span<const double> h_schedule,
                                        std::span<const std::int64_t> n_grid,
                                        double beta, int dim) {
    if (h_schedule.empty() || h_schedule.size() != n_grid.size())
        throw std::invalid_argument("bandwidth check: schedule/grid size mismatch");
    BandwidthCheck check;
    check.sequence.reserve(h_schedule.size());
    const double expo = 1.0 / (2.0 * beta + dim);
    for (std::size_t i = 0; i < h_schedule.size(); ++i) {
        const double rate =
            std::pow(std::log(static_cast<double>(n_grid[i])) / n_grid[i], expo);
        check.sequence.push_back(rate / h_schedule[i]);
    }
    check.max_constant = *std::max_element(check.sequence.begin(), check.sequence.end());
    check.pass = true;
    double prefix_min = check.sequence.front();
    for (double s : check.sequence) {
        if (s >= 2.0 * prefix_min) check.pass = false;
        prefix_min = std::min(prefix_min, s);
    }
    return check;
}

AdaptiveRiskResult mc_adaptive_risk(const GridFunction& f, const RegularityGrid& grid,
                                    double sigma, double p,
                                    std::span<const std::int64_t> n_grid,
                                    int replications, double target_beta,
                                    std::uint64_t seed, int threads) {
    grid.validate();
    validate_n_grid(n_grid);
    if (replications < 2)
        throw std::invalid_argument("mc_adaptive_risk: replications must be >= 2");
    const int dim = f.dim();
    const int m = f.resolution();
    const std::size_t levels = grid.levels();

    // admissibility of every (n, beta) pair, reported together
    std::vector<std::vector<double>> hs(levels);
    for (std::size_t i = 0; i < levels; ++i) {
        const BandwidthRule rule{grid.C, grid.betas[i], dim, false};
        hs[i] = admissible_bandwidths(rule, n_grid, grid.kernels[i].support_radius, m);
    }

    AdaptiveRiskResult result;
    result.report.sigma = sigma;
    result.report.p = p;
    result.report.replications = replications;
    result.report.degenerate_noise = (sigma == 0.0);

    for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
        const std::int64_t n = n_grid[ni];
        std::vector<GridFunction> bias(levels);
        std::vector<double> scales(levels);
        std::vector<double> thresholds(levels);
        for (std::size_t i = 0; i < levels; ++i) {
            bias[i] = smooth(f, grid.kernels[i], hs[i][ni]);
            scales[i] = noise_scale(sigma, n, hs[i][ni], dim);
            thresholds[i] = eta(n, grid.betas[i], grid.C1, dim);
        }

        std::vector<double> errs(replications, 0.0);
        std::vector<double> vars(replications, 0.0);
        std::vector<int> picks(replications, 0);
        parallel_for(static_cast<std::size_t>(replications), threads, [&](std::size_t r) {
            const std::uint64_t stream =
                (static_cast<std::uint64_t>(ni) << 32) | static_cast<std::uint64_t>(r);
            const NoiseField z = sample_noise(dim, m, mix_seed(seed, stream));
            std::vector<GridFunction> est(levels);
            for (std::size_t i = 0; i < levels; ++i) {
                est[i] = stochastic_convolution(z, grid.kernels[i], hs[i][ni]);
                est[i] *= scales[i];
                est[i] += bias[i];
            }
            // selection rule on the shared realization
            std::size_t selected = 0;
            for (std::size_t u = 0; u < levels; ++u) {
                bool ok = true;
                for (std::size_t g = 0; g < u && ok; ++g)
                    ok = sup_norm(est[u] - est[g]) <= thresholds[g];
                if (ok) selected = u;
            }
            picks[r] = static_cast<int>(selected);
            double sup_err = 0.0;
            double sup_noise = 0.0;
            const GridFunction& chosen = est[selected];
            const GridFunction& chosen_bias = bias[selected];
            for (std::size_t i = 0; i < chosen.size(); ++i) {
                sup_err = std::max(sup_err, std::fabs(chosen[i] - f[i]));
                sup_noise = std::max(sup_noise, std::fabs(chosen[i] - chosen_bias[i]));
            }
            errs[r] = std::pow(sup_err, p);
            vars[r] = std::pow(sup_noise, p);
        });

        RiskRow row;
        row.n = n;
        row.h = 0.0; // data-driven per replication
        const MomentStats es = summarize(errs);
        row.risk = es.mean;
        row.std_error = es.std_error;
        row.variance_risk = summarize(vars).mean;
        // reference bias: the oracle level closest to the target
        std::size_t ref = 0;
        for (std::size_t i = 0; i < levels; ++i)
            if (std::fabs(grid.betas[i] - target_beta) <
                std::fabs(grid.betas[ref] - target_beta))
                ref = i;
        row.bias_sup = sup_norm(bias[ref] - f);
        row.h = hs[ref][ni];
        row.psi = psi(n, target_beta, dim);
        row.ratio = row.risk / std::pow(row.psi, p);
        result.report.rows.push_back(row);

        std::vector<int> counts(levels, 0);
        for (int pick : picks) counts[pick]++;
        result.selection_counts.push_back(std::move(counts));
        result.selections.push_back(std::move(picks));
    }
    return result;
}

namespace {

// Builds the three-rung refinement ladder, bumping the base resolution when
// the family cannot be realized that coarse (deep fixed-J series).
std::vector<GridFunction> refinement_ladder(
    const std::function<ZooFunction(int)>& family, int base_resolution) {
    for (int attempt = 0; attempt < 6; ++attempt) {
        try {
            std::vector<GridFunction> rungs;
            for (int k = 0; k < 3; ++k)
                rungs.push_back(family(base_resolution << k).signal);
            return rungs;
        } catch (const std::invalid_argument&) {
            base_resolution <<= 1;
        }
    }
    throw std::invalid_argument("seminorm ladder: function family unrealizable");
}

} // namespace

Verdict seminorm_stability(const std::function<ZooFunction(int)>& family,
                           double beta, int base_resolution,
                           std::vector<double>* values) {
    const std::vector<GridFunction> rungs = refinement_ladder(family, base_resolution);
    std::vector<double> vals;
    for (const GridFunction& g : rungs)
        vals.push_back(beta <= 1.0 ? holder_seminorm(g, beta)
                                   : higher_holder_seminorm(g, beta));
    if (values) *values = vals;
    const double growth_floor = std::pow(2.0, 0.1);
    const double r1 = vals[1] / vals[0];
    const double r2 = vals[2] / vals[1];
    if (r1 >= growth_floor && r2 >= growth_floor) return Verdict::non_member;
    if (r1 <= 1.3 && r2 <= 1.3) return Verdict::member;
    return Verdict::boundary;
}

MaxisetVerdict maxiset_verdict(const std::function<ZooFunction(int)>& family,
                               const FixedBetaProcedure& procedure, double sigma,
                               double p, std::span<const std::int64_t> n_grid,
                               int replications, int resolution, std::uint64_t seed,
                               int threads) {
    const ZooFunction zoo = family(resolution);
    RiskReport report =
        mc_risk(zoo.signal, procedure, sigma, p, n_grid, replications, seed, threads);
    return maxiset_verdict(family, procedure, std::move(report), n_grid, resolution);
}

MaxisetVerdict maxiset_verdict(const std::function<ZooFunction(int)>& family,
                               const FixedBetaProcedure& procedure,
                               RiskReport report,
                               std::span<const std::int64_t> n_grid, int resolution) {
    MaxisetVerdict v;
    const ZooFunction zoo = family(resolution);
    const GridFunction& f = zoo.signal;
    const int dim = f.dim();
    const double beta = procedure.beta;
    v.integer_boundary = (beta == std::floor(beta));

    // channel (a): normalized bias boundedness along the h_{n,beta} sequence
    const BandwidthRule rule{procedure.C, beta, dim, procedure.dyadic_snap};
    std::vector<double> h_list;
    h_list.reserve(n_grid.size());
    for (std::int64_t n : n_grid) h_list.push_back(bandwidth(n, rule));
    v.profile = bias_profile(f, procedure.kernel, beta, h_list);
    v.bias_channel = v.profile.bounded ? Verdict::member : Verdict::non_member;

    // channel (b): Monte Carlo rate verdict
    v.report = std::move(report);
    rate_fit(v.report, beta, dim);
    v.rate_channel = v.report.verdict;

    // channel (c): seminorm diagnostics on a refinement ladder
    const int base = 1 << 11;
    if (v.integer_boundary) {
        // only the sandwich is decidable: report both sides
        const std::vector<GridFunction> rungs = refinement_ladder(family, base);
        const int m_order = static_cast<int>(beta) - 1;
        std::vector<double> holder_vals;
        std::vector<double> zyg_vals;
        for (const GridFunction& rung : rungs) {
            const GridFunction g = forward_difference_derivative(rung, m_order);
            holder_vals.push_back(holder_seminorm(g, 1.0));
            zyg_vals.push_back(zygmund_seminorm(g));
        }
        auto stable = [](const std::vector<double>& s) {
            return s[1] / s[0] <= 1.3 && s[2] / s[1] <= 1.3;
        };
        v.holder_side = stable(holder_vals);
        v.besov_side = stable(zyg_vals);
        v.seminorm_values = holder_vals;
        v.seminorm_channel = Verdict::boundary;
    } else {
        v.seminorm_channel = seminorm_stability(family, beta, base, &v.seminorm_values);
    }

    v.channels_agree = v.integer_boundary
                           ? v.bias_channel == v.rate_channel
                           : (v.bias_channel == v.rate_channel &&
                              v.rate_channel == v.seminorm_channel);
    if (v.integer_boundary)
        v.overall = Verdict::boundary;
    else if (v.channels_agree)
        v.overall = v.bias_channel;
    else
        v.overall = Verdict::boundary;
    return v;
}

} // namespace maxiset
