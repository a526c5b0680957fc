#include "maxiset/lepski.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "maxiset/parallel.hpp"
#include "maxiset/risk.hpp"
#include "maxiset/rng.hpp"

namespace maxiset {

void RegularityGrid::validate() const {
    if (betas.empty()) throw std::invalid_argument("regularity grid is empty");
    if (betas.size() != kernels.size())
        throw std::invalid_argument("regularity grid: one kernel per beta required");
    if (!(C > 0.0) || !(C1 > 0.0))
        throw std::invalid_argument("regularity grid: constants must be > 0");
    for (std::size_t i = 0; i < betas.size(); ++i) {
        const double b = betas[i];
        if (!(b > 0.0)) throw std::invalid_argument("regularity grid: betas must be > 0");
        if (b == std::floor(b))
            throw std::invalid_argument("regularity grid: betas must be non-integer");
        if (i > 0 && !(b > betas[i - 1]))
            throw std::invalid_argument("regularity grid: betas must be strictly increasing");
        const int required = static_cast<int>(std::floor(b)) + 1;
        if (kernels[i].order < required)
            throw std::invalid_argument("regularity grid: kernel order too low for beta");
    }
}

double eta(std::int64_t n, double gamma, double C1, int dim) {
    if (n < 2) throw std::invalid_argument("eta: n must be >= 2");
    if (!(gamma > 0.0)) throw std::invalid_argument("eta: gamma must be > 0");
    return C1 * psi(n, gamma, dim);
}

LepskiTrace select(std::span<const EstimateRealization> estimates,
                   const RegularityGrid& grid, std::int64_t n) {
    grid.validate();
    const std::size_t levels = grid.levels();
    if (estimates.size() != levels)
        throw std::invalid_argument("select: estimate list does not match the grid");

    LepskiTrace trace;
    trace.thresholds.resize(levels);
    for (std::size_t i = 0; i < levels; ++i)
        trace.thresholds[i] = eta(n, grid.betas[i], grid.C1, estimates[i].estimate.dim());

    trace.distances.resize(levels);
    for (std::size_t u = 0; u < levels; ++u) {
        trace.distances[u].resize(u + 1, 0.0);
        for (std::size_t g = 0; g < u; ++g)
            trace.distances[u][g] =
                sup_norm(estimates[u].estimate - estimates[g].estimate);
    }

    for (std::size_t u = 0; u < levels; ++u) {
        bool ok = true;
        for (std::size_t g = 0; g <= u && ok; ++g)
            ok = trace.distances[u][g] <= trace.thresholds[g];
        if (ok) trace.feasible.push_back(u);
    }
    // the coarsest level compares only against itself (distance 0)
    trace.selected_index = trace.feasible.back();
    trace.selected = grid.betas[trace.selected_index];
    return trace;
}

std::pair<LepskiTrace, EstimateRealization> adaptive_estimate(
    const GridFunction& f, const RegularityGrid& grid, const ModelParams& params,
    const NoiseField& noise) {
    grid.validate();
    std::vector<EstimateRealization> estimates;
    estimates.reserve(grid.levels());
    for (std::size_t i = 0; i < grid.levels(); ++i) {
        BandwidthRule rule{grid.C, grid.betas[i], f.dim(), false};
        const double h = bandwidth(params.n, rule);
        estimates.push_back(kernel_estimate(f, grid.kernels[i], h, params, noise));
    }
    LepskiTrace trace = select(estimates, grid, params.n);
    EstimateRealization chosen = std::move(estimates[trace.selected_index]);
    return {std::move(trace), std::move(chosen)};
}

double calibrate_threshold_constant(const RegularityGrid& grid, double sigma,
                                    int resolution, std::int64_t n,
                                    int replications, std::uint64_t seed,
                                    int threads) {
    grid.validate();
    if (replications < 2)
        throw std::invalid_argument("calibration needs at least 2 replications");
    const int dim = grid.kernels.front().dim;
    const std::size_t levels = grid.levels();

    std::vector<double> bandwidths(levels);
    std::vector<double> scales(levels);
    std::vector<double> rates(levels);
    for (std::size_t i = 0; i < levels; ++i) {
        BandwidthRule rule{grid.C, grid.betas[i], dim, false};
        bandwidths[i] = bandwidth(n, rule);
        scales[i] = noise_scale(sigma, n, bandwidths[i], dim);
        rates[i] = psi(n, grid.betas[i], dim);
    }

    std::vector<double> stats(replications, 0.0);
    parallel_for(static_cast<std::size_t>(replications), threads, [&](std::size_t r) {
        const NoiseField z = sample_noise(dim, resolution, mix_seed(seed, r));
        std::vector<GridFunction> pure(levels);
        for (std::size_t i = 0; i < levels; ++i) {
            pure[i] = stochastic_convolution(z, grid.kernels[i], bandwidths[i]);
            pure[i] *= scales[i];
        }
        double worst = 0.0;
        for (std::size_t u = 1; u < levels; ++u)
            for (std::size_t g = 0; g < u; ++g)
                worst = std::max(worst, sup_norm(pure[u] - pure[g]) / rates[g]);
        stats[r] = worst;
    });

    std::sort(stats.begin(), stats.end());
    const std::size_t rank = static_cast<std::size_t>(
        std::ceil(0.95 * replications)) - 1;
    return 1.2 * stats[std::min(rank, stats.size() - 1)];
}

} // namespace maxiset
