#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "maxiset/estimator.hpp"
#include "maxiset/kernel.hpp"
#include "maxiset/noise.hpp"

namespace maxiset {

/// The candidate regularity grid for the adaptive rule: strictly increasing
/// non-integer betas, each paired with a kernel of order at least
/// floor(beta) + 1, the bandwidth constant C and the threshold constant C1.
struct RegularityGrid {
    std::vector<double> betas;
    std::vector<Kernel> kernels;
    double C = 1.0;
    double C1 = 1.0;

    void validate() const;
    std::size_t levels() const { return betas.size(); }
};

/// Threshold eta_n(gamma) = C1 (log n / n)^(gamma/(2 gamma + d)).
double eta(std::int64_t n, double gamma, double C1, int dim);

/// Everything the selection rule looked at for one realization.
struct LepskiTrace {
    std::size_t selected_index = 0;
    double selected = 0.0;
    std::vector<double> thresholds;               ///< eta_n(beta_i) per level
    std::vector<std::vector<double>> distances;   ///< [u][g] sup|f_u - f_g|, g <= u
    std::vector<std::size_t> feasible;            ///< indices satisfying the rule
};

/// The bandwidth-selection rule: the largest u in the grid whose estimate is
/// within eta_n(gamma) of every coarser estimate (gamma <= u). The coarsest
/// level is always feasible, so the selection never fails.
/// The estimates must come from the same noise field at the per-beta
/// bandwidths; the list length must match the grid.
LepskiTrace select(std::span<const EstimateRealization> estimates,
                   const RegularityGrid& grid, std::int64_t n);

/// Computes the per-beta estimates from one shared noise field, runs the
/// selection, and returns the trace together with the chosen realization.
std::pair<LepskiTrace, EstimateRealization> adaptive_estimate(
    const GridFunction& f, const RegularityGrid& grid, const ModelParams& params,
    const NoiseField& noise);

/// Pure-noise calibration of the threshold constant: the 95th percentile of
/// max over pairs of sup|f_u - f_g| / psi_n(gamma) across replications of
/// f == 0 at the given n, times a 1.2 safety factor. Honest for any
/// kernel/grid combination; always user-overridable.
double calibrate_threshold_constant(const RegularityGrid& grid, double sigma,
                                    int resolution, std::int64_t n,
                                    int replications, std::uint64_t seed,
                                    int threads = 1);

} // namespace maxiset
