#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "maxiset/grid.hpp"
#include "maxiset/kernel.hpp"
#include "maxiset/noise.hpp"

namespace maxiset {

/// Bandwidth rule h_n = C (log n / n)^(1/(2 beta + d)), optionally snapped to
/// the nearest power of two.
struct BandwidthRule {
    double C = 1.0;
    double beta = 1.0;
    int dim = 1;
    bool dyadic_snap = false;
};

/// Evaluates the rule at n. The result is always in (0, 1/2); a value >= 1/2
/// (the kernel support would wrap) raises BandwidthTooLarge.
double bandwidth(std::int64_t n, const BandwidthRule& rule);

/// sigma / sqrt(n h^d): the factor in front of the standardized noise term.
double noise_scale(double sigma, std::int64_t n, double h, int dim);

/// Smoothing operator K_h * f as a circular Riemann sum:
///   (smooth f)(t_i) = h^(-d) sum_j K((t_i - u_j)/h) f(u_j) M^(-d),
/// indices modulo M. This is the exact expectation of kernel_estimate for the
/// same inputs.
GridFunction smooth(const GridFunction& f, const Kernel& kernel, double h);

/// One draw of the kernel estimator, with the noise-free part kept separate:
/// estimate = bias_part + sigma/sqrt(n h^d) * stochastic term.
struct EstimateRealization {
    GridFunction estimate;
    GridFunction bias_part; ///< K_h * f
    double h = 0.0;
    std::int64_t n = 0;
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

EstimateRealization kernel_estimate(const GridFunction& f, const Kernel& kernel,
                                    double h, const ModelParams& params,
                                    const NoiseField& noise);

/// Normalized bias sequence h^(-beta) * sup|K_h * f - f| along a decreasing
/// bandwidth list, with a boundedness verdict: bounded when the last three
/// entries do not exceed 1.5x the median of the sequence.
struct BiasProfile {
    std::vector<std::pair<double, double>> rows; ///< (h, normalized sup bias)
    bool bounded = false;
};

BiasProfile bias_profile(const GridFunction& f, const Kernel& kernel, double beta,
                         std::span<const double> h_list);

} // namespace maxiset
