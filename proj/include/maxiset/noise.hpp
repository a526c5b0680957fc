#pragma once

#include <cstdint>
#include <vector>

#include "maxiset/grid.hpp"
#include "maxiset/kernel.hpp"

namespace maxiset {

/// Grid with fewer than this many cells per bandwidth per axis (M*h < 16) is
/// rejected: below it the Riemann sum of the kernel is too coarse to keep the
/// quadrature error on ||K||_2^2 near the percent level.
inline constexpr int kMinCellsPerBandwidth = 16;

/// Observation-model parameters: noise scale sigma, effective sample size n,
/// loss exponent p.
struct ModelParams {
    double sigma = 1.0;
    std::int64_t n = 2;
    double p = 2.0;

    void validate() const;
};

/// One realization of discretized white noise on the grid: i.i.d. standard
/// normal increments, one per cell. The Brownian increment over cell i is
/// increments[i] * M^(-d/2), so its variance equals the cell volume. The same
/// field is reused on every translate cell of the torus, which makes all
/// stochastic integrals circular.
struct NoiseField {
    int dim = 1;
    int resolution = 2;
    std::uint64_t seed = 0;
    std::vector<double> increments;

    double cell_volume() const;

    /// All-zero increments, for injecting deterministic fields in tests.
    static NoiseField zeros(int dim, int resolution);
};

/// Draws a noise field; bit-identical for identical (seed, dim, resolution).
NoiseField sample_noise(int dim, int resolution, std::uint64_t seed);

/// The standardized stochastic term of the kernel estimator:
///   xi(t_i) = h^(-d/2) sum_j K((t_i - u_j)/h) increments[j] M^(-d/2),
/// with index differences taken modulo M. Each output entry is Gaussian with
/// variance close to ||K||_2^2.
///
/// Throws UnderResolvedBandwidth when M*h < 16 and KernelWraparound when the
/// scaled support does not fit in one period (2*A*h >= 1).
GridFunction stochastic_convolution(const NoiseField& noise, const Kernel& kernel,
                                    double h);

/// Core circular engine shared by the noise and bias paths: applies the
/// kernel weight table K((i-j)/(M h)) to grid cells with wrapped indices and
/// multiplies by scale. dim must be 1 or 2.
GridFunction circular_kernel_apply(std::span<const double> cells, int dim,
                                   int resolution, const Kernel& kernel, double h,
                                   double scale);

} // namespace maxiset
