#include "maxiset/noise.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "maxiset/errors.hpp"
#include "maxiset/rng.hpp"

namespace maxiset {

void ModelParams::validate() const {
    // sigma == 0 is the noise-free degenerate case used by bias diagnostics
    if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
    if (n < 2) throw std::invalid_argument("n must be >= 2");
    if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
}

double NoiseField::cell_volume() const {
    return std::pow(static_cast<double>(resolution), -dim);
}

NoiseField NoiseField::zeros(int dim, int resolution) {
    NoiseField z;
    z.dim = dim;
    z.resolution = resolution;
    z.seed = 0;
    z.increments.assign(grid_size(dim, resolution), 0.0);
    return z;
}

NoiseField sample_noise(int dim, int resolution, std::uint64_t seed) {
    if (dim < 1) throw std::invalid_argument("sample_noise: dim must be >= 1");
    if (resolution < 2) throw std::invalid_argument("sample_noise: resolution must be >= 2");
    NoiseField z;
    z.dim = dim;
    z.resolution = resolution;
    z.seed = seed;
    z.increments.resize(grid_size(dim, resolution));
    Rng rng(seed);
    for (double& v : z.increments) v = rng.next_gaussian();
    return z;
}

namespace {

struct Window {
    int halfwidth;                // W: taps at offsets -W..W per axis
    std::vector<double> weights;  // d=1: 2W+1 taps; d=2: (2W+1)^2, row-major
};

Window build_window(const Kernel& kernel, double h, int m, int dim) {
    if (!(h > 0.0)) throw std::invalid_argument("bandwidth must be > 0");
    if (static_cast<double>(m) * h < kMinCellsPerBandwidth) {
        std::ostringstream os;
        os << "under-resolved bandwidth: M*h = " << m * h << " < "
           << kMinCellsPerBandwidth;
        throw UnderResolvedBandwidth(os.str());
    }
    if (2.0 * kernel.support_radius * h >= 1.0) {
        std::ostringstream os;
        os << "kernel wraparound: support width 2*A*h = "
           << 2.0 * kernel.support_radius * h << " >= 1";
        throw KernelWraparound(os.str());
    }
    Window w;
    const double mh = static_cast<double>(m) * h;
    w.halfwidth = static_cast<int>(std::floor(kernel.support_radius * mh + 1e-9));
    const int taps = 2 * w.halfwidth + 1;
    if (dim == 1) {
        w.weights.resize(taps);
        for (int k = -w.halfwidth; k <= w.halfwidth; ++k)
            w.weights[k + w.halfwidth] = kernel(static_cast<double>(k) / mh);
    } else {
        w.weights.resize(static_cast<std::size_t>(taps) * taps);
        double x[2];
        std::span<const double> xs(x, 2);
        for (int a = -w.halfwidth; a <= w.halfwidth; ++a) {
            x[0] = static_cast<double>(a) / mh;
            for (int b = -w.halfwidth; b <= w.halfwidth; ++b) {
                x[1] = static_cast<double>(b) / mh;
                w.weights[static_cast<std::size_t>(a + w.halfwidth) * taps +
                          (b + w.halfwidth)] = kernel(xs);
            }
        }
    }
    return w;
}

// out(i) = scale * sum_k w(k) cells((i-k) mod M). Padding removes the modulo
// from the inner loop; the reversed table turns the sum into a sliding dot
// product, so summation order is the same for every output cell.
void apply_1d(std::span<const double> cells, int m, const Window& w, double scale,
              std::span<double> out) {
    const int hw = w.halfwidth;
    const int taps = 2 * hw + 1;
    std::vector<double> padded(static_cast<std::size_t>(m) + 2 * hw);
    for (int s = 0; s < m + 2 * hw; ++s) {
        int j = (s - hw) % m;
        if (j < 0) j += m;
        padded[s] = cells[j];
    }
    std::vector<double> rev(taps);
    for (int t = 0; t < taps; ++t) rev[t] = w.weights[taps - 1 - t];
    for (int i = 0; i < m; ++i) {
        double acc = 0.0;
        const double* p = padded.data() + i;
        for (int t = 0; t < taps; ++t) acc += rev[t] * p[t];
        out[i] = scale * acc;
    }
}

void apply_2d(std::span<const double> cells, int m, const Window& w, double scale,
              std::span<double> out) {
    const int hw = w.halfwidth;
    const int taps = 2 * hw + 1;
    const int pm = m + 2 * hw;
    std::vector<double> padded(static_cast<std::size_t>(pm) * pm);
    for (int r = 0; r < pm; ++r) {
        int i = (r - hw) % m;
        if (i < 0) i += m;
        for (int c = 0; c < pm; ++c) {
            int j = (c - hw) % m;
            if (j < 0) j += m;
            padded[static_cast<std::size_t>(r) * pm + c] =
                cells[static_cast<std::size_t>(i) * m + j];
        }
    }
    std::vector<double> rev(static_cast<std::size_t>(taps) * taps);
    for (int a = 0; a < taps; ++a)
        for (int b = 0; b < taps; ++b)
            rev[static_cast<std::size_t>(a) * taps + b] =
                w.weights[static_cast<std::size_t>(taps - 1 - a) * taps + (taps - 1 - b)];
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            double acc = 0.0;
            for (int a = 0; a < taps; ++a) {
                const double* p = padded.data() + static_cast<std::size_t>(i + a) * pm + j;
                const double* rw = rev.data() + static_cast<std::size_t>(a) * taps;
                for (int b = 0; b < taps; ++b) acc += rw[b] * p[b];
            }
            out[static_cast<std::size_t>(i) * m + j] = scale * acc;
        }
    }
}

} // namespace

GridFunction circular_kernel_apply(std::span<const double> cells, int dim,
                                   int resolution, const Kernel& kernel, double h,
                                   double scale) {
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("circular_kernel_apply supports dim 1 and 2");
    if (kernel.dim != dim) throw std::invalid_argument("kernel dimension mismatch");
    if (cells.size() != grid_size(dim, resolution))
        throw std::invalid_argument("cell count does not match the grid");
    const Window w = build_window(kernel, h, resolution, dim);
    GridFunction out(dim, resolution);
    if (dim == 1)
        apply_1d(cells, resolution, w, scale, out.values());
    else
        apply_2d(cells, resolution, w, scale, out.values());
    return out;
}

GridFunction stochastic_convolution(const NoiseField& noise, const Kernel& kernel,
                                    double h) {
    const double scale =
        std::pow(h * static_cast<double>(noise.resolution), -0.5 * noise.dim);
    return circular_kernel_apply(noise.increments, noise.dim, noise.resolution,
                                 kernel, h, scale);
}

} // namespace maxiset
