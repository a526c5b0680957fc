#include "maxiset/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "maxiset/errors.hpp"

namespace maxiset {

double bandwidth(std::int64_t n, const BandwidthRule& rule) {
    if (n < 2) throw std::invalid_argument("bandwidth: n must be >= 2");
    if (!(rule.C > 0.0)) throw std::invalid_argument("bandwidth: C must be > 0");
    if (!(rule.beta > 0.0)) throw std::invalid_argument("bandwidth: beta must be > 0");
    const double expo = 1.0 / (2.0 * rule.beta + rule.dim);
    double h = rule.C * std::pow(std::log(static_cast<double>(n)) / n, expo);
    if (rule.dyadic_snap) {
        const long long m = std::llround(-std::log2(h));
        h = std::pow(2.0, -static_cast<double>(m));
    }
    if (h >= 0.5) {
        std::ostringstream os;
        os << "bandwidth " << h << " >= 1/2 at n = " << n
           << "; increase n or decrease C";
        throw BandwidthTooLarge(os.str());
    }
    return h;
}

double noise_scale(double sigma, std::int64_t n, double h, int dim) {
    return sigma / std::sqrt(static_cast<double>(n) * std::pow(h, dim));
}

GridFunction smooth(const GridFunction& f, const Kernel& kernel, double h) {
    const double scale =
        std::pow(h * static_cast<double>(f.resolution()), -static_cast<double>(f.dim()));
    return circular_kernel_apply(f.values(), f.dim(), f.resolution(), kernel, h, scale);
}

EstimateRealization kernel_estimate(const GridFunction& f, const Kernel& kernel,
                                    double h, const ModelParams& params,
                                    const NoiseField& noise) {
    params.validate();
    if (noise.dim != f.dim() || noise.resolution != f.resolution())
        throw std::invalid_argument("kernel_estimate: noise grid does not match f");
    EstimateRealization r;
    r.bias_part = smooth(f, kernel, h);
    r.h = h;
    r.n = params.n;
    r.sigma = params.sigma;
    r.seed = noise.seed;
    const double s = noise_scale(params.sigma, params.n, h, f.dim());
    const GridFunction xi = stochastic_convolution(noise, kernel, h);
    r.estimate = r.bias_part;
    for (std::size_t i = 0; i < r.estimate.size(); ++i) r.estimate[i] += s * xi[i];
    return r;
}

BiasProfile bias_profile(const GridFunction& f, const Kernel& kernel, double beta,
                         std::span<const double> h_list) {
    if (h_list.empty()) throw std::invalid_argument("bias_profile: empty bandwidth list");
    for (std::size_t i = 1; i < h_list.size(); ++i)
        if (!(h_list[i] < h_list[i - 1]))
            throw std::invalid_argument("bias_profile: bandwidths must be decreasing");
    BiasProfile prof;
    prof.rows.reserve(h_list.size());
    for (double h : h_list) {
        const GridFunction g = smooth(f, kernel, h) - f;
        prof.rows.emplace_back(h, std::pow(h, -beta) * sup_norm(g));
    }
    std::vector<double> vals;
    vals.reserve(prof.rows.size());
    for (const auto& [h, v] : prof.rows) vals.push_back(v);
    std::vector<double> sorted = vals;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double median =
        n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    prof.bounded = true;
    const std::size_t tail = std::min<std::size_t>(3, n);
    for (std::size_t i = n - tail; i < n; ++i)
        if (vals[i] > 1.5 * median) prof.bounded = false;
    return prof;
}

} // namespace maxiset
