#include "maxiset/zoo.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace maxiset {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

std::string format_param(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace

ZooFunction weierstrass(double beta, int levels, int dim, int resolution) {
    if (!(beta > 0.0)) throw std::invalid_argument("weierstrass: beta must be > 0");
    if (levels < 0) throw std::invalid_argument("weierstrass: J must be >= 0");
    if (dim != 1 && dim != 2) throw std::invalid_argument("weierstrass: dim must be 1 or 2");
    if ((1LL << levels) > resolution / 8) {
        std::ostringstream os;
        os << "weierstrass: aliasing, 2^J = " << (1LL << levels) << " > resolution/8 = "
           << resolution / 8;
        throw std::invalid_argument(os.str());
    }
    ZooFunction z;
    z.name = "weierstrass:beta=" + format_param(beta) + ":J=" + std::to_string(levels);
    z.true_regularity = beta;
    z.is_integer_boundary = (beta == std::floor(beta));
    z.signal = GridFunction::from_function(dim, resolution, [&](std::span<const double> t) {
        double v = 0.0;
        for (int j = 0; j <= levels; ++j) {
            // direction alternates between axes in d=2
            const double phase = dim == 1 ? t[0] : t[j % 2];
            v += std::pow(2.0, -j * beta) * std::cos(kTwoPi * std::ldexp(phase, j));
        }
        return v;
    });
    return z;
}

ZooFunction triangle_wave(int resolution) {
    if (resolution < 4) throw std::invalid_argument("triangle_wave: resolution must be >= 4");
    ZooFunction z;
    z.name = "triangle";
    z.true_regularity = 1.0;
    z.is_integer_boundary = true;
    z.signal = GridFunction::from_function(1, resolution, [](std::span<const double> t) {
        return 4.0 * std::fabs(t[0] - 0.5) - 1.0;
    });
    return z;
}

ZooFunction step_function(int resolution) {
    if (resolution < 4) throw std::invalid_argument("step_function: resolution must be >= 4");
    ZooFunction z;
    z.name = "step";
    z.true_regularity = nan_value();
    z.is_integer_boundary = false;
    z.signal = GridFunction::from_function(1, resolution, [](std::span<const double> t) {
        return t[0] < 0.5 ? 1.0 : -1.0;
    });
    return z;
}

ZooFunction cosine(int dim, int resolution) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("cosine: dim must be 1 or 2");
    ZooFunction z;
    z.name = "cosine";
    z.true_regularity = std::numeric_limits<double>::infinity();
    z.is_integer_boundary = false;
    z.signal = GridFunction::from_function(dim, resolution, [](std::span<const double> t) {
        return std::cos(kTwoPi * t[0]);
    });
    return z;
}

namespace {

// Pair offsets probed by the grid seminorms: 1..M/4 cells along each axis,
// plus the diagonal in d=2. Periodic sup-distance equals k/M for all of them.
template <class Fn>
void scan_offsets(const GridFunction& f, Fn&& visit) {
    const int m = f.resolution();
    const int window = std::max(1, m / 4);
    const double inv_m = 1.0 / m;
    if (f.dim() == 1) {
        const auto vals = f.values();
        for (int k = 1; k <= window; ++k) {
            const double dist = k * inv_m;
            for (int i = 0; i < m; ++i) {
                const int fwd = i + k < m ? i + k : i + k - m;
                const int bwd = i - k >= 0 ? i - k : i - k + m;
                visit(vals[i], vals[fwd], vals[bwd], dist);
            }
        }
        return;
    }
    if (f.dim() == 2) {
        const auto vals = f.values();
        const auto at = [&](int i, int j) {
            return vals[static_cast<std::size_t>(i) * m + j];
        };
        for (int k = 1; k <= window; ++k) {
            const double dist = k * inv_m;
            for (int i = 0; i < m; ++i) {
                const int ip = (i + k) % m;
                const int im = (i - k + m) % m;
                for (int j = 0; j < m; ++j) {
                    const int jp = (j + k) % m;
                    const int jm = (j - k + m) % m;
                    visit(at(i, j), at(ip, j), at(im, j), dist);
                    visit(at(i, j), at(i, jp), at(i, jm), dist);
                    visit(at(i, j), at(ip, jp), at(im, jm), dist);
                }
            }
        }
        return;
    }
    throw std::invalid_argument("seminorms support dim <= 2");
}

} // namespace

double holder_seminorm(const GridFunction& f, double beta) {
    if (!(beta > 0.0) || beta > 1.0)
        throw std::invalid_argument("holder_seminorm: beta must be in (0, 1]");
    double best = 0.0;
    scan_offsets(f, [&](double fx, double fwd, double /*bwd*/, double dist) {
        const double q = std::fabs(fwd - fx) / std::pow(dist, beta);
        if (q > best) best = q;
    });
    return best;
}

double zygmund_seminorm(const GridFunction& f) {
    double best = 0.0;
    scan_offsets(f, [&](double fx, double fwd, double bwd, double dist) {
        const double q = std::fabs(fwd + bwd - 2.0 * fx) / dist;
        if (q > best) best = q;
    });
    return best;
}

GridFunction forward_difference_derivative(const GridFunction& f, int order) {
    if (order < 0) throw std::invalid_argument("derivative order must be >= 0");
    const int m = f.resolution();
    GridFunction g = f;
    for (int pass = 0; pass < order; ++pass) {
        GridFunction next(g.dim(), m);
        if (g.dim() == 1) {
            for (int i = 0; i < m; ++i) {
                const int ip = i + 1 < m ? i + 1 : 0;
                next[i] = (g[ip] - g[i]) * m;
            }
        } else {
            for (int i = 0; i < m; ++i) {
                const int ip = (i + 1) % m;
                for (int j = 0; j < m; ++j)
                    next[static_cast<std::size_t>(i) * m + j] =
                        (g[static_cast<std::size_t>(ip) * m + j] -
                         g[static_cast<std::size_t>(i) * m + j]) * m;
            }
        }
        g = std::move(next);
    }
    return g;
}

double higher_holder_seminorm(const GridFunction& f, double beta) {
    if (!(beta > 1.0)) throw std::invalid_argument("higher_holder_seminorm: beta must be > 1");
    const int m_order = static_cast<int>(std::ceil(beta)) - 1; // largest integer < beta
    const double alpha = beta - m_order;
    if (f.resolution() < 8 * m_order)
        throw std::invalid_argument("higher_holder_seminorm: resolution too coarse");
    const GridFunction g = forward_difference_derivative(f, m_order);
    if (alpha >= 1.0) return zygmund_seminorm(g);
    return holder_seminorm(g, alpha);
}

std::vector<std::string> zoo_registry_names() {
    return {"weierstrass:beta=<b>:J=<j>", "triangle", "step", "cosine"};
}

namespace {

std::invalid_argument unknown_zoo(const std::string& spec) {
    std::ostringstream os;
    os << "unknown zoo function '" << spec << "'; registry:";
    for (const auto& n : zoo_registry_names()) os << " " << n;
    return std::invalid_argument(os.str());
}

} // namespace

ZooFunction zoo_from_spec(const std::string& spec, int dim, int resolution) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.empty()) throw unknown_zoo(spec);

    auto param = [&](const std::string& key, const char* fallback) -> std::string {
        for (std::size_t i = 1; i < parts.size(); ++i)
            if (parts[i].rfind(key + "=", 0) == 0) return parts[i].substr(key.size() + 1);
        if (fallback) return fallback;
        throw unknown_zoo(spec);
    };

    if (parts[0] == "weierstrass") {
        // When J is omitted the series is taken as deep as the grid allows,
        // so refining the grid also refines the function family.
        int levels = 0;
        while ((2LL << levels) <= resolution / 8) ++levels;
        const std::string auto_j = std::to_string(levels);
        double beta = 0.0;
        try {
            beta = std::stod(param("beta", nullptr));
            levels = std::stoi(param("J", auto_j.c_str()));
        } catch (...) {
            throw unknown_zoo(spec);
        }
        return weierstrass(beta, levels, dim, resolution);
    }
    if (parts[0] == "triangle") {
        if (dim != 1) throw std::invalid_argument("triangle is one-dimensional");
        return triangle_wave(resolution);
    }
    if (parts[0] == "step") {
        if (dim != 1) throw std::invalid_argument("step is one-dimensional");
        return step_function(resolution);
    }
    if (parts[0] == "cosine") return cosine(dim, resolution);
    throw unknown_zoo(spec);
}

} // namespace maxiset
