#include "maxiset/grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace maxiset {

std::size_t grid_size(int dim, int resolution) {
    if (dim < 1) throw std::invalid_argument("grid dimension must be >= 1");
    if (resolution < 2) throw std::invalid_argument("grid resolution must be >= 2");
    std::size_t n = 1;
    for (int a = 0; a < dim; ++a) {
        const std::size_t m = static_cast<std::size_t>(resolution);
        if (n > std::numeric_limits<std::size_t>::max() / m)
            throw std::invalid_argument("grid size overflow");
        n *= m;
    }
    return n;
}

GridFunction::GridFunction(int dim, int resolution)
    : dim_(dim), resolution_(resolution), values_(grid_size(dim, resolution), 0.0) {}

GridFunction GridFunction::from_function(
    int dim, int resolution,
    const std::function<double(std::span<const double>)>& f) {
    GridFunction g(dim, resolution);
    std::vector<int> idx(dim, 0);
    std::vector<double> t(dim, 0.0);
    const double inv_m = 1.0 / resolution;
    for (std::size_t lin = 0; lin < g.size(); ++lin) {
        for (int a = 0; a < dim; ++a) t[a] = idx[a] * inv_m;
        g.values_[lin] = f(t);
        for (int a = dim - 1; a >= 0; --a) {
            if (++idx[a] < resolution) break;
            idx[a] = 0;
        }
    }
    return g;
}

double GridFunction::at_wrapped(std::span<const int> index) const {
    if (static_cast<int>(index.size()) != dim_)
        throw std::invalid_argument("index rank mismatch");
    std::size_t lin = 0;
    for (int a = 0; a < dim_; ++a) {
        int i = index[a] % resolution_;
        if (i < 0) i += resolution_;
        lin = lin * static_cast<std::size_t>(resolution_) + static_cast<std::size_t>(i);
    }
    return values_[lin];
}

namespace {
void require_same_shape(const GridFunction& a, const GridFunction& b) {
    if (a.dim() != b.dim() || a.resolution() != b.resolution())
        throw std::invalid_argument("grid shape mismatch");
}
} // namespace

GridFunction& GridFunction::operator+=(const GridFunction& other) {
    require_same_shape(*this, other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
    require_same_shape(*this, other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

GridFunction& GridFunction::operator*=(double a) {
    for (double& v : values_) v *= a;
    return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { a += b; return a; }
GridFunction operator-(GridFunction a, const GridFunction& b) { a -= b; return a; }
GridFunction operator*(double a, GridFunction g) { g *= a; return g; }

double sup_norm(const GridFunction& g) {
    double m = 0.0;
    for (double v : g.values()) {
        const double av = std::fabs(v);
        if (av > m) m = av;
    }
    return m;
}

GridFunction shift_cells(const GridFunction& g, std::span<const int> shift) {
    if (static_cast<int>(shift.size()) != g.dim())
        throw std::invalid_argument("shift rank mismatch");
    const int m = g.resolution();
    GridFunction out(g.dim(), m);
    if (g.dim() == 1) {
        for (int i = 0; i < m; ++i) {
            int j = (i - shift[0]) % m;
            if (j < 0) j += m;
            out[static_cast<std::size_t>(i)] = g[static_cast<std::size_t>(j)];
        }
        return out;
    }
    if (g.dim() == 2) {
        for (int i = 0; i < m; ++i) {
            int si = (i - shift[0]) % m;
            if (si < 0) si += m;
            for (int j = 0; j < m; ++j) {
                int sj = (j - shift[1]) % m;
                if (sj < 0) sj += m;
                out[static_cast<std::size_t>(i) * m + j] =
                    g[static_cast<std::size_t>(si) * m + sj];
            }
        }
        return out;
    }
    throw std::invalid_argument("shift_cells supports dim <= 2");
}

} // namespace maxiset
