#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace maxiset {

/// Number of cells of a regular grid on the d-torus with M points per axis.
/// Throws std::invalid_argument on d < 1, M < 2 or overflow.
std::size_t grid_size(int dim, int resolution);

/// Samples of a 1-periodic function on the regular grid {i/M : 0 <= i < M}^d,
/// stored row-major. Index arithmetic is modulo M on every axis, so the
/// carrier is genuinely the torus.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(int dim, int resolution);

    /// Fills the grid by evaluating f at the grid points t = i/M.
    static GridFunction from_function(
        int dim, int resolution,
        const std::function<double(std::span<const double>)>& f);

    int dim() const { return dim_; }
    int resolution() const { return resolution_; }
    std::size_t size() const { return values_.size(); }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    /// Value at a (possibly out-of-range) multi-index, wrapped modulo M.
    double at_wrapped(std::span<const int> index) const;

    GridFunction& operator+=(const GridFunction& other);
    GridFunction& operator-=(const GridFunction& other);
    GridFunction& operator*=(double a);

private:
    int dim_ = 0;
    int resolution_ = 0;
    std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double a, GridFunction g);

/// Grid max of |g|: the computable surrogate for the essential sup on the
/// torus. It under-approximates the true sup by at most the modulus of
/// continuity of g over one grid cell.
double sup_norm(const GridFunction& g);

/// Cyclic shift by whole cells: out(i) = g(i - shift), per axis modulo M.
GridFunction shift_cells(const GridFunction& g, std::span<const int> shift);

} // namespace maxiset
