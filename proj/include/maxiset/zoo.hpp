#pragma once

#include <string>
#include <vector>

#include "maxiset/grid.hpp"

namespace maxiset {

/// A test signal with known regularity, for ground-truth experiments.
/// true_regularity is NaN for functions outside every Holder class and
/// +infinity for smooth ones; is_integer_boundary flags integer regularity,
/// where only the sandwich Holder(beta) c maxiset c Besov(beta) is available.
struct ZooFunction {
    GridFunction signal;
    std::string name;
    double true_regularity = 0.0;
    bool is_integer_boundary = false;
};

/// Lacunary cosine series sum_{j<=J} 2^(-j beta) cos(2 pi 2^j <v_j, t>) with
/// fixed integer directions v_j (axis 1 in d=1; alternating axes in d=2).
/// The partial sums are an approximation sequence at rate 2^(-j beta), so the
/// function has regularity exactly beta. Requires 2^J <= resolution/8 to keep
/// the finest layer resolved (else std::invalid_argument: aliasing).
ZooFunction weierstrass(double beta, int levels, int dim, int resolution);

/// 1-periodic unit-amplitude triangle wave (slopes +-4), regularity 1.
ZooFunction triangle_wave(int resolution);

/// 1-periodic +-1 square wave; in no Holder class (negative control).
ZooFunction step_function(int resolution);

/// cos(2 pi t_1); smooth.
ZooFunction cosine(int dim, int resolution);

/// Grid Holder seminorm: max over pairs within a window of resolution/4 cells
/// (periodic sup-distance) of |f(x) - f(y)| / ||x - y||^beta, 0 < beta <= 1.
/// In d=2 offsets run along the axes and the diagonal.
double holder_seminorm(const GridFunction& f, double beta);

/// Grid Zygmund seminorm: max over the same windows of
/// |f(x+y) + f(x-y) - 2 f(x)| / ||y||.
double zygmund_seminorm(const GridFunction& f);

/// Seminorm for beta > 1: takes m = ceil(beta) - 1 forward-difference
/// derivatives, then applies the Holder seminorm at exponent beta - m (or the
/// Zygmund seminorm when beta - m == 1).
double higher_holder_seminorm(const GridFunction& f, double beta);

/// Iterated forward-difference derivative on the grid, (f(i+1) - f(i)) * M
/// per pass; keeps piecewise-constant slopes exact.
GridFunction forward_difference_derivative(const GridFunction& f, int order);

/// Resolves a zoo registry name ("weierstrass:beta=<b>:J=<j>", "triangle",
/// "step", "cosine") at the requested grid. Unknown names raise
/// std::invalid_argument listing the registry.
ZooFunction zoo_from_spec(const std::string& spec, int dim, int resolution);

std::vector<std::string> zoo_registry_names();

} // namespace maxiset
