#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace maxiset {

/// A compactly supported kernel K : R^d -> R with the metadata that enters
/// the rate formulas.
///
/// Conditions checked by check_conditions():
///   A1  K == 0 outside [-A, A]^d
///   A2  finite L2 norm (cached in l2_norm)
///   A3  L2 shift modulus: int (K(.+t) - K)^2 <= C |t|^(2*gamma)
///   A4  unit mass
///   A5  integrable (a.e.) derivatives up to total order N
///   A6  vanishing moments against monomials of total degree 1..N-1
struct Kernel {
    int dim = 1;
    double support_radius = 0.0; ///< A: zero outside [-A, A]^dim
    int order = 1;               ///< claimed N (largest class membership)
    double gamma = 1.0;          ///< claimed A3 exponent, in (0, 1]
    double l2_norm = 0.0;        ///< cached sqrt(int K^2)
    std::string name;
    std::function<double(std::span<const double>)> eval;

    double operator()(std::span<const double> x) const { return eval(x); }
    double operator()(double x) const { return eval(std::span<const double>(&x, 1)); }
};

/// Indicator of [-1/2, 1/2]^d. Order 1, gamma 1/2, unit L2 norm.
Kernel box_kernel(int dim);

/// c * (1 - sum_i |x_i|^beta)_+^power, normalized to unit mass by quadrature.
/// power must be 1 or 2; beta_param >= 1. Order 2 when power == 1 and
/// beta_param >= 2 (vanishing first moments with integrable curvature),
/// otherwise order 1.
Kernel poly_kernel(double beta_param, int power, int dim);

/// Kernel of order N on [-1, 1]^d: a polynomial times the weight
/// (1 - u^2)^max(N,2) per axis, with coefficients solved so that the mass is
/// one and moments of degree 1..N-1 vanish exactly. The weight keeps N-1
/// derivatives zero at the support boundary, so the derivative-integrability
/// condition holds at order N. For d > 1 the product kernel is used.
Kernel higher_order_kernel(int order, int dim);

struct ConditionEntry {
    bool holds = false;
    double measured = 0.0;  ///< numeric residual (|int K - 1|, worst moment, ...)
    double tolerance = 0.0; ///< threshold the residual was compared against
};

/// Per-condition numeric verification results for one kernel at one order.
struct ConditionReport {
    ConditionEntry a1, a2, a3, a4, a5, a6;
    bool all_hold() const {
        return a1.holds && a2.holds && a3.holds && a4.holds && a5.holds && a6.holds;
    }
};

/// Numerically verifies conditions A1..A6 for kernel K at order N.
/// tol applies to the quadrature residuals (A1, A4, A6); A2 uses a relative
/// match against the cached L2 norm, A3 an exponent slack of 0.1, and A5 a
/// growth cap of 1.25 across two step refinements of the finite-difference
/// derivative quadrature.
ConditionReport check_conditions(const Kernel& kernel, int order, double tol);

/// Estimates the A3 exponent gamma: least-squares slope of
/// log int (K(. + t e1) - K)^2 against log t, divided by two. Uncapped; the
/// condition report caps at 1.0. Requires at least 3 shifts, all in (0, 1].
double l2_modulus_exponent(const Kernel& kernel, std::span<const double> shifts);

/// The shift modulus int (K(. + t e1) - K(.))^2 du itself (quadrature).
double l2_shift_modulus(const Kernel& kernel, double t);

/// int u^alpha K(u) du by quadrature (alpha a multi-index of length dim).
double kernel_moment(const Kernel& kernel, std::span<const int> alpha);

/// int K^2 by quadrature.
double kernel_l2_squared(const Kernel& kernel);

/// int K by quadrature.
double kernel_mass(const Kernel& kernel);

/// Dyadic bandwidth schedule h_n = 2^(-m_n) with
/// m_n = round(-log2(C (log n / n)^(1/(2 beta + d)))).
/// The n grid must be strictly increasing with all entries >= 2; a geometric
/// grid with ratio >= 2 guarantees the rounded exponents stay nondecreasing
/// (violations raise std::logic_error). The returned sequence satisfies the
/// dyadic-class requirements: m_n nondecreasing with bounded increments.
std::vector<double> dyadic_schedule(std::span<const std::int64_t> n_grid,
                                    double beta, int dim, double C);

/// Resolves a kernel registry name: "box", "poly:beta=<b>:pow=<1|2>",
/// "order:N=<n>". Throws std::invalid_argument for unknown names, with the
/// registry spelled out in the message.
Kernel kernel_from_spec(const std::string& spec, int dim);

/// Registry name patterns, for CLI listings and error messages.
std::vector<std::string> kernel_registry_names();

/// Composite midpoint quadrature of f over [-radius, radius]^dim.
/// nodes_per_axis <= 0 picks the default density (2^14 for d=1, 2^9 for d=2).
double integrate_box(const std::function<double(std::span<const double>)>& f,
                     double radius, int dim, int nodes_per_axis = 0);

} // namespace maxiset
