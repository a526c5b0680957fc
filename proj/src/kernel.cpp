#include "maxiset/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace maxiset {

namespace {

int default_nodes(int dim) {
    switch (dim) {
        case 1: return 1 << 14;
        case 2: return 1 << 9;
        default: return 1 << 6;
    }
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::string format_param(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Exact integral of u^m (1 - u^2)^q over [-1, 1] via binomial expansion.
double weighted_monomial_integral(int m, int q) {
    if (m % 2 != 0) return 0.0;
    double s = 0.0;
    for (int i = 0; i <= q; ++i) {
        const double sign = (i % 2 == 0) ? 1.0 : -1.0;
        s += sign * binomial(q, i) * 2.0 / static_cast<double>(m + 2 * i + 1);
    }
    return s;
}

// Solves A x = b with partial pivoting. A is tiny (N <= 8).
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b, int n) {
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(a[r * n + col]) > std::fabs(a[pivot * n + col])) pivot = r;
        if (std::fabs(a[pivot * n + col]) < 1e-14)
            throw std::runtime_error("singular moment system");
        if (pivot != col) {
            for (int c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
            std::swap(b[col], b[pivot]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / a[col * n + col];
            for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= a[r * n + c] * x[c];
        x[r] = s / a[r * n + r];
    }
    return x;
}

double product_eval(const std::function<double(double)>& k1,
                    std::span<const double> x) {
    double v = 1.0;
    for (double xi : x) v *= k1(xi);
    return v;
}

} // namespace

double integrate_box(const std::function<double(std::span<const double>)>& f,
                     double radius, int dim, int nodes_per_axis) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("integrate_box: dim must be 1..3");
    const int n = nodes_per_axis > 0 ? nodes_per_axis : default_nodes(dim);
    const double step = 2.0 * radius / n;
    const double cell = std::pow(step, dim);
    double sum = 0.0;
    if (dim == 1) {
        double x;
        std::span<const double> xs(&x, 1);
        for (int i = 0; i < n; ++i) {
            x = -radius + (i + 0.5) * step;
            sum += f(xs);
        }
    } else if (dim == 2) {
        double x[2];
        std::span<const double> xs(x, 2);
        for (int i = 0; i < n; ++i) {
            x[0] = -radius + (i + 0.5) * step;
            for (int j = 0; j < n; ++j) {
                x[1] = -radius + (j + 0.5) * step;
                sum += f(xs);
            }
        }
    } else {
        double x[3];
        std::span<const double> xs(x, 3);
        for (int i = 0; i < n; ++i) {
            x[0] = -radius + (i + 0.5) * step;
            for (int j = 0; j < n; ++j) {
                x[1] = -radius + (j + 0.5) * step;
                for (int k = 0; k < n; ++k) {
                    x[2] = -radius + (k + 0.5) * step;
                    sum += f(xs);
                }
            }
        }
    }
    return sum * cell;
}

double kernel_mass(const Kernel& kernel) {
    return integrate_box(kernel.eval, kernel.support_radius, kernel.dim);
}

double kernel_l2_squared(const Kernel& kernel) {
    return integrate_box(
        [&](std::span<const double> x) { const double v = kernel.eval(x); return v * v; },
        kernel.support_radius, kernel.dim);
}

double kernel_moment(const Kernel& kernel, std::span<const int> alpha) {
    if (static_cast<int>(alpha.size()) != kernel.dim)
        throw std::invalid_argument("moment multi-index rank mismatch");
    return integrate_box(
        [&](std::span<const double> x) {
            double m = kernel.eval(x);
            for (int a = 0; a < kernel.dim; ++a)
                for (int k = 0; k < alpha[a]; ++k) m *= x[a];
            return m;
        },
        kernel.support_radius, kernel.dim);
}

double l2_shift_modulus(const Kernel& kernel, double t) {
    const int d = kernel.dim;
    std::vector<double> shifted(d, 0.0);
    const int nodes = d == 1 ? (1 << 16) : default_nodes(d);
    return integrate_box(
        [&](std::span<const double> x) {
            for (int a = 0; a < d; ++a) shifted[a] = x[a];
            shifted[0] += t;
            const double diff = kernel.eval(shifted) - kernel.eval(x);
            return diff * diff;
        },
        kernel.support_radius + 1.0, d, nodes);
}

double l2_modulus_exponent(const Kernel& kernel, std::span<const double> shifts) {
    if (shifts.size() < 3)
        throw std::invalid_argument("l2_modulus_exponent needs at least 3 shifts");
    for (double t : shifts)
        if (!(t > 0.0) || t > 1.0)
            throw std::invalid_argument("shifts must lie in (0, 1]");
    // least-squares slope of log modulus vs log shift
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(shifts.size());
    for (double t : shifts) {
        const double m = l2_shift_modulus(kernel, t);
        if (!(m > 0.0)) throw std::runtime_error("degenerate shift modulus");
        const double x = std::log(t);
        const double y = std::log(m);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return slope / 2.0;
}

Kernel box_kernel(int dim) {
    if (dim < 1) throw std::invalid_argument("box_kernel: dim must be >= 1");
    Kernel k;
    k.dim = dim;
    k.support_radius = 0.5;
    k.order = 1;
    k.gamma = 0.5;
    k.l2_norm = 1.0; // indicator of a unit-volume set
    k.name = "box";
    k.eval = [dim](std::span<const double> x) {
        for (int a = 0; a < dim; ++a)
            if (std::fabs(x[a]) > 0.5) return 0.0;
        return 1.0;
    };
    return k;
}

Kernel poly_kernel(double beta_param, int power, int dim) {
    if (beta_param < 1.0) throw std::invalid_argument("poly_kernel: beta must be >= 1");
    if (power != 1 && power != 2) throw std::invalid_argument("poly_kernel: power must be 1 or 2");
    if (dim < 1 || dim > 3) throw std::invalid_argument("poly_kernel: dim must be 1..3");
    auto unnormalized = [beta_param, power, dim](std::span<const double> x) {
        double s = 0.0;
        for (int a = 0; a < dim; ++a) s += std::pow(std::fabs(x[a]), beta_param);
        const double v = 1.0 - s;
        if (v <= 0.0) return 0.0;
        return power == 1 ? v : v * v;
    };
    const double mass = integrate_box(unnormalized, 1.0, dim);
    const double c = 1.0 / mass;

    Kernel k;
    k.dim = dim;
    k.support_radius = 1.0;
    k.order = (power == 1 && beta_param >= 2.0) ? 2 : 1;
    k.gamma = 1.0; // Lipschitz for beta >= 1, both powers
    k.name = "poly:beta=" + format_param(beta_param) + ":pow=" + std::to_string(power);
    k.eval = [unnormalized, c](std::span<const double> x) { return c * unnormalized(x); };
    k.l2_norm = std::sqrt(kernel_l2_squared(k));
    return k;
}

Kernel higher_order_kernel(int order, int dim) {
    if (order < 1) throw std::invalid_argument("higher_order_kernel: order must be >= 1");
    if (order > 8) throw std::invalid_argument("higher_order_kernel: order must be <= 8");
    if (dim < 1 || dim > 3) throw std::invalid_argument("higher_order_kernel: dim must be 1..3");
    const int n = order;
    const int q = std::max(order, 2);

    // Coefficients a_j of K1(u) = (1-u^2)^q sum_j a_j u^j on [-1,1], solved so
    // that int u^k K1 = delta_{k0} for k = 0..N-1 (exact rational integrals).
    std::vector<double> gram(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<double> rhs(n, 0.0);
    rhs[0] = 1.0;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            gram[k * n + j] = weighted_monomial_integral(k + j, q);
    const std::vector<double> coeff = solve_dense(std::move(gram), std::move(rhs), n);

    auto k1 = [coeff, q, n](double u) {
        if (std::fabs(u) > 1.0) return 0.0;
        double poly = 0.0;
        for (int j = n - 1; j >= 0; --j) poly = poly * u + coeff[j];
        const double w = 1.0 - u * u;
        return poly * std::pow(w, q);
    };

    Kernel k;
    k.dim = dim;
    k.support_radius = 1.0;
    k.order = order;
    k.gamma = 1.0;
    k.name = "order:N=" + std::to_string(order);
    if (dim == 1) {
        k.eval = [k1](std::span<const double> x) { return k1(x[0]); };
    } else {
        k.eval = [k1](std::span<const double> x) { return product_eval(k1, x); };
    }
    Kernel one_d = k;
    one_d.dim = 1;
    one_d.eval = [k1](std::span<const double> x) { return k1(x[0]); };
    const double l2_1d = kernel_l2_squared(one_d);
    k.l2_norm = std::sqrt(std::pow(l2_1d, dim));
    return k;
}

namespace {

// Iterated central-difference derivative of total multi-index alpha at x.
double finite_difference(const Kernel& kernel, std::span<const double> x,
                         std::span<const int> alpha, double step) {
    const int d = kernel.dim;
    // Expand the tensor-product difference stencil axis by axis.
    std::vector<std::pair<std::vector<double>, double>> stencil;
    stencil.emplace_back(std::vector<double>(x.begin(), x.end()), 1.0);
    double scale = 1.0;
    for (int a = 0; a < d; ++a) {
        const int m = alpha[a];
        if (m == 0) continue;
        scale *= std::pow(step, m);
        std::vector<std::pair<std::vector<double>, double>> next;
        next.reserve(stencil.size() * (m + 1));
        for (const auto& [pt, w] : stencil) {
            for (int k = 0; k <= m; ++k) {
                std::vector<double> p = pt;
                p[a] += (m / 2.0 - k) * step;
                const double sign = (k % 2 == 0) ? 1.0 : -1.0;
                next.emplace_back(std::move(p), w * sign * binomial(m, k));
            }
        }
        stencil = std::move(next);
    }
    double s = 0.0;
    for (const auto& [pt, w] : stencil) s += w * kernel.eval(pt);
    return s / scale;
}

// Quadrature of |FD_alpha K| over a box slightly larger than the support.
double derivative_abs_integral(const Kernel& kernel, std::span<const int> alpha,
                               double step) {
    const int d = kernel.dim;
    const double reach = kernel.support_radius + 4.0 * step;
    const double spacing = d == 1 ? step / 8.0 : step / 4.0;
    const int nodes = std::max(2, static_cast<int>(std::ceil(2.0 * reach / spacing)));
    return integrate_box(
        [&](std::span<const double> x) {
            return std::fabs(finite_difference(kernel, x, alpha, step));
        },
        reach, d, nodes);
}

void enumerate_multi_indices(int dim, int total_min, int total_max,
                             std::vector<std::vector<int>>& out) {
    std::vector<int> alpha(dim, 0);
    while (true) {
        int total = 0;
        for (int v : alpha) total += v;
        if (total >= total_min && total <= total_max) out.push_back(alpha);
        int a = dim - 1;
        while (a >= 0) {
            if (++alpha[a] <= total_max) break;
            alpha[a] = 0;
            --a;
        }
        if (a < 0) break;
    }
}

} // namespace

ConditionReport check_conditions(const Kernel& kernel, int order, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("check_conditions: tol must be > 0");
    ConditionReport rep;
    const int d = kernel.dim;
    const double a = kernel.support_radius;

    // A1: vanishing outside the support box.
    {
        double worst = 0.0;
        const int n = d == 1 ? 512 : 32;
        std::vector<double> x(d, 0.0);
        for (int i = 0; i < n; ++i) {
            const double outside = a * (1.0 + 1e-9) + (i + 0.5) * (0.5 / n);
            for (int axis = 0; axis < d; ++axis) {
                for (int inner = 0; inner < n; ++inner) {
                    for (int k = 0; k < d; ++k)
                        x[k] = -a + (2.0 * a) * (inner + 0.5) / n;
                    x[axis] = outside;
                    worst = std::max(worst, std::fabs(kernel.eval(x)));
                    x[axis] = -outside;
                    worst = std::max(worst, std::fabs(kernel.eval(x)));
                }
            }
        }
        rep.a1 = {worst <= tol, worst, tol};
    }

    // A2: quadrature of K^2 matches the cached norm and is finite.
    {
        const double q2 = kernel_l2_squared(kernel);
        const double cached = kernel.l2_norm * kernel.l2_norm;
        const double rel = std::fabs(q2 - cached) / std::max(1.0, q2);
        rep.a2 = {std::isfinite(q2) && rel <= 1e-3, rel, 1e-3};
    }

    // A3: measured modulus exponent supports the claimed gamma.
    {
        const double shifts[] = {0.25, 0.125, 0.0625, 0.03125, 0.015625};
        const double est = std::min(l2_modulus_exponent(kernel, shifts), 1.0);
        const double deficit = std::max(0.0, kernel.gamma - est);
        rep.a3 = {deficit <= 0.1, deficit, 0.1};
    }

    // A4: unit mass.
    {
        const double mass = kernel_mass(kernel);
        const double res = std::fabs(mass - 1.0);
        rep.a4 = {res <= tol, res, tol};
    }

    // A5: finite-difference derivative quadrature stays bounded as the
    // difference step is refined x2 twice (derivatives up to total order N,
    // almost-everywhere reading: kinks pass, jumps at order >= 2 do not).
    {
        std::vector<std::vector<int>> alphas;
        enumerate_multi_indices(d, 1, order, alphas);
        double worst_growth = 1.0;
        bool finite = true;
        const double s0 = a / 16.0;
        for (const auto& alpha : alphas) {
            const double q0 = derivative_abs_integral(kernel, alpha, s0);
            const double q1 = derivative_abs_integral(kernel, alpha, s0 / 2.0);
            const double q2 = derivative_abs_integral(kernel, alpha, s0 / 4.0);
            finite = finite && std::isfinite(q0) && std::isfinite(q1) && std::isfinite(q2);
            const double floor = 1e-9;
            const double g1 = q1 <= floor ? 1.0 : q1 / std::max(q0, floor);
            const double g2 = q2 <= floor ? 1.0 : q2 / std::max(q1, floor);
            worst_growth = std::max({worst_growth, g1, g2});
        }
        rep.a5 = {finite && worst_growth <= 1.25, worst_growth, 1.25};
    }

    // A6: vanishing moments for monomials of total degree 1..N-1.
    {
        std::vector<std::vector<int>> alphas;
        enumerate_multi_indices(d, 1, order - 1, alphas);
        double worst = 0.0;
        for (const auto& alpha : alphas)
            worst = std::max(worst, std::fabs(kernel_moment(kernel, alpha)));
        rep.a6 = {worst <= tol, worst, tol};
    }

    return rep;
}

std::vector<double> dyadic_schedule(std::span<const std::int64_t> n_grid,
                                    double beta, int dim, double C) {
    if (n_grid.empty()) throw std::invalid_argument("dyadic_schedule: empty n grid");
    if (!(beta > 0.0)) throw std::invalid_argument("dyadic_schedule: beta must be > 0");
    if (!(C > 0.0)) throw std::invalid_argument("dyadic_schedule: C must be > 0");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 2) throw std::invalid_argument("dyadic_schedule: n must be >= 2");
        if (i > 0 && n_grid[i] <= n_grid[i - 1])
            throw std::invalid_argument("dyadic_schedule: n grid must be strictly increasing");
    }
    const double expo = 1.0 / (2.0 * beta + dim);
    std::vector<double> h;
    h.reserve(n_grid.size());
    long long prev_m = std::numeric_limits<long long>::min();
    for (std::int64_t n : n_grid) {
        const double raw = C * std::pow(std::log(static_cast<double>(n)) / n, expo);
        const long long m = std::llround(-std::log2(raw));
        if (m < prev_m)
            throw std::logic_error(
                "dyadic_schedule: rounded exponents decreased; n grid too dense "
                "(use a geometric grid with ratio >= 2)");
        prev_m = m;
        h.push_back(std::pow(2.0, -static_cast<double>(m)));
    }
    return h;
}

std::vector<std::string> kernel_registry_names() {
    return {"box", "poly:beta=<b>:pow=<1|2>", "order:N=<n>"};
}

namespace {

std::invalid_argument unknown_kernel(const std::string& spec) {
    std::ostringstream os;
    os << "unknown kernel '" << spec << "'; registry:";
    for (const auto& n : kernel_registry_names()) os << " " << n;
    return std::invalid_argument(os.str());
}

} // namespace

Kernel kernel_from_spec(const std::string& spec, int dim) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.empty()) throw unknown_kernel(spec);

    auto param = [&](const std::string& key) -> std::string {
        for (std::size_t i = 1; i < parts.size(); ++i) {
            if (parts[i].rfind(key + "=", 0) == 0)
                return parts[i].substr(key.size() + 1);
        }
        throw unknown_kernel(spec);
    };

    if (parts[0] == "box") return box_kernel(dim);
    if (parts[0] == "poly") {
        double beta = 0.0;
        int power = 0;
        try {
            beta = std::stod(param("beta"));
            power = std::stoi(param("pow"));
        } catch (...) {
            throw unknown_kernel(spec);
        }
        return poly_kernel(beta, power, dim);
    }
    if (parts[0] == "order") {
        int n = 0;
        try {
            n = std::stoi(param("N"));
        } catch (...) {
            throw unknown_kernel(spec);
        }
        return higher_order_kernel(n, dim);
    }
    throw unknown_kernel(spec);
}

} // namespace maxiset
