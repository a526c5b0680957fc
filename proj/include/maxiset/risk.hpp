#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "maxiset/estimator.hpp"
#include "maxiset/grid.hpp"
#include "maxiset/kernel.hpp"
#include "maxiset/lepski.hpp"
#include "maxiset/zoo.hpp"

namespace maxiset {

/// The benchmark rate psi_n(beta) = (log n / n)^(beta/(2 beta + d)).
double psi(std::int64_t n, double beta, int dim);

/// beta / (2 beta + d): the rate exponent in log(log n / n).
double rate_exponent(double beta, int dim);

struct RiskRow {
    std::int64_t n = 0;
    double h = 0.0;
    double risk = 0.0;          ///< Monte Carlo mean of sup|f_hat - f|^p
    double std_error = 0.0;     ///< sample std / sqrt(R)
    double bias_sup = 0.0;      ///< sup|K_h * f - f| (noise-free, computed once)
    double variance_risk = 0.0; ///< Monte Carlo mean of sup|f_hat - K_h * f|^p
    double psi = 0.0;           ///< psi_n(beta)
    double ratio = 0.0;         ///< psi^(-p) * risk
};

enum class Verdict { member, non_member, boundary };
std::string to_string(Verdict v);

struct RiskReport {
    std::vector<RiskRow> rows;
    double sigma = 1.0;
    double p = 2.0;
    int replications = 0;
    // NaN until rate_fit runs
    double fitted_exponent = std::numeric_limits<double>::quiet_NaN();
    double target_exponent = std::numeric_limits<double>::quiet_NaN();
    Verdict verdict = Verdict::boundary;
    bool degenerate_noise = false; ///< sigma == 0: std_error is identically 0
};

/// One fixed-regularity kernel procedure.
struct FixedBetaProcedure {
    double beta = 1.0;
    Kernel kernel;
    double C = 1.0;
    bool dyadic_snap = false;
};

/// Monte Carlo sup-norm risk of the fixed-beta procedure over an n grid.
/// Replication r of row n uses the derived stream mix(seed, n_index<<32 | r),
/// so results are independent of scheduling and bit-identical across thread
/// counts. Inadmissible bandwidths are reported up front, listing the
/// offending n values.
RiskReport mc_risk(const GridFunction& f, const FixedBetaProcedure& procedure,
                   double sigma, double p, std::span<const std::int64_t> n_grid,
                   int replications, std::uint64_t seed, int threads = 1);

/// Least-squares slope of log risk against log(log n / n), divided by p,
/// plus the membership verdict:
///   member      |fitted - beta/(2 beta+d)| <= 0.1 and the last three ratio
///               entries stay within 1.5x the median ratio;
///   non-member  fitted < target - 0.1, or the ratio sequence strictly
///               increases over the last four rows by a total factor >= 2;
///   boundary    otherwise.
/// Requires at least 4 rows. Fills the report fields and returns them.
std::pair<double, Verdict> rate_fit(RiskReport& report, double beta, int dim);

struct Lemma1Row {
    std::int64_t n = 0;
    bool bias_ok = false;     ///< bias_sup^p <= risk (within 3 SE slack)
    bool variance_ok = false; ///< variance_risk <= 2^p risk (within slack)
};

/// Checks the bias and centered-moment inequalities implied by the risk on
/// every row of a measured report.
std::vector<Lemma1Row> lemma1_check(const RiskReport& report);

struct VarianceBoundRow {
    double h = 0.0;
    double mc_moment = 0.0; ///< Monte Carlo mean of sup|Z|^p
    double bound = 0.0;     ///< (2 d sigma^2 ||K||_2^2 |log h| / (n h^d))^(p/2)
    double ratio = 0.0;
    bool pass = false;      ///< ratio >= 1 - delta
};

/// Monte Carlo check of the stochastic-term lower bound along a decreasing
/// bandwidth sweep; one shared noise field per replication keeps the ratio
/// curve smooth. The smallest-h row is the binding check.
std::vector<VarianceBoundRow> variance_lower_bound_check(
    const Kernel& kernel, std::span<const double> h_list, const ModelParams& params,
    int resolution, double delta, int replications, std::uint64_t seed,
    int threads = 1);

struct BandwidthCheck {
    bool pass = false;
    double max_constant = 0.0;    ///< max of h_n^(-1) (log n / n)^(1/(2 beta+d))
    std::vector<double> sequence; ///< the per-n constants
};

/// Verifies that the bandwidth sequence does not shrink faster than the rate
/// allows: fails when the constant sequence grows by a factor >= 2 from any
/// earlier point of the grid.
BandwidthCheck theorem1_bandwidth_check(std::span<const double> h_schedule,
                                        std::span<const std::int64_t> n_grid,
                                        double beta, int dim);

struct AdaptiveRiskResult {
    RiskReport report;
    /// [n_index][level]: how often each beta was selected.
    std::vector<std::vector<int>> selection_counts;
    /// [n_index][replication]: the selected level index, for trace output.
    std::vector<std::vector<int>> selections;
};

/// Monte Carlo sup-norm risk of the adaptive procedure. All per-beta
/// estimates within one replication share a single noise field. The psi and
/// ratio columns (and later rate fits) are taken against target_beta.
AdaptiveRiskResult mc_adaptive_risk(const GridFunction& f, const RegularityGrid& grid,
                                    double sigma, double p,
                                    std::span<const std::int64_t> n_grid,
                                    int replications, double target_beta,
                                    std::uint64_t seed, int threads = 1);

/// Verdict of the refinement-stability diagnostic for the seminorm at
/// exponent beta over a family of grid realizations (the family must deepen
/// with resolution, e.g. auto-J Weierstrass names):
///   non-member when the seminorm grows by >= 2^0.1 per doubling across two
///   doublings, member when both ratios stay <= 1.3, boundary otherwise.
Verdict seminorm_stability(const std::function<ZooFunction(int)>& family,
                           double beta, int base_resolution,
                           std::vector<double>* values = nullptr);

struct MaxisetVerdict {
    Verdict bias_channel = Verdict::boundary;     ///< normalized-bias boundedness
    Verdict rate_channel = Verdict::boundary;     ///< Monte Carlo rate fit
    Verdict seminorm_channel = Verdict::boundary; ///< function-space diagnostic
    bool channels_agree = false;
    bool integer_boundary = false;
    bool holder_side = false; ///< integer beta: Holder-side seminorm stable
    bool besov_side = false;  ///< integer beta: Zygmund-side seminorm stable
    Verdict overall = Verdict::boundary;
    RiskReport report;
    BiasProfile profile;
    std::vector<double> seminorm_values;
};

/// Combines the three membership channels for one (function family, fixed
/// procedure, beta) cell: the noise-free normalized-bias boundedness along
/// the h_{n,beta} sequence, the Monte Carlo rate verdict, and the seminorm
/// diagnostic. At integer beta the overall verdict is "boundary" and the
/// Holder/Zygmund sides are reported separately (the sandwich).
MaxisetVerdict maxiset_verdict(const std::function<ZooFunction(int)>& family,
                               const FixedBetaProcedure& procedure, double sigma,
                               double p, std::span<const std::int64_t> n_grid,
                               int replications, int resolution, std::uint64_t seed,
                               int threads = 1);

/// Same combination with a Monte Carlo report that was already computed for
/// this cell (it is rate-fitted against procedure.beta here).
MaxisetVerdict maxiset_verdict(const std::function<ZooFunction(int)>& family,
                               const FixedBetaProcedure& procedure,
                               RiskReport report,
                               std::span<const std::int64_t> n_grid, int resolution);

} // namespace maxiset
