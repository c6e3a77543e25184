// Expected visited-node complexity of the best-first SM detector.
//
// A node d_{i,j} is counted as visited when it does not exceed the pruning
// radius R = ||y - x_t||^2. Conditioned on (x_t, H), d_{i,j} is a scaled
// noncentral chi-square with 2i degrees of freedom and R a scaled central
// chi-square with 2 N_r degrees of freedom; the per-node visit probability
// is the expectation of the former's CDF over the latter's density.
#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include "sm/core.hpp"

namespace sm {

/// Quadrature that did not reach its tolerance.
class NumericFailure : public std::runtime_error {
public:
    NumericFailure(const std::string& what, double achieved)
        : std::runtime_error(what + " (achieved error estimate " + std::to_string(achieved) + ")"),
          achieved_(achieved)
    {
    }
    double achieved_tolerance() const noexcept { return achieved_; }

private:
    double achieved_;
};

struct Scenario {
    std::size_t order = 8;
    std::size_t n_tx = 8;
    std::size_t n_rx = 8;
    double sigma_n2 = 1.0;
    CsirModel csir;

    /// Channel-estimation error variance implied by sigma_n2 and the CSIR model.
    double error_variance() const { return csir.error_variance(1.0 / sigma_n2); }
    std::size_t branches() const noexcept { return order * n_tx; }
};

/// sum_{n < levels} |x_t[n] - x_j[n]|^2.
double noncentrality(std::span<const cdouble> x_t, std::span<const cdouble> x_j, std::size_t levels);

/// Correlation between true and estimated channel, 1 / sqrt(1 + sigma_e2).
double rho(double sigma_e2);

/// Conditional variance of a received entry given the estimate:
/// sigma_n2 + (1 - rho^2) |s|^2.
double zeta2(double sigma_n2, double rho, double symbol_energy);

/// Generalized Marcum Q function Q_m(a, b), m >= 1.
double marcum_q(unsigned m, double a, double b);

/// CDF at x of the noncentral chi-square with `dof` (even) degrees of
/// freedom and noncentrality lambda. Equals 1 - Q_{dof/2}(sqrt(lambda), sqrt(x)).
double noncentral_chi2_cdf(unsigned dof, double lambda, double x);

/// Pr(d_{i,j} <= R) with d_{i,j} distributed per (gamma2, zeta2_j, level)
/// and R per (zeta2_t, n_rx), integrated by adaptive Gauss-Kronrod.
/// Throws NumericFailure if the absolute error estimate exceeds 1e-9.
double node_visit_prob(double gamma2, double zeta2_j, double zeta2_t, std::size_t level, std::size_t n_rx);

/// Analytic expected visited nodes for one realization (x_t, candidates):
/// M N_t + sum_j sum_i node_visit_prob(...). `candidates` hold the noiseless
/// hypotheses x_j = h_a s_q through the true channel and `transmitted`
/// indexes x_t among them.
double expected_complexity(const Scenario& scenario, const CandidateSet& candidates, std::size_t transmitted,
                           const Constellation& constellation);

/// 1 - C / (M N_t N_r).
double complexity_reduction(double visited, std::size_t order, std::size_t n_tx, std::size_t n_rx);

/// 1 - (N_r + M N_t - 1) / (M N_t N_r).
double max_complexity_reduction(std::size_t order, std::size_t n_tx, std::size_t n_rx);

}  // namespace sm
