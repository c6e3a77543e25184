#include "sm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace sm {

double noncentrality(std::span<const cdouble> x_t, std::span<const cdouble> x_j, std::size_t levels)
{
    if (levels == 0 || levels > x_t.size() || x_t.size() != x_j.size()) {
        throw std::invalid_argument("noncentrality: level out of range or length mismatch");
    }
    double g = 0.0;
    for (std::size_t n = 0; n < levels; ++n) {
        const double dr = x_t[n].real() - x_j[n].real();
        const double di = x_t[n].imag() - x_j[n].imag();
        g += dr * dr + di * di;
    }
    return g;
}

double rho(double sigma_e2)
{
    if (!(sigma_e2 >= 0.0)) throw std::invalid_argument("rho: error variance must be nonnegative");
    return 1.0 / std::sqrt(1.0 + sigma_e2);
}

double zeta2(double sigma_n2, double rho, double symbol_energy)
{
    if (!(sigma_n2 >= 0.0) || !(symbol_energy >= 0.0) || !(rho > 0.0 && rho <= 1.0)) {
        throw std::invalid_argument("zeta2: arguments out of range");
    }
    return sigma_n2 + (1.0 - rho * rho) * symbol_energy;
}

namespace {

// Poisson tail bound below which the mixture series is truncated.
constexpr double kSeriesTail = 1e-15;

enum class Tail { upper, lower };

// Q_m(a, b) = sum_k Pois(k; a^2/2) * Q(m + k, b^2/2) with Q the regularized
// upper incomplete gamma. The sum starts at the Poisson mode and walks in
// both directions; weights and incomplete-gamma values use the recurrences
//   Q(s + 1, y) = Q(s, y) + y^s e^-y / s!
//   P(s + 1, y) = P(s, y) - y^s e^-y / s!
//
// Tail::upper returns Q_m(a, b), Tail::lower returns 1 - Q_m(a, b); each is
// accumulated from its own incomplete-gamma side so that neither is formed
// by cancellation.
double marcum_series(unsigned m, double a, double b, Tail tail)
{
    const bool upper = tail == Tail::upper;
    const double lambda = 0.5 * a * a;
    const double y = 0.5 * b * b;
    if (y == 0.0) return upper ? 1.0 : 0.0;
    if (lambda == 0.0) {
        const double s = static_cast<double>(m);
        return upper ? boost::math::gamma_q(s, y) : boost::math::gamma_p(s, y);
    }

    const double k0 = std::floor(lambda);
    const double w0 = std::exp(-lambda + k0 * std::log(lambda) - boost::math::lgamma(k0 + 1.0));
    const double s0 = m + k0;
    // g is Q(s, y) for the upper tail and P(s, y) for the lower one; moving
    // s up by one adds sign * t(s) with t(s) = y^s e^-y / s!
    const double g0 = upper ? boost::math::gamma_q(s0, y) : boost::math::gamma_p(s0, y);
    const double sign = upper ? 1.0 : -1.0;
    const double t_below = std::exp((s0 - 1.0) * std::log(y) - y - boost::math::lgamma(s0));

    double sum = w0 * g0;

    // upward
    {
        double w = w0, g = g0;
        double t = t_below * y / s0;
        for (double k = k0;; k += 1.0) {
            const double s = m + k;
            g = std::clamp(g + sign * t, 0.0, 1.0);
            t *= y / (s + 1.0);
            w *= lambda / (k + 1.0);
            sum += w * g;
            // P(s, y) falls with s, so it scales the remaining lower-tail mass
            const double ratio = lambda / (k + 2.0);
            const double bound = upper ? 1.0 : g;
            if (ratio < 1.0 && bound * w / (1.0 - ratio) < kSeriesTail) break;
            if (w == 0.0) break;
        }
    }
    // downward
    {
        double w = w0, g = g0;
        double t = t_below;
        for (double k = k0; k >= 1.0; k -= 1.0) {
            const double s = m + k;
            g = std::clamp(g - sign * t, 0.0, 1.0);
            t *= (s - 1.0) / y;
            w *= k / lambda;
            sum += w * g;
            const double ratio = (k - 1.0) / lambda;
            const double bound = upper ? g : 1.0;
            if (ratio < 1.0 && bound * w * ratio / (1.0 - ratio) < kSeriesTail) break;
            if (w == 0.0) break;
        }
    }
    return std::clamp(sum, 0.0, 1.0);
}

// R / zeta2_t ~ Gamma(n_rx, 1); beyond this point the radius density carries
// less than 1e-16 of its mass.
double radius_cutoff(std::size_t n_rx)
{
    thread_local std::vector<double> cache;
    if (cache.size() <= n_rx) cache.resize(n_rx + 1, 0.0);
    if (cache[n_rx] == 0.0) cache[n_rx] = boost::math::gamma_q_inv(static_cast<double>(n_rx), 1e-16);
    return cache[n_rx];
}

}  // namespace

double marcum_q(unsigned m, double a, double b)
{
    if (m == 0 || !(a >= 0.0) || !(b >= 0.0)) throw std::invalid_argument("marcum_q: arguments out of range");
    return marcum_series(m, a, b, Tail::upper);
}

double noncentral_chi2_cdf(unsigned dof, double lambda, double x)
{
    if (dof == 0 || dof % 2 != 0 || !(lambda >= 0.0)) {
        throw std::invalid_argument("noncentral_chi2_cdf: even positive dof and nonnegative lambda required");
    }
    if (!(x > 0.0)) return 0.0;
    return marcum_series(dof / 2, std::sqrt(lambda), std::sqrt(x), Tail::lower);
}

double node_visit_prob(double gamma2, double zeta2_j, double zeta2_t, std::size_t level, std::size_t n_rx)
{
    if (!(zeta2_j > 0.0) || !(zeta2_t > 0.0) || level == 0 || level > n_rx || !(gamma2 >= 0.0)) {
        throw std::invalid_argument("node_visit_prob: arguments out of range");
    }
    if (std::isinf(gamma2)) return 0.0;

    const auto dof = static_cast<unsigned>(2 * level);
    const double lambda = 2.0 * gamma2 / zeta2_j;
    const double ratio = 2.0 * zeta2_t / zeta2_j;
    const double shape = static_cast<double>(n_rx);

    const double u_max = radius_cutoff(n_rx);
    const double log_norm = -boost::math::lgamma(shape);

    // the CDF is increasing in R, so its value at u_max bounds the integral
    if (noncentral_chi2_cdf(dof, lambda, ratio * u_max) < 1e-14) return 0.0;

    auto integrand = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double density = std::exp((shape - 1.0) * std::log(u) - u + log_norm);
        return noncentral_chi2_cdf(dof, lambda, ratio * u) * density;
    };

    double error = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, u_max, 15, 1e-10, &error);
    if (!(error <= 1e-9) || !std::isfinite(value)) {
        throw NumericFailure("node_visit_prob quadrature did not converge", error);
    }
    return std::clamp(value, 0.0, 1.0);
}

double expected_complexity(const Scenario& scenario, const CandidateSet& candidates, std::size_t transmitted,
                           const Constellation& constellation)
{
    const std::size_t branches = candidates.size();
    const std::size_t n_rx = candidates.n_rx();
    if (branches != scenario.branches() || n_rx != scenario.n_rx || transmitted >= branches ||
        constellation.order() != scenario.order) {
        throw std::invalid_argument("expected_complexity: inconsistent dimensions");
    }
    const double r = rho(scenario.error_variance());
    const auto x_t = candidates[transmitted];
    const double zeta2_t = zeta2(scenario.sigma_n2, r, constellation.energy(candidates.symbol_of(transmitted)));

    double total = static_cast<double>(branches);
    for (std::size_t j = 0; j < branches; ++j) {
        const auto x_j = candidates[j];
        const double zeta2_j = zeta2(scenario.sigma_n2, r, constellation.energy(candidates.symbol_of(j)));
        for (std::size_t i = 1; i <= n_rx; ++i) {
            total += node_visit_prob(noncentrality(x_t, x_j, i), zeta2_j, zeta2_t, i, n_rx);
        }
    }
    return total;
}

double complexity_reduction(double visited, std::size_t order, std::size_t n_tx, std::size_t n_rx)
{
    const double full = static_cast<double>(order * n_tx * n_rx);
    if (!(visited >= 0.0) || visited > full) {
        throw std::invalid_argument("complexity_reduction: visited count out of range");
    }
    return 1.0 - visited / full;
}

double max_complexity_reduction(std::size_t order, std::size_t n_tx, std::size_t n_rx)
{
    if (order == 0 || n_tx == 0 || n_rx == 0) throw std::invalid_argument("dimensions must be positive");
    const double branches = static_cast<double>(order * n_tx);
    const double levels = static_cast<double>(n_rx);
    return 1.0 - (levels + branches - 1.0) / (branches * levels);
}

}  // namespace sm
