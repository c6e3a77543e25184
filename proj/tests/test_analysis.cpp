#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "sm/analysis.hpp"

using namespace sm;

namespace {

// Q_m(a, b) = Pr(X > b^2) for X noncentral chi-square with 2m dof and
// noncentrality a^2, from Boost's own distribution implementation.
double boost_marcum(unsigned m, double a, double b)
{
    if (b == 0.0) return 1.0;
    if (a == 0.0) return boost::math::gamma_q(static_cast<double>(m), 0.5 * b * b);
    const boost::math::non_central_chi_squared dist(2.0 * m, a * a);
    return boost::math::cdf(boost::math::complement(dist, b * b));
}

// With d = zeta2_j Gamma(i + K, 1), K ~ Poisson(gamma2 / zeta2_j), and
// R = zeta2_t Gamma(N_r, 1), Pr(d <= R) is a Poisson mixture of regularized
// incomplete beta functions I_x(i + K, N_r), x = zeta2_t / (zeta2_j + zeta2_t).
double visit_prob_oracle(double gamma2, double zeta2_j, double zeta2_t, std::size_t level, std::size_t n_rx)
{
    const double mu = gamma2 / zeta2_j;
    const double x = zeta2_t / (zeta2_j + zeta2_t);
    double sum = 0.0, mass = 0.0;
    const double k_hi = mu + 40.0 * std::sqrt(mu + 1.0) + 50.0;
    for (double k = 0; k <= k_hi; k += 1.0) {
        const double w = std::exp(-mu + (k > 0 ? k * std::log(mu) : 0.0) - std::lgamma(k + 1.0));
        if (mu == 0.0 && k > 0) break;
        mass += w;
        sum += w * boost::math::ibeta(static_cast<double>(level) + k, static_cast<double>(n_rx), x);
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    return sum;
}

}  // namespace

TEST_CASE("maximum complexity reduction reproduces the six published ceilings")
{
    // (M, N_t, N_r) -> C_R^max in percent
    const struct {
        std::size_t m, nt, nr;
        double pct;
    } rows[] = {{8, 8, 8, 86.1}, {16, 16, 16, 93.4}, {8, 8, 6, 82.0},
                {16, 16, 12, 91.3}, {8, 8, 10, 88.6}, {16, 16, 20, 94.6}};
    for (const auto& r : rows) {
        CAPTURE(r.nr);
        CHECK(std::abs(100.0 * max_complexity_reduction(r.m, r.nt, r.nr) - r.pct) <= 0.05);
    }
    CHECK_THROWS_AS(max_complexity_reduction(0, 8, 8), std::invalid_argument);
}

TEST_CASE("complexity reduction ratio")
{
    CHECK(complexity_reduction(512, 8, 8, 8) == 0.0);
    CHECK(complexity_reduction(0, 8, 8, 8) == 1.0);
    CHECK(complexity_reduction(71, 8, 8, 8) == doctest::Approx(0.8613).epsilon(1e-4));
    CHECK(complexity_reduction(71, 8, 8, 8) == max_complexity_reduction(8, 8, 8));
    CHECK_THROWS_AS(complexity_reduction(513, 8, 8, 8), std::invalid_argument);
    CHECK_THROWS_AS(complexity_reduction(-1, 8, 8, 8), std::invalid_argument);
}

TEST_CASE("noncentrality, rho and zeta")
{
    const std::vector<cdouble> xt{{1, 0}, {0, 1}, {2, 2}};
    const std::vector<cdouble> xj{{0, 0}, {0, -1}, {2, 1}};
    CHECK(noncentrality(xt, xj, 1) == 1.0);
    CHECK(noncentrality(xt, xj, 2) == 5.0);
    CHECK(noncentrality(xt, xj, 3) == 6.0);
    CHECK(noncentrality(xt, xt, 3) == 0.0);
    CHECK_THROWS_AS(noncentrality(xt, xj, 4), std::invalid_argument);

    CHECK(rho(0.0) == 1.0);
    CHECK(rho(0.2) == doctest::Approx(1.0 / std::sqrt(1.2)));
    CHECK(zeta2(0.1, 1.0, 3.0) == 0.1);
    // 1 - rho^2 = sigma_e2 / (1 + sigma_e2)
    CHECK(zeta2(0.1, rho(0.25), 2.0) == doctest::Approx(0.1 + 0.2 * 2.0));
    CHECK_THROWS_AS(rho(-0.1), std::invalid_argument);
}

TEST_CASE("Marcum Q against Boost's noncentral chi-square")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ab(0.0, 30.0);
    for (int k = 0; k < 200; ++k) {
        const unsigned m = 1 + static_cast<unsigned>(rng() % 32);
        const double a = ab(rng), b = ab(rng);
        CAPTURE(m);
        CAPTURE(a);
        CAPTURE(b);
        const double q = marcum_q(m, a, b);
        CHECK(std::abs(q - boost_marcum(m, a, b)) < 1e-10);
        CHECK(std::abs(noncentral_chi2_cdf(2 * m, a * a, b * b) - (1.0 - q)) < 1e-10);
    }
}

TEST_CASE("Marcum Q special values")
{
    CHECK(marcum_q(1, 3.0, 0.0) == 1.0);
    // Q_1(0, b) = exp(-b^2 / 2)
    CHECK(marcum_q(1, 0.0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-13));
    // Q_m(a, b) is increasing in a and in m, decreasing in b
    CHECK(marcum_q(3, 2.0, 3.0) < marcum_q(3, 2.5, 3.0));
    CHECK(marcum_q(3, 2.0, 3.0) < marcum_q(4, 2.0, 3.0));
    CHECK(marcum_q(3, 2.0, 3.0) > marcum_q(3, 2.0, 3.5));
    // tails far from the bulk stay in [0, 1] without cancellation
    CHECK(marcum_q(1, 0.5, 40.0) >= 0.0);
    CHECK(noncentral_chi2_cdf(64, 900.0, 1.0) >= 0.0);
    CHECK(noncentral_chi2_cdf(2, 1.0, 0.0) == 0.0);
    CHECK_THROWS_AS(marcum_q(0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(noncentral_chi2_cdf(3, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("node visit probability against the Poisson-beta closed form")
{
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int k = 0; k < 150; ++k) {
        const std::size_t n_rx = 1 + rng() % 16;
        const std::size_t level = 1 + rng() % n_rx;
        const double zeta2_t = std::pow(10.0, -3.0 * u01(rng));
        const double zeta2_j = zeta2_t * (0.5 + u01(rng));
        const double gamma2 = 4.0 * u01(rng) * u01(rng);
        CAPTURE(n_rx);
        CAPTURE(level);
        CAPTURE(gamma2);
        CAPTURE(zeta2_j);
        CAPTURE(zeta2_t);
        const double p = node_visit_prob(gamma2, zeta2_j, zeta2_t, level, n_rx);
        CHECK(std::abs(p - visit_prob_oracle(gamma2, zeta2_j, zeta2_t, level, n_rx)) < 1e-8);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
}

TEST_CASE("node visit probability: structural properties")
{
    // gamma = 0 and equal variances: Pr(Gamma(i) <= Gamma(N_r)) = I_{1/2}(i, N_r)
    for (std::size_t i = 1; i <= 8; ++i) {
        CHECK(node_visit_prob(0.0, 0.3, 0.3, i, 8) ==
              doctest::Approx(boost::math::ibeta(double(i), 8.0, 0.5)).epsilon(1e-9));
    }
    // decreasing in the noncentrality and in the level
    double prev = 1.0;
    for (double g : {0.0, 0.01, 0.1, 0.5, 1.0, 3.0}) {
        const double p = node_visit_prob(g, 0.1, 0.1, 2, 8);
        CHECK(p <= prev + 1e-12);
        prev = p;
    }
    prev = 1.0;
    for (std::size_t i = 1; i <= 8; ++i) {
        const double p = node_visit_prob(0.2, 0.1, 0.1, i, 8);
        CHECK(p <= prev + 1e-12);
        prev = p;
    }
    CHECK(node_visit_prob(1e6, 1e-4, 1e-4, 1, 8) == 0.0);
    CHECK_THROWS_AS(node_visit_prob(0.1, 0.0, 0.1, 1, 8), std::invalid_argument);
    CHECK_THROWS_AS(node_visit_prob(0.1, 0.1, 0.1, 9, 8), std::invalid_argument);
}

TEST_CASE("NumericFailure reports the achieved tolerance")
{
    const NumericFailure e("quadrature", 3e-7);
    CHECK(e.achieved_tolerance() == 3e-7);
    CHECK(std::string(e.what()).find("quadrature") != std::string::npos);
}

namespace {

struct Realization {
    Constellation c;
    CandidateSet cs;
    std::size_t t;
};

Realization draw(std::uint64_t seed, std::size_t order, std::size_t n_tx, std::size_t n_rx)
{
    Rng rng(seed);
    Constellation c = build_qam(order);
    CandidateSet cs(sample_channel(rng, n_rx, n_tx), c);
    const std::size_t t = rng() % cs.size();
    return {std::move(c), std::move(cs), t};
}

}  // namespace

TEST_CASE("expected complexity bounds")
{
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto r = draw(seed, 8, 8, 8);
        for (double snr_db : {0.0, 10.0, 20.0}) {
            const Scenario s{8, 8, 8, noise_variance_for_snr_db(snr_db), CsirModel::fixed(0.1)};
            const double c = expected_complexity(s, r.cs, r.t, r.c);
            const double r_t = rho(0.1);
            const double z_t = zeta2(s.sigma_n2, r_t, r.c.energy(r.cs.symbol_of(r.t)));
            double own = 64.0;
            for (std::size_t i = 1; i <= 8; ++i) own += node_visit_prob(0.0, z_t, z_t, i, 8);
            CHECK(c >= own - 1e-9);
            CHECK(c <= 64.0 * 9.0);
        }
    }
}

TEST_CASE("expected complexity: noiseless limit and continuity in sigma_e2")
{
    // As the noise vanishes only the transmitted branch survives, and its
    // nodes are each compared against its own full metric:
    // M N_t + sum_i I_{1/2}(i, N_r).
    double limit = 64.0;
    for (std::size_t i = 1; i <= 8; ++i) limit += boost::math::ibeta(double(i), 8.0, 0.5);
    CHECK(limit == doctest::Approx(70.4290).epsilon(1e-4));
    // within one node of the simulated floor M N_t + N_r - 1
    CHECK(std::abs(limit - 71.0) < 1.0);

    for (std::uint64_t seed = 10; seed < 14; ++seed) {
        const auto r = draw(seed, 8, 8, 8);
        const Scenario perfect{8, 8, 8, noise_variance_for_snr_db(40.0), CsirModel::perfect()};
        const double c0 = expected_complexity(perfect, r.cs, r.t, r.c);
        CHECK(std::abs(c0 - limit) < 0.5);

        Scenario tiny = perfect;
        tiny.csir = CsirModel::fixed(1e-12);
        CHECK(std::abs(expected_complexity(tiny, r.cs, r.t, r.c) - c0) < 1e-6);
    }
}

TEST_CASE("expected complexity rejects inconsistent dimensions")
{
    const auto r = draw(3, 8, 8, 8);
    const Scenario wrong{8, 8, 6, 0.1, CsirModel::perfect()};
    CHECK_THROWS_AS(expected_complexity(wrong, r.cs, r.t, r.c), std::invalid_argument);
    const Scenario ok{8, 8, 8, 0.1, CsirModel::perfect()};
    CHECK_THROWS_AS(expected_complexity(ok, r.cs, 64, r.c), std::invalid_argument);
}
