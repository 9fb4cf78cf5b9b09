#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "kaclab/entropy.hpp"
#include "kaclab/equilibrium.hpp"
#include "kaclab/moments.hpp"
#include "kaclab/quadrature.hpp"
#include "kaclab/scheme.hpp"
#include "test_support.hpp"

using namespace kaclab;
using kaclab::testing::rel_err;

namespace {

// Oracle: Li_s(z) = 1/Gamma(s) int_0^inf t^(s-1) / (e^t / z - 1) dt, and
// Li_{-1/2} = z d/dz Li_{1/2}, both by Boost double-exponential quadrature.
double polylog_oracle(double s, double z)
{
    boost::math::quadrature::exp_sinh<double> integrator;
    const double tol = 1e-15;
    if (s == -0.5) {
        auto f = [z](double t) {
            const double w = z * std::exp(-t);
            return w / ((1 - w) * (1 - w)) / std::sqrt(t);
        };
        return integrator.integrate(f, tol) / std::sqrt(std::numbers::pi);
    }
    auto f = [s, z](double t) {
        const double w = z * std::exp(-t);
        return std::pow(t, s - 1) * w / (1 - w);
    };
    return integrator.integrate(f, tol) / std::tgamma(s);
}

// Oracle: int_R v^(2j) f (1 + f)^k dv by Boost Gauss-Kronrod on a large interval.
double bose_moment_oracle(const BoseParameters<double>& p, int j, bool one_plus_f = false)
{
    auto f = [&](double v) {
        const double b = bose_eval(p, v);
        return std::pow(v, 2 * j) * b * (one_plus_f ? 1 + b : 1.0);
    };
    const double cut = std::sqrt(800.0 / p.lambda1());
    return 2 * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, cut, 20, 1e-15);
}

}  // namespace

TEST_CASE("oracle self-check against frozen high-precision values")
{
    // 30-digit reference values of Li_s(z)
    struct Ref {
        double s, z, value;
    } refs[] = {{0.5, 0.5, 0.80612672304285226132},     {1.5, 0.5, 0.62483702081991385363},
                {-0.5, 0.5, 1.3472537527357506922},     {0.5, 0.995, 23.575591285579564835},
                {1.5, 0.995, 2.3687158181806405496},    {-0.5, 0.995, 2497.0186945565916449},
                {0.5, 0.9999, 175.78062010740095938},   {1.5, 0.9999, 2.5770714271060548751},
                {0.5, 0.05, 0.051843207179522097667},   {1.5, 0.05, 0.050908750045681163267}};
    for (const auto& r : refs) {
        CHECK(rel_err(polylog_oracle(r.s, r.z), r.value) < 1e-11);
        CHECK(rel_err(polylog(r.s, r.z), r.value) < 1e-12);
    }
    CHECK(rel_err(polylog(-0.5, 0.9999), 886160.25027270608309) < 1e-10);
}

TEST_CASE("adaptive Gauss-Kronrod quadrature")
{
    const auto r = integrate_adaptive([](double x) { return std::exp(-x * x); }, 0.0, 10.0, 1e-15, 1e-15);
    CHECK(r.value == doctest::Approx(std::sqrt(std::numbers::pi) / 2).epsilon(1e-14));
    const auto s = integrate_adaptive([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-13, 1e-13);
    CHECK(s.value == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK_THROWS_AS(integrate_adaptive([](double x) { return 1.0 / x; }, 0.0, 1.0, 1e-14, 1e-14, 20),
                    ConvergenceError);
}

TEST_CASE("bose_eval")
{
    CHECK(bose_eval(BoseParameters<double>(1.0, 0.5), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(bose_eval(BoseParameters<double>(2.0, 0.3), 1.0) ==
          doctest::Approx(0.3 / (std::exp(2.0) - 0.3)).epsilon(1e-15));
    const double tail = bose_eval(BoseParameters<double>(1.0, 0.999), 50.0);
    CHECK(tail >= 0.0);
    CHECK(tail < 1e-300);
    CHECK(!std::isnan(tail));

    const BoseParameters<double> p(0.4, 0.8);
    double prev = std::numeric_limits<double>::infinity();
    for (double v = 0; v < 10; v += 0.25) {
        const double f = bose_eval(p, v);
        CHECK(f > 0.0);
        CHECK(f == bose_eval(p, -v));
        CHECK(f < prev);
        prev = f;
    }
    CHECK_THROWS_AS(BoseParameters<double>(0.0, 0.5), ValidationError);
    CHECK_THROWS_AS(BoseParameters<double>(1.0, 1.0), ValidationError);
    CHECK_THROWS_AS(BoseParameters<double>(1.0, 0.0), ValidationError);
    CHECK(BoseParameters<double>(1.0, 0.5).lambda2() == doctest::Approx(std::log(0.5)));
}

TEST_CASE("sample")
{
    const BoseParameters<double> p(1.0, 0.5);
    const auto g = make_uniform_grid(1.0, 4);
    const auto s = sample(p, g);
    const double v[] = {-0.75, -0.25, 0.25, 0.75};
    for (int i = 0; i < 4; ++i)
        CHECK(s[i] == bose_eval(p, v[i]));
    const auto big = sample(p, make_uniform_grid(8.0, 401));
    for (Index i = 0; i < big.size(); ++i)
        CHECK(big[i] == big[big.size() - 1 - i]);
}

TEST_CASE("polylog: limits, ordering and the quadrature oracle")
{
    CHECK(std::abs(polylog(0.5, 1e-8) / 1e-8 - 1) < 1e-7);
    for (double z = 0.01; z < 1.0; z += 0.01) {
        CHECK(polylog(1.5, z) < polylog(0.5, z));
        for (double s : {0.5, 1.5}) {
            CHECK(rel_err(polylog(s, z), polylog_oracle(s, z)) < 1e-10);
            // series and quadrature paths agree on their overlap
            CHECK(rel_err(detail::polylog_series(s, z, 1e-15), polylog_quadrature(s, z, 1e-14)) < 1e-10);
        }
        CHECK(rel_err(polylog(-0.5, z), polylog_oracle(-0.5, z)) < 1e-10);
    }
    for (double z : {0.991, 0.995, 0.999, 0.99999})
        for (double s : {0.5, 1.5})
            CHECK(rel_err(polylog(s, z), polylog_oracle(s, z)) < 1e-10);
    CHECK_THROWS_AS(polylog(0.5, 1.0), DomainError);
    CHECK_THROWS_AS(polylog(0.5, 0.0), DomainError);
    CHECK_THROWS_AS(polylog(2.5, 0.5), DomainError);
}

TEST_CASE("bose moments: closed forms against direct quadrature")
{
    const BoseParameters<double> p(1.0, 0.5);
    const auto bm = bose_moments(p);
    CHECK(rel_err(bm.mass, bose_moment_oracle(p, 0)) < 1e-10);
    CHECK(rel_err(bm.energy, bose_moment_oracle(p, 1)) < 1e-10);
    const auto bq = bose_moments_quadrature(p);
    CHECK(rel_err(bq.mass, bm.mass) < 1e-11);
    CHECK(rel_err(bq.energy, bm.energy) < 1e-11);

    // scaling law lambda1 -> 4 lambda1
    const auto b4 = bose_moments(BoseParameters<double>(4.0, 0.5));
    CHECK(b4.mass == doctest::Approx(bm.mass / 2).epsilon(1e-14));
    CHECK(b4.energy == doctest::Approx(bm.energy / 8).epsilon(1e-14));

    // dilute limit
    const double z = 1e-4;
    const auto d = bose_moments(BoseParameters<double>(1.0, z));
    CHECK(rel_err(d.mass, std::sqrt(std::numbers::pi) * z) < 1e-4);
    CHECK(rel_err(d.energy, std::sqrt(std::numbers::pi) / 2 * z) < 1e-4);
    CHECK(rel_err(d.mass, bose_moment_oracle(BoseParameters<double>(1.0, z), 0)) < 1e-10);

    // ratio independent of lambda1
    for (double l : {0.1, 1.0, 10.0}) {
        const auto m = bose_moments(BoseParameters<double>(l, 0.7));
        CHECK(rel_err(m.mass * m.mass * m.mass / m.energy, bose_ratio(0.7)) < 1e-13);
    }
    // truncated moments approach the full ones
    const auto tr = bose_moments_truncated(p, 8.0, 1e-14);
    CHECK(rel_err(tr.mass, bm.mass) < 1e-14);
}

TEST_CASE("sampled moments converge at least at second order")
{
    const BoseParameters<double> p(0.3, 0.9);
    const auto ref = bose_moments_truncated(p, 8.0, 1e-15);
    double prev = 0;
    for (long n : {25L, 50L, 100L}) {
        const auto ms = compute_moments(sample(p, make_uniform_grid(8.0, n)));
        const double err = std::abs(ms.mass - ref.mass) / ref.mass;
        if (prev > 0 && prev > 1e-13)
            CHECK(prev / std::max(err, 1e-300) >= 3.2);
        prev = err;
    }
}

TEST_CASE("R(z) is strictly increasing")
{
    double prev = 0;
    for (double u = -30; u < -1e-6; u += 0.05) {
        const double r = bose_ratio(std::exp(u));
        CHECK(r > prev);
        prev = r;
    }
}

TEST_CASE("fit_bose round trips")
{
    const BoseParameters<double> p0(1.7, 0.42);
    const auto m = bose_moments(p0);
    const auto p = fit_bose(m.mass, m.energy, 1e-10);
    CHECK(rel_err(p.lambda1(), 1.7) < 1e-8);
    CHECK(rel_err(p.fugacity(), 0.42) < 1e-8);

    for (int k = 1; k <= 19; ++k) {
        const double z = 0.05 * k;
        for (double l : {0.1, 1.0, 10.0}) {
            const auto bm = bose_moments(BoseParameters<double>(l, z));
            const auto q = fit_bose(bm.mass, bm.energy, 1e-12);
            CHECK(rel_err(q.lambda1(), l) < 1e-8);
            CHECK(rel_err(q.fugacity(), z) < 1e-8);
            const auto back = bose_moments(q);
            CHECK(rel_err(back.mass, bm.mass) <= 1e-12);
            CHECK(rel_err(back.energy, bm.energy) <= 1e-12);
        }
    }
}

TEST_CASE("fit_bose classical limit and monotonicity")
{
    const auto p = fit_bose(1.0, 2500.0);
    CHECK(std::abs(2 * 2500.0 * p.lambda1() / 1.0 - 1) < 0.01);

    const double m = 2.0;
    const auto a = fit_bose(m, m * m * m / 1.0);
    const auto b = fit_bose(m, m * m * m / 10.0);
    CHECK(b.fugacity() > a.fugacity());
    CHECK(rel_err(bose_ratio(a.fugacity()), 1.0) < 1e-12);
    CHECK(rel_err(bose_ratio(b.fugacity()), 10.0) < 1e-12);

    CHECK_THROWS_AS(fit_bose(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(fit_bose(1.0, -1.0), DomainError);
}

TEST_CASE("lambda1 = B / (2A) for Bose profiles")
{
    CHECK(lambda1_identity_residual(BoseParameters<double>(1.0, 0.5)) <= 1e-8);
    CHECK(lambda1_identity_residual(BoseParameters<double>(10.0, 0.1)) <= 1e-8);
    // independent oracle
    const BoseParameters<double> p(2.0, 0.8);
    const double B = bose_moment_oracle(p, 0), A = bose_moment_oracle(p, 1, true);
    CHECK(rel_err(B / (2 * A), 2.0) < 1e-10);
    for (int k = 1; k <= 19; ++k)
        for (double l : {0.1, 1.0, 10.0})
            CHECK(lambda1_identity_residual(BoseParameters<double>(l, 0.05 * k)) <= 1e-6);
    const double r1 = lambda1_identity_residual(BoseParameters<double>(0.5, 0.6));
    const double r4 = lambda1_identity_residual(BoseParameters<double>(2.0, 0.6));
    CHECK(std::abs(r1 - r4) <= 1e-12);
}

TEST_CASE("the fitted Bose profile minimises entropy at fixed mass and energy")
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto g = make_uniform_grid(8.0, 400);
    for (double m : {0.5, 2.0, 6.0})
        for (double spread : {0.5, 1.5, 4.0}) {
            const double e = spread * m;
            const auto eq = discrete_bose_fixed_point(m, e, g);
            const double h_eq = total_entropy(eq);
            for (int trial = 0; trial < 20; ++trial) {
                ArrayX<double> pert(g.size());
                const double a1 = 0.3 * u(rng), a2 = 0.3 * u(rng), a3 = 0.3 * u(rng);
                for (Index i = 0; i < g.size(); ++i) {
                    const double v = g.centers()[i];
                    pert[i] = eq[i] * (1 + a1 * std::cos(v) + a2 * std::sin(2 * v) + a3 * std::cos(3 * v));
                }
                const ArrayX<double> cand = kaclab::testing::project_mass_energy(pert, eq);
                REQUIRE((cand > 0).all());
                CHECK(h_eq <= total_entropy(DistributionState<double>(g, cand)));
            }
        }
}
