#pragma once

// Bose distribution f(v) = 1 / (exp(lambda1 v^2 - lambda2) - 1), its moments
// through Li_{1/2} and Li_{3/2}, and the (m, e) -> (lambda1, z) fit.
//
// Parameters are stored as (lambda1, z) with fugacity z = exp(lambda2) in (0, 1).
// Termwise Gaussian integration of sum_k z^k exp(-k lambda1 v^2) gives
//   m = sqrt(pi / lambda1) Li_{1/2}(z),   e = sqrt(pi) / 2 lambda1^{-3/2} Li_{3/2}(z),
// so m^3 / e = 2 pi Li_{1/2}(z)^3 / Li_{3/2}(z) =: R(z) does not depend on lambda1.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "kaclab/errors.hpp"
#include "kaclab/field.hpp"
#include "kaclab/quadrature.hpp"

namespace kaclab {

template <typename Scalar>
class BoseParameters {
public:
    BoseParameters(Scalar lambda1, Scalar fugacity) : lambda1_(lambda1), fugacity_(fugacity)
    {
        if (!(lambda1 > Scalar(0)) || !std::isfinite(static_cast<double>(lambda1)))
            throw ValidationError("lambda1: must be finite and positive");
        if (!(fugacity > Scalar(0) && fugacity < Scalar(1)))
            throw ValidationError("fugacity: must lie strictly inside (0, 1)");
    }

    Scalar lambda1() const { return lambda1_; }
    Scalar fugacity() const { return fugacity_; }
    Scalar lambda2() const { return std::log(fugacity_); }

private:
    Scalar lambda1_;
    Scalar fugacity_;
};

/// f(v) written as w / (1 - w) with w = z exp(-lambda1 v^2); underflows to 0 in the tail.
template <typename Scalar>
Scalar bose_eval(const BoseParameters<Scalar>& p, Scalar v)
{
    const Scalar w = p.fugacity() * std::exp(-p.lambda1() * v * v);
    return w / (Scalar(1) - w);
}

template <typename Scalar>
DistributionState<Scalar> sample(const BoseParameters<Scalar>& p, const VelocityGrid<Scalar>& grid)
{
    ArrayX<Scalar> values(grid.size());
    const auto& v = grid.centers();
    for (Index i = 0; i < grid.size(); ++i)
        values[i] = bose_eval(p, v[i]);
    return DistributionState<Scalar>(grid, std::move(values));
}

// ---------------------------------------------------------------------------
// Polylogarithms of half-integer order

namespace detail {

/// Series sum_{k>=1} z^k / k^s, summed smallest-first once the truncation
/// point guarantees a tail below tol times the partial sum.
template <typename Scalar>
Scalar polylog_series(Scalar s, Scalar z, Scalar tol, long max_terms = 2'000'000)
{
    using std::pow;
    long n = 1;
    Scalar partial = z;
    Scalar term = z;
    while (true) {
        const Scalar next = term * z * pow(Scalar(n) / Scalar(n + 1), s);
        // Ratio of consecutive terms is bounded by this for every later k.
        const Scalar ratio = s >= Scalar(0) ? z : z * pow(Scalar(n + 2) / Scalar(n + 1), -s);
        if (ratio < Scalar(1) && next / (Scalar(1) - ratio) <= tol * partial)
            break;
        term = next;
        partial += term;
        if (++n > max_terms)
            throw ConvergenceError("polylog: series did not converge within the term budget");
    }
    Scalar sum(0);
    for (long k = n; k >= 1; --k)
        sum += pow(z, Scalar(k)) / pow(Scalar(k), s);
    return sum;
}

/// Cutoff c such that the Gaussian tail of the defining integral is below
/// tol * z / 10; the integrands are bounded by x^2 z exp(-x^2) / (1 - z)^2.
template <typename Scalar>
Scalar polylog_cutoff(Scalar z, Scalar tol)
{
    const Scalar one_minus_z = -std::expm1(std::log(z));
    Scalar c(2);
    while ((Scalar(1) + c * c) * std::exp(-c * c) / (one_minus_z * one_minus_z) > tol / Scalar(10))
        c += Scalar(0.5);
    return c;
}

}  // namespace detail

/// Li_s(z) from its defining integral over the Gaussian variable,
///   Li_{1/2}(z)  = 2/sqrt(pi) int_0^inf w/(1-w) dx,
///   Li_{3/2}(z)  = 4/sqrt(pi) int_0^inf x^2 w/(1-w) dx,
///   Li_{-1/2}(z) = 2/sqrt(pi) int_0^inf w/(1-w)^2 dx,     w = z exp(-x^2).
/// Independent of the series; used as the reference and for z close to 1.
template <typename Scalar>
Scalar polylog_quadrature(Scalar s, Scalar z, Scalar tol)
{
    if (!(z > Scalar(0) && z < Scalar(1)))
        throw DomainError("polylog: z must lie in (0, 1)");
    const Scalar log_z = std::log(z);
    const Scalar c = detail::polylog_cutoff(z, tol);
    const Scalar norm = Scalar(2) / std::sqrt(std::numbers::pi_v<Scalar>);
    const Scalar rel = std::max(tol / Scalar(10), Scalar(4) * std::numeric_limits<Scalar>::epsilon());

    auto one_minus_w = [log_z](Scalar x) { return -std::expm1(log_z - x * x); };
    if (s == Scalar(0.5)) {
        auto f = [&](Scalar x) { const Scalar w = z * std::exp(-x * x); return w / one_minus_w(x); };
        return norm * integrate_adaptive<Scalar>(f, Scalar(0), c, Scalar(0), rel).value;
    }
    if (s == Scalar(1.5)) {
        auto f = [&](Scalar x) { const Scalar w = z * std::exp(-x * x); return x * x * w / one_minus_w(x); };
        return Scalar(2) * norm * integrate_adaptive<Scalar>(f, Scalar(0), c, Scalar(0), rel).value;
    }
    if (s == Scalar(-0.5)) {
        auto f = [&](Scalar x) {
            const Scalar w = z * std::exp(-x * x);
            const Scalar d = one_minus_w(x);
            return w / (d * d);
        };
        return norm * integrate_adaptive<Scalar>(f, Scalar(0), c, Scalar(0), rel).value;
    }
    throw DomainError("polylog: order must be one of -1/2, 1/2, 3/2");
}

/// Li_s(z) for s in {1/2, 3/2} (and -1/2, used by the fit's Newton polish).
/// Series for z <= 0.99, quadrature of the defining integral above that.
template <typename Scalar>
Scalar polylog(Scalar s, Scalar z, Scalar tol = Scalar(4) * std::numeric_limits<Scalar>::epsilon())
{
    if (!(z > Scalar(0) && z < Scalar(1)))
        throw DomainError("polylog: z must lie in (0, 1), got " + std::to_string(static_cast<double>(z)));
    if (s != Scalar(0.5) && s != Scalar(1.5) && s != Scalar(-0.5))
        throw DomainError("polylog: order must be one of -1/2, 1/2, 3/2");
    if (z <= Scalar(0.99))
        return detail::polylog_series(s, z, tol);
    return polylog_quadrature(s, z, tol);
}

// ---------------------------------------------------------------------------
// Moments

template <typename Scalar>
struct BoseMoments {
    Scalar mass{};
    Scalar energy{};
};

template <typename Scalar>
BoseMoments<Scalar> bose_moments(const BoseParameters<Scalar>& p)
{
    const Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar lam = p.lambda1();
    const Scalar z = p.fugacity();
    BoseMoments<Scalar> r;
    r.mass = std::sqrt(pi / lam) * polylog(Scalar(0.5), z);
    r.energy = std::sqrt(pi) / Scalar(2) / (lam * std::sqrt(lam)) * polylog(Scalar(1.5), z);
    return r;
}

namespace detail {

/// int_{-L}^{L} v^{2j} f(1+f)^q dv for the Bose profile, by adaptive quadrature
/// in the velocity variable; L = +inf truncates where the tail is below tol/10.
template <typename Scalar>
Scalar bose_quadrature(const BoseParameters<Scalar>& p, int j, bool times_one_plus_f, Scalar tol,
                       Scalar half_width = std::numeric_limits<Scalar>::infinity())
{
    const Scalar lam = p.lambda1();
    const Scalar log_z = std::log(p.fugacity());
    const Scalar cut = std::min(half_width, detail::polylog_cutoff(p.fugacity(), tol) / std::sqrt(lam));
    auto f = [&](Scalar v) {
        const Scalar one_minus_w = -std::expm1(log_z - lam * v * v);
        const Scalar w = std::exp(log_z - lam * v * v);
        Scalar g = w / one_minus_w;
        if (times_one_plus_f)
            g /= one_minus_w;
        return j == 0 ? g : (v * v) * g;
    };
    const Scalar rel = std::max(tol / Scalar(10), Scalar(4) * std::numeric_limits<Scalar>::epsilon());
    return Scalar(2) * integrate_adaptive<Scalar>(f, Scalar(0), cut, Scalar(0), rel).value;
}

}  // namespace detail

/// Mass and energy of the Bose profile by direct quadrature (the oracle for
/// the closed forms in bose_moments).
template <typename Scalar>
BoseMoments<Scalar> bose_moments_quadrature(const BoseParameters<Scalar>& p, Scalar tol = Scalar(1e-13))
{
    return {detail::bose_quadrature(p, 0, false, tol), detail::bose_quadrature(p, 1, false, tol)};
}

/// Mass and energy of the Bose profile restricted to [-v_max, v_max].
template <typename Scalar>
BoseMoments<Scalar> bose_moments_truncated(const BoseParameters<Scalar>& p, Scalar v_max,
                                           Scalar tol = Scalar(1e-13))
{
    return {detail::bose_quadrature(p, 0, false, tol, v_max),
            detail::bose_quadrature(p, 1, false, tol, v_max)};
}

/// R(z) = m^3 / e of any Bose profile with fugacity z.
template <typename Scalar>
Scalar bose_ratio(Scalar z)
{
    const Scalar l_half = polylog(Scalar(0.5), z);
    return Scalar(2) * std::numbers::pi_v<Scalar> * l_half * l_half * l_half / polylog(Scalar(1.5), z);
}

// ---------------------------------------------------------------------------
// Fit

/// Bose parameters with the prescribed mass and energy (the constrained
/// entropy minimiser). Solves R(z) = m^3 / e by bisection in u = ln z, then
/// polishes with Newton on ln R; lambda1 follows from the mass.
template <typename Scalar>
BoseParameters<Scalar> fit_bose(Scalar m, Scalar e, Scalar tol = Scalar(1e-12), int max_bisections = 200)
{
    if (!(m > Scalar(0)) || !std::isfinite(static_cast<double>(m)))
        throw DomainError("fit_bose: mass must be finite and positive");
    if (!(e > Scalar(0)) || !std::isfinite(static_cast<double>(e)))
        throw DomainError("fit_bose: energy must be finite and positive");
    if (!(tol > Scalar(0)))
        throw DomainError("fit_bose: tolerance must be positive");

    const Scalar target = std::log(m) * Scalar(3) - std::log(e);
    auto residual = [&](Scalar u) { return std::log(bose_ratio(std::exp(u))) - target; };

    // Bracket: ln R is strictly increasing in u, -> -inf as u -> -inf and +inf as u -> 0-.
    Scalar lo(-1), hi(-1e-3);
    while (residual(lo) > Scalar(0)) {
        hi = lo;
        lo *= Scalar(2);
        if (lo < Scalar(-700))
            throw ConvergenceError("fit_bose: m^3/e too small to bracket");
    }
    while (residual(hi) < Scalar(0)) {
        lo = hi;
        hi /= Scalar(10);
        if (hi > Scalar(-1e-14))
            throw ConvergenceError("fit_bose: m^3/e too large to bracket");
    }

    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    for (int it = 0; it < max_bisections && (hi - lo) > Scalar(2) * eps * std::abs(lo); ++it) {
        const Scalar mid = (lo + hi) / Scalar(2);
        const Scalar r = residual(mid);
        if (r == Scalar(0)) {
            lo = hi = mid;
            break;
        }
        (r < Scalar(0) ? lo : hi) = mid;
    }

    Scalar u = (lo + hi) / Scalar(2);
    Scalar best = std::abs(residual(u));
    for (int it = 0; it < 3 && best > Scalar(0); ++it) {
        const Scalar z = std::exp(u);
        const Scalar l_half = polylog(Scalar(0.5), z);
        const Scalar slope = Scalar(3) * polylog(Scalar(-0.5), z) / l_half -
                             l_half / polylog(Scalar(1.5), z);
        const Scalar candidate = u - residual(u) / slope;
        if (!(candidate < Scalar(0)) || !std::isfinite(static_cast<double>(candidate)))
            break;
        const Scalar r = std::abs(residual(candidate));
        if (!(r < best))
            break;
        u = candidate;
        best = r;
    }

    const Scalar z = std::exp(u);
    const Scalar l_half = polylog(Scalar(0.5), z);
    BoseParameters<Scalar> p(std::numbers::pi_v<Scalar> * l_half * l_half / (m * m), z);

    const auto check = bose_moments(p);
    if (std::abs(check.mass - m) > tol * m || std::abs(check.energy - e) > tol * e)
        throw ConvergenceError("fit_bose: moments not reproduced to tolerance");
    return p;
}

/// |lambda1 - B/(2A)| / lambda1 with B = int f and A = int v^2 f(1+f)
/// computed by quadrature. Zero analytically for every Bose profile.
template <typename Scalar>
Scalar lambda1_identity_residual(const BoseParameters<Scalar>& p, Scalar tol = Scalar(1e-13))
{
    const Scalar B = detail::bose_quadrature(p, 0, false, tol);
    const Scalar A = detail::bose_quadrature(p, 1, true, tol);
    return std::abs(p.lambda1() - B / (Scalar(2) * A)) / p.lambda1();
}

}  // namespace kaclab
