#pragma once

// Quantum entropy gamma(x) = x log x - (1 + x) log(1 + x), total and relative
// entropy, discrete entropy production and the L1 bound by relative entropy.

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "kaclab/equilibrium.hpp"
#include "kaclab/faces.hpp"
#include "kaclab/field.hpp"
#include "kaclab/moments.hpp"

namespace kaclab {

/// gamma(x) = -(x log1p(1/x) + log1p(x)), with gamma(0) = 0 and gamma(x) = 0 below 1e-300.
template <typename Scalar>
Scalar gamma(Scalar x)
{
    if (x < Scalar(0))
        throw DomainError("gamma: argument must be nonnegative");
    if (x < Scalar(1e-300))
        return Scalar(0);
    return -(x * std::log1p(Scalar(1) / x) + std::log1p(x));
}

/// gamma'(x) = log(x / (1 + x)) = -log1p(1/x), defined for x > 0.
template <typename Scalar>
Scalar gamma_prime(Scalar x)
{
    if (!(x > Scalar(0)))
        throw DomainError("gamma_prime: argument must be positive");
    return -std::log1p(Scalar(1) / x);
}

template <typename Scalar>
Scalar total_entropy(const DistributionState<Scalar>& state)
{
    Scalar sum(0);
    for (Index i = 0; i < state.size(); ++i)
        sum += gamma(state[i]);
    return sum * state.grid().dv();
}

namespace detail {

/// (1 + u) log(1 + u) - u >= 0, accurate for small |u|.
template <typename Scalar>
Scalar bregman_log(Scalar u)
{
    if (u == Scalar(-1))
        return Scalar(1);
    if (std::abs(u) < Scalar(1e-2)) {
        // sum_{k>=2} (-1)^k u^k / (k (k - 1))
        Scalar sum(0), power = u * u;
        for (int k = 2; k < 12; ++k) {
            sum += ((k % 2 == 0) ? power : -power) / Scalar(k * (k - 1));
            power *= u;
        }
        return sum;
    }
    return (Scalar(1) + u) * std::log1p(u) - u;
}

/// gamma(f) - gamma(g) - gamma'(g) (f - g) for g > 0, written as
/// g phi(f/g) - (1 + g) phi((1 + f)/(1 + g)) with phi(r) = r log r - r + 1.
template <typename Scalar>
Scalar relative_entropy_density(Scalar f, Scalar g)
{
    const Scalar d = f - g;
    return g * bregman_log(d / g) - (Scalar(1) + g) * bregman_log(d / (Scalar(1) + g));
}

template <typename Scalar>
void require_same_grid(const DistributionState<Scalar>& a, const DistributionState<Scalar>& b)
{
    if (!(a.grid() == b.grid()))
        throw ValidationError("states live on different grids");
}

}  // namespace detail

/// H(f | f_eq) as the quadrature of the pointwise convexity gap. The
/// reference must be strictly positive on every cell.
template <typename Scalar>
Scalar relative_entropy(const DistributionState<Scalar>& state, const DistributionState<Scalar>& eq)
{
    detail::require_same_grid(state, eq);
    Scalar sum(0);
    for (Index i = 0; i < state.size(); ++i) {
        if (!(eq[i] > Scalar(0)))
            throw DomainError("relative_entropy: reference vanishes at cell " + std::to_string(i));
        sum += detail::relative_entropy_density(state[i], eq[i]);
    }
    return sum * state.grid().dv();
}

/// D_h = (1 / A_h) sum_faces M dxi^2 / dv. A face with vacuum on exactly one
/// side contributes +inf (the entropy drops at an infinite rate there).
template <typename Scalar>
Scalar entropy_production(const DistributionState<Scalar>& state, const FaceQuantities<Scalar>& faces)
{
    if (faces.mean.size() != state.size() - 1)
        throw ValidationError("entropy_production: face data does not match the state");
    Scalar sum(0);
    for (Index k = 0; k < faces.mean.size(); ++k) {
        const Scalar m = faces.mean[k];
        const Scalar xi = faces.xi_jump[k];
        if (m > Scalar(0))
            sum += m * xi * xi;
        else if (xi != Scalar(0))
            return std::numeric_limits<Scalar>::infinity();
    }
    if (!(faces.A_face > Scalar(0)))
        return Scalar(0);
    return sum / (faces.A_face * faces.dv);
}

template <typename Scalar>
Scalar entropy_production(const DistributionState<Scalar>& state)
{
    return entropy_production(state, face_quantities(state));
}

/// sum_i |f_i - g_i| dv
template <typename Scalar>
Scalar l1_distance(const DistributionState<Scalar>& a, const DistributionState<Scalar>& b)
{
    detail::require_same_grid(a, b);
    return (a.values() - b.values()).abs().sum() * a.grid().dv();
}

template <typename Scalar>
struct CkpBound {
    Scalar lhs{};  ///< ||f - f_eq||_1^2
    Scalar rhs{};  ///< 4 ||f_eq (1 + f_eq)||_1 H(f | f_eq)
};

/// Both sides of the L1 bound by relative entropy. The reference must carry
/// the same mass and energy as the state (relative tolerance `tol`).
template <typename Scalar>
CkpBound<Scalar> ckp_bound(const DistributionState<Scalar>& state, const DistributionState<Scalar>& eq,
                           Scalar tol = Scalar(1e-6))
{
    detail::require_same_grid(state, eq);
    const auto ms = compute_moments(state);
    const auto me = compute_moments(eq);
    if (std::abs(ms.mass - me.mass) > tol * me.mass || std::abs(ms.energy - me.energy) > tol * me.energy)
        throw ValidationError("ckp_bound: state and equilibrium do not share mass and energy");
    const Scalar dist = l1_distance(state, eq);
    const Scalar weight = (eq.values() * (Scalar(1) + eq.values())).sum() * eq.grid().dv();
    return {dist * dist, Scalar(4) * weight * relative_entropy(state, eq)};
}

template <typename Scalar>
CkpBound<Scalar> ckp_bound(const DistributionState<Scalar>& state, const BoseParameters<Scalar>& eq_params,
                           Scalar tol = Scalar(1e-6))
{
    return ckp_bound(state, sample(eq_params, state.grid()), tol);
}

template <typename Scalar>
struct EntropyReport {
    Scalar time{};
    Scalar H{};
    Scalar H_rel{};
    Scalar D{};
    Scalar ckp_lhs{};
    Scalar ckp_rhs{};
};

template <typename Scalar>
EntropyReport<Scalar> entropy_report(const DistributionState<Scalar>& state,
                                     const FaceQuantities<Scalar>& faces,
                                     const DistributionState<Scalar>& eq)
{
    EntropyReport<Scalar> r;
    r.time = state.time();
    r.H = total_entropy(state);
    r.H_rel = relative_entropy(state, eq);
    r.D = entropy_production(state, faces);
    const auto ckp = ckp_bound(state, eq);
    r.ckp_lhs = ckp.lhs;
    r.ckp_rhs = ckp.rhs;
    return r;
}

}  // namespace kaclab
