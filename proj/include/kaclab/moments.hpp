#pragma once

#include <cmath>
#include <string>

#include "kaclab/field.hpp"

namespace kaclab {

/// Conserved quantities, the nonlocal coefficients A_f and B_f, and the
/// Lebesgue norms that show up in the a priori estimates.
template <typename Scalar>
struct MomentSet {
    Scalar mass{};            ///< m = int f
    Scalar energy{};          ///< e = int v^2 f
    Scalar coeff_A{};         ///< A_f = int v^2 f (1 + f)
    Scalar coeff_B{};         ///< B_f = int f
    Scalar l1{};              ///< int |f|
    Scalar l2_sq{};           ///< int f^2
    Scalar l3_cubed{};        ///< int |f|^3
    Scalar weighted_l2_sq{};  ///< int (1 + v^2) f^2
};

template <typename Scalar>
MomentSet<Scalar> compute_moments(const DistributionState<Scalar>& state)
{
    const auto& v = state.grid().centers();
    const Scalar dv = state.grid().dv();

    Scalar m(0), e(0), vf2(0), l1(0), l2(0), l3(0);
    for (Index i = 0; i < state.size(); ++i) {
        const Scalar f = state[i];
        if (!std::isfinite(static_cast<double>(f)))
            throw NumericalError("compute_moments: non-finite value at cell " + std::to_string(i));
        const Scalar v2 = v[i] * v[i];
        const Scalar f2 = f * f;
        m += f;
        e += v2 * f;
        vf2 += v2 * f2;
        l1 += std::abs(f);
        l2 += f2;
        l3 += f2 * std::abs(f);
    }

    MomentSet<Scalar> ms;
    ms.mass = m * dv;
    ms.energy = e * dv;
    ms.coeff_A = (e + vf2) * dv;
    ms.coeff_B = ms.mass;
    ms.l1 = l1 * dv;
    ms.l2_sq = l2 * dv;
    ms.l3_cubed = l3 * dv;
    ms.weighted_l2_sq = (l2 + vf2) * dv;
    return ms;
}

/// l2_sq - (m / 2^{7/2}) (m^3 / e)^{1/2}. Nonnegative whenever the
/// interpolation lower bound on the L2 norm holds for this state.
template <typename Scalar>
Scalar l2_lower_bound_gap(const MomentSet<Scalar>& ms)
{
    if (ms.mass == Scalar(0))
        return ms.l2_sq;
    if (!(ms.energy > Scalar(0)))
        throw DomainError("l2_lower_bound_gap: energy must be positive when mass is positive");
    using std::pow;
    using std::sqrt;
    const Scalar bound = ms.mass / pow(Scalar(2), Scalar(3.5)) *
                         sqrt(ms.mass * ms.mass * ms.mass / ms.energy);
    return ms.l2_sq - bound;
}

template <typename Scalar>
struct SmallnessReport {
    bool l2_condition = false;     ///< ||f||_2^2 < m / 2
    bool ratio_condition = false;  ///< m^3 / e < threshold
    Scalar m3_over_e{};
};

/// Informational smallness conditions on the initial datum; the solver
/// never depends on the outcome.
template <typename Scalar>
SmallnessReport<Scalar> smallness_report(const MomentSet<Scalar>& ms, Scalar threshold)
{
    if (!(ms.mass > Scalar(0)))
        throw DomainError("smallness_report: mass must be positive");
    if (!(ms.energy > Scalar(0)))
        throw DomainError("smallness_report: energy must be positive");
    SmallnessReport<Scalar> r;
    r.m3_over_e = ms.mass * ms.mass * ms.mass / ms.energy;
    r.l2_condition = ms.l2_sq < ms.mass / Scalar(2);
    r.ratio_condition = r.m3_over_e < threshold;
    return r;
}

}  // namespace kaclab
