#pragma once

// Face-centred quantities of the gradient-flow discretisation
//   d/dt f_i = (F_{i+1/2} - F_{i-1/2}) / dv,   F = M dxi / dv,
//   dxi = A_h (g(f_{i+1}) - g(f_i)) + B_h (v_{i+1}^2 - v_i^2) / 2,   g(x) = log(x / (1 + x)),
// with the mean M = (f_{i+1} - f_i) / (g(f_{i+1}) - g(f_i)) of f(1 + f) across the face.
//
// The coefficients are
//   A_h = sum_faces v_{i+1/2}^2 M_{i+1/2} dv,
//   B_h = -sum_faces v_{i+1/2} (f_{i+1} - f_i),
// B_h being the summation-by-parts form of int f = -int v f'. With these two
// choices sum_faces v_{i+1/2} F_{i+1/2} = 0 identically (energy is conserved)
// and every sampled Bose profile satisfies lambda1 = B_h / (2 A_h), i.e. is a
// steady state.

#include <cmath>
#include <limits>
#include <string>

#include "kaclab/field.hpp"

namespace kaclab {

template <typename Scalar>
struct FaceQuantities {
    ArrayX<Scalar> mean;     ///< M_{i+1/2} >= 0
    ArrayX<Scalar> xi_jump;  ///< dxi_{i+1/2}; +-inf across a vacuum face
    ArrayX<Scalar> flux;     ///< F_{i+1/2}; boundary fluxes are zero and not stored
    Scalar A_face{};
    Scalar B_h{};
    Scalar dv{};
};

/// Multiple of machine epsilon below which a potential jump counts as balanced.
inline constexpr int kFluxBalanceUlps = 32;

namespace detail {

/// Neumaier summation.
template <typename Scalar>
class CompensatedSum {
public:
    void add(Scalar x)
    {
        const Scalar t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    Scalar value() const { return sum_ + comp_; }

private:
    Scalar sum_{};
    Scalar comp_{};
};

/// Mean of f(1+f) between a and b in the sense of the mean value theorem for g.
/// Uses g(b) - g(a) = log1p((b - a) / (a (1 + b))) so nearby values do not cancel.
template <typename Scalar>
Scalar face_mean(Scalar a, Scalar b)
{
    if (a == b)
        return a * (Scalar(1) + a);
    if (a == Scalar(0) || b == Scalar(0))
        return Scalar(0);
    const Scalar d = b - a;
    return d / std::log1p(d / (a * (Scalar(1) + b)));
}

}  // namespace detail

template <typename Scalar>
FaceQuantities<Scalar> face_quantities(const DistributionState<Scalar>& state)
{
    const auto& grid = state.grid();
    const auto& vf = grid.faces();
    const Scalar dv = grid.dv();
    const Index nf = vf.size();
    const auto& f = state.values();

    FaceQuantities<Scalar> q;
    q.dv = dv;
    q.mean.resize(nf);
    q.xi_jump.resize(nf);
    q.flux.resize(nf);

    // Compensated sums: the steady-state balance A_h dg = -B_h dv v_f is
    // resolved to a few ulps only if both coefficients are.
    detail::CompensatedSum<Scalar> a_sum, b_sum;
    Scalar b_scale{};  // sum |v_f| (f_i + f_{i+1}): roundoff scale of B_h
    for (Index k = 0; k < nf; ++k) {
        const Scalar m = detail::face_mean(f[k], f[k + 1]);
        q.mean[k] = m;
        a_sum.add(vf[k] * vf[k] * m);
        b_sum.add(-vf[k] * (f[k + 1] - f[k]));
        b_scale += std::abs(vf[k]) * (f[k] + f[k + 1]);
    }
    q.A_face = a_sum.value() * dv;
    q.B_h = b_sum.value();

    const Scalar A = q.A_face;
    const Scalar B = q.B_h;
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    for (Index k = 0; k < nf; ++k) {
        const Scalar a = f[k], b = f[k + 1];
        const Scalar d = b - a;
        const Scalar m = q.mean[k];
        if (m > Scalar(0)) {
            const Scalar diffusion = A * (d / m);
            const Scalar drift = B * dv * vf[k];
            const Scalar xi = diffusion + drift;
            // Roundoff of xi: g(f) is known to about eps in absolute terms, A_h to
            // eps relative, B_h to eps b_scale. A jump below that floor is a
            // resolved balance.
            const Scalar floor = kFluxBalanceUlps * eps *
                                 (A * (Scalar(2) + std::abs(d / m)) + dv * std::abs(vf[k]) * b_scale);
            if (std::abs(xi) <= floor) {
                q.xi_jump[k] = Scalar(0);
                q.flux[k] = Scalar(0);
            } else {
                q.xi_jump[k] = xi;
                // M dxi / dv, expanded so that sum_faces v_f F vanishes identically.
                q.flux[k] = A * d / dv + B * m * vf[k];
            }
        } else {
            // Vacuum on one side: pure diffusion, M dxi := A d.
            q.xi_jump[k] = d > Scalar(0) ? inf : (d < Scalar(0) ? -inf : Scalar(0));
            q.flux[k] = A * d / dv;
        }
        if (std::isnan(static_cast<double>(q.flux[k])) || std::isnan(static_cast<double>(q.xi_jump[k])))
            throw NumericalError("face_quantities: NaN at face between cells " + std::to_string(k) +
                                 " and " + std::to_string(k + 1));
    }
    return q;
}

/// Flux divergence (F_{i+1/2} - F_{i-1/2}) / dv with zero boundary fluxes.
template <typename Scalar>
ArrayX<Scalar> flux_divergence(const FaceQuantities<Scalar>& q)
{
    const Index nf = q.flux.size();
    ArrayX<Scalar> r(nf + 1);
    r[0] = q.flux[0] / q.dv;
    for (Index i = 1; i < nf; ++i)
        r[i] = (q.flux[i] - q.flux[i - 1]) / q.dv;
    r[nf] = -q.flux[nf - 1] / q.dv;
    return r;
}

}  // namespace kaclab
