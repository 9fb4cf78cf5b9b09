#pragma once

// Globally adaptive 15-point Gauss-Kronrod quadrature. This is the reference
// integrator behind the polylogarithm fallback and every moment oracle of the
// Bose distribution.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "kaclab/errors.hpp"

namespace kaclab {

template <typename Scalar>
struct QuadratureResult {
    Scalar value{};
    Scalar error{};
    int intervals = 0;
};

namespace detail {

// Kronrod abscissae on [0, 1] (symmetric), odd indices are the Gauss nodes.
inline constexpr std::array<long double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329L, 0.949107912342758524526189684047851L,
    0.864864423359769072789712788640926L, 0.741531185599394439863864773280788L,
    0.586087235467691130294144845693013L, 0.405845151377397166906606412076961L,
    0.207784955007898467600689403773245L, 0.000000000000000000000000000000000L};
inline constexpr std::array<long double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970L, 0.063092092629978553290700663189204L,
    0.104790010322250183839876322541518L, 0.140653259715525918745189590510238L,
    0.169004726639267902826583426598550L, 0.190350578064785409913256402421014L,
    0.204432940075298892414161999234649L, 0.209482141084727828012999174891714L};
inline constexpr std::array<long double, 4> kGaussWeights = {
    0.129484966168869693270611432679082L, 0.279705391489276667901467771423780L,
    0.381830050505118944950369775488975L, 0.417959183673469387755102040816327L};

template <typename Scalar, typename F>
QuadratureResult<Scalar> gauss_kronrod_15(const F& f, Scalar a, Scalar b)
{
    const Scalar center = (a + b) / Scalar(2);
    const Scalar half = (b - a) / Scalar(2);
    const Scalar fc = f(center);
    Scalar kronrod = fc * Scalar(kKronrodWeights[7]);
    Scalar gauss = fc * Scalar(kGaussWeights[3]);
    for (int j = 0; j < 7; ++j) {
        const Scalar dx = half * Scalar(kKronrodNodes[j]);
        const Scalar pair = f(center - dx) + f(center + dx);
        kronrod += Scalar(kKronrodWeights[j]) * pair;
        if (j % 2 == 1)
            gauss += Scalar(kGaussWeights[j / 2]) * pair;
    }
    QuadratureResult<Scalar> r;
    r.value = kronrod * half;
    r.error = std::abs((kronrod - gauss) * half);
    r.intervals = 1;
    return r;
}

}  // namespace detail

/// Integrate f over [a, b] until the summed error estimate drops below
/// max(abs_tol, rel_tol * |I|). Throws ConvergenceError when the interval
/// budget is exhausted first.
template <typename Scalar, typename F>
QuadratureResult<Scalar> integrate_adaptive(const F& f, Scalar a, Scalar b, Scalar abs_tol,
                                            Scalar rel_tol, int max_intervals = 4000)
{
    struct Piece {
        Scalar a, b, value, error;
    };

    std::vector<Piece> pieces;
    auto first = detail::gauss_kronrod_15(f, a, b);
    pieces.push_back({a, b, first.value, first.error});
    Scalar total = first.value;
    Scalar total_error = first.error;

    const Scalar roundoff = Scalar(50) * std::numeric_limits<Scalar>::epsilon();
    while (total_error > std::max(abs_tol, rel_tol * std::abs(total))) {
        auto worst = std::max_element(pieces.begin(), pieces.end(),
                                      [](const Piece& x, const Piece& y) { return x.error < y.error; });
        // Error estimates at the roundoff level cannot be refined further.
        if (worst->error <= roundoff * std::abs(worst->value))
            break;
        if (static_cast<int>(pieces.size()) >= max_intervals)
            throw ConvergenceError("integrate_adaptive: interval budget exhausted (error " +
                                   std::to_string(static_cast<double>(total_error)) + ")");
        const Piece split = *worst;
        const Scalar mid = (split.a + split.b) / Scalar(2);
        auto left = detail::gauss_kronrod_15(f, split.a, mid);
        auto right = detail::gauss_kronrod_15(f, mid, split.b);
        *worst = {split.a, mid, left.value, left.error};
        pieces.push_back({mid, split.b, right.value, right.error});

        // Re-sum from scratch to avoid drift from repeated subtraction.
        total = Scalar(0);
        total_error = Scalar(0);
        for (const auto& p : pieces) {
            total += p.value;
            total_error += p.error;
        }
    }

    QuadratureResult<Scalar> r;
    r.value = total;
    r.error = total_error;
    r.intervals = static_cast<int>(pieces.size());
    return r;
}

}  // namespace kaclab
