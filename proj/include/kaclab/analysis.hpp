#pragma once

// Exponential decay-rate fits and monitors evaluated on recorded time series.
// Every check maps records to (value, allowance) pairs and passes when
// value <= allowance everywhere; the worst record is the one with the
// largest excess value - allowance.

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kaclab/errors.hpp"
#include "kaclab/moments.hpp"
#include "kaclab/timeseries.hpp"

namespace kaclab {

enum class DecayQuantity { relative_entropy, entropy_production, l1_distance };

inline const char* to_string(DecayQuantity q)
{
    switch (q) {
    case DecayQuantity::relative_entropy:
        return "relative_entropy";
    case DecayQuantity::entropy_production:
        return "entropy_production";
    default:
        return "l1_distance";
    }
}

template <typename Scalar>
struct FitWindow {
    Scalar t_lo{};
    Scalar t_hi{};
};

template <typename Scalar>
struct DecayFit {
    Scalar alpha_hat{};  ///< -slope of log q against t
    Scalar intercept{};  ///< log q at t = 0
    Scalar r_squared{};  ///< 0 by convention when log q has no variance
    FitWindow<Scalar> window;
    int n_points = 0;
    DecayQuantity quantity = DecayQuantity::relative_entropy;
};

template <typename Scalar>
Scalar decay_value(const TimeSeriesRecord<Scalar>& r, DecayQuantity q)
{
    switch (q) {
    case DecayQuantity::relative_entropy:
        return r.entropy.H_rel;
    case DecayQuantity::entropy_production:
        return r.entropy.D;
    default:
        return r.l1_dist_eq;
    }
}

/// Ordinary least squares of log q against t over records with t in
/// [t_lo, t_hi]. Values below 10 eps times the first recorded value are
/// roundoff and skipped; a negative or NaN value inside the window is an error.
template <typename Scalar>
DecayFit<Scalar> fit_decay_rate(const TimeSeries<Scalar>& series, DecayQuantity quantity,
                                const FitWindow<Scalar>& window)
{
    if (!(window.t_lo < window.t_hi))
        throw ValidationError("fit_window: t_lo must be smaller than t_hi");
    if (series.empty())
        throw ValidationError("fit_decay_rate: empty series");
    const Scalar first = decay_value(series.front(), quantity);
    const Scalar floor = std::isfinite(static_cast<double>(first)) && first > Scalar(0)
                             ? Scalar(10) * std::numeric_limits<Scalar>::epsilon() * first
                             : Scalar(0);

    std::vector<Scalar> ts, ys;
    for (const auto& r : series) {
        if (r.time < window.t_lo || r.time > window.t_hi)
            continue;
        const Scalar q = decay_value(r, quantity);
        if (std::isnan(static_cast<double>(q)) || q < Scalar(0) || (q == Scalar(0) && floor == Scalar(0)))
            throw DomainError(std::string("fit_decay_rate: ") + to_string(quantity) + " is nonpositive at t = " +
                              std::to_string(static_cast<double>(r.time)));
        if (q < floor || std::isinf(static_cast<double>(q)))
            continue;
        ts.push_back(r.time);
        ys.push_back(std::log(q));
    }
    const auto n = static_cast<int>(ts.size());
    if (n < 3)
        throw ValidationError("fit_decay_rate: " + std::to_string(n) + " usable points in [" +
                              std::to_string(static_cast<double>(window.t_lo)) + ", " +
                              std::to_string(static_cast<double>(window.t_hi)) + "], need at least 3");

    Scalar tm(0), ym(0);
    for (int i = 0; i < n; ++i) {
        tm += ts[i];
        ym += ys[i];
    }
    tm /= n;
    ym /= n;
    Scalar stt(0), sty(0), syy(0);
    for (int i = 0; i < n; ++i) {
        const Scalar dt = ts[i] - tm, dy = ys[i] - ym;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    DecayFit<Scalar> fit;
    fit.quantity = quantity;
    fit.window = window;
    fit.n_points = n;
    const Scalar slope = stt > Scalar(0) ? sty / stt : Scalar(0);
    fit.alpha_hat = -slope;
    fit.intercept = ym - slope * tm;
    if (syy > Scalar(0) && stt > Scalar(0)) {
        Scalar sse(0);
        for (int i = 0; i < n; ++i) {
            const Scalar res = ys[i] - (fit.intercept + slope * ts[i]);
            sse += res * res;
        }
        fit.r_squared = std::max(Scalar(0), std::min(Scalar(1), Scalar(1) - sse / syy));
    }
    return fit;
}

/// Post-transient window: from the first record where H_rel has fallen by
/// `drop_start` to the first where it has fallen by `drop_end` (or the last record).
template <typename Scalar>
FitWindow<Scalar> default_fit_window(const TimeSeries<Scalar>& series, Scalar drop_start = Scalar(1e-2),
                                     Scalar drop_end = Scalar(1e-12))
{
    if (series.size() < 3)
        throw ValidationError("default_fit_window: need at least 3 records");
    const Scalar h0 = series.front().entropy.H_rel;
    std::optional<std::size_t> lo, hi;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const Scalar h = series[i].entropy.H_rel;
        if (!lo && h <= drop_start * h0)
            lo = i;
        if (!hi && h <= drop_end * h0) {
            hi = i;
            break;
        }
    }
    const std::size_t last = hi.value_or(series.size() - 1);
    std::size_t first = lo.value_or(0);
    if (last < first + 2)
        first = last >= 2 ? last - 2 : 0;
    return {series[first].time, series[std::max(last, first + 2)].time};
}

// ---------------------------------------------------------------------------
// Monitors

template <typename Scalar>
struct Violation {
    Scalar time{};
    Scalar value{};
    Scalar allowance{};
};

template <typename Scalar>
struct CheckResult {
    bool pass = true;
    bool hard = true;
    Scalar worst_time{};
    Scalar worst_value{};
    Scalar tolerance{};  ///< allowance at the worst record
    int evaluated = 0;
    int violations = 0;
};

template <typename Scalar>
using MonitorReport = std::map<std::string, CheckResult<Scalar>>;

template <typename Scalar>
bool hard_checks_pass(const MonitorReport<Scalar>& report)
{
    for (const auto& [name, c] : report)
        if (c.hard && !c.pass)
            return false;
    return true;
}

namespace detail {

template <typename Scalar>
class CheckBuilder {
public:
    explicit CheckBuilder(bool hard) { result_.hard = hard; }

    void add(Scalar time, Scalar value, Scalar allowance)
    {
        ++result_.evaluated;
        const Scalar excess = value - allowance;
        if (!(value <= allowance)) {
            result_.pass = false;
            ++result_.violations;
            violations_.push_back({time, value, allowance});
        }
        if (result_.evaluated == 1 || excess > worst_excess_ || std::isnan(static_cast<double>(excess))) {
            if (std::isnan(static_cast<double>(worst_excess_)))
                return;
            worst_excess_ = excess;
            result_.worst_time = time;
            result_.worst_value = value;
            result_.tolerance = allowance;
        }
    }

    const CheckResult<Scalar>& result() const { return result_; }
    const std::vector<Violation<Scalar>>& violations() const { return violations_; }

private:
    CheckResult<Scalar> result_;
    Scalar worst_excess_{};
    std::vector<Violation<Scalar>> violations_;
};

/// Centered difference of y against record times (one-sided at the ends).
template <typename Scalar, typename Get>
Scalar record_derivative(const TimeSeries<Scalar>& s, std::size_t i, Get get)
{
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 < s.size() ? i + 1 : i;
    return (get(s[hi]) - get(s[lo])) / (s[hi].time - s[lo].time);
}

template <typename Scalar>
Scalar record_spacing(const TimeSeries<Scalar>& s, std::size_t i)
{
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 < s.size() ? i + 1 : i;
    return (s[hi].time - s[lo].time) / Scalar(hi - lo);
}

}  // namespace detail

template <typename Scalar>
struct PropATolerances {
    Scalar tol_rel = Scalar(1e-3);
    Scalar tol_abs_scale = Scalar(1e-8);  ///< divided by the local record spacing
};

/// A'/A <= 2 ||f||_2^2 with A the cell-based coefficient and A' from
/// centered differences of the records.
template <typename Scalar>
CheckResult<Scalar> check_prop_A(const TimeSeries<Scalar>& series, const PropATolerances<Scalar>& tol = {},
                                 std::vector<Violation<Scalar>>* violations = nullptr)
{
    detail::CheckBuilder<Scalar> b(true);
    if (series.size() >= 2) {
        for (std::size_t i = 0; i < series.size(); ++i) {
            const auto& r = series[i];
            const Scalar A = r.moments.coeff_A;
            if (!(A > Scalar(0)))
                continue;
            const Scalar dA =
                detail::record_derivative(series, i, [](const TimeSeriesRecord<Scalar>& x) { return x.moments.coeff_A; });
            const Scalar ratio = dA / A;
            const Scalar allowance = tol.tol_abs_scale / detail::record_spacing(series, i) + tol.tol_rel * std::abs(ratio);
            b.add(r.time, ratio - Scalar(2) * r.moments.l2_sq, allowance);
        }
    }
    if (violations)
        *violations = b.violations();
    return b.result();
}

template <typename Scalar>
std::vector<Violation<Scalar>> monitor_prop_A(const TimeSeries<Scalar>& series, const PropATolerances<Scalar>& tol = {})
{
    std::vector<Violation<Scalar>> v;
    check_prop_A(series, tol, &v);
    return v;
}

template <typename Scalar>
struct DInequalityTolerances {
    Scalar tol_rel = Scalar(0.05);      ///< slack in units of B
    Scalar relative_floor = Scalar(1e-10);  ///< D below this fraction of the largest finite D is not checked
};

/// (log D)' <= A'/A - B + slack. Records whose own or neighbouring D is not
/// finite and positive, or lies below the floor, are skipped.
template <typename Scalar>
CheckResult<Scalar> check_D_inequality(const TimeSeries<Scalar>& series, const DInequalityTolerances<Scalar>& tol = {},
                                       std::vector<Violation<Scalar>>* violations = nullptr)
{
    detail::CheckBuilder<Scalar> b(false);
    Scalar d_max(0);
    for (const auto& r : series)
        if (std::isfinite(static_cast<double>(r.entropy.D)))
            d_max = std::max(d_max, r.entropy.D);
    const Scalar floor = std::max(tol.relative_floor * d_max, std::numeric_limits<Scalar>::min());
    auto usable = [&](const TimeSeriesRecord<Scalar>& r) {
        return std::isfinite(static_cast<double>(r.entropy.D)) && r.entropy.D >= floor;
    };
    if (series.size() >= 3) {
        for (std::size_t i = 1; i + 1 < series.size(); ++i) {
            if (!usable(series[i - 1]) || !usable(series[i]) || !usable(series[i + 1]))
                continue;
            const auto& r = series[i];
            const Scalar dlogD = detail::record_derivative(
                series, i, [](const TimeSeriesRecord<Scalar>& x) { return std::log(x.entropy.D); });
            const Scalar dA = detail::record_derivative(
                series, i, [](const TimeSeriesRecord<Scalar>& x) { return x.moments.coeff_A; });
            const Scalar B = r.moments.coeff_B;
            const Scalar rhs = dA / r.moments.coeff_A - B;
            b.add(r.time, dlogD - rhs, tol.tol_rel * std::abs(B));
        }
    }
    if (violations)
        *violations = b.violations();
    return b.result();
}

template <typename Scalar>
std::vector<Violation<Scalar>> monitor_D_inequality(const TimeSeries<Scalar>& series,
                                                    const DInequalityTolerances<Scalar>& tol = {})
{
    std::vector<Violation<Scalar>> v;
    check_D_inequality(series, tol, &v);
    return v;
}

template <typename Scalar>
struct ConservationTolerances {
    Scalar mass_rel = Scalar(1e-10);
    Scalar energy_rel = Scalar(1e-9);
    Scalar entropy_step_rel = Scalar(1e-13);  ///< per accepted step, relative to |H|
    Scalar entropy_record_rel = Scalar(1e-13);  ///< between records, relative to 1 + |H|
    Scalar relative_entropy_rel = Scalar(1e-14);  ///< between records, relative to 1 + |H|
    Scalar ckp_rel = Scalar(1e-10);
    Scalar l2_gap = Scalar(1e-12);
};

/// Conservation, entropy monotonicity, D >= 0, the L1 bound and the L2 lower
/// bound at every record.
template <typename Scalar>
MonitorReport<Scalar> monitor_conservation_and_entropy(const TimeSeries<Scalar>& series, const MomentSet<Scalar>& initial,
                                                       const ConservationTolerances<Scalar>& tol = {})
{
    detail::CheckBuilder<Scalar> mass(true), energy(true), h_step(true), h_rec(true), hrel(true), dpos(true), ckp(true),
        l2(true);
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& r = series[i];
        const Scalar t = r.time;
        const Scalar absH = std::abs(r.entropy.H);
        mass.add(t, initial.mass > Scalar(0) ? std::abs(r.moments.mass - initial.mass) / initial.mass
                                             : std::abs(r.moments.mass),
                 tol.mass_rel);
        energy.add(t, initial.energy > Scalar(0) ? std::abs(r.moments.energy - initial.energy) / initial.energy
                                                 : std::abs(r.moments.energy),
                   tol.energy_rel);
        if (i > 0) {
            const auto& p = series[i - 1];
            if (r.accepted_steps > 0)
                h_step.add(t, r.max_entropy_increase, tol.entropy_step_rel * absH);
            h_rec.add(t, r.entropy.H - p.entropy.H, tol.entropy_record_rel * (Scalar(1) + absH));
            hrel.add(t, r.entropy.H_rel - p.entropy.H_rel, tol.relative_entropy_rel * (Scalar(1) + absH));
        }
        dpos.add(t, -r.entropy.D, Scalar(0));
        ckp.add(t, r.entropy.ckp_lhs - r.entropy.ckp_rhs, tol.ckp_rel * r.entropy.ckp_rhs);
        if (r.moments.energy > Scalar(0))
            l2.add(t, -l2_lower_bound_gap(r.moments), tol.l2_gap);
    }
    return {{"mass_conservation", mass.result()},
            {"energy_conservation", energy.result()},
            {"entropy_step_monotone", h_step.result()},
            {"entropy_monotone", h_rec.result()},
            {"relative_entropy_monotone", hrel.result()},
            {"production_nonnegative", dpos.result()},
            {"ckp_bound", ckp.result()},
            {"l2_lower_bound", l2.result()}};
}

template <typename Scalar>
struct MonitorTolerances {
    PropATolerances<Scalar> prop_A;
    DInequalityTolerances<Scalar> d_inequality;
    ConservationTolerances<Scalar> conservation;
};

/// All monitors in one report; "D_inequality" is soft, the rest hard.
template <typename Scalar>
MonitorReport<Scalar> monitor_all(const TimeSeries<Scalar>& series, const MomentSet<Scalar>& initial,
                                  const MonitorTolerances<Scalar>& tol = {})
{
    auto report = monitor_conservation_and_entropy(series, initial, tol.conservation);
    report["prop_A"] = check_prop_A(series, tol.prop_A);
    report["D_inequality"] = check_D_inequality(series, tol.d_inequality);
    return report;
}

}  // namespace kaclab
