#pragma once

// Explicit time stepping of the structure-preserving finite-volume scheme
// with an accept/reject controller: a step is accepted only if every cell
// stays nonnegative and the entropy does not increase.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "kaclab/entropy.hpp"
#include "kaclab/equilibrium.hpp"
#include "kaclab/faces.hpp"
#include "kaclab/field.hpp"
#include "kaclab/moments.hpp"
#include "kaclab/timeseries.hpp"

namespace kaclab {

template <typename Scalar>
struct SchemeConfig {
    Scalar dt_initial = Scalar(1e-3);
    Scalar dt_max = Scalar(1e-2);
    Scalar safety = Scalar(0.5);  ///< CFL safety factor in (0, 1]
    Scalar dt_growth = Scalar(1.1);
    int max_rejects_per_step = 40;
    Scalar t_end = Scalar(10);
    Scalar output_interval = Scalar(0.01);
    Scalar positivity_floor = Scalar(0);  ///< cells in [-floor, 0) are clipped; below that the step is rejected

    void validate() const
    {
        if (!(dt_initial > Scalar(0)))
            throw ValidationError("scheme.dt_initial: must be positive");
        if (!(dt_max > Scalar(0)))
            throw ValidationError("scheme.dt_max: must be positive");
        if (dt_initial > dt_max)
            throw ValidationError("scheme.dt_initial: must not exceed dt_max");
        if (!(safety > Scalar(0) && safety <= Scalar(1)))
            throw ValidationError("scheme.safety: must lie in (0, 1]");
        if (!(dt_growth > Scalar(1)))
            throw ValidationError("scheme.dt_growth: must exceed 1");
        if (max_rejects_per_step < 1)
            throw ValidationError("scheme.max_rejects_per_step: must be at least 1");
        if (!(t_end >= Scalar(0)) || !std::isfinite(static_cast<double>(t_end)))
            throw ValidationError("scheme.t_end: must be finite and nonnegative");
        if (!(output_interval > Scalar(0)))
            throw ValidationError("scheme.output_interval: must be positive");
        if (!(positivity_floor >= Scalar(0)))
            throw ValidationError("scheme.positivity_floor: must be nonnegative");
    }
};

/// Heuristic explicit stability bound
///   dt <= safety dv^2 / (2 A_h + |B_h| v_max max(1 + 2f) dv),
/// clamped to dt_max. The diffusion part is linear in f, so only the drift
/// carries the f(1 + f) growth factor.
template <typename Scalar>
Scalar suggest_dt(const DistributionState<Scalar>& state, const FaceQuantities<Scalar>& faces,
                  const SchemeConfig<Scalar>& cfg)
{
    const Scalar dv = state.grid().dv();
    const Scalar growth = Scalar(1) + Scalar(2) * state.values().maxCoeff();
    const Scalar denom = Scalar(2) * faces.A_face + std::abs(faces.B_h) * state.grid().v_max() * growth * dv;
    if (!(denom > Scalar(0)))
        return cfg.dt_max;
    return std::min(cfg.dt_max, cfg.safety * dv * dv / denom);
}

template <typename Scalar>
Scalar suggest_dt(const DistributionState<Scalar>& state, const SchemeConfig<Scalar>& cfg)
{
    return suggest_dt(state, face_quantities(state), cfg);
}

enum class StepRejection { none, negative_cell, entropy_increase };

template <typename Scalar>
struct StepResult {
    DistributionState<Scalar> state;
    Scalar dt_used{};
    bool accepted = false;
    StepRejection reason = StepRejection::none;
    Scalar entropy_before{};
    Scalar entropy_after{};
};

/// Relative slack on the entropy comparison of one step (roundoff of H).
template <typename Scalar>
inline constexpr Scalar kEntropyStepTolerance = Scalar(1e-13);

/// One explicit Euler attempt with coefficients frozen at the start of the
/// step. On rejection the input state is returned unchanged.
template <typename Scalar>
StepResult<Scalar> step(const DistributionState<Scalar>& state, const FaceQuantities<Scalar>& faces,
                        Scalar entropy_before, Scalar dt, const SchemeConfig<Scalar>& cfg)
{
    if (!(dt > Scalar(0)))
        throw ValidationError("step: dt must be positive");

    StepResult<Scalar> r{state, dt, false, StepRejection::none, entropy_before, entropy_before};
    ArrayX<Scalar> next = state.values() + dt * flux_divergence(faces);
    for (Index i = 0; i < next.size(); ++i) {
        if (next[i] < Scalar(0)) {
            if (next[i] >= -cfg.positivity_floor) {
                next[i] = Scalar(0);
            } else {
                r.reason = StepRejection::negative_cell;
                return r;
            }
        }
        if (!std::isfinite(static_cast<double>(next[i])))
            throw NumericalError("step: non-finite value at cell " + std::to_string(i));
    }

    DistributionState<Scalar> candidate(state.grid(), std::move(next), state.time() + dt);
    const Scalar entropy_after = total_entropy(candidate);
    if (entropy_after > entropy_before + kEntropyStepTolerance<Scalar> * std::abs(entropy_before)) {
        r.reason = StepRejection::entropy_increase;
        r.entropy_after = entropy_after;
        return r;
    }
    r.state = std::move(candidate);
    r.accepted = true;
    r.entropy_after = entropy_after;
    return r;
}

template <typename Scalar>
StepResult<Scalar> step(const DistributionState<Scalar>& state, Scalar dt, const SchemeConfig<Scalar>& cfg)
{
    return step(state, face_quantities(state), total_entropy(state), dt, cfg);
}

/// Thrown when the controller exhausts its halvings; carries the last
/// accepted state and the series recorded so far.
template <typename Scalar>
class StepFailure : public std::runtime_error {
public:
    StepFailure(const std::string& what, DistributionState<Scalar> last_good, TimeSeries<Scalar> series = {})
        : std::runtime_error(what), last_good_(std::move(last_good)), series_(std::move(series))
    {
    }
    const DistributionState<Scalar>& last_good_state() const { return last_good_; }
    const TimeSeries<Scalar>& series() const { return series_; }

private:
    DistributionState<Scalar> last_good_;
    TimeSeries<Scalar> series_;
};

/// Halves dt on every rejection and grows it by dt_growth after five
/// consecutive accepts; never exceeds suggest_dt or dt_max.
template <typename Scalar>
class StepController {
public:
    explicit StepController(const SchemeConfig<Scalar>& cfg) : cfg_(cfg), dt_(cfg.dt_initial) {}

    /// Advance by one accepted step no longer than max_dt.
    StepResult<Scalar> advance(const DistributionState<Scalar>& state, Scalar entropy_before, Scalar max_dt)
    {
        const auto faces = face_quantities(state);
        Scalar dt = std::min({dt_, suggest_dt(state, faces, cfg_), max_dt});
        for (int rejects = 0;; ++rejects) {
            auto r = step(state, faces, entropy_before, dt, cfg_);
            if (r.accepted) {
                if (++streak_ >= 5) {
                    dt_ = std::min(dt_ * cfg_.dt_growth, cfg_.dt_max);
                    streak_ = 0;
                }
                return r;
            }
            ++rejected_;
            streak_ = 0;
            if (rejects + 1 >= cfg_.max_rejects_per_step)
                throw StepFailure<Scalar>("step: " + std::to_string(cfg_.max_rejects_per_step) +
                                              " successive rejections at t = " +
                                              std::to_string(static_cast<double>(state.time())),
                                          state);
            dt /= Scalar(2);
            dt_ = dt;
        }
    }

    long rejected() const { return rejected_; }
    Scalar dt() const { return dt_; }

private:
    SchemeConfig<Scalar> cfg_;
    Scalar dt_;
    int streak_ = 0;
    long rejected_ = 0;
};

template <typename Scalar>
TimeSeriesRecord<Scalar> make_record(const DistributionState<Scalar>& state, const DistributionState<Scalar>& eq)
{
    const auto faces = face_quantities(state);
    TimeSeriesRecord<Scalar> rec;
    rec.time = state.time();
    rec.moments = compute_moments(state);
    rec.entropy = entropy_report(state, faces, eq);
    rec.l1_dist_eq = l1_distance(state, eq);
    rec.A_face = faces.A_face;
    rec.max_entropy_increase = -std::numeric_limits<Scalar>::infinity();
    return rec;
}

template <typename Scalar>
struct RunResult {
    DistributionState<Scalar> final_state;
    TimeSeries<Scalar> series;
    long accepted_steps = 0;
    long rejected_steps = 0;
};

template <typename Scalar>
using RecordSink = std::function<void(const TimeSeriesRecord<Scalar>&, const DistributionState<Scalar>&)>;

/// Integrate from the initial state up to cfg.t_end, recording diagnostics
/// at t0, every output_interval, and at t_end. `eq` is the reference
/// equilibrium for relative entropy and distances.
template <typename Scalar>
RunResult<Scalar> run(const DistributionState<Scalar>& initial, const SchemeConfig<Scalar>& cfg,
                      const DistributionState<Scalar>& eq, const RecordSink<Scalar>& sink = {})
{
    cfg.validate();
    if (!(integrate(initial) > Scalar(0)))
        throw ValidationError("run: initial state must have positive mass");

    RunResult<Scalar> result{initial, {}, 0, 0};
    auto emit = [&](TimeSeriesRecord<Scalar> rec, const DistributionState<Scalar>& s) {
        result.series.push_back(rec);
        if (sink)
            sink(result.series.back(), s);
    };

    DistributionState<Scalar> state = initial;
    Scalar entropy = total_entropy(state);
    {
        auto rec = make_record(state, eq);
        rec.max_entropy_increase = Scalar(0);
        emit(rec, state);
    }

    const Scalar t0 = initial.time();
    const Scalar t_end = t0 + cfg.t_end;
    StepController<Scalar> controller(cfg);
    long output_index = 1;
    long accepted_since = 0, rejected_since = 0;
    Scalar last_dt(0);
    Scalar worst_increase = -std::numeric_limits<Scalar>::infinity();

    while (state.time() < t_end) {
        const Scalar target = std::min(t0 + Scalar(output_index) * cfg.output_interval, t_end);
        const long rejected_before = controller.rejected();
        StepResult<Scalar> r = [&] {
            try {
                return controller.advance(state, entropy, target - state.time());
            } catch (const StepFailure<Scalar>& failure) {
                throw StepFailure<Scalar>(failure.what(), state, result.series);
            }
        }();
        rejected_since += controller.rejected() - rejected_before;
        result.rejected_steps += controller.rejected() - rejected_before;
        ++accepted_since;
        ++result.accepted_steps;
        last_dt = r.dt_used;
        worst_increase = std::max(worst_increase, r.entropy_after - r.entropy_before);

        // Snap onto the output time when the step was clipped to reach it.
        const bool reached = r.dt_used >= target - state.time() ||
                             target - r.state.time() <= Scalar(1e-12) * std::max(Scalar(1), target);
        state = reached ? r.state.with_time(target) : std::move(r.state);
        entropy = r.entropy_after;

        if (reached) {
            auto rec = make_record(state, eq);
            rec.dt_used = last_dt;
            rec.accepted_steps = accepted_since;
            rec.rejected_steps = rejected_since;
            rec.max_entropy_increase = worst_increase;
            emit(rec, state);
            accepted_since = rejected_since = 0;
            worst_increase = -std::numeric_limits<Scalar>::infinity();
            ++output_index;
        }
    }
    result.final_state = state;
    return result;
}

// ---------------------------------------------------------------------------
// Discrete steady state

/// Bose parameters whose sampled profile has the given midpoint-rule mass and
/// energy on `grid`. Defect correction on the targets handed to fit_bose.
template <typename Scalar>
BoseParameters<Scalar> discrete_bose_fit(Scalar m, Scalar e, const VelocityGrid<Scalar>& grid,
                                         Scalar tol = Scalar(1e-12), int max_iter = 100)
{
    if (!(m > Scalar(0)) || !(e > Scalar(0)))
        throw DomainError("discrete_bose_fit: mass and energy must be positive");
    Scalar m_target = m, e_target = e;
    const Scalar fit_tol = Scalar(64) * std::numeric_limits<Scalar>::epsilon();
    for (int it = 0; it < max_iter; ++it) {
        const auto p = fit_bose(m_target, e_target, std::max(fit_tol, tol / Scalar(100)));
        const auto ms = compute_moments(sample(p, grid));
        const Scalar dm = m - ms.mass;
        const Scalar de = e - ms.energy;
        if (std::abs(dm) <= tol * m && std::abs(de) <= tol * e)
            return p;
        m_target += dm;
        e_target += de;
    }
    throw ConvergenceError("discrete_bose_fit: no convergence after " + std::to_string(max_iter) + " iterations");
}

template <typename Scalar>
DistributionState<Scalar> discrete_bose_fixed_point(Scalar m, Scalar e, const VelocityGrid<Scalar>& grid,
                                                    Scalar tol = Scalar(1e-12))
{
    return sample(discrete_bose_fit(m, e, grid, tol), grid);
}

}  // namespace kaclab
