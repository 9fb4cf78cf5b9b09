#include "kaclab/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <future>
#include <sstream>
#include <vector>

#include "kaclab/analysis.hpp"
#include "kaclab/io.hpp"
#include "kaclab/presets.hpp"
#include "kaclab/scheme.hpp"

namespace kaclab {

namespace {

std::string profile_name(double t)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "t_%.6f.csv", t);
    return buf;
}

DistributionState<double> initial_state(const RunConfig& cfg, const VelocityGrid<double>& grid)
{
    if (cfg.preset)
        return preset_initial(*cfg.preset, grid);
    return interpolate_profile(read_profile_table(*cfg.custom_initial), grid);
}

Json fit_or_error(const TimeSeries<double>& series, DecayQuantity q, const FitWindow<double>& w,
                  std::optional<DecayFit<double>>& fit)
{
    try {
        fit = fit_decay_rate(series, q, w);
        return to_json(*fit);
    } catch (const std::exception& e) {
        return Json{{"quantity", to_string(q)}, {"error", e.what()}};
    }
}

}  // namespace

ExperimentOutcome run_experiment(const RunConfig& cfg)
{
    const auto wall_start = std::chrono::steady_clock::now();
    cfg.validate();
    const std::filesystem::path out_dir = cfg.output_dir;

    // Everything that can fail on bad input happens before the first file is written.
    const auto grid = make_uniform_grid(cfg.v_max, static_cast<Index>(cfg.n_cells));
    const auto initial = initial_state(cfg, grid);
    const auto ms0 = compute_moments(initial);
    if (!(ms0.mass > 0.0) || !(ms0.energy > 0.0))
        throw ValidationError("initial: mass and energy must be positive");
    const auto smallness = smallness_report(ms0, cfg.smallness_threshold);
    const auto continuum = fit_bose(ms0.mass, ms0.energy);
    const auto discrete = discrete_bose_fit(ms0.mass, ms0.energy, grid);
    const auto eq = sample(discrete, grid);

    SchemeConfig<double> scheme = cfg.scheme;
    scheme.t_end = cfg.effective_t_end();

    std::vector<DistributionState<double>> snapshots;
    long record_index = 0;
    RecordSink<double> sink = [&](const TimeSeriesRecord<double>&, const DistributionState<double>& s) {
        if (record_index++ % cfg.profile_every == 0)
            snapshots.push_back(s);
    };

    RunResult<double> result{initial, {}, 0, 0};
    try {
        result = run(initial, scheme, eq, sink);
    } catch (const StepFailure<double>& failure) {
        write_profile_csv(out_dir / "failure_state.csv", failure.last_good_state());
        write_text_file(out_dir / "failure_timeseries.csv", timeseries_csv(failure.series()));
        throw;
    }
    if (snapshots.empty() || snapshots.back().time() != result.final_state.time())
        snapshots.push_back(result.final_state);

    const auto report = monitor_all(result.series, ms0, cfg.tolerances);
    const bool hard_pass = hard_checks_pass(report);

    Json fits = Json::object();
    std::optional<DecayFit<double>> fit_h, fit_l1, fit_d;
    Json window_json = nullptr;
    try {
        const FitWindow<double> window = cfg.fit_window ? *cfg.fit_window : default_fit_window(result.series);
        window_json = Json::array({window.t_lo, window.t_hi});
        fits["relative_entropy"] = fit_or_error(result.series, DecayQuantity::relative_entropy, window, fit_h);
        fits["entropy_production"] = fit_or_error(result.series, DecayQuantity::entropy_production, window, fit_d);
        fits["l1_distance"] = fit_or_error(result.series, DecayQuantity::l1_distance, window, fit_l1);
    } catch (const std::exception& e) {
        fits["error"] = e.what();
    }
    Json ratio = nullptr;
    if (fit_h && fit_l1 && fit_h->alpha_hat != 0.0)
        ratio = fit_l1->alpha_hat / fit_h->alpha_hat;

    if (snapshots.empty() || snapshots.back().time() != result.final_state.time())
        snapshots.push_back(result.final_state);
    write_text_file(out_dir / "timeseries.csv", timeseries_csv(result.series));
    for (const auto& s : snapshots)
        write_profile_csv(out_dir / "profiles" / profile_name(s.time()), s);
    write_profile_csv(out_dir / "equilibrium.csv", eq);

    const auto& last = result.series.back();
    Json summary;
    summary["config"] = config_to_json(cfg);
    summary["initial_moments"] = to_json(ms0);
    summary["final_moments"] = to_json(last.moments);
    summary["smallness"] = to_json(smallness);
    summary["smallness"]["threshold"] = cfg.smallness_threshold;
    summary["equilibrium"] = {{"continuum", to_json(continuum)},
                              {"discrete", to_json(discrete)},
                              {"l1_dist_continuum_discrete", l1_distance(sample(continuum, grid), eq)}};
    summary["run"] = {{"final_time", last.time},
                      {"records", result.series.size()},
                      {"accepted_steps", result.accepted_steps},
                      {"rejected_steps", result.rejected_steps},
                      {"final_l1_dist_eq", last.l1_dist_eq},
                      {"final_l1_dist_eq_over_mass", last.l1_dist_eq / ms0.mass},
                      {"final_relative_entropy", last.entropy.H_rel}};
    summary["fit_window"] = window_json;
    summary["decay_fits"] = fits;
    summary["rate_ratio_l1_over_relative_entropy"] = ratio;
    summary["monitors"] = to_json(report);
    summary["hard_monitors_pass"] = hard_pass;
    summary["wall_time_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    write_text_file(out_dir / "summary.json", summary.dump(2) + "\n");

    ExperimentOutcome outcome;
    outcome.output_dir = out_dir;
    outcome.exit_code = hard_pass ? kExitOk : kExitMonitorFailure;
    std::ostringstream msg;
    msg << (cfg.preset ? "preset " + std::to_string(*cfg.preset) : "custom initial") << ": t = " << last.time
        << ", steps " << result.accepted_steps << " (+" << result.rejected_steps << " rejected)"
        << ", L1 distance / mass " << format_real(last.l1_dist_eq / ms0.mass) << ", hard monitors "
        << (hard_pass ? "pass" : "FAIL");
    if (!hard_pass)
        for (const auto& [name, c] : report)
            if (c.hard && !c.pass)
                msg << "\n  " << name << ": worst " << format_real(c.worst_value) << " at t = " << c.worst_time
                    << " (tolerance " << format_real(c.tolerance) << ")";
    outcome.message = msg.str();
    return outcome;
}

namespace {

ExperimentOutcome guarded_run(const RunConfig& cfg)
{
    try {
        return run_experiment(cfg);
    } catch (const std::exception& e) {
        return {kExitFailure, std::string("error: ") + e.what(), cfg.output_dir};
    }
}

}  // namespace

int execute(const RunConfig& cfg, std::ostream& log, std::ostream& err)
{
    auto report = [&](const ExperimentOutcome& o) { (o.exit_code == kExitFailure ? err : log) << o.message << '\n'; };
    if (!cfg.all_presets) {
        const auto o = guarded_run(cfg);
        report(o);
        return o.exit_code;
    }
    std::vector<std::future<ExperimentOutcome>> jobs;
    for (int k = 1; k <= kPresetCount; ++k) {
        RunConfig c = cfg;
        c.all_presets = false;
        c.preset = k;
        c.output_dir = (std::filesystem::path(cfg.output_dir) / ("preset_" + std::to_string(k))).string();
        jobs.push_back(std::async(std::launch::async, guarded_run, c));
    }
    int code = kExitOk;
    for (auto& j : jobs) {
        const auto o = j.get();
        report(o);
        code = std::max(code, o.exit_code);
    }
    return code;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    ParsedArgs parsed;
    try {
        parsed = parse_config(args);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    if (parsed.message) {
        out << *parsed.message;
        return kExitOk;
    }
    return execute(parsed.config, out, err);
}

}  // namespace kaclab
