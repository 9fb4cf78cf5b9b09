#include "kaclab/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "kaclab/presets.hpp"

namespace kaclab {

void RunConfig::validate() const
{
    if (preset.has_value() == custom_initial.has_value() && !all_presets)
        throw ValidationError(preset ? "preset: give either a preset or an initial file, not both"
                                     : "preset: a preset (1..5) or an initial file is required");
    if (all_presets && custom_initial)
        throw ValidationError("all_presets: cannot be combined with an initial file");
    if (preset && (*preset < 1 || *preset > kPresetCount))
        throw ValidationError("preset: must be in 1.." + std::to_string(kPresetCount) + ", got " +
                              std::to_string(*preset));
    VelocityGrid<double>(v_max, static_cast<Index>(n_cells));
    scheme.validate();
    if (fit_window && !(fit_window->t_lo < fit_window->t_hi))
        throw ValidationError("fit_window: t_lo must be smaller than t_hi");
    if (output_dir.empty())
        throw ValidationError("output_dir: must not be empty");
    if (!(smallness_threshold > 0.0))
        throw ValidationError("smallness_threshold: must be positive");
    if (profile_every < 1)
        throw ValidationError("profile_every: must be at least 1");
}

double RunConfig::effective_t_end() const
{
    if (t_end_set || !preset)
        return scheme.t_end;
    return preset_default_t_end(*preset);
}

std::optional<std::string> process_env(const std::string& name)
{
    if (const char* v = std::getenv(name.c_str()))
        return std::string(v);
    return std::nullopt;
}

namespace {

using Path = std::string;

void require_object(const Json& j, const Path& path)
{
    if (!j.is_object())
        throw ConfigError(path + ": expected an object");
}

void reject_unknown(const Json& j, const Path& prefix, const std::set<std::string>& known)
{
    for (const auto& [key, value] : j.items())
        if (!known.count(key))
            throw ConfigError((prefix.empty() ? key : prefix + "." + key) + ": unknown key");
}

double get_real(const Json& j, const Path& path)
{
    if (!j.is_number())
        throw ConfigError(path + ": expected a number");
    return j.get<double>();
}

long get_integer(const Json& j, const Path& path)
{
    if (!j.is_number_integer())
        throw ConfigError(path + ": expected an integer");
    return j.get<long>();
}

std::string get_string(const Json& j, const Path& path)
{
    if (!j.is_string())
        throw ConfigError(path + ": expected a string");
    return j.get<std::string>();
}

FitWindow<double> parse_window(const std::string& text, const std::string& where)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw ConfigError(where + ": expected LO:HI, got '" + text + "'");
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double x = 0;
        try {
            x = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size())
            throw ConfigError(where + ": not a number: '" + s + "'");
        return x;
    };
    FitWindow<double> w{number(text.substr(0, colon)), number(text.substr(colon + 1))};
    if (!(w.t_lo < w.t_hi))
        throw ConfigError(where + ": LO must be smaller than HI");
    return w;
}

}  // namespace

void apply_config_json(RunConfig& cfg, const Json& j)
{
    require_object(j, "config");
    reject_unknown(j, "", {"preset", "initial", "grid", "scheme", "fit_window", "output_dir", "tolerances",
                           "smallness_threshold", "profile_every"});
    // null stands for "not set", so an echoed configuration reads back unchanged
    if (j.contains("preset") && !j["preset"].is_null())
        cfg.preset = static_cast<int>(get_integer(j["preset"], "preset"));
    if (j.contains("initial") && !j["initial"].is_null())
        cfg.custom_initial = get_string(j["initial"], "initial");
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        require_object(g, "grid");
        reject_unknown(g, "grid", {"v_max", "n_cells"});
        if (g.contains("v_max"))
            cfg.v_max = get_real(g["v_max"], "grid.v_max");
        if (g.contains("n_cells"))
            cfg.n_cells = get_integer(g["n_cells"], "grid.n_cells");
    }
    if (j.contains("scheme")) {
        const auto& s = j["scheme"];
        require_object(s, "scheme");
        reject_unknown(s, "scheme", {"dt_initial", "dt_max", "safety", "dt_growth", "max_rejects_per_step", "t_end",
                                     "output_interval", "positivity_floor"});
        auto& c = cfg.scheme;
        if (s.contains("dt_initial"))
            c.dt_initial = get_real(s["dt_initial"], "scheme.dt_initial");
        if (s.contains("dt_max"))
            c.dt_max = get_real(s["dt_max"], "scheme.dt_max");
        if (s.contains("safety"))
            c.safety = get_real(s["safety"], "scheme.safety");
        if (s.contains("dt_growth"))
            c.dt_growth = get_real(s["dt_growth"], "scheme.dt_growth");
        if (s.contains("max_rejects_per_step"))
            c.max_rejects_per_step = static_cast<int>(get_integer(s["max_rejects_per_step"], "scheme.max_rejects_per_step"));
        if (s.contains("t_end")) {
            c.t_end = get_real(s["t_end"], "scheme.t_end");
            cfg.t_end_set = true;
        }
        if (s.contains("output_interval"))
            c.output_interval = get_real(s["output_interval"], "scheme.output_interval");
        if (s.contains("positivity_floor"))
            c.positivity_floor = get_real(s["positivity_floor"], "scheme.positivity_floor");
    }
    if (j.contains("fit_window") && !j["fit_window"].is_null()) {
        const auto& w = j["fit_window"];
        if (!w.is_array() || w.size() != 2)
            throw ConfigError("fit_window: expected [t_lo, t_hi]");
        cfg.fit_window = FitWindow<double>{get_real(w[0], "fit_window[0]"), get_real(w[1], "fit_window[1]")};
    }
    if (j.contains("output_dir"))
        cfg.output_dir = get_string(j["output_dir"], "output_dir");
    if (j.contains("smallness_threshold"))
        cfg.smallness_threshold = get_real(j["smallness_threshold"], "smallness_threshold");
    if (j.contains("profile_every"))
        cfg.profile_every = get_integer(j["profile_every"], "profile_every");
    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        require_object(t, "tolerances");
        reject_unknown(t, "tolerances", {"prop_A", "D_inequality", "conservation"});
        auto& tol = cfg.tolerances;
        if (t.contains("prop_A")) {
            const auto& p = t["prop_A"];
            require_object(p, "tolerances.prop_A");
            reject_unknown(p, "tolerances.prop_A", {"tol_rel", "tol_abs_scale"});
            if (p.contains("tol_rel"))
                tol.prop_A.tol_rel = get_real(p["tol_rel"], "tolerances.prop_A.tol_rel");
            if (p.contains("tol_abs_scale"))
                tol.prop_A.tol_abs_scale = get_real(p["tol_abs_scale"], "tolerances.prop_A.tol_abs_scale");
        }
        if (t.contains("D_inequality")) {
            const auto& d = t["D_inequality"];
            require_object(d, "tolerances.D_inequality");
            reject_unknown(d, "tolerances.D_inequality", {"tol_rel", "relative_floor"});
            if (d.contains("tol_rel"))
                tol.d_inequality.tol_rel = get_real(d["tol_rel"], "tolerances.D_inequality.tol_rel");
            if (d.contains("relative_floor"))
                tol.d_inequality.relative_floor = get_real(d["relative_floor"], "tolerances.D_inequality.relative_floor");
        }
        if (t.contains("conservation")) {
            const auto& c = t["conservation"];
            const Path base = "tolerances.conservation";
            require_object(c, base);
            reject_unknown(c, base, {"mass_rel", "energy_rel", "entropy_step_rel", "entropy_record_rel",
                                     "relative_entropy_rel", "ckp_rel", "l2_gap"});
            auto& ct = tol.conservation;
            const std::pair<const char*, double*> fields[] = {{"mass_rel", &ct.mass_rel},
                                                              {"energy_rel", &ct.energy_rel},
                                                              {"entropy_step_rel", &ct.entropy_step_rel},
                                                              {"entropy_record_rel", &ct.entropy_record_rel},
                                                              {"relative_entropy_rel", &ct.relative_entropy_rel},
                                                              {"ckp_rel", &ct.ckp_rel},
                                                              {"l2_gap", &ct.l2_gap}};
            for (const auto& [key, dst] : fields)
                if (c.contains(key))
                    *dst = get_real(c[key], base + "." + key);
        }
    }
}

ParsedArgs parse_config(const std::vector<std::string>& args, const EnvLookup& env)
{
    CLI::App app{"Bose-Einstein Kac grazing-limit model: solver, equilibrium fit and diagnostics", "kaclab"};
    std::optional<int> preset;
    std::optional<std::string> initial, out, config_file, window;
    std::optional<double> vmax, tend, dt;
    std::optional<long> cells;
    bool all = false;
    app.add_option("--preset", preset, "Reference initial datum 1..5");
    app.add_option("--initial", initial, "Initial profile as a v,f CSV table (linear interpolation, zero outside)");
    app.add_option("--vmax", vmax, "Half-width of the velocity domain");
    app.add_option("--cells", cells, "Number of cells");
    app.add_option("--tend", tend, "Final time");
    app.add_option("--dt", dt, "Upper bound on the time step");
    app.add_option("--out", out, "Output directory (fallback: $KACLAB_OUT)");
    app.add_option("--fit-window", window, "Decay-fit window LO:HI");
    app.add_option("--config", config_file, "JSON configuration file");
    app.add_flag("--all-presets", all, "Run all five presets into subdirectories of the output directory");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        return {RunConfig{}, app.help()};
    } catch (const CLI::ParseError& e) {
        throw ConfigError(std::string("arguments: ") + e.what());
    }

    RunConfig cfg;
    bool out_from_file = false;
    if (config_file) {
        std::ifstream in(*config_file);
        if (!in)
            throw ConfigError("config: cannot open " + *config_file);
        Json j;
        try {
            j = Json::parse(in);
        } catch (const Json::parse_error& e) {
            throw ConfigError("config: " + *config_file + ": " + e.what());
        }
        apply_config_json(cfg, j);
        out_from_file = j.contains("output_dir");
    }

    if (preset) {
        cfg.preset = preset;
        cfg.custom_initial.reset();
    }
    if (initial) {
        cfg.custom_initial = initial;
        if (!preset)
            cfg.preset.reset();
    }
    if (vmax)
        cfg.v_max = *vmax;
    if (cells)
        cfg.n_cells = *cells;
    if (tend) {
        cfg.scheme.t_end = *tend;
        cfg.t_end_set = true;
    }
    if (dt) {
        cfg.scheme.dt_max = *dt;
        cfg.scheme.dt_initial = std::min(cfg.scheme.dt_initial, *dt);
    }
    if (window)
        cfg.fit_window = parse_window(*window, "--fit-window");
    if (all) {
        cfg.all_presets = true;
        cfg.preset.reset();
    }
    if (out)
        cfg.output_dir = *out;
    else if (!out_from_file)
        if (auto e = env("KACLAB_OUT"); e && !e->empty())
            cfg.output_dir = *e;

    cfg.validate();
    return {cfg, std::nullopt};
}

Json config_to_json(const RunConfig& cfg)
{
    Json j;
    j["preset"] = cfg.preset ? Json(*cfg.preset) : Json(nullptr);
    j["initial"] = cfg.custom_initial ? Json(*cfg.custom_initial) : Json(nullptr);
    j["grid"] = {{"v_max", cfg.v_max}, {"n_cells", cfg.n_cells}};
    const auto& s = cfg.scheme;
    j["scheme"] = {{"dt_initial", s.dt_initial},
                   {"dt_max", s.dt_max},
                   {"safety", s.safety},
                   {"dt_growth", s.dt_growth},
                   {"max_rejects_per_step", s.max_rejects_per_step},
                   {"t_end", cfg.effective_t_end()},
                   {"output_interval", s.output_interval},
                   {"positivity_floor", s.positivity_floor}};
    j["fit_window"] = cfg.fit_window ? Json::array({cfg.fit_window->t_lo, cfg.fit_window->t_hi}) : Json(nullptr);
    j["output_dir"] = cfg.output_dir;
    const auto& t = cfg.tolerances;
    j["tolerances"] = {
        {"prop_A", {{"tol_rel", t.prop_A.tol_rel}, {"tol_abs_scale", t.prop_A.tol_abs_scale}}},
        {"D_inequality", {{"tol_rel", t.d_inequality.tol_rel}, {"relative_floor", t.d_inequality.relative_floor}}},
        {"conservation",
         {{"mass_rel", t.conservation.mass_rel},
          {"energy_rel", t.conservation.energy_rel},
          {"entropy_step_rel", t.conservation.entropy_step_rel},
          {"entropy_record_rel", t.conservation.entropy_record_rel},
          {"relative_entropy_rel", t.conservation.relative_entropy_rel},
          {"ckp_rel", t.conservation.ckp_rel},
          {"l2_gap", t.conservation.l2_gap}}}};
    j["smallness_threshold"] = cfg.smallness_threshold;
    j["profile_every"] = cfg.profile_every;
    return j;
}

}  // namespace kaclab
