#include "kaclab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "kaclab/errors.hpp"

namespace kaclab {

std::string format_real(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string profile_csv(const DistributionState<double>& state)
{
    std::string out = "v,f\n";
    const auto& v = state.grid().centers();
    for (Index i = 0; i < state.size(); ++i)
        out += format_real(v[i]) + "," + format_real(state[i]) + "\n";
    return out;
}

void write_profile_csv(const std::filesystem::path& path, const DistributionState<double>& state)
{
    write_text_file(path, profile_csv(state));
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& token, const std::string& where)
{
    std::size_t used = 0;
    double x = 0;
    try {
        x = std::stod(token, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != token.size())
        throw ValidationError(where + ": not a number: '" + token + "'");
    return x;
}

}  // namespace

std::vector<std::pair<double, double>> read_profile_table(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("initial: cannot open " + path.string());
    std::vector<std::pair<double, double>> rows;
    std::string line;
    long lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#')
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ValidationError("initial: line " + std::to_string(lineno) + ": expected two comma-separated fields");
        const std::string a = trim(line.substr(0, comma));
        const std::string b = trim(line.substr(comma + 1));
        if (!header_seen) {
            header_seen = true;
            if (a == "v" && b == "f")
                continue;
        }
        const std::string where = "initial: line " + std::to_string(lineno);
        const double v = parse_number(a, where);
        const double f = parse_number(b, where);
        if (!std::isfinite(v) || !std::isfinite(f))
            throw ValidationError(where + ": non-finite value");
        if (f < 0)
            throw ValidationError(where + ": f must be nonnegative");
        if (!rows.empty() && !(v > rows.back().first))
            throw ValidationError(where + ": v must be strictly increasing");
        rows.emplace_back(v, f);
    }
    if (rows.size() < 2)
        throw ValidationError("initial: need at least two rows in " + path.string());
    return rows;
}

DistributionState<double> interpolate_profile(const std::vector<std::pair<double, double>>& table,
                                              const VelocityGrid<double>& grid)
{
    ArrayX<double> f = ArrayX<double>::Zero(grid.size());
    std::size_t k = 0;
    for (Index i = 0; i < grid.size(); ++i) {
        const double v = grid.centers()[i];
        if (v < table.front().first || v > table.back().first)
            continue;
        while (k + 2 < table.size() && table[k + 1].first < v)
            ++k;
        const auto [v0, f0] = table[k];
        const auto [v1, f1] = table[k + 1];
        const double w = (v - v0) / (v1 - v0);
        f[i] = (1 - w) * f0 + w * f1;
    }
    return DistributionState<double>(grid, std::move(f));
}

const std::vector<std::string>& timeseries_columns()
{
    static const std::vector<std::string> cols = {"t", "m", "e", "A", "B", "l2_sq", "weighted_l2_sq",
                                                  "H", "H_rel", "D", "l1_dist_eq", "dt", "accepts", "rejects"};
    return cols;
}

std::string timeseries_csv(const TimeSeries<double>& series)
{
    std::ostringstream out;
    const auto& cols = timeseries_columns();
    for (std::size_t i = 0; i < cols.size(); ++i)
        out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& r : series) {
        const double values[] = {r.time,          r.moments.mass,  r.moments.energy,        r.moments.coeff_A,
                                 r.moments.coeff_B, r.moments.l2_sq, r.moments.weighted_l2_sq, r.entropy.H,
                                 r.entropy.H_rel, r.entropy.D,     r.l1_dist_eq,            r.dt_used};
        for (double x : values)
            out << format_real(x) << ',';
        out << r.accepted_steps << ',' << r.rejected_steps << '\n';
    }
    return out.str();
}

namespace {

// JSON has no infinities; they are written as null.
Json real(double x)
{
    if (!std::isfinite(x))
        return nullptr;
    return x;
}

}  // namespace

Json to_json(const MomentSet<double>& ms)
{
    return Json{{"mass", real(ms.mass)},
                {"energy", real(ms.energy)},
                {"coeff_A", real(ms.coeff_A)},
                {"coeff_B", real(ms.coeff_B)},
                {"l1", real(ms.l1)},
                {"l2_sq", real(ms.l2_sq)},
                {"l3_cubed", real(ms.l3_cubed)},
                {"weighted_l2_sq", real(ms.weighted_l2_sq)}};
}

Json to_json(const BoseParameters<double>& p)
{
    return Json{{"lambda1", real(p.lambda1())}, {"fugacity", real(p.fugacity())}, {"lambda2", real(p.lambda2())}};
}

Json to_json(const SmallnessReport<double>& r)
{
    return Json{{"l2_condition", r.l2_condition}, {"ratio_condition", r.ratio_condition}, {"m3_over_e", real(r.m3_over_e)}};
}

Json to_json(const DecayFit<double>& fit)
{
    return Json{{"quantity", to_string(fit.quantity)},
                {"alpha_hat", real(fit.alpha_hat)},
                {"intercept", real(fit.intercept)},
                {"r_squared", real(fit.r_squared)},
                {"window", Json::array({real(fit.window.t_lo), real(fit.window.t_hi)})},
                {"n_points", fit.n_points}};
}

Json to_json(const CheckResult<double>& c)
{
    return Json{{"pass", c.pass},
                {"hard", c.hard},
                {"worst_time", real(c.worst_time)},
                {"worst_value", real(c.worst_value)},
                {"tolerance", real(c.tolerance)},
                {"evaluated", c.evaluated},
                {"violations", c.violations}};
}

Json to_json(const MonitorReport<double>& report)
{
    Json j = Json::object();
    for (const auto& [name, c] : report)
        j[name] = to_json(c);
    return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

}  // namespace kaclab
