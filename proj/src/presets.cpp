#include "kaclab/presets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kaclab/errors.hpp"

namespace kaclab {

namespace {

void require_preset(int k)
{
    if (k < 1 || k > kPresetCount)
        throw ValidationError("preset: must be in 1.." + std::to_string(kPresetCount) + ", got " +
                              std::to_string(k));
}

// c / (exp((v - pi/2)^2 + 0.1) - 1)
double shifted_bose(double c, double v)
{
    const double x = v - std::numbers::pi / 2;
    return c / std::expm1(x * x + 0.1);
}

}  // namespace

double preset_value(int k, double v)
{
    require_preset(k);
    constexpr double pi = std::numbers::pi;
    switch (k) {
    case 1:
        return shifted_bose(0.1, v);
    case 2:
        return shifted_bose(1.0, v);
    case 3:
        return 5.0 * std::exp(-v * v / 2);
    case 4:
        return 8.0 * (std::exp(-(v + pi / 2) * (v + pi / 2)) + std::exp(-(v - pi / 2) * (v - pi / 2)));
    default: {
        // tent of height 5/2 on [-5pi/4, 5pi/4], vacuum outside
        if (std::abs(v) > 5 * pi / 4)
            return 0.0;
        return std::max(0.0, 2.5 - (2 / pi) * std::abs(v));
    }
    }
}

DistributionState<double> preset_initial(int k, const VelocityGrid<double>& grid)
{
    require_preset(k);
    ArrayX<double> f(grid.size());
    for (Index i = 0; i < grid.size(); ++i)
        f[i] = preset_value(k, grid.centers()[i]);
    return DistributionState<double>(grid, std::move(f));
}

double preset_default_t_end(int k)
{
    require_preset(k);
    return (k == 2 || k == 4) ? 2.0 : 10.0;
}

const char* preset_description(int k)
{
    require_preset(k);
    switch (k) {
    case 1:
        return "0.1/(exp((v-pi/2)^2+0.1)-1)";
    case 2:
        return "1/(exp((v-pi/2)^2+0.1)-1)";
    case 3:
        return "5 exp(-v^2/2)";
    case 4:
        return "8 [exp(-(v+pi/2)^2) + exp(-(v-pi/2)^2)]";
    default:
        return "5/2 - (2/pi)|v| on |v| <= 5pi/4, 0 elsewhere";
    }
}

}  // namespace kaclab
