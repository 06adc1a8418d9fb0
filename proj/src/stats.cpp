#include "nprach/stats.hpp"

#include "nprach/errors.hpp"

#include <algorithm>
#include <cmath>

namespace nprach {

double empirical_quantile(std::vector<double> values, double p)
{
    if (values.empty())
        throw ValidationError("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0))
        throw ValidationError("quantile probability outside [0, 1]");
    std::sort(values.begin(), values.end());
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

}  // namespace nprach
