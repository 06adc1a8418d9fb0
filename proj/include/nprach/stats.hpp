#pragma once

#include <vector>

namespace nprach {

// Empirical quantile with linear interpolation between order statistics
// (position p * (n - 1)). Throws on an empty sample or p outside [0, 1].
double empirical_quantile(std::vector<double> values, double p);

}  // namespace nprach
