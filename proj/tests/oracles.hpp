#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the library's signal-processing paths.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// Gold sequence written as the two array recurrences
//   x1(n+31) = x1(n+3) ^ x1(n),  x2(n+31) = x2(n+3) ^ x2(n+2) ^ x2(n+1) ^ x2(n)
// with c(n) = x1(n+1600) ^ x2(n+1600).
inline std::vector<std::uint8_t> gold(std::uint32_t c_init, std::size_t count)
{
    const std::size_t nc = 1600;
    const std::size_t len = nc + count + 31;
    std::vector<std::uint8_t> x1(len, 0), x2(len, 0);
    x1[0] = 1;
    for (int i = 0; i < 31; ++i)
        x2[i] = (c_init >> i) & 1u;
    for (std::size_t n = 0; n + 31 < len; ++n) {
        x1[n + 31] = x1[n + 3] ^ x1[n];
        x2[n + 31] = x2[n + 3] ^ x2[n + 2] ^ x2[n + 1] ^ x2[n];
    }
    std::vector<std::uint8_t> c(count);
    for (std::size_t n = 0; n < count; ++n)
        c[n] = x1[n + nc] ^ x2[n + nc];
    return c;
}

// Stream of the first register alone (second register all zero).
inline std::vector<std::uint8_t> x1_stream(std::size_t count)
{
    return gold(0, count);
}

// Direct O(N) single-bin DFT.
inline cd dft_bin(const std::vector<cd>& x, std::size_t offset, int n, int k)
{
    cd acc{};
    for (int i = 0; i < n; ++i)
        acc += x[offset + i] * std::polar(1.0, -2.0 * kPi * k * i / n);
    return acc;
}

// Full naive DFT.
inline std::vector<cd> dft(const std::vector<cd>& x, bool inverse = false)
{
    const std::size_t n = x.size();
    std::vector<cd> out(n);
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) {
        cd acc{};
        for (std::size_t i = 0; i < n; ++i)
            acc += x[i] * std::polar(1.0, sign * 2.0 * kPi * static_cast<double>((k * i) % n) / static_cast<double>(n));
        out[k] = acc;
    }
    return out;
}

// Fractional delay by band-limited upsampling: interpolate by `factor` with a
// zero-padded spectrum, shift by an integer number of fine samples
// (delay * factor must be integral), then decimate. Circular, like the
// periodic extension it models.
inline std::vector<cd> upsampled_shift(const std::vector<cd>& x, double delay, int factor)
{
    const std::size_t n = x.size();
    const auto spec = dft(x);
    const std::size_t m = n * factor;
    std::vector<cd> padded(m);
    for (std::size_t k = 0; k < n; ++k) {
        if (2 * k < n)
            padded[k] = spec[k];
        else if (2 * k > n)
            padded[m - (n - k)] = spec[k];
    }
    const auto fine = dft(padded, true);
    const auto shift = static_cast<long long>(std::llround(delay * factor));
    std::vector<cd> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const long long src = (static_cast<long long>(i * factor) - shift) % static_cast<long long>(m);
        out[i] = fine[static_cast<std::size_t>((src + static_cast<long long>(m)) % static_cast<long long>(m))] /
                 static_cast<double>(n);
    }
    return out;
}

// Asymptotic Kolmogorov-Smirnov p-value for statistic d over n samples.
inline double ks_pvalue(double d, std::size_t n)
{
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j)
        sum += 2.0 * (j % 2 ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
    return std::clamp(sum, 0.0, 1.0);
}

// KS statistic of samples against the Rayleigh CDF with E[r^2] = power.
inline double ks_rayleigh(std::vector<double> r, double power)
{
    std::sort(r.begin(), r.end());
    const double n = static_cast<double>(r.size());
    double d = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double cdf = 1.0 - std::exp(-r[i] * r[i] / power);
        d = std::max({d, cdf - i / n, (i + 1) / n - cdf});
    }
    return d;
}

// Upper bound of the two-sided binomial confidence interval via the normal
// approximation with continuity correction.
inline double binomial_upper(double p, std::size_t n, double z)
{
    return p + z * std::sqrt(p * (1.0 - p) / static_cast<double>(n)) + 0.5 / static_cast<double>(n);
}

}  // namespace oracle
