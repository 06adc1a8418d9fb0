#include "nprach/waveform.hpp"

#include "nprach/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nprach {

PreambleSequence default_sequence(std::size_t groups)
{
    if (groups == 0)
        throw ValidationError("preamble sequence length must be >= 1");
    return PreambleSequence{std::vector<cdouble>(groups, cdouble{1.0, 0.0})};
}

ComplexBuffer group_samples(int k, cdouble symbol, const NprachConfig& cfg, const DerivedNumerology& num)
{
    const int n_fft = cfg.fft_size;
    const int bin = cfg.band_offset + k;
    if (k < 0 || bin >= n_fft)
        throw ValidationError("subcarrier " + std::to_string(k) + " outside the " + std::to_string(n_fft) +
                              "-bin grid");

    ComplexBuffer out;
    out.sample_rate_hz = num.sample_rate_hz;
    out.samples.resize(static_cast<std::size_t>(num.group_samples));
    const cdouble amp = std::sqrt(cfg.tx_energy_per_sample) / n_fft * symbol;
    for (int j = 0; j < num.group_samples; ++j) {
        // n runs from -N_cp; reducing bin*n mod N keeps the phase argument exact.
        const int n = j - num.cp_samples;
        const int r = ((bin * n) % n_fft + n_fft) % n_fft;
        const double phase = 2.0 * std::numbers::pi * r / n_fft;
        out.samples[j] = amp * cdouble{std::cos(phase), std::sin(phase)};
    }
    return out;
}

ComplexBuffer generate(const NprachConfig& cfg, const HoppingPattern& pattern, const PreambleSequence& seq)
{
    require_valid(cfg);
    const auto groups = static_cast<std::size_t>(cfg.preamble_groups);
    if (pattern.size() != groups || seq.size() != groups)
        throw ValidationError("pattern/sequence length (" + std::to_string(pattern.size()) + "/" +
                              std::to_string(seq.size()) + ") does not match L = " + std::to_string(groups));
    const auto num = derive(cfg);
    ComplexBuffer out;
    out.sample_rate_hz = num.sample_rate_hz;
    out.samples.reserve(num.preamble_samples);
    for (std::size_t m = 0; m < groups; ++m) {
        const auto g = group_samples(pattern[m], seq.symbols[m], cfg, num);
        out.samples.insert(out.samples.end(), g.samples.begin(), g.samples.end());
    }
    return out;
}

double papr_db(const ComplexBuffer& buf)
{
    if (buf.samples.empty())
        throw ValidationError("papr_db of an empty buffer");
    double peak = 0.0;
    double sum = 0.0;
    for (const auto& s : buf.samples) {
        const double p = std::norm(s);
        peak = std::max(peak, p);
        sum += p;
    }
    const double mean = sum / static_cast<double>(buf.samples.size());
    return 10.0 * std::log10(peak / mean);
}

}  // namespace nprach
