#pragma once

#include "nprach/hopping.hpp"
#include "nprach/numerology.hpp"

#include <complex>
#include <vector>

namespace nprach {

using cdouble = std::complex<double>;

/// Unit-modulus symbols u[m], one per symbol group.
struct PreambleSequence {
    std::vector<cdouble> symbols;

    std::size_t size() const { return symbols.size(); }
};

/// Contiguous complex baseband samples.
struct ComplexBuffer {
    std::vector<cdouble> samples;
    double sample_rate_hz = 0.0;

    std::size_t size() const { return samples.size(); }
    bool operator==(const ComplexBuffer&) const = default;
};

PreambleSequence default_sequence(std::size_t groups);

// One symbol group: cyclic prefix followed by the repeated symbols of a single
// tone at grid bin band_offset + k, amplitude sqrt(E)/N.
ComplexBuffer group_samples(int k, cdouble symbol, const NprachConfig& cfg, const DerivedNumerology& num);

ComplexBuffer generate(const NprachConfig& cfg, const HoppingPattern& pattern, const PreambleSequence& seq);

double papr_db(const ComplexBuffer& buf);

}  // namespace nprach
