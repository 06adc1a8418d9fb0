#pragma once

#include "nprach/numerology.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace nprach {

/// Subcarrier index per symbol group, relative to the first subcarrier of the
/// NPRACH band.
struct HoppingPattern {
    std::vector<int> indices;
    int start_subcarrier = 0;
    std::uint32_t cell_id = 0;

    std::size_t size() const { return indices.size(); }
    int operator[](std::size_t m) const { return indices[m]; }
};

inline constexpr int kHopBand = 12;

// Length-31 Gold sequence (x1 taps {31,3}, x2 taps {31,3,2,1}, 1600 warm-up).
std::vector<std::uint8_t> gold_bits(std::uint32_t cell_id, std::size_t count);

// Cell-common outer offsets f_0..f_{count-1}; f_0 = 0 and consecutive
// offsets always differ (mod 12).
std::vector<int> block_offsets(std::uint32_t cell_id, std::size_t count);
int block_offset(std::size_t t, std::uint32_t cell_id);

// The four subcarriers of one hop unit starting at `base`: +-1, +-6, then the
// mirrored +-1.
std::array<int, 4> unit_indices(int base);

int subcarrier_index(std::size_t m, int n0, std::uint32_t cell_id);

// Throws ValidationError unless band_subcarriers == 12 and 0 <= n0 < 12.
HoppingPattern full_pattern(const NprachConfig& cfg, int n0);

// Pattern built from explicit outer offsets (offsets.size() * 4 groups).
HoppingPattern pattern_from_offsets(int n0, const std::vector<int>& offsets);

// Violated hop-structure invariants, empty if the pattern conforms.
std::vector<std::string> check_pattern(const HoppingPattern& pattern);

// "m, index" per line.
std::string pattern_to_text(const HoppingPattern& pattern);

}  // namespace nprach
