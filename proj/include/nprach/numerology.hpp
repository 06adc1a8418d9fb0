#pragma once

#include "nprach/keyvalue.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nprach {

enum class CpKind { Long, Short };

std::string to_string(CpKind kind);
CpKind parse_cp_kind(const std::string& text);

/// Preamble numerology and cell parameters. Defaults are the 3.75 kHz
/// single-tone NPRACH format with the long cyclic prefix.
struct NprachConfig {
    int fft_size = 64;
    double subcarrier_spacing_hz = 3750.0;
    double system_bandwidth_hz = 180000.0;
    CpKind cp_kind = CpKind::Long;
    int repeats_per_group = 5;
    int preamble_groups = 128;
    int band_subcarriers = 12;
    int band_offset = 0;
    std::uint32_t cell_id = 0;
    double tx_energy_per_sample = 1.0;

    bool operator==(const NprachConfig&) const = default;
};

struct DerivedNumerology {
    double sample_rate_hz = 0.0;
    int cp_samples = 0;
    int group_samples = 0;
    std::size_t preamble_samples = 0;
    double preamble_duration_s = 0.0;

    bool operator==(const DerivedNumerology&) const = default;
};

// One human-readable message per violated invariant; empty iff valid.
std::vector<std::string> validate(const NprachConfig& cfg);

// Throws ValidationError listing every violation.
void require_valid(const NprachConfig& cfg);

// Long CP spans exactly one symbol (266.7 us at 3.75 kHz), short CP a quarter
// of one (66.7 us), so both are integral sample counts.
DerivedNumerology derive(const NprachConfig& cfg);

// Flat key/value mapping. Unknown keys are rejected.
const std::vector<std::string>& config_keys();
NprachConfig config_from_keyvalue(const KeyValueFile& kv, NprachConfig base = {});
NprachConfig load_config(const std::string& path);
KeyValueFile config_to_keyvalue(const NprachConfig& cfg);

}  // namespace nprach
